"""Path-sum interferometry: phasor sums over families of paths.

The amplitude for an outcome is the sum of ``exp(i 2 pi L / lambda)`` over
the paths that reach it, multiplied by ``i`` per reflection.  On top of that
core sit a Mach-Zehnder and bomb-test model, a two-particle interferometer
built from shadow streams, a classical pointer toy, an event-level twin-pair
Monte Carlo, and CHSH tooling that compares them all.
"""

from .phasor import (
    ONE,
    REFLECTION,
    ZERO,
    NormalizationError,
    Phasor,
    ValidationError,
    multiply,
    phasor_from_phase,
    probability,
    segment_phase,
    sum_phasors,
)
from .paths import (
    PathPolyline,
    ShadowStream,
    congruent,
    cornu_partial_sums,
    mirror_paths,
    path_phase,
    restricted_sum,
    stationary_phase_shares,
    stream_sum,
    symmetric_mirror_stream,
    winding_number,
)
from .interferometers import (
    MziSpec,
    RaritySpec,
    ifm_report,
    mzi_amplitudes,
    mzi_probabilities,
    rt_amplitude_different,
    rt_amplitude_same,
    rt_joint_probability,
    rt_locality_form,
    rt_streams,
    rt_sweep,
    with_settings,
)
from .sqm import StateVector, sqm_mzi, sqm_rt_joint
from .toy import toy_correlation, toy_monte_carlo, toy_same_probability
from .events import (
    BeamsplitterParam,
    DegenerateSumError,
    HiddenVariables,
    WingInput,
    fidelity_report,
    run_trials,
    wing_decide,
)
from .bell import Backend, chsh, chsh_grid_max, chsh_maximize, mermin_average
from .cli import check_all, run

__version__ = "0.1.0"
