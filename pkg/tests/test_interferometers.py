import cmath
import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pathspace import interferometers as itf
from pathspace.paths import congruent, stream_sum
from pathspace.phasor import REFLECTION, Phasor, ValidationError
from pathspace.sqm import beamsplitter_unitary, sqm_mzi, sqm_rt_joint

angles = st.floats(-10.0, 10.0, allow_nan=False)

# --- Mach-Zehnder ---------------------------------------------------------------


def test_square_mzi_probabilities():
    p1, p2, pa = itf.mzi_probabilities(itf.MziSpec(0.1, 1e-6))
    assert p1 == pytest.approx(0.0, abs=1e-12)
    assert p2 == pytest.approx(1.0, abs=1e-12)
    assert pa == 0.0


def test_mzi_route_factors():
    routes = {(plan.arm, plan.detector): plan.reflection_count for plan, _ in itf.mzi_routes(itf.MziSpec())}
    assert sorted(v for (arm, det), v in routes.items() if det == "D1") == [1, 3]
    assert sorted(v for (arm, det), v in routes.items() if det == "D2") == [2, 2]


def test_mzi_amplitude_structure():
    spec = itf.MziSpec()
    a1, a2 = itf.mzi_amplitudes(spec)
    assert a1.modulus < 1e-12
    theta = itf.path_phase(itf.mzi_arm_path(spec, "upper"), spec.wavelength)
    expected = 2 * cmath.exp(1j * theta) * cmath.exp(1j * math.pi)
    assert abs(complex(a2) - expected) < 1e-9


def test_route_plan_must_match_geometry():
    with pytest.raises(ValidationError):
        itf.RoutePlan("upper", 2, "D1")


@pytest.mark.parametrize(
    "block, probe, expected",
    [("lower", False, (0.25, 0.25, 0.5)), ("upper", False, (0.25, 0.25, 0.5)), (None, True, (0.5, 0.5, 0.0))],
)
def test_mzi_disturbed_examples(block, probe, expected):
    got = itf.mzi_disturbed(itf.MziSpec(blocked_arm=block, which_path_probe=probe))
    assert got == pytest.approx(expected, abs=1e-12)


def test_probe_matches_decohered_matrix_oracle():
    # each arm alone is a single input mode of the second beamsplitter
    u = beamsplitter_unitary()
    mix = 0.5 * np.abs(u[:, 0]) ** 2 + 0.5 * np.abs(u[:, 1]) ** 2
    got = itf.mzi_disturbed(itf.MziSpec(which_path_probe=True))
    assert got[:2] == pytest.approx(tuple(mix), abs=1e-12)


def test_blocked_arm_matches_sqm_oracle():
    for arm in ("upper", "lower"):
        assert itf.mzi_disturbed(itf.MziSpec(blocked_arm=arm)) == pytest.approx(sqm_mzi(0.0, arm), abs=1e-9)


def test_mzi_misuse_raises():
    with pytest.raises(ValidationError):
        itf.mzi_disturbed(itf.MziSpec(blocked_arm="both"))
    with pytest.raises(ValidationError):
        itf.mzi_disturbed(itf.MziSpec())
    with pytest.raises(ValidationError):
        itf.mzi_amplitudes(itf.MziSpec(blocked_arm="upper"))
    with pytest.raises(ValidationError):
        itf.MziSpec(side_length=0.0)
    with pytest.raises(ValidationError):
        itf.MziSpec(blocked_arm="left")


@settings(max_examples=50)
@given(
    st.floats(1e-4, 10.0),
    st.floats(1e-7, 1e-5),
    st.sampled_from([None, "upper", "lower"]),
    st.booleans(),
)
def test_mzi_probabilities_sum_to_one_and_match_oracle(side, lam, block, probe):
    spec = itf.MziSpec(side, lam, block, probe)
    p = itf.mzi_probabilities(spec)
    assert sum(p) == pytest.approx(1.0, abs=1e-12)
    if block is None and not probe:
        assert p == pytest.approx(sqm_mzi(0.0), abs=1e-9)


# --- bomb test ----------------------------------------------------------------


def test_ifm_all_live():
    n = 10**6
    t = itf.ifm_report(n, 1.0, 11)
    assert t["exploded"] / n == pytest.approx(0.5, abs=0.002)
    assert t["certified_live_via_D1"] / n == pytest.approx(0.25, abs=0.002)
    assert t["exploded"] + t["certified_live_via_D1"] + t["D2_inconclusive"] == n


def test_ifm_all_duds():
    t = itf.ifm_report(10**5, 0.0, 11)
    assert t["exploded"] == 0 and t["certified_live_via_D1"] == 0
    assert t["dud_D2"] == 10**5 and t["dud_D1"] == 0


def test_ifm_independent_of_threads():
    a = itf.ifm_report(300_000, 0.3, 5, threads=1)
    b = itf.ifm_report(300_000, 0.3, 5, threads=4)
    assert a == b


@pytest.mark.parametrize("n, frac", [(0, 0.5), (10, -0.1), (10, 1.5)])
def test_ifm_validation(n, frac):
    with pytest.raises(ValidationError):
        itf.ifm_report(n, frac, 1)


# --- two-particle interferometer ------------------------------------------------

BASE = itf.RaritySpec(n_source_points=128)


@pytest.fixture(scope="module")
def streams():
    return itf.rt_streams(BASE)


def test_rt_lower_streams_congruent(streams):
    assert all(congruent(a, b) for a, b in zip(streams.Y.paths, streams.Yp.paths))
    assert itf.check_congruence(BASE)


def test_rt_lower_sums_equal(streams):
    assert stream_sum(streams.Y).isclose(stream_sum(streams.Yp), abs_tol=1e-12)


def test_rt_upper_stream_is_shifted_lower(streams):
    alpha = 0.9
    s = itf.with_settings(streams, alpha, 0.0)
    sums = itf.rt_stream_sums(s)
    assert sums["X"].isclose(sums["Y"] * Phasor.from_polar(1.0, alpha), abs_tol=1e-12)


def test_rt_same_amplitude_examples(streams):
    r = stream_sum(streams.Y).modulus
    assert itf.rt_amplitude_same(streams).modulus == pytest.approx(2 * r * r, rel=1e-12)
    anti = itf.with_settings(streams, math.pi, 0.0)
    assert itf.rt_amplitude_same(anti).modulus < 1e-9 * r * r


@pytest.mark.parametrize(
    "alpha, beta, expected",
    [(0.0, 0.0, 1.0), (math.pi, 0.0, 0.0), (2 * math.pi / 3, 0.0, 0.25)],
)
def test_rt_joint_probability_examples(streams, alpha, beta, expected):
    s = itf.with_settings(streams, alpha, beta)
    assert itf.rt_joint_probability(s) == pytest.approx(expected, abs=1e-12)
    assert itf.rt_joint_probability(s) == pytest.approx(sqm_rt_joint(alpha, beta), abs=1e-9)


def test_rt_locality_form_and_addends(streams):
    beta_sweep = np.linspace(0.0, 2 * math.pi, 7)
    for a in np.linspace(0.0, 2 * math.pi, 5):
        lefts = []
        for b in beta_sweep:
            s = itf.with_settings(streams, a, b)
            assert itf.rt_locality_form(s).isclose(itf.rt_amplitude_same(s), abs_tol=1e-12)
            left, right = itf.rt_locality_addends(s)
            lefts.append(left)
            assert itf.rt_locality_form(s) == REFLECTION * (left + right)
        assert all(x == lefts[0] for x in lefts)
    rights = [itf.rt_locality_addends(itf.with_settings(streams, a, 1.1))[1] for a in beta_sweep]
    assert all(x == rights[0] for x in rights)


@settings(max_examples=40, deadline=None)
@given(angles, angles)
def test_rt_same_plus_different_is_one(a, b):
    s = itf.with_settings(itf.rt_streams(BASE), a, b)
    assert itf.rt_joint_probability(s) + itf.rt_different_probability(s) == pytest.approx(1.0, abs=1e-9)


def test_rt_depends_only_on_difference(streams):
    rng = np.random.default_rng(3)
    for a, b, shift in rng.uniform(-2 * math.pi, 2 * math.pi, (20, 3)):
        p = itf.rt_joint_probability(itf.with_settings(streams, a, b))
        q = itf.rt_joint_probability(itf.with_settings(streams, a + shift, b + shift))
        assert p == pytest.approx(q, abs=1e-9)


def test_rt_refinement_invariance():
    for a, b in [(0.3, 2.0), (1.0, 4.0), (5.0, 0.1)]:
        coarse = itf.rt_joint_probability(itf.RaritySpec(a, b, n_source_points=256))
        fine = itf.rt_joint_probability(itf.RaritySpec(a, b, n_source_points=512))
        assert abs(coarse - fine) < 1e-9


@pytest.mark.parametrize(
    "geometry",
    [
        itf.RaritySpec(n_source_points=97, source_half_width=4e-7, mirror_height=3e-3),
        itf.RaritySpec(n_source_points=2, beamsplitter_distance=2.5e-2, wavelength=6.3e-7),
    ],
)
def test_rt_congruence_other_geometries(geometry):
    sums = itf.rt_stream_sums(geometry)
    assert sums["Y"].isclose(sums["Y'"], abs_tol=1e-12)


def test_rarity_spec_validation():
    with pytest.raises(ValidationError):
        itf.RaritySpec(n_source_points=1)
    with pytest.raises(ValidationError):
        itf.RaritySpec(source_half_width=1.0, mirror_height=0.5)
    with pytest.raises(ValidationError):
        itf.RaritySpec(alpha=math.inf)


def test_rt_normalization_mismatch_flagged(streams):
    with pytest.raises(ValidationError):
        itf.rt_joint_probability(streams, normalization_factor=1.0)


def test_sweep_csv():
    rows = itf.rt_sweep(itf.settings_grid(3), BASE)
    buf = io.StringIO()
    itf.write_sweep_csv(rows, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "alpha,beta,p_same_sp,p_same_sqm,abs_diff"
    assert len(lines) == 10
    assert max(r["abs_diff"] for r in rows) < 1e-9
