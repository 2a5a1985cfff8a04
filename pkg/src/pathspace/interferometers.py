"""Path-sum models of the single- and two-particle interferometers.

Square Mach-Zehnder
-------------------
The photon enters BS1 at the origin travelling in +y.  Transmission sends it
up the *upper* arm (mirror at ``(0, s)``), reflection along the *lower* arm
(mirror at ``(s, 0)``); both arms meet again at BS2 ``(s, s)``.  D1 sits on
the +x exit of BS2, D2 on the +y exit.  Every reflection, at a mirror or a
beamsplitter, contributes a factor ``i``; counting them per route gives::

    D1: upper 1, lower 3        D2: upper 2, lower 2

Rarity-Tapster
--------------
An extended source on the y axis sends paths to a ceiling mirror (``y = +H``)
and a floor mirror (``y = -H``) on both sides, reflecting them onto
beamsplitter A at ``(-D, 0)`` and A' at ``(D, 0)``.  The four families are
X (left, ceiling), Y (left, floor), X' (right, ceiling), Y' (right, floor).
Phase shifter ``alpha`` acts on X, ``beta`` on X'.  Y is the floor image of X
and the right side is the mirror image of the left, so corresponding paths
are exactly congruent.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, TextIO

import numpy as np

from . import _rng
from .paths import PathPolyline, ShadowStream, congruent, path_phase, stream_sum
from .phasor import (
    ONE,
    REFLECTION,
    TWO_PI,
    Phasor,
    ValidationError,
    phasor_from_phase,
    probability,
    sum_phasors,
)
from .sqm import sqm_rt_joint

ARMS = ("upper", "lower")
DETECTORS = ("D1", "D2")

# Reflection counts per (arm, detector) for the square geometry above.
REFLECTION_TABLE = {
    ("upper", "D1"): 1,
    ("lower", "D1"): 3,
    ("upper", "D2"): 2,
    ("lower", "D2"): 2,
}

# Probabilities below this are exact zeros that picked up rounding noise.
EXACT_ZERO = 1e-12


@dataclass(frozen=True)
class MziSpec:
    side_length: float = 0.1
    wavelength: float = 1e-6
    blocked_arm: str | None = None
    which_path_probe: bool = False

    def __post_init__(self):
        if not self.side_length > 0:
            raise ValidationError(f"side_length must be > 0, got {self.side_length}")
        if not self.wavelength > 0:
            raise ValidationError(f"wavelength must be > 0, got {self.wavelength}")
        if self.blocked_arm == "none":
            object.__setattr__(self, "blocked_arm", None)
        if self.blocked_arm not in (None, "upper", "lower", "both"):
            raise ValidationError(f"unknown blocked_arm {self.blocked_arm!r}")

    @property
    def disturbed(self) -> bool:
        return self.blocked_arm is not None or self.which_path_probe


@dataclass(frozen=True)
class RoutePlan:
    arm: str
    reflection_count: int
    detector: str

    def __post_init__(self):
        if REFLECTION_TABLE.get((self.arm, self.detector)) != self.reflection_count:
            raise ValidationError(f"route {self} does not match the square geometry")


def mzi_arm_path(spec: MziSpec, arm: str) -> PathPolyline:
    """Polyline from BS1 to BS2 along one arm."""
    s = spec.side_length
    corner = (0.0, s) if arm == "upper" else (s, 0.0)
    return PathPolyline(((0.0, 0.0), corner, (s, s)), homotopy_tag=arm)


def mzi_routes(spec: MziSpec) -> list[tuple[RoutePlan, PathPolyline]]:
    return [
        (RoutePlan(arm, REFLECTION_TABLE[(arm, det)], det), mzi_arm_path(spec, arm))
        for det in DETECTORS
        for arm in ARMS
    ]


def _route_amplitude(plan: RoutePlan, path: PathPolyline, wavelength: float) -> Phasor:
    amp = phasor_from_phase(path_phase(path, wavelength))
    for _ in range(plan.reflection_count):
        amp = amp * REFLECTION
    return amp


def mzi_amplitudes(spec: MziSpec) -> tuple[Phasor, Phasor]:
    """Unnormalized amplitudes ``(amp_D1, amp_D2)`` for the undisturbed interferometer."""
    if spec.disturbed:
        raise ValidationError("mzi_amplitudes needs an undisturbed spec; use mzi_disturbed")
    per_detector = {d: [] for d in DETECTORS}
    for plan, path in mzi_routes(spec):
        per_detector[plan.detector].append(_route_amplitude(plan, path, spec.wavelength))
    return sum_phasors(per_detector["D1"]), sum_phasors(per_detector["D2"])


def mzi_probabilities(spec: MziSpec) -> tuple[float, float, float]:
    """``(P_D1, P_D2, P_absorbed)`` for any spec, disturbed or not."""
    if spec.disturbed:
        return mzi_disturbed(spec)
    a1, a2 = mzi_amplitudes(spec)
    norm = float(len(ARMS) ** 2)
    return probability(a1, norm), probability(a2, norm), 0.0


def mzi_disturbed(spec: MziSpec) -> tuple[float, float, float]:
    """Detector probabilities once one arm's shadow contribution is removed.

    The tangible takes each arm half the time.  A blocked arm absorbs it; a
    which-path probe leaves both arms open but each trial then carries only
    the route of the arm actually taken, so the two arms add incoherently.
    """
    if spec.blocked_arm == "both":
        raise ValidationError("both arms blocked: no photon can reach a detector")
    if not spec.disturbed:
        raise ValidationError("mzi_disturbed needs a blocked arm or a which-path probe")
    routes = mzi_routes(spec)
    p_det = {d: 0.0 for d in DETECTORS}
    absorbed = 0.0
    for arm in ARMS:
        weight = 1.0 / len(ARMS)
        if arm == spec.blocked_arm:
            absorbed += weight
            continue
        amps = {
            plan.detector: _route_amplitude(plan, path, spec.wavelength)
            for plan, path in routes
            if plan.arm == arm
        }
        norm = sum(a.modulus ** 2 for a in amps.values())
        for det, a in amps.items():
            p_det[det] += weight * probability(a, norm)
    return p_det["D1"], p_det["D2"], absorbed


def ifm_report(
    n_bombs: int,
    live_fraction: float,
    seed: int,
    *,
    side_length: float = 0.1,
    wavelength: float = 1e-6,
    threads: int = 1,
) -> dict[str, int]:
    """Monte Carlo bomb test with the bomb in the lower arm.

    Live bombs absorb the lower-arm photon; duds let both arms interfere.
    """
    if n_bombs < 1:
        raise ValidationError(f"n_bombs must be >= 1, got {n_bombs}")
    if not 0.0 <= live_fraction <= 1.0:
        raise ValidationError(f"live_fraction must be in [0, 1], got {live_fraction}")
    live = np.array(mzi_disturbed(MziSpec(side_length, wavelength, blocked_arm="lower")))
    dud = np.array(mzi_probabilities(MziSpec(side_length, wavelength)))
    # outcome order: D1, D2, absorbed
    cum_live = np.cumsum(np.where(live < EXACT_ZERO, 0.0, live))
    cum_dud = np.cumsum(np.where(dud < EXACT_ZERO, 0.0, dud))

    def run(rng: np.random.Generator, m: int) -> np.ndarray:
        is_live = rng.random(m) < live_fraction
        u = rng.random(m)
        out_live = np.searchsorted(cum_live / cum_live[-1], u, side="right")
        out_dud = np.searchsorted(cum_dud / cum_dud[-1], u, side="right")
        counts = np.zeros((2, 3), dtype=np.int64)
        counts[0] = np.bincount(out_live[is_live], minlength=3)
        counts[1] = np.bincount(out_dud[~is_live], minlength=3)
        return counts

    counts = sum(_rng.map_chunks(run, seed, _rng.IFM, n_bombs, threads=threads))
    return {
        "n_bombs": n_bombs,
        "exploded": int(counts[0, 2]),
        "certified_live_via_D1": int(counts[0, 0]),
        "D2_inconclusive": int(counts[0, 1]),
        "dud_D2": int(counts[1, 1]),
        "dud_D1": int(counts[1, 0]),
    }


# --------------------------------------------------------------------------
# Rarity-Tapster two-particle interferometer


@dataclass(frozen=True)
class RaritySpec:
    alpha: float = 0.0
    beta: float = 0.0
    n_source_points: int = 512
    wavelength: float = 1e-6
    source_half_width: float = 2e-7
    mirror_height: float = 5e-3
    beamsplitter_distance: float = 1e-2

    def __post_init__(self):
        if self.n_source_points < 2:
            raise ValidationError("n_source_points must be >= 2")
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise ValidationError("phase settings must be finite")
        for name in ("wavelength", "mirror_height", "beamsplitter_distance"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be > 0")
        if not 0 <= self.source_half_width < self.mirror_height:
            raise ValidationError("source segment must lie strictly between the mirrors")

    @property
    def source_segment(self):
        w = self.source_half_width
        return ((0.0, -w), (0.0, w))


class RtStreams(NamedTuple):
    X: ShadowStream
    Y: ShadowStream
    Xp: ShadowStream
    Yp: ShadowStream


def _source_heights(spec: RaritySpec) -> list[float]:
    # integer numerators make heights k and n-1-k exact negatives of each other
    n = spec.n_source_points
    w = spec.source_half_width
    return [w * (2 * k - (n - 1)) / (n - 1) for k in range(n)]


def _ceiling_path(y: float, spec: RaritySpec, side: float, tag: str) -> PathPolyline:
    """Source ``(0, y)`` -> ceiling mirror -> beamsplitter on ``side`` (-1 left, +1 right)."""
    h, d = spec.mirror_height, spec.beamsplitter_distance
    t = (h - y) / (2 * h - y)
    return PathPolyline(((0.0, y), (side * d * t, h), (side * d, 0.0)), homotopy_tag=tag)


def _floor_path(y: float, spec: RaritySpec, side: float, tag: str) -> PathPolyline:
    """Floor image of the ceiling path from ``(0, y)``; starts at ``(0, -y)``."""
    ceiling = _ceiling_path(y, spec, side, tag)
    return PathPolyline(tuple((x, -yy) for x, yy in ceiling.vertices), homotopy_tag=tag)


def rt_streams(spec: RaritySpec) -> RtStreams:
    """The four shadow families X, Y, X', Y' for the given settings."""
    ys = _source_heights(spec)
    seg = spec.source_segment
    lam = spec.wavelength

    def family(make, side, label, shift):
        paths = tuple(make(y, spec, side, label) for y in ys)
        return ShadowStream(paths, lam, shift, label, seg)

    return RtStreams(
        X=family(_ceiling_path, -1.0, "X", spec.alpha),
        Y=family(_floor_path, -1.0, "Y", 0.0),
        Xp=family(_ceiling_path, 1.0, "X'", spec.beta),
        Yp=family(_floor_path, 1.0, "Y'", 0.0),
    )


def with_settings(streams: RtStreams, alpha: float, beta: float) -> RtStreams:
    """Same geometry, new phase-shifter settings (path phases are reused)."""
    return streams._replace(X=streams.X.with_phase_shift(alpha), Xp=streams.Xp.with_phase_shift(beta))


def _streams(obj: RaritySpec | RtStreams) -> RtStreams:
    return obj if isinstance(obj, RtStreams) else rt_streams(obj)


def rt_stream_sums(obj: RaritySpec | RtStreams) -> dict[str, Phasor]:
    s = _streams(obj)
    return {"X": stream_sum(s.X), "Y": stream_sum(s.Y), "X'": stream_sum(s.Xp), "Y'": stream_sum(s.Yp)}


def check_congruence(obj: RaritySpec | RtStreams, tol: float = 1e-12) -> bool:
    """Every Y path is congruent to its Y' partner and every X path to its X' partner."""
    s = _streams(obj)
    return all(congruent(a, b, tol) for a, b in zip(s.Y.paths, s.Yp.paths)) and all(
        congruent(a, b, tol) for a, b in zip(s.X.paths, s.Xp.paths)
    )


# Beamsplitter factor for (stream, output port): transmission 1, reflection i.
_LEFT_PORTS = {("X", "u"): ONE, ("X", "d"): REFLECTION, ("Y", "u"): REFLECTION, ("Y", "d"): ONE}
_RIGHT_PORTS = {("X'", "u"): ONE, ("X'", "d"): REFLECTION, ("Y'", "u"): REFLECTION, ("Y'", "d"): ONE}


def rt_amplitude(obj: RaritySpec | RtStreams, left: str, right: str) -> Phasor:
    """Joint amplitude for left detector ``left`` and right detector ``right``.

    The two tangibles travel either X with Y' or Y with X'; each pairing is a
    product of stream sums times the beamsplitter factors of its ports.
    """
    sums = rt_stream_sums(obj)
    term_xy = _LEFT_PORTS[("X", left)] * _RIGHT_PORTS[("Y'", right)] * (sums["X"] * sums["Y'"])
    term_yx = _RIGHT_PORTS[("X'", right)] * _LEFT_PORTS[("Y", left)] * (sums["X'"] * sums["Y"])
    return term_xy + term_yx


def rt_amplitude_same(obj: RaritySpec | RtStreams) -> Phasor:
    """``i<A|X><B|Y'> + <B|X'> i <A|Y>``: both "up" detectors flash."""
    return rt_amplitude(obj, "u", "u")


def rt_amplitude_different(obj: RaritySpec | RtStreams) -> Phasor:
    """Left "up", right "down": ``<A|X><B|Y'> - <B|X'><A|Y>``."""
    return rt_amplitude(obj, "u", "d")


def _r(obj: RaritySpec | RtStreams) -> float:
    r = stream_sum(_streams(obj).Y).modulus
    if r == 0.0 or r < 1e-9 * len(_streams(obj).Y):
        raise ValidationError("lower stream sum vanishes; geometry is destructively degenerate")
    return r


def rt_joint_probability(obj: RaritySpec | RtStreams, normalization_factor: float = 4.0) -> float:
    """``|amp_same|^2 / (4 r^4)`` with ``r = |sum over Y|``."""
    s = _streams(obj)
    r = _r(s)
    return probability(rt_amplitude_same(s), normalization_factor * r**4)


def rt_different_probability(obj: RaritySpec | RtStreams, normalization_factor: float = 4.0) -> float:
    s = _streams(obj)
    r = _r(s)
    return probability(rt_amplitude_different(s), normalization_factor * r**4)


def rt_locality_addends(obj: RaritySpec | RtStreams) -> tuple[Phasor, Phasor]:
    """``(<A|X><A|Y>, <B|X'><B|Y'>)``: each built from one side's streams only."""
    sums = rt_stream_sums(obj)
    return sums["X"] * sums["Y"], sums["X'"] * sums["Y'"]


def rt_locality_form(obj: RaritySpec | RtStreams) -> Phasor:
    left, right = rt_locality_addends(obj)
    return REFLECTION * (left + right)


def rt_sweep(
    settings: Iterable[tuple[float, float]], base: RaritySpec | None = None
) -> list[dict[str, float]]:
    """Path-sum vs state-vector ``P_same`` over a list of ``(alpha, beta)``."""
    base = base or RaritySpec()
    streams = rt_streams(base)
    rows = []
    for a, b in settings:
        p_sp = rt_joint_probability(with_settings(streams, a, b))
        p_sqm = sqm_rt_joint(a, b)
        rows.append(
            {"alpha": a, "beta": b, "p_same_sp": p_sp, "p_same_sqm": p_sqm, "abs_diff": abs(p_sp - p_sqm)}
        )
    return rows


def settings_grid(n: int = 12) -> list[tuple[float, float]]:
    """``n x n`` grid of settings ``k * 2*pi / n``."""
    angles = [TWO_PI * k / n for k in range(n)]
    return [(a, b) for a in angles for b in angles]


def write_sweep_csv(rows: list[dict[str, float]], out: TextIO) -> None:
    fields = ["alpha", "beta", "p_same_sp", "p_same_sqm", "abs_diff"]
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        writer.writerow([repr(float(row[f])) for f in fields])
