"""Finite path families standing in for infinite shadow streams.

Every generated path contributes one unit phasor; nothing is weighted and no
measure over path space is ever constructed.  Normalization happens only when
an amplitude is turned into a probability.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Hashable, Sequence, TextIO

import numpy as np

from .phasor import TWO_PI, ZERO, Phasor, ValidationError, phasor_from_phase, segment_phase

Point = tuple[float, float]

ENDPOINT_TOL = 1e-9  # meters

STREAM_LABELS = ("X", "Y", "X'", "Y'", "generic")


@dataclass(frozen=True)
class PathPolyline:
    """Piecewise-linear path in the plane.

    ``homotopy_tag`` is set by whichever generator built the path (an arm
    label, or an integer winding number); it is never inferred.
    """

    vertices: tuple[Point, ...]
    homotopy_tag: Hashable = None
    _lengths: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        verts = tuple((float(x), float(y)) for x, y in self.vertices)
        if len(verts) < 2:
            raise ValidationError("a path needs at least 2 vertices")
        lengths = tuple(
            math.hypot(b[0] - a[0], b[1] - a[1]) for a, b in zip(verts[:-1], verts[1:])
        )
        if not sum(lengths) > 0:
            raise ValidationError("degenerate path of zero length")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "_lengths", lengths)

    @property
    def segment_lengths(self) -> tuple[float, ...]:
        return self._lengths

    @property
    def length(self) -> float:
        return sum(self._lengths)

    @property
    def start(self) -> Point:
        return self.vertices[0]

    @property
    def end(self) -> Point:
        return self.vertices[-1]


def _close(p: Point, q: Point, tol: float = ENDPOINT_TOL) -> bool:
    return math.hypot(p[0] - q[0], p[1] - q[1]) <= tol


def _distance_to_segment(p: Point, seg: tuple[Point, Point]) -> float:
    (ax, ay), (bx, by) = seg
    dx, dy = bx - ax, by - ay
    t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / (dx * dx + dy * dy)
    t = min(max(t, 0.0), 1.0)
    return math.hypot(p[0] - (ax + t * dx), p[1] - (ay + t * dy))


@dataclass(frozen=True)
class ShadowStream:
    """A finite, ordered family of paths between two points.

    All paths end at the same destination.  They start at the same source
    unless ``source_segment`` is given, in which case each path may start
    anywhere on that segment (an extended source).
    """

    paths: tuple[PathPolyline, ...]
    wavelength: float
    phase_shift: float = 0.0
    label: str = "generic"
    source_segment: tuple[Point, Point] | None = None
    _phases: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        paths = tuple(self.paths)
        object.__setattr__(self, "paths", paths)
        if not paths:
            raise ValidationError("a shadow stream must contain at least one path")
        if not self.wavelength > 0:
            raise ValidationError(f"wavelength must be > 0, got {self.wavelength}")
        if not math.isfinite(self.phase_shift):
            raise ValidationError("phase_shift must be finite")
        if self.label not in STREAM_LABELS:
            raise ValidationError(f"label must be one of {STREAM_LABELS}, got {self.label!r}")
        if self._phases is not None and len(self._phases) != len(paths):
            raise ValidationError("cached phases do not match the path count")
        first = paths[0]
        for p in paths[1:]:
            if not _close(p.end, first.end):
                raise ValidationError("paths in a stream must share their destination")
        if self.source_segment is None:
            for p in paths[1:]:
                if not _close(p.start, first.start):
                    raise ValidationError("paths in a stream must share their source")
        else:
            for p in paths:
                if _distance_to_segment(p.start, self.source_segment) > ENDPOINT_TOL:
                    raise ValidationError("path starts off the declared source segment")

    def __len__(self) -> int:
        return len(self.paths)

    def with_phase_shift(self, phase_shift: float) -> "ShadowStream":
        return ShadowStream(
            self.paths, self.wavelength, phase_shift, self.label, self.source_segment, self._phases
        )


def mirror_paths(
    source: Point,
    sink: Point,
    mirror_segment: tuple[Point, Point],
    n_paths: int,
    wavelength: float = 1e-6,
) -> ShadowStream:
    """Two-segment paths ``source -> m_i -> sink`` bouncing off a flat mirror.

    The reflection points ``m_i`` are equally spaced along ``mirror_segment``
    from its first to its second endpoint, both ends included.
    """
    if n_paths < 2:
        raise ValidationError(f"n_paths must be >= 2, got {n_paths}")
    (ax, ay), (bx, by) = mirror_segment
    dx, dy = bx - ax, by - ay
    if math.hypot(dx, dy) == 0:
        raise ValidationError("mirror segment is degenerate")

    def side(p: Point) -> float:
        return dx * (p[1] - ay) - dy * (p[0] - ax)

    s_src, s_snk = side(source), side(sink)
    if s_src == 0 or s_snk == 0 or (s_src > 0) != (s_snk > 0):
        raise ValidationError("source and sink must lie strictly on the same side of the mirror")

    t = np.linspace(0.0, 1.0, n_paths)
    mx = ax + t * dx
    my = ay + t * dy
    paths = tuple(
        PathPolyline((source, (float(x), float(y)), sink), homotopy_tag=i)
        for i, (x, y) in enumerate(zip(mx, my))
    )
    return ShadowStream(paths, wavelength)


def symmetric_mirror_stream(n_paths: int, wavelength: float = 1e-6) -> ShadowStream:
    """The default symmetric single-mirror setup, scaled to ``wavelength``.

    Source and sink sit 200 wavelengths above the mirror, 200 wavelengths
    apart; the mirror spans 300 wavelengths centred under them.
    """
    w = wavelength
    return mirror_paths(
        (-100 * w, 200 * w), (100 * w, 200 * w), ((-150 * w, 0.0), (150 * w, 0.0)), n_paths, w
    )


def path_phase(path: PathPolyline, wavelength: float) -> float:
    """Total phase along the path, summed segment by segment."""
    total = 0.0
    for length in path.segment_lengths:
        total += segment_phase(length, wavelength)
    return total


def path_phases(stream: ShadowStream) -> np.ndarray:
    """Per-path phases in path order (cached on the stream, read-only)."""
    if stream._phases is None:
        phases = np.array([path_phase(p, stream.wavelength) for p in stream.paths])
        phases.setflags(write=False)
        object.__setattr__(stream, "_phases", phases)
    return stream._phases


def _partial_sums(phases: np.ndarray) -> np.ndarray:
    # cumsum adds strictly left to right, so the last entry is the in-order sum
    return np.concatenate(([0j], np.cumsum(np.exp(1j * phases))))


def _shift_factor(stream: ShadowStream) -> complex:
    return complex(phasor_from_phase(stream.phase_shift))


def stream_sum(stream: ShadowStream) -> Phasor:
    """Sum of the unit phasors of every path, rotated by the stream's phase shift.

    The shift is common to every path, so it is applied once to the in-order
    sum; congruent streams therefore produce bit-identical results.
    """
    total = _partial_sums(path_phases(stream))[-1]
    if stream.phase_shift != 0.0:
        total = total * _shift_factor(stream)
    return Phasor.from_complex(total)


def cornu_partial_sums(stream: ShadowStream) -> list[Point]:
    """Head-to-tail prefix sums of the per-path unit phasors, origin first.

    The phase shift is ignored, so the last point equals ``stream_sum`` of the
    unshifted stream exactly.
    """
    ps = _partial_sums(path_phases(stream))
    return [(float(z.real), float(z.imag)) for z in ps]


def restricted_sum(stream: ShadowStream, index_range: range | slice | tuple[int, int]) -> Phasor:
    """Sum over a contiguous sub-family ``[start, stop)`` of the stream."""
    n = len(stream)
    if isinstance(index_range, tuple):
        start, stop = index_range
    else:
        if getattr(index_range, "step", None) not in (None, 1):
            raise ValidationError("index_range must be contiguous")
        start = 0 if index_range.start is None else index_range.start
        stop = n if index_range.stop is None else index_range.stop
    if start < 0 or stop > n:
        raise ValidationError(f"index range [{start}, {stop}) outside [0, {n})")
    if stop <= start:
        return ZERO
    sub = ShadowStream(
        stream.paths[start:stop],
        stream.wavelength,
        stream.phase_shift,
        stream.label,
        stream.source_segment,
        path_phases(stream)[start:stop],
    )
    return stream_sum(sub)


def congruent(a: PathPolyline, b: PathPolyline, tol: float = 1e-12) -> bool:
    """True iff the ordered segment lengths agree within ``tol`` each."""
    if not tol > 0:
        raise ValidationError(f"tol must be > 0, got {tol}")
    la, lb = a.segment_lengths, b.segment_lengths
    return len(la) == len(lb) and all(abs(x - y) <= tol for x, y in zip(la, lb))


def winding_number(loop: Sequence[float], closure_tol: float = 1e-9) -> int:
    """Net counterclockwise turns of a closed loop sampled as angles on a circle.

    Consecutive samples must be less than half a turn apart so the unwrapping
    is unambiguous.
    """
    angles = np.asarray(loop, dtype=float)
    if angles.ndim != 1 or angles.size < 1:
        raise ValidationError("loop must be a non-empty 1-D sequence of angles")
    gap = math.remainder(float(angles[-1] - angles[0]), TWO_PI)
    if abs(gap) > closure_tol:
        raise ValidationError(f"loop is not closed (end-start = {gap:g} mod 2*pi)")
    unwrapped = np.unwrap(angles)
    return int(round((unwrapped[-1] - unwrapped[0]) / TWO_PI))


def write_cornu_csv(stream: ShadowStream, out: TextIO) -> None:
    """Write ``index,partial_re,partial_im,path_phase``, one row per prefix point.

    Row 0 is the origin and has an empty ``path_phase``; row ``k`` carries the
    phase of path ``k - 1``.
    """
    phases = path_phases(stream)
    partial = _partial_sums(phases)
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["index", "partial_re", "partial_im", "path_phase"])
    for k, z in enumerate(partial):
        ph = "" if k == 0 else repr(float(phases[k - 1]))
        writer.writerow([k, repr(float(z.real)), repr(float(z.imag)), ph])


def stationary_phase_shares(stream: ShadowStream, fraction: float = 0.1) -> dict[str, float]:
    """Moduli of the central and the two outer sub-sums relative to the full sum.

    Each sub-family holds ``int(fraction * n)`` consecutive paths.
    """
    n = len(stream)
    k = int(fraction * n)
    if k < 1:
        raise ValidationError("fraction too small for this stream")
    full = stream_sum(stream).modulus
    if full == 0:
        raise ValidationError("full sum vanishes; shares are undefined")
    c0 = (n - k) // 2
    return {
        "full": full,
        "central": restricted_sum(stream, (c0, c0 + k)).modulus / full,
        "head": restricted_sum(stream, (0, k)).modulus / full,
        "tail": restricted_sum(stream, (n - k, n)).modulus / full,
    }
