"""Complex phasor arithmetic shared by every path-sum computation.

A phasor is the clock-pointer ``exp(i * phase)`` attached to a single path,
or any sum of such pointers.  Actions enter only through the dimensionless
phase ``S / hbar``; for light that is ``2 * pi * length / wavelength``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

TWO_PI = 2.0 * math.pi

# Tolerance on |amplitude|^2 / normalization above 1 before we call the
# normalization wrong rather than rounding noise.
PROBABILITY_SLACK = 1e-9


class ValidationError(ValueError):
    """Raised when an input violates a documented precondition."""


class NormalizationError(ValidationError):
    """Raised when a probability exceeds one, i.e. the scenario is mis-normalized."""


@dataclass(frozen=True)
class Phasor:
    """Complex value stored in Cartesian form."""

    re: float = 0.0
    im: float = 0.0

    @classmethod
    def from_polar(cls, r: float, theta: float) -> "Phasor":
        if r < 0:
            raise ValidationError(f"modulus must be >= 0, got {r}")
        return cls(r * math.cos(theta), r * math.sin(theta))

    @classmethod
    def from_complex(cls, z: complex) -> "Phasor":
        return cls(float(z.real), float(z.imag))

    @property
    def modulus(self) -> float:
        return math.hypot(self.re, self.im)

    @property
    def phase(self) -> float:
        """Argument in ``[0, 2*pi)``; zero for the zero phasor."""
        return normalize_angle(math.atan2(self.im, self.re))

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    def __add__(self, other: "Phasor") -> "Phasor":
        return Phasor(self.re + other.re, self.im + other.im)

    def __mul__(self, other: "Phasor | complex | float") -> "Phasor":
        if isinstance(other, Phasor):
            other = complex(other)
        return Phasor.from_complex(complex(self) * other)

    __rmul__ = __mul__

    def conjugate(self) -> "Phasor":
        return Phasor(self.re, -self.im)

    def isclose(self, other: "Phasor", abs_tol: float = 1e-12) -> bool:
        return abs(complex(self) - complex(other)) <= abs_tol


ZERO = Phasor(0.0, 0.0)
ONE = Phasor(1.0, 0.0)
# e^{i pi/2}: the factor picked up at each reflection
REFLECTION = Phasor(0.0, 1.0)


def normalize_angle(theta: float) -> float:
    """Reduce an angle to ``[0, 2*pi)``."""
    t = math.fmod(theta, TWO_PI)
    if t < 0:
        t += TWO_PI
    # fmod of a tiny negative number can round up to exactly 2*pi
    if t >= TWO_PI:
        t = 0.0
    return t


def phasor_from_phase(phase: float) -> Phasor:
    """Unit phasor ``(cos phase, sin phase)``.

    >>> phasor_from_phase(0.0)
    Phasor(re=1.0, im=0.0)
    """
    if not math.isfinite(phase):
        raise ValidationError(f"phase must be finite, got {phase}")
    return Phasor(math.cos(phase), math.sin(phase))


def segment_phase(length: float, wavelength: float) -> float:
    """Optical phase ``2*pi*length/wavelength`` accumulated along a straight segment."""
    if not wavelength > 0:
        raise ValidationError(f"wavelength must be > 0, got {wavelength}")
    if length < 0:
        raise ValidationError(f"length must be >= 0, got {length}")
    return TWO_PI * length / wavelength


def sum_phasors(phasors: Iterable[Phasor]) -> Phasor:
    """Component-wise sum, accumulated strictly in input order."""
    re = 0.0
    im = 0.0
    for p in phasors:
        re += p.re
        im += p.im
    return Phasor(re, im)


def multiply(a: Phasor, b: Phasor) -> Phasor:
    return a * b


def probability(amplitude: Phasor, normalization: float) -> float:
    """``|amplitude|^2 / normalization`` clamped to ``[0, 1]``.

    Values above ``1 + 1e-9`` mean the normalization constant does not fit
    the scenario and raise :class:`NormalizationError`.
    """
    if not normalization > 0:
        raise ValidationError(f"normalization must be > 0, got {normalization}")
    p = (amplitude.re * amplitude.re + amplitude.im * amplitude.im) / normalization
    if p > 1.0 + PROBABILITY_SLACK:
        raise NormalizationError(
            f"|amplitude|^2/normalization = {p!r} exceeds 1; check the normalization constant"
        )
    return min(max(p, 0.0), 1.0)
