"""Small state-vector oracle used to cross-check the path-sum predictions.

Everything here is computed by explicit matrix evolution, never by quoting a
closed-form result, so agreement with the path sums is a genuine check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

from .phasor import ValidationError

NORM_TOL = 1e-9

ARM_MODES = {"upper": 0, "lower": 1}


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray
    basis_labels: tuple[Hashable, ...]

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        labels = tuple(self.basis_labels)
        if len(labels) != amps.size:
            raise ValidationError("one basis label per amplitude required")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValidationError(f"state is not normalized (norm^2 = {norm})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "basis_labels", labels)

    def probabilities(self) -> dict[Hashable, float]:
        return {lab: float(abs(a) ** 2) for lab, a in zip(self.basis_labels, self.amplitudes)}

    def evolve(self, unitary: np.ndarray) -> "StateVector":
        return StateVector(unitary @ self.amplitudes, self.basis_labels)


def beamsplitter_unitary() -> np.ndarray:
    """Symmetric 50-50 beamsplitter: transmit ``1/sqrt2``, reflect ``i/sqrt2``."""
    return np.array([[1, 1j], [1j, 1]], dtype=complex) / np.sqrt(2)


def phase_shifter(phases: Sequence[float]) -> np.ndarray:
    return np.diag(np.exp(1j * np.asarray(phases, dtype=float)))


def sqm_mzi(relative_arm_phase: float, arm_block: str | None = None) -> tuple[float, float, float]:
    """Detector probabilities ``(P_D1, P_D2, P_absorbed)`` for one photon.

    Mode 0 is the upper arm and feeds D1 on exit, mode 1 the lower arm and D2.
    The phase is applied to the upper arm.  A blocked arm has its amplitude
    projected out between the beamsplitters and counted as absorbed.
    """
    if not np.isfinite(relative_arm_phase):
        raise ValidationError("relative_arm_phase must be finite")
    if arm_block in ("none",):
        arm_block = None
    if arm_block is not None and arm_block not in ARM_MODES:
        raise ValidationError(f"arm_block must be None, 'upper' or 'lower', got {arm_block!r}")
    bs = beamsplitter_unitary()
    state = StateVector([1, 0], ("upper", "lower")).evolve(bs)
    amps = phase_shifter([relative_arm_phase, 0.0]) @ state.amplitudes
    absorbed = 0.0
    if arm_block is not None:
        m = ARM_MODES[arm_block]
        absorbed = float(abs(amps[m]) ** 2)
        amps = amps.copy()
        amps[m] = 0.0
    out = bs @ amps
    p1, p2 = (float(abs(a) ** 2) for a in out)
    total = p1 + p2 + absorbed
    if abs(total - 1.0) > NORM_TOL:
        raise AssertionError(f"norm not conserved: {total}")
    return p1, p2, absorbed


def rt_initial_state() -> StateVector:
    """``(|x>_L |y'>_R + |y>_L |x'>_R) / sqrt2`` on the 2x2 product basis."""
    labels = (("x", "x'"), ("x", "y'"), ("y", "x'"), ("y", "y'"))
    amps = np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2)
    return StateVector(amps, labels)


def rt_output_state(alpha: float, beta: float) -> StateVector:
    """Two-particle state after the phase shifters and both beamsplitters.

    The left phase ``alpha`` acts on path x, the right phase ``beta`` on x'.
    Output labels are ``(left, right)`` with each side in ``{"u", "d"}``.
    """
    bs = beamsplitter_unitary()
    left = bs @ phase_shifter([alpha, 0.0])
    right = bs @ phase_shifter([beta, 0.0])
    psi = rt_initial_state()
    out = np.kron(left, right) @ psi.amplitudes
    labels = (("u", "u"), ("u", "d"), ("d", "u"), ("d", "d"))
    return StateVector(out, labels)


def sqm_rt_joint(alpha: float, beta: float) -> float:
    """Probability that both detectors report the same side (both up or both down)."""
    probs = rt_output_state(alpha, beta).probabilities()
    return probs[("u", "u")] + probs[("d", "d")]
