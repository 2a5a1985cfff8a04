"""Event-level Monte Carlo of the twin-pair beamsplitter rule.

Each trial emits shared hidden variables at the source; each wing then makes
its up/down decision from a :class:`WingInput` that carries only local data.
The local pointer direction is the phase of ``e^{i theta0} (e^{i setting} + 1)``
(the shifted arm plus the unshifted arm), and the tangible goes "up" when that
direction lies in the half-circle ``(0, pi]`` rotated by the device's ``gamma``.

The modulus of the local sum is recorded but never used by the decision.  The
resulting correlation is piecewise linear in the setting difference, so the
fidelity report measures how far it sits from ``cos^2((alpha - beta) / 2)``;
it does not claim agreement.
"""

from __future__ import annotations

import cmath
import csv
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np

from . import _rng
from .phasor import TWO_PI, ValidationError, normalize_angle

# |e^{i s} + 1| below this is treated as an exactly cancelling local sum.
DEGENERATE_TOL = 1e-9
# Offset used to approach a degenerate setting from both sides.
LIMIT_OFFSET = 1e-6

UP = "up"
DOWN = "down"


class DegenerateSumError(ValidationError):
    """The local two-stream sum vanishes, so its direction is undefined."""


@dataclass(frozen=True)
class HiddenVariables:
    theta0: float
    path_choice: str  # "X" or "X'"

    def __post_init__(self):
        if not 0.0 <= self.theta0 < TWO_PI:
            raise ValidationError(f"theta0 must be in [0, 2pi), got {self.theta0}")
        if self.path_choice not in ("X", "X'"):
            raise ValidationError(f"path_choice must be 'X' or \"X'\", got {self.path_choice!r}")


@dataclass(frozen=True)
class BeamsplitterParam:
    gamma: float = 0.0
    fixed_per_device: bool = True

    def __post_init__(self):
        if not 0.0 <= self.gamma < TWO_PI:
            raise ValidationError(f"gamma must be in [0, 2pi), got {self.gamma}")


@dataclass(frozen=True)
class WingInput:
    """Everything one wing may see.  There is deliberately no remote field."""

    hidden: HiddenVariables
    local_setting: float
    device: BeamsplitterParam
    side: str

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise ValidationError(f"side must be 'left' or 'right', got {self.side!r}")
        if not math.isfinite(self.local_setting):
            raise ValidationError("local_setting must be finite")


def source_emit(rng: np.random.Generator) -> HiddenVariables:
    theta0 = float(rng.random() * TWO_PI)
    path_choice = "X" if rng.random() < 0.5 else "X'"
    return HiddenVariables(normalize_angle(theta0), path_choice)


def source_emit_batch(rng: np.random.Generator, m: int) -> tuple[np.ndarray, np.ndarray]:
    """``m`` emissions at once: ``theta0`` in ``[0, 2pi)`` and True where the path is X."""
    theta0 = rng.random(m) * TWO_PI
    is_x = rng.random(m) < 0.5
    return theta0, is_x


def local_sum(theta0: float, local_setting: float) -> complex:
    return cmath.exp(1j * theta0) * (cmath.exp(1j * local_setting) + 1)


def is_degenerate(local_setting: float) -> bool:
    return abs(cmath.exp(1j * local_setting) + 1) < DEGENERATE_TOL


def _in_upper_half(direction, gamma):
    t = np.mod(np.asarray(direction) - gamma, TWO_PI)
    return (t > 0.0) & (t <= math.pi)


def wing_decide(inp: WingInput) -> str:
    """Up/down decision of one wing from purely local information."""
    if is_degenerate(inp.local_setting):
        raise DegenerateSumError(
            f"{inp.side} local sum vanishes at setting {inp.local_setting!r}; direction undefined"
        )
    z = local_sum(inp.hidden.theta0, inp.local_setting)
    direction = math.atan2(z.imag, z.real)
    return UP if bool(_in_upper_half(direction, inp.device.gamma)) else DOWN


def wing_decide_batch(theta0: np.ndarray, local_setting: float, gamma) -> np.ndarray:
    """Vectorised :func:`wing_decide` for one wing; True means up."""
    if is_degenerate(local_setting):
        raise DegenerateSumError(f"local sum vanishes at setting {local_setting!r}")
    z = np.exp(1j * theta0) * (np.exp(1j * local_setting) + 1)
    return _in_upper_half(np.angle(z), gamma)


def run_trials(
    alpha: float,
    beta: float,
    n: int,
    seed: int,
    gamma_left: float = 0.0,
    gamma_right: float = 0.0,
    *,
    gamma_mode: str = "fixed",
    on_degenerate: str = "raise",
    threads: int = 1,
    cell: int | tuple[int, ...] = 0,
) -> tuple[float, dict[str, int]]:
    """Run ``n`` twin-pair trials and return ``(P_same, counts)``.

    ``gamma_mode="per_trial"`` redraws each device's rotation every trial from
    that device's own random stream.  With ``on_degenerate="count"`` trials
    whose local sum vanishes are rejected and tallied instead of raising;
    ``P_same`` is then NaN if every trial was rejected.  ``cell`` picks an
    independent random stream under the same seed.
    """
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    if gamma_mode not in ("fixed", "per_trial"):
        raise ValidationError(f"gamma_mode must be 'fixed' or 'per_trial', got {gamma_mode!r}")
    if on_degenerate not in ("raise", "count"):
        raise ValidationError(f"on_degenerate must be 'raise' or 'count', got {on_degenerate!r}")
    key = cell if isinstance(cell, tuple) else (cell,)
    degenerate = is_degenerate(alpha) or is_degenerate(beta)
    if degenerate and on_degenerate == "raise":
        side = "left" if is_degenerate(alpha) else "right"
        raise DegenerateSumError(f"trial 0: {side} local sum vanishes; direction undefined")

    def run(c: int, m: int) -> np.ndarray:
        src = _rng.chunk_rng(seed, _rng.SOURCE, *key, c)
        # the path choice is part of the emission but no wing rule reads it
        theta0, _ = source_emit_batch(src, m)
        if degenerate:
            return np.array([0, 0, m, 0, 0], dtype=np.int64)
        if gamma_mode == "fixed":
            g_left, g_right = gamma_left, gamma_right
        else:
            g_left = _rng.chunk_rng(seed, _rng.GAMMA_LEFT, *key, c).random(m) * TWO_PI
            g_right = _rng.chunk_rng(seed, _rng.GAMMA_RIGHT, *key, c).random(m) * TWO_PI
        up_l = wing_decide_batch(theta0, alpha, g_left)
        up_r = wing_decide_batch(theta0, beta, g_right)
        same = int(np.count_nonzero(up_l == up_r))
        return np.array(
            [same, m - same, 0, int(np.count_nonzero(up_l)), int(np.count_nonzero(up_r))], dtype=np.int64
        )

    tot = sum(_rng.map_chunk_indices(run, n, threads=threads))
    counts = {
        "n": n,
        "same": int(tot[0]),
        "different": int(tot[1]),
        "degenerate": int(tot[2]),
        "left_up": int(tot[3]),
        "right_up": int(tot[4]),
    }
    valid = n - counts["degenerate"]
    p_same = counts["same"] / valid if valid else float("nan")
    return p_same, counts


@dataclass(frozen=True)
class TrialRecord:
    left: WingInput
    right: WingInput
    left_outcome: str
    right_outcome: str


def evaluate_trial(
    hidden: HiddenVariables,
    alpha: float,
    beta: float,
    left_device: BeamsplitterParam,
    right_device: BeamsplitterParam,
) -> TrialRecord:
    """One trial: the shared emission goes to two independently evaluated wings."""
    lw = WingInput(hidden, alpha, left_device, "left")
    rw = WingInput(hidden, beta, right_device, "right")
    return TrialRecord(lw, rw, wing_decide(lw), wing_decide(rw))


def record_trials(
    alpha: float,
    beta: float | Sequence[float],
    n: int,
    seed: int,
    gamma_left: float = 0.0,
    gamma_right: float = 0.0,
) -> list[TrialRecord]:
    """Trial-by-trial log built with the scalar :func:`wing_decide`.

    ``beta`` may be a per-trial sequence of right-hand settings.
    """
    betas = [float(beta)] * n if np.isscalar(beta) else [float(b) for b in beta]
    if len(betas) != n:
        raise ValidationError("need one right setting per trial")
    rng = _rng.chunk_rng(seed, _rng.SOURCE, 0xFFFF)
    left_dev = BeamsplitterParam(normalize_angle(gamma_left))
    right_dev = BeamsplitterParam(normalize_angle(gamma_right))
    return [evaluate_trial(source_emit(rng), alpha, b, left_dev, right_dev) for b in betas]


def _limit_estimate(alpha, beta, n, seed, gamma_left, gamma_right, cell, threads, gamma_mode):
    """Pooled estimate at settings nudged just below and just above a degenerate value."""

    def nudge(s, sign):
        return s + sign * LIMIT_OFFSET if is_degenerate(s) else s

    half = n // 2
    same = 0
    for k, (sign, m) in enumerate(((-1, half), (1, n - half))):
        if m == 0:
            continue
        _, c = run_trials(
            nudge(alpha, sign), nudge(beta, sign), m, seed, gamma_left, gamma_right,
            gamma_mode=gamma_mode, threads=threads, cell=(cell, 1, k),
        )
        same += c["same"]
    return same / n


def cos2_probability(alpha: float, beta: float) -> float:
    return math.cos((alpha - beta) / 2) ** 2


def fidelity_report(
    settings: Iterable[tuple[float, float]],
    n: int,
    seed: int,
    gamma_left: float = 0.0,
    gamma_right: float = 0.0,
    *,
    gamma_mode: str = "fixed",
    threads: int = 1,
) -> dict:
    """Compare event-level ``P_same`` with ``cos^2((alpha - beta)/2)`` per setting pair.

    Rows are sorted by ``(alpha, beta)``.  A cell whose setting makes a local
    sum vanish has every trial rejected (``degenerate_count == n``); its
    ``p_event`` is then the pooled estimate approaching that setting from both
    sides, which is the only value the direction rule assigns in the limit.
    """
    pairs = sorted(set((float(a), float(b)) for a, b in settings))
    if not pairs:
        raise ValidationError("settings grid is empty")
    rows = []
    for cell, (a, b) in enumerate(pairs):
        p_event, counts = run_trials(
            a, b, n, seed, gamma_left, gamma_right,
            gamma_mode=gamma_mode, on_degenerate="count", threads=threads, cell=cell,
        )
        if counts["degenerate"] == n:
            p_event = _limit_estimate(a, b, n, seed, gamma_left, gamma_right, cell, threads, gamma_mode)
        p_cos2 = cos2_probability(a, b)
        rows.append(
            {
                "alpha": a,
                "beta": b,
                "p_event": p_event,
                "p_eq7": p_cos2,
                "abs_dev": abs(p_event - p_cos2),
                "n": n,
                "degenerate_count": counts["degenerate"],
                "left_up": counts["left_up"],
            }
        )
    return {"rows": rows, "max_abs_dev": max(r["abs_dev"] for r in rows)}


FIDELITY_FIELDS = ["alpha", "beta", "p_event", "p_eq7", "abs_dev", "n", "degenerate_count"]


def _fmt(value):
    return value if isinstance(value, int) else repr(float(value))


def write_fidelity_csv(report: dict, out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(FIDELITY_FIELDS)
    for row in report["rows"]:
        writer.writerow([_fmt(row[f]) for f in FIDELITY_FIELDS])


def write_fidelity_json(report: dict, out: TextIO) -> None:
    doc = {
        "rows": [{f: row[f] for f in FIDELITY_FIELDS} for row in report["rows"]],
        "max_abs_dev": report["max_abs_dev"],
    }
    json.dump(doc, out, indent=2, sort_keys=True)
    out.write("\n")
