"""Classical clock-pointer toy system.

Two objects leave a source with pointers aimed at the same random angle
``gamma``.  A setting ``alpha`` (``beta``) adds that much rotation on the left
(right) before a fork; at the fork a pointer in ``(0, pi]`` goes to the upper
branch, anything else to the lower branch.

The same-branch probability is ``1 - d / pi`` where ``d`` is the circular
distance between the two settings.  A hand derivation of this model that
reports zero for a gap of ``4*pi/3`` is kept in :data:`STATED_INTERMEDIATES`
for reference only; the computed values are what the code returns.
"""

from __future__ import annotations

import csv
import math
from fractions import Fraction
from typing import TextIO

import numpy as np

from . import _rng
from .phasor import TWO_PI, ValidationError

SETTINGS = (0.0, TWO_PI / 3, 2 * TWO_PI / 3)

UPPER = "upper"
LOWER = "lower"

# Intermediate values of that hand derivation (whose total is 1/3), next to
# what the geometry actually gives.  Reported, never asserted.
STATED_INTERMEDIATES = {
    "gap_4pi_3": {"stated": 0.0, "computed": 1.0 / 3.0},
    "gap_2pi_3_one_sign": {"stated": 1.0 / 6.0, "computed": 1.0 / 3.0},
}


def _setting_index(angle: float) -> int:
    for k, s in enumerate(SETTINGS):
        if math.isclose(angle, s, rel_tol=0.0, abs_tol=1e-12):
            return k
    raise ValidationError(f"toy settings are 0, 2pi/3, 4pi/3; got {angle}")


def toy_branch(pointer: float) -> str:
    """``upper`` iff the pointer, reduced mod 2*pi, lies in ``(0, pi]``."""
    if not math.isfinite(pointer):
        raise ValidationError("pointer must be finite")
    t = pointer % TWO_PI
    return UPPER if 0.0 < t <= math.pi else LOWER


def toy_branch_array(pointers: np.ndarray) -> np.ndarray:
    """Vectorised :func:`toy_branch`; True means upper."""
    t = np.mod(pointers, TWO_PI)
    return (t > 0.0) & (t <= math.pi)


def circular_distance(a: float, b: float) -> float:
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


def toy_correlation(alpha: float, beta: float) -> float:
    """Same-branch probability for arbitrary settings (used as a Bell backend)."""
    return 1.0 - circular_distance(alpha, beta) / math.pi


def toy_same_probability(alpha: float, beta: float) -> float:
    """Exact same-branch probability for two of the three allowed settings.

    Worked in thirds of a turn so the unequal-setting value is exactly 1/3.
    """
    gap = abs(_setting_index(alpha) - _setting_index(beta))
    thirds = min(gap, 3 - gap)
    return float(1 - Fraction(2 * thirds, 3))


def toy_monte_carlo(
    alpha: float, beta: float, n_trials: int, seed: int, threads: int = 1, *, cell: int = 0
) -> float:
    """Fraction of ``n_trials`` runs where both objects take the same branch.

    ``cell`` selects an independent random stream under the same seed.
    """
    if n_trials < 1:
        raise ValidationError(f"n_trials must be >= 1, got {n_trials}")

    def run(rng: np.random.Generator, m: int) -> int:
        gamma = rng.random(m) * TWO_PI
        left = toy_branch_array(gamma + alpha)
        right = toy_branch_array(gamma + beta)
        return int(np.count_nonzero(left == right))

    same = sum(_rng.map_chunks(run, seed, _rng.TOY, n_trials, cell, threads=threads))
    return same / n_trials


def toy_table(n_trials: int, seed: int, threads: int = 1) -> list[dict[str, float]]:
    rows = []
    for i, a in enumerate(SETTINGS):
        for j, b in enumerate(SETTINGS):
            p = toy_same_probability(a, b)
            p_mc = toy_monte_carlo(a, b, n_trials, seed, threads, cell=3 * i + j)
            rows.append(
                {"alpha": a, "beta": b, "p_analytic": p, "p_mc": p_mc, "n_trials": n_trials, "abs_err": abs(p - p_mc)}
            )
    return rows


def write_toy_csv(rows: list[dict[str, float]], out: TextIO) -> None:
    fields = ["alpha", "beta", "p_analytic", "p_mc", "n_trials", "abs_err"]
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        writer.writerow([row["n_trials"] if f == "n_trials" else repr(float(row[f])) for f in fields])
