"""CHSH and three-setting averages over any ``P_same(alpha, beta)`` backend.

A backend is just a named callable returning the probability that both
sides give the same outcome.  Outcomes map to +1 (up) and -1 (down), so the
correlation is ``E = 2 * P_same - 1``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Sequence, TextIO

import numpy as np
from scipy.optimize import minimize

from .events import cos2_probability, run_trials
from .interferometers import RaritySpec, rt_joint_probability, rt_streams, with_settings
from .phasor import TWO_PI, ValidationError
from .sqm import sqm_rt_joint
from .toy import SETTINGS as MERMIN_SETTINGS
from .toy import toy_correlation

# (a, a', b, b') maximizing CHSH for E = cos(alpha - beta)
STANDARD_CHSH = (0.0, math.pi / 2, math.pi / 4, 3 * math.pi / 4)


@dataclass(frozen=True)
class Backend:
    name: str
    p_same: Callable[[float, float], float] = field(compare=False)

    def __call__(self, alpha: float, beta: float) -> float:
        return self.p_same(alpha, beta)


def cos2_backend() -> Backend:
    return Backend("cos2", cos2_probability)


def sqm_backend() -> Backend:
    return Backend("sqm", sqm_rt_joint)


def toy_backend() -> Backend:
    return Backend("toy", toy_correlation)


def path_sum_backend(base: RaritySpec | None = None) -> Backend:
    streams = rt_streams(base or RaritySpec())
    return Backend("path_sum", lambda a, b: rt_joint_probability(with_settings(streams, a, b)))


def event_backend(n: int, seed: int, gamma_left: float = 0.0, gamma_right: float = 0.0) -> Backend:
    """Monte Carlo backend; each distinct setting pair gets its own random stream."""
    seen: dict[tuple[float, float], int] = {}

    @lru_cache(maxsize=None)
    def p(a: float, b: float) -> float:
        cell = seen.setdefault((a, b), len(seen))
        value, _ = run_trials(a, b, n, seed, gamma_left, gamma_right, on_degenerate="count", cell=cell)
        return value

    return Backend("event", p)


def constant_backend(value: float) -> Backend:
    return Backend(f"constant_{value:g}", lambda a, b: value)


def correlation_from_same_prob(p_same: float) -> float:
    if not 0.0 <= p_same <= 1.0:
        raise ValidationError(f"p_same must be in [0, 1], got {p_same}")
    return 2.0 * p_same - 1.0


@dataclass(frozen=True)
class CorrelationRow:
    alpha: float
    beta: float
    backend: str
    p_same: float
    E: float


@dataclass
class CorrelationTable:
    rows: list[CorrelationRow] = field(default_factory=list)

    def add(self, backend: Backend, alpha: float, beta: float) -> CorrelationRow:
        p = backend(alpha, beta)
        row = CorrelationRow(alpha, beta, backend.name, p, correlation_from_same_prob(p))
        self.rows.append(row)
        return row

    @classmethod
    def build(cls, backends: Iterable[Backend], pairs: Sequence[tuple[float, float]]) -> "CorrelationTable":
        table = cls()
        for backend in backends:
            for a, b in pairs:
                table.add(backend, a, b)
        return table

    def write_csv(self, out: TextIO) -> None:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["alpha", "beta", "backend", "p_same", "E"])
        for r in self.rows:
            writer.writerow([repr(r.alpha), repr(r.beta), r.backend, repr(r.p_same), repr(r.E)])


def _E(backend, a, b):
    return correlation_from_same_prob(backend(a, b))


def chsh(backend: Backend, a: float, a2: float, b: float, b2: float) -> float:
    """``|E(a,b) - E(a,b') + E(a',b) + E(a',b')|``."""
    for s in (a, a2, b, b2):
        if not math.isfinite(s):
            raise ValidationError("CHSH settings must be finite")
    return abs(_E(backend, a, b) - _E(backend, a, b2) + _E(backend, a2, b) + _E(backend, a2, b2))


def chsh_grid_max(backend: Backend, n_grid: int = 360) -> tuple[float, tuple[float, float, float, float]]:
    """Exact maximum of CHSH over all ``n_grid**4`` grid settings.

    For fixed ``(b, b')`` the value is ``|u[a] + v[a']|`` with
    ``u = E[:, b] - E[:, b']`` and ``v = E[:, b] + E[:, b']``, whose maximum
    over ``a, a'`` is ``max(max u + max v, -(min u + min v))``.  This
    visits every grid point implicitly in ``O(n_grid**3)`` work.
    """
    angles = np.arange(n_grid) * (TWO_PI / n_grid)
    E = np.array([[_E(backend, a, b) for b in angles] for a in angles])
    best, arg = -1.0, (0, 0, 0, 0)
    for j in range(n_grid):
        u = E[:, j : j + 1] - E        # column k is u for (b=j, b'=k)
        v = E[:, j : j + 1] + E
        hi = u.max(axis=0) + v.max(axis=0)
        lo = -(u.min(axis=0) + v.min(axis=0))
        cand = np.maximum(hi, lo)
        k = int(np.argmax(cand))
        if cand[k] > best:
            best = float(cand[k])
            if hi[k] >= lo[k]:
                a, a2 = int(np.argmax(u[:, k])), int(np.argmax(v[:, k]))
            else:
                a, a2 = int(np.argmin(u[:, k])), int(np.argmin(v[:, k]))
            arg = (a, a2, j, k)
    return best, tuple(float(angles[i]) for i in arg)


def chsh_maximize(
    backend: Backend, n_grid: int = 36, tol: float = 1e-3
) -> tuple[float, tuple[float, float, float, float]]:
    """Coarse grid search followed by a local Nelder-Mead refinement."""
    s0, x0 = chsh_grid_max(backend, n_grid)
    res = minimize(
        lambda x: -chsh(backend, *x), np.array(x0), method="Nelder-Mead",
        options={"xatol": tol, "fatol": tol},
    )
    if -res.fun > s0:
        return float(-res.fun), tuple(float(v) for v in res.x)
    return s0, x0


def mermin_average(backend: Backend) -> float:
    """Mean ``P_same`` over the nine pairs drawn from ``{0, 2pi/3, 4pi/3}``."""
    vals = [backend(a, b) for a in MERMIN_SETTINGS for b in MERMIN_SETTINGS]
    return sum(vals) / len(vals)


def bell_report(backend: Backend, settings: tuple[float, float, float, float] = STANDARD_CHSH) -> dict:
    return {
        "backend": backend.name,
        "chsh_settings": list(settings),
        "S": chsh(backend, *settings),
        "mermin_avg": mermin_average(backend),
    }


def write_bell_json(reports: list[dict], out: TextIO) -> None:
    json.dump(reports, out, indent=2, sort_keys=True)
    out.write("\n")
