"""Premetric on a G_delta subset that makes it Sigma_g-complete.

``Y`` is the intersection of open sets ``U_n`` in a complete metric space.
Each ``U_n`` is described by the distance to its complement ``F_n``; the
barrier ``phi_n = 1 / d(x, F_n)`` blows up at the edge of ``U_n`` and the
premetric adds the weighted barrier differences to the (bounded) host metric.
Minimizing ``f + eps*g(x_eps, .)`` on a grid of ``Y`` then reduces to the
premetric Ekeland solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .orbit_engine import OrbitBudget
from .principles import EkelandCertificate, ekeland_premetric
from .semicomplete import BELOW, EXCEEDED, SequenceSpec

DEFAULT_DEPTH = 32


class DomainError(ValueError):
    """A point lies outside ``Y``."""


def bound_metric(d_value: float) -> float:
    """``d / (1 + d)``; +inf maps to 1."""
    if d_value < 0 or math.isnan(d_value):
        raise ValueError(f"distance must be nonnegative, got {d_value!r}")
    if d_value == math.inf:
        return 1.0
    return d_value / (1.0 + d_value)


@dataclass(frozen=True)
class GDeltaDomain:
    """Host metric plus distance-to-complement oracles for ``U_1, U_2, ...``.

    ``closed_sets`` is either a sequence of oracles ``x -> d(x, F_n)`` (raw
    host distance) or a callable ``n -> oracle`` for an unbounded family.
    Sequence positions past its end stand for ``F_n`` empty, ``U_n`` the whole
    host, and contribute nothing.
    """

    host_metric: Callable[[object, object], float]
    closed_sets: Sequence[Callable[[object], float]] | Callable[[int], Callable[[object], float]]
    depth: int = DEFAULT_DEPTH

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be at least 1")

    def dist_to_closed(self, n: int, x) -> float:
        """Bounded-metric distance from ``x`` to ``F_n``; +inf when ``F_n`` is empty."""
        if callable(self.closed_sets):
            raw = self.closed_sets(n)(x)
        elif n <= len(self.closed_sets):
            raw = self.closed_sets[n - 1](x)
        else:
            return math.inf
        # t -> t/(1+t) is increasing, so it commutes with the infimum over F_n
        return bound_metric(float(raw)) if raw != math.inf else math.inf

    def contains(self, x) -> bool:
        return all(self.dist_to_closed(n, x) > 0 for n in range(1, self.depth + 1))

    def d(self, x, y) -> float:
        return bound_metric(float(self.host_metric(x, y)))


def phi(domain: GDeltaDomain, n: int, x) -> float:
    """Barrier ``1 / d(x, F_n)``: +inf on ``F_n``, 0 when ``F_n`` is empty."""
    if not 1 <= n <= domain.depth:
        raise IndexError(f"barrier index {n} outside 1..{domain.depth}")
    dist = domain.dist_to_closed(n, x)
    if dist == 0:
        return math.inf
    return 1.0 / dist


@dataclass(frozen=True)
class GPremetricValue:
    value: float
    truncation_bound: float


def gdelta_premetric(domain: GDeltaDomain, x, y) -> GPremetricValue:
    """``d(x, y) + sum_n t_n / (2**n (1 + t_n))`` with ``t_n = |phi_n(x) - phi_n(y)|``.

    The series is cut at ``domain.depth``; the neglected tail is below
    ``2**-depth``.
    """
    total = domain.d(x, y)
    for n in range(1, domain.depth + 1):
        a, b = phi(domain, n, x), phi(domain, n, y)
        if a == math.inf or b == math.inf:
            bad = x if a == math.inf else y
            raise DomainError(f"point {bad!r} lies in F_{n}, outside Y")
        t = abs(a - b)
        total += t / (2.0**n * (1.0 + t))
    return GPremetricValue(total, 2.0**-domain.depth)


@dataclass(frozen=True)
class SeriesReport:
    sum_raw: float
    sum_transformed: float
    verdict_raw: str
    verdict_transformed: str
    consistent: bool  # transformed sum never exceeds the raw one


def series_equivalence_check(a, horizon: int, threshold: float) -> SeriesReport:
    """Partial sums of ``a_i`` and ``a_i / (1 + a_i)`` for ``i < horizon``.

    ``a`` is a sequence or a callable of the 0-based index. Both series
    converge or diverge together; at a finite horizon only the threshold
    verdicts and ``transformed <= raw`` can be observed.
    """
    if horizon < 1 or not threshold > 0:
        raise ValueError("horizon must be >= 1 and threshold positive")
    terms = [float(a(i)) if callable(a) else float(a[i]) for i in range(horizon)]
    for i, t in enumerate(terms):
        if t < 0 or math.isnan(t):
            raise ValueError(f"term a_{i} = {t!r} is negative")
    raw = math.fsum(terms)
    transformed = math.fsum(t / (1.0 + t) for t in terms)

    def verdict(s: float) -> str:
        return EXCEEDED if s >= threshold else BELOW

    return SeriesReport(raw, transformed, verdict(raw), verdict(transformed), transformed <= raw)


@dataclass(frozen=True)
class LevelSetReport:
    passed: bool
    limit_value: float
    precondition_violations: tuple[int, ...]


def level_set_probe(domain: GDeltaDomain, n: int, K: float, sample_sequence: SequenceSpec, limit=None) -> LevelSetReport:
    """Check that a host limit of points with ``phi_n <= K`` keeps ``phi_n <= K``.

    ``limit`` is the caller's limit point; when omitted the last materialized
    term stands in for it. Terms outside the level set are reported as
    precondition violations and the probe does not pass.
    """
    terms = sample_sequence.materialize()
    outside = tuple(i for i, x in enumerate(terms) if not phi(domain, n, x) <= K)
    target = terms[-1] if limit is None else limit
    value = phi(domain, n, target)
    return LevelSetReport(not outside and value <= K, value, outside)


@dataclass(frozen=True)
class PerturbedResult:
    point: int
    residual: float
    certificate: EkelandCertificate = field(repr=False)
    g_table: np.ndarray = field(repr=False)


def gdelta_table(domain: GDeltaDomain, grid: Sequence) -> np.ndarray:
    n = len(grid)
    table = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                table[i, j] = gdelta_premetric(domain, grid[i], grid[j]).value
    return table


def perturbed_minimize(
    domain: GDeltaDomain,
    grid: Sequence,
    f: Callable[[object], float] | Sequence[float],
    eps: float,
    budget: OrbitBudget | None = None,
    x0: int = 0,
) -> PerturbedResult:
    """Grid point ``x_eps`` with ``f(x) + eps*g(x_eps, x) >= f(x_eps)`` on the grid.

    ``f`` is an oracle on points or a list aligned with ``grid``. The returned
    residual is the smallest ``f(x) + eps*g(x_eps, x) - f(x_eps)`` over
    ``x != x_eps`` (+inf for a one-point grid).
    """
    for i, x in enumerate(grid):
        if not domain.contains(x):
            raise DomainError(f"grid point {i} ({x!r}) lies outside Y")
    values = [float(v) for v in f] if not callable(f) else [float(f(x)) for x in grid]
    if len(values) != len(grid):
        raise ValueError("objective must have one value per grid point")
    table = gdelta_table(domain, grid)
    cert = ekeland_premetric(values, table, eps, x0, budget)
    v = cert.point
    residual = min(
        (values[x] + eps * table[v, x] - values[v] for x in range(len(grid)) if x != v),
        default=math.inf,
    )
    return PerturbedResult(v, float(residual), cert, table)


# ---- closed-set descriptors on simple hosts ------------------------------


def euclidean(x, y) -> float:
    return float(np.linalg.norm(np.subtract(x, y, dtype=float)))


def distance_to_points(points: Sequence, metric=euclidean) -> Callable[[object], float]:
    pts = list(points)
    return lambda x: min(metric(x, p) for p in pts)


def distance_to_interval_complement(lo: float, hi: float) -> Callable[[float], float]:
    """Distance to ``F = host minus (lo, hi)`` on a 1-D host containing the interval."""

    def dist(x) -> float:
        x = float(x)
        return max(0.0, min(x - lo, hi - x))

    return dist
