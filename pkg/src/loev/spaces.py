"""Finite generalized-distance spaces and premetric constructions.

Distance tables are ``numpy`` arrays indexed ``table[first, second]``.
Extended reals are plain floats; ``math.inf`` plays the role of +infinity
and NaN is rejected wherever a value enters the library.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Hashable, NamedTuple, Sequence

import numpy as np

METRIC = "Metric"
QUASI_METRIC = "QuasiMetric"
SYMMETRIC_PREMETRIC = "SymmetricPremetric"
PREMETRIC = "Premetric"

DistanceOracle = Callable[[object, object], float]


class DistanceAxiomError(ValueError):
    """A distance table is malformed or fails (P1)."""


def check_ext_real(value: float, what: str = "value") -> float:
    """Coerce to float and refuse NaN and -inf."""
    v = float(value)
    if math.isnan(v):
        raise ValueError(f"{what} is NaN")
    if v == -math.inf:
        raise ValueError(f"{what} is -inf")
    return v


def as_table(rows) -> np.ndarray:
    table = np.array(rows, dtype=float)
    if table.ndim != 2 or table.shape[0] != table.shape[1]:
        raise DistanceAxiomError(f"distance table must be square, got shape {table.shape}")
    return table


@dataclass(frozen=True)
class DistanceClass:
    """Strongest axiom class of a table plus the instances that failed.

    ``symmetry_violations`` holds index pairs ``(i, j)`` with ``i < j`` and
    ``d(i, j) != d(j, i)``; ``triangle_violations`` holds triples
    ``(i, j, k)`` with ``d(i, k) > d(i, j) + d(j, k)``.
    """

    kind: str
    symmetry_violations: tuple[tuple[int, int], ...] = ()
    triangle_violations: tuple[tuple[int, int, int], ...] = ()

    @property
    def symmetric(self) -> bool:
        return not self.symmetry_violations

    @property
    def triangle(self) -> bool:
        return not self.triangle_violations


def classify_distance(table) -> DistanceClass:
    """Classify a finite distance table as metric, quasi-metric or premetric.

    Comparisons are exact. On a finite table the discrete topology makes
    continuity in the second argument automatic, so only (P1), symmetry and
    the triangle inequality are checked.

    Raises:
        DistanceAxiomError: on non-finite or negative entries, a nonzero
            diagonal, or a zero off-diagonal entry (not a premetric at all).
    """
    d = as_table(table)
    n = d.shape[0]
    bad = np.argwhere(~np.isfinite(d))
    if bad.size:
        i, j = bad[0]
        raise DistanceAxiomError(f"entry ({i}, {j}) is not finite: {d[i, j]!r}")
    bad = np.argwhere(d < 0)
    if bad.size:
        i, j = bad[0]
        raise DistanceAxiomError(f"entry ({i}, {j}) is negative: {d[i, j]!r}")
    diag = np.flatnonzero(np.diag(d) != 0)
    if diag.size:
        i = diag[0]
        raise DistanceAxiomError(f"diagonal entry ({i}, {i}) is nonzero: {d[i, i]!r}")
    off = np.argwhere((d == 0) & ~np.eye(n, dtype=bool))
    if off.size:
        i, j = off[0]
        raise DistanceAxiomError(f"entry ({i}, {j}) is zero for distinct points, (P1) fails")

    sym = tuple((int(i), int(j)) for i, j in np.argwhere(np.triu(d != d.T, k=1)))
    # through[i, j, k] = d(i, j) + d(j, k)
    through = d[:, :, None] + d[None, :, :]
    tri = tuple(
        (int(i), int(j), int(k)) for i, j, k in np.argwhere(d[:, None, :] > through)
    )
    if not sym and not tri:
        kind = METRIC
    elif not tri:
        kind = QUASI_METRIC
    elif not sym:
        kind = SYMMETRIC_PREMETRIC
    else:
        kind = PREMETRIC
    return DistanceClass(kind, sym, tri)


@dataclass(frozen=True)
class FiniteSpace:
    labels: tuple[str, ...]
    dist: np.ndarray = field(repr=False)
    distance_class: DistanceClass = field(repr=False)

    @classmethod
    def from_table(cls, labels: Sequence[str], table) -> "FiniteSpace":
        labels = tuple(str(s) for s in labels)
        if len(set(labels)) != len(labels):
            raise ValueError("point labels must be pairwise distinct")
        d = as_table(table)
        if d.shape[0] != len(labels):
            raise ValueError(f"{len(labels)} labels but a {d.shape[0]}x{d.shape[0]} table")
        cls_ = classify_distance(d)
        d.setflags(write=False)
        return cls(labels, d, cls_)

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown point label {label!r}") from None

    def __call__(self, i: int, j: int) -> float:
        return float(self.dist[i, j])


@dataclass(frozen=True)
class ObjectiveTable:
    """One extended-real value per point; must be proper."""

    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(check_ext_real(v, f"objective[{i}]") for i, v in enumerate(self.values))
        if not any(math.isfinite(v) for v in vals):
            raise ValueError("objective is not proper: every value is +inf")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int) -> float:
        return self.values[i]

    def __iter__(self):
        return iter(self.values)

    @property
    def min(self) -> float:
        return min(self.values)

    def domain(self) -> list[int]:
        return [i for i, v in enumerate(self.values) if math.isfinite(v)]

    def scaled(self, c: float) -> "ObjectiveTable":
        return ObjectiveTable(tuple(c * v for v in self.values))


def build_premetric_from_base(center, radii: Sequence[float], host_metric: DistanceOracle, y) -> float:
    """Evaluate ``sum_k min(1, d(center, y) / r_k) / 2**k`` for descending radii.

    The clipped ratio is a continuous bump equal to 0 at ``center`` and to 1
    outside the ``r_k`` ball. The result lies in ``[0, 1 - 2**-K]``.
    """
    if len(radii) == 0:
        raise ValueError("need at least one radius")
    for a, b in zip(radii, radii[1:]):
        if not a > b:
            raise ValueError(f"radii must be strictly descending, got {a} then {b}")
    if not radii[-1] > 0:
        raise ValueError("radii must be positive")
    dist = float(host_metric(center, y))
    total = 0.0
    for k, r in enumerate(radii, start=1):
        total += min(1.0, dist / r) / 2.0**k
    return total


class NestednessError(ValueError):
    """Neighbournet levels queried for one point are not nested."""


class NeighbournetValue(NamedTuple):
    value: float
    truncated: bool


def build_h_from_neighbournets(
    member: Callable[[int, Hashable, Hashable], bool], depth: int, x, y
) -> NeighbournetValue:
    """Generalized distance from a nested family of neighbournets.

    ``member(n, x, y)`` answers ``y in V_n(x)`` for ``n >= 1``; level 0 is the
    whole space. The value is ``1/n`` for the first level ``n`` that ``y``
    leaves. If ``y`` survives all ``depth`` levels, ``1/(depth + 1)`` is
    returned as an upper bound with ``truncated=True``.

    All ``depth`` levels are queried so that a non-nested family is caught.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if x == y:
        return NeighbournetValue(0.0, False)
    inside = [bool(member(n, x, y)) for n in range(1, depth + 1)]
    exit_level = None
    for n, flag in enumerate(inside, start=1):
        if exit_level is None and not flag:
            exit_level = n
        elif exit_level is not None and flag:
            raise NestednessError(
                f"point is outside V_{exit_level} but inside V_{n}; levels are not nested"
            )
    if exit_level is None:
        return NeighbournetValue(1.0 / (depth + 1), True)
    return NeighbournetValue(1.0 / exit_level, False)


def g_length(points: Sequence, g: DistanceOracle) -> float:
    """Sum of ``g(x[i+1], x[i])``; the successor is the first argument."""
    if len(points) == 0:
        raise ValueError("sequence must contain at least one point")
    return math.fsum(g(b, a) for a, b in zip(points, points[1:]))


def abs_difference(x: float, y: float) -> float:
    return abs(float(x) - float(y))
