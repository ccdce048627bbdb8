"""Greedy orbit construction for set-valued maps on finite spaces.

A set-valued map is any callable taking a point index and returning a finite
ordered sequence of point indices. The engine follows one orbit, at each step
jumping to the candidate farthest from the current point, until it reaches an
empty value or runs out of budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

SetValuedMap = Callable[[int], Sequence[int]]
Distance = Union[Callable[[int, int], float], np.ndarray, Sequence[Sequence[float]]]


class NonStationaryError(ValueError):
    """The map returned its own query point where that is forbidden."""


def distance_oracle(dist: Distance) -> tuple[Callable[[int, int], float], int | None]:
    """Normalize a table or callable to ``(oracle, size)``; size is None for callables."""
    if callable(dist):
        return dist, getattr(dist, "__len__", None) and len(dist)
    table = np.asarray(dist, dtype=float)
    return (lambda i, j: float(table[i, j])), table.shape[0]


@dataclass(frozen=True)
class OrbitBudget:
    max_steps: int = 10_000
    length_threshold: float = math.inf

    def __post_init__(self):
        if int(self.max_steps) != self.max_steps or self.max_steps <= 0:
            raise ValueError(f"max_steps must be a positive integer, got {self.max_steps!r}")
        if not self.length_threshold > 0:
            raise ValueError(f"length_threshold must be positive, got {self.length_threshold!r}")


@dataclass(frozen=True)
class Orbit:
    points: tuple[int, ...]
    jumps: tuple[float, ...]

    @property
    def length(self) -> float:
        return math.fsum(self.jumps)

    @property
    def endpoint(self) -> int:
        return self.points[-1]


@dataclass(frozen=True)
class EmptyValueAt:
    endpoint: int
    tag = "EmptyValueAt"


@dataclass(frozen=True)
class SingletonAbsorbed:
    endpoint: int
    tag = "SingletonAbsorbed"


@dataclass(frozen=True)
class BudgetExceeded:
    steps_taken: int
    accumulated_length: float
    reason: str  # "max_steps" or "length_threshold"
    tag = "BudgetExceeded"


OrbitOutcome = Union[EmptyValueAt, SingletonAbsorbed, BudgetExceeded]


def strip_diagonal(S: SetValuedMap) -> SetValuedMap:
    """Return ``x -> S(x) minus {x}``, keeping the order of the rest."""

    def stripped(x: int) -> list[int]:
        return [y for y in S(x) if y != x]

    return stripped


def greedy_orbit(
    S: SetValuedMap,
    dist: Distance,
    x0: int,
    budget: OrbitBudget | None = None,
    *,
    n: int | None = None,
) -> tuple[Orbit, OrbitOutcome]:
    """Follow the farthest-jump orbit of ``S`` from ``x0``.

    At each point the candidate ``y`` maximizing ``dist(y, x)`` is taken,
    ties going to the earliest candidate in the map's enumeration order. The
    maximal jump trivially beats half of ``min(1, sup)``.

    Emptiness is tested before the budget, so an orbit that reaches an empty
    value on its last allowed step is still reported as ``EmptyValueAt``.
    """
    budget = budget or OrbitBudget()
    h, size = distance_oracle(dist)
    size = n if n is not None else size
    if int(x0) != x0 or x0 < 0 or (size is not None and x0 >= size):
        raise IndexError(f"start point {x0!r} is out of range for a space of size {size}")

    points = [int(x0)]
    jumps: list[float] = []
    length = 0.0
    x = int(x0)
    while True:
        candidates = list(S(x))
        if not candidates:
            return Orbit(tuple(points), tuple(jumps)), EmptyValueAt(x)
        if len(jumps) >= budget.max_steps:
            return Orbit(tuple(points), tuple(jumps)), BudgetExceeded(len(jumps), length, "max_steps")
        if length >= budget.length_threshold:
            return Orbit(tuple(points), tuple(jumps)), BudgetExceeded(
                len(jumps), length, "length_threshold"
            )
        best, best_jump = None, -math.inf
        for y in candidates:
            if y == x:
                raise NonStationaryError(f"point {x} belongs to its own value; strip the diagonal first")
            jump = h(y, x)
            if jump > best_jump:
                best, best_jump = y, jump
        points.append(best)
        jumps.append(best_jump)
        length += best_jump
        x = best


def idempotent_orbit(
    S: SetValuedMap,
    dist: Distance,
    x0: int,
    budget: OrbitBudget | None = None,
    *,
    n: int | None = None,
) -> tuple[Orbit, OrbitOutcome]:
    """Run the greedy orbit on ``S`` minus the diagonal.

    An empty stripped value at ``x`` means ``S(x)`` is contained in ``{x}``,
    reported as ``SingletonAbsorbed``.
    """
    orbit, outcome = greedy_orbit(strip_diagonal(S), dist, x0, budget, n=n)
    if isinstance(outcome, EmptyValueAt):
        return orbit, SingletonAbsorbed(outcome.endpoint)
    return orbit, outcome


@dataclass(frozen=True)
class IdempotencyReport:
    ok: bool
    witness: tuple[int, int, int] | None = None  # (x, y in S(x), z in S(y) but not in S(x))


def check_idempotent(S: SetValuedMap, n: int) -> IdempotencyReport:
    """Exhaustively test ``S(S(x))`` contained in ``S(x)``; report the first witness."""
    values = [set(S(x)) for x in range(n)]
    for x in range(n):
        for y in S(x):
            for z in S(y):
                if z not in values[x]:
                    return IdempotencyReport(False, (x, y, z))
    return IdempotencyReport(True)


def table_map(rows: Sequence[Sequence[int]]) -> SetValuedMap:
    """Set-valued map from an explicit list of values, one list per point."""
    frozen = tuple(tuple(int(y) for y in row) for row in rows)
    return lambda x: frozen[x]
