"""Sigma_g-Cauchy probes and the counterexample kit for non-semicomplete spaces.

A space is Sigma_g-semicomplete when every sequence of finite g-length has a
convergent subsequence. Given a sequence of finite g-length without one, the
kit built here is a concrete map and objective for which the Caristi,
Takahashi and Ekeland conclusions all fail. Only a materialized prefix of the
sequence is ever seen, so all checks are made on that prefix and the last
point is reported as a boundary case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Hashable, Sequence

from .spaces import DistanceOracle

EXCEEDED = "ExceededThreshold"
BELOW = "BelowThresholdAtHorizon"

BOUNDARY_NOTE = "prefix boundary: the last point's successor lies beyond the horizon"
TAIL_NOTE = "tail truncated: f(x_N) is set to 0 at the horizon"


@dataclass(frozen=True)
class SequenceSpec:
    """Closed-form sequence ``z_0, ..., z_horizon``."""

    generator: Callable[[int], Hashable]
    horizon: int

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")

    def materialize(self) -> list:
        return [self.generator(k) for k in range(self.horizon + 1)]

    @classmethod
    def from_values(cls, values: Sequence) -> "SequenceSpec":
        values = tuple(values)
        return cls(values.__getitem__, len(values) - 1)


@dataclass(frozen=True)
class ProbeResult:
    partial_length: float
    verdict: str
    exceeded_at: int | None = None  # first horizon at which the threshold was reached


def sigma_cauchy_probe(seq: SequenceSpec, g: DistanceOracle, threshold: float) -> ProbeResult:
    """Partial g-length ``sum_{n < horizon} g(z_{n+1}, z_n)`` against a threshold.

    Says nothing about the sequence beyond the horizon.
    """
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    z = seq.materialize()
    total = 0.0
    exceeded_at = None
    for n in range(seq.horizon):
        total += g(z[n + 1], z[n])
        if exceeded_at is None and total >= threshold:
            exceeded_at = n + 1
    return ProbeResult(total, EXCEEDED if total >= threshold else BELOW, exceeded_at)


class PossibleConstantSubsequence(ValueError):
    """The last materialized value also occurs earlier in the prefix."""


def dedupe_sequence(seq: SequenceSpec) -> list:
    """Injective subsequence ``x_n = z_{k_n}`` with ``k_1 = 1``, ``k_{n+1} = last(k_n) + 1``.

    ``last(k)`` is the largest index in the prefix holding the value ``z_k``.
    Starting at ``k_1 = 1`` drops ``z_0``.

    Raises:
        PossibleConstantSubsequence: if the value at the horizon already
            occurred earlier, suggesting it may recur forever.
    """
    z = seq.materialize()
    last: dict = {}
    for k, value in enumerate(z):
        last[value] = k
    horizon = seq.horizon
    if z.index(z[horizon]) != horizon:
        raise PossibleConstantSubsequence(
            f"value {z[horizon]!r} at the horizon also occurs at index {z.index(z[horizon])}; "
            "the sequence may have a constant subsequence"
        )
    out = []
    k = 1
    while k <= horizon:
        out.append(z[k])
        k = last[z[k]] + 1
    return out


@dataclass(frozen=True)
class CounterexampleKit:
    """Distinct points ``x_1..x_N`` of finite g-length, with tail-sum objective.

    ``f_values[n]`` is ``sum_{i >= n} g(x_{i+1}, x_i)`` over the prefix
    (0-based here, so ``f_values[0]`` belongs to ``x_1``). ``f`` is +inf off
    the prefix. The map sends each point to its successor and anything else to
    the whole prefix.
    """

    M: tuple
    f_values: tuple[float, ...]
    g: DistanceOracle = field(repr=False, compare=False)
    notes: tuple[str, ...] = (TAIL_NOTE,)

    @property
    def horizon(self) -> int:
        return len(self.M)

    def index(self, x) -> int | None:
        try:
            return self.M.index(x)
        except ValueError:
            return None

    def f(self, x) -> float:
        i = self.index(x)
        return math.inf if i is None else self.f_values[i]

    def S(self, x) -> list:
        i = self.index(x)
        if i is None:
            return list(self.M)
        return [self.M[i + 1]] if i + 1 < len(self.M) else []


def build_counterexample(seq: SequenceSpec, g: DistanceOracle) -> CounterexampleKit:
    """Counterexample kit from a sequence of finite g-length.

    The caller vouches that the sequence has no convergent subsequence in the
    host; that cannot be checked from a prefix. Tail sums are accumulated from
    the horizon backwards so that ``f(x_n) - f(x_{n+1})`` reproduces each jump
    whenever the additions are exact.
    """
    M = tuple(dedupe_sequence(seq))
    jumps = [float(g(b, a)) for a, b in zip(M, M[1:])]
    for n, j in enumerate(jumps, start=1):
        if not math.isfinite(j):
            raise ValueError(f"g(x_{n + 1}, x_{n}) is not finite; the sequence has infinite g-length")
    f = [0.0] * len(M)
    for n in range(len(M) - 2, -1, -1):
        f[n] = f[n + 1] + jumps[n]
    if not math.isfinite(f[0]):
        raise ValueError("partial g-length is infinite")
    return CounterexampleKit(M, tuple(f), g)


@dataclass(frozen=True)
class KitReport:
    passed: bool
    failures: tuple[int, ...]  # 1-based prefix indices
    checked: int
    notes: tuple[str, ...]


def verify_caristi_unfixed(kit: CounterexampleKit) -> KitReport:
    """No prefix point is fixed by the map, yet the Caristi condition holds.

    The condition ``f(x_{n+1}) + g(x_{n+1}, x_n) <= f(x_n)`` is checked for
    ``n < N``; ``x_N`` is skipped at the prefix boundary.
    """
    failures = []
    for n, x in enumerate(kit.M, start=1):
        if x in kit.S(x):
            failures.append(n)
    for n in range(1, kit.horizon):
        x, y = kit.M[n - 1], kit.M[n]
        if not kit.f(y) + kit.g(y, x) <= kit.f(x):
            failures.append(n)
    failures = tuple(sorted(set(failures)))
    return KitReport(not failures, failures, kit.horizon - 1, kit.notes + (BOUNDARY_NOTE,))


def verify_ekeland_fails(kit: CounterexampleKit, eps: float = 0.5) -> KitReport:
    """Every ``x_n`` with ``n < N`` is beaten by ``x_{n+1}``.

    For ``eps < 1``, ``f(x_{n+1}) + eps*g(x_{n+1}, x_n) < f(x_n)``, so no
    prefix point is an Ekeland point. ``x_N`` is undecidable at the horizon.
    """
    failures = []
    for n in range(1, kit.horizon):
        x, y = kit.M[n - 1], kit.M[n]
        if not kit.f(y) + eps * kit.g(y, x) < kit.f(x):
            failures.append(n)
    notes = kit.notes + (f"x_{kit.horizon}: undecidable at horizon",)
    return KitReport(not failures, tuple(failures), kit.horizon - 1, notes)


def kit_g_length(kit: CounterexampleKit) -> float:
    return math.fsum(kit.g(b, a) for a, b in zip(kit.M, kit.M[1:]))
