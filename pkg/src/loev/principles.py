"""Variational principles on finite spaces, solved by following orbits.

Every solver builds the set-valued map used in the corresponding existence
proof, runs the orbit engine from the given start point, and returns the
endpoint together with the residuals that certify the theorem's conclusion.
Membership tests ``f(y) < f(x) - c*g`` are always evaluated as
``f(y) + c*g < f(x)`` so that +inf never meets -inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import HypothesisViolation, LongOrbitError
from .orbit_engine import (
    BudgetExceeded,
    Orbit,
    OrbitBudget,
    OrbitOutcome,
    SetValuedMap,
    greedy_orbit,
    idempotent_orbit,
)
from .spaces import METRIC, FiniteSpace, ObjectiveTable, classify_distance

PREMETRIC_MODE = "premetric"
METRIC_MODE = "metric"


def _table(g) -> np.ndarray:
    if isinstance(g, FiniteSpace):
        return g.dist
    d = np.asarray(g, dtype=float)
    classify_distance(d)
    return d


def _objective(f) -> ObjectiveTable:
    return f if isinstance(f, ObjectiveTable) else ObjectiveTable(tuple(f))


def _check_size(f: ObjectiveTable, d: np.ndarray) -> int:
    if len(f) != d.shape[0]:
        raise ValueError(f"objective has {len(f)} values but the space has {d.shape[0]} points")
    return len(f)


def _check_start(x0: int, n: int) -> int:
    if int(x0) != x0 or not 0 <= x0 < n:
        raise IndexError(f"start point {x0!r} is out of range for a space of size {n}")
    return int(x0)


def default_budget(gap: float, scale: float, n: int) -> OrbitBudget:
    """Budget that a correctly hypothesized instance can never exhaust.

    ``gap`` bounds the total decrease available along the orbit (for example
    ``f(x0) - min f``); telescoping bounds the orbit length by ``gap/scale``
    (or twice that for the halved Caristi map). On a finite space each point
    is visited at most once because the objective strictly decreases.
    """
    length = 2.0 * gap / scale + 1.0 if math.isfinite(gap) else math.inf
    return OrbitBudget(max_steps=n + 1, length_threshold=length)


def _run(run, S, d, x0, budget, n):
    orbit, outcome = run(S, d, x0, budget, n=n)
    if isinstance(outcome, BudgetExceeded):
        raise LongOrbitError(orbit, outcome)
    return orbit, outcome


@dataclass(frozen=True)
class HypothesisCheck:
    """Outcome of an exhaustive hypothesis check over ``checked`` points."""

    name: str
    passed: bool
    checked: int
    failures: tuple[int, ...] = ()

    def summary(self, labels: Sequence[str] | None = None) -> str:
        if self.passed:
            return f"{self.name}: pass ({self.checked}/{self.checked} points)"
        names = [labels[i] if labels else str(i) for i in self.failures]
        ok = self.checked - len(self.failures)
        return f"{self.name}: FAIL ({ok}/{self.checked} points), violated at {', '.join(names)}"

    def raise_if_failed(self) -> None:
        if not self.passed:
            raise HypothesisViolation(
                f"{self.name} fails at point {self.failures[0]}", witness=self.failures[0]
            )


# --------------------------------------------------------------------------
# Ekeland
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class EkelandCertificate:
    """Ekeland point and residuals of the conclusion.

    ``domination_residual`` is ``min over x != point`` of
    ``f(x) + scale*dist(x, point) - f(point)`` (``inf`` on a singleton). In
    premetric mode it must be >= 0; in metric mode > 0, and
    ``descent_residual = f(x0) - f(point) - scale*d(point, x0)`` must be >= 0.
    """

    mode: str
    point: int
    scale: float
    x0: int
    domination_residual: float
    descent_residual: float | None
    point_residuals: tuple[float | None, ...] = field(repr=False)
    orbit: Orbit = field(repr=False)
    outcome: OrbitOutcome = field(repr=False)

    @property
    def certified(self) -> bool:
        if self.mode == METRIC_MODE:
            return self.domination_residual > 0 and self.descent_residual >= 0
        return self.domination_residual >= 0


def _domination(f: ObjectiveTable, d: np.ndarray, scale: float, v: int, first_is_point: bool):
    fv = f[v]
    per_point: list[float | None] = []
    for x in range(len(f)):
        if x == v:
            per_point.append(None)
            continue
        dist = d[v, x] if first_is_point else d[x, v]
        per_point.append(f[x] + scale * float(dist) - fv)
    finite = [r for r in per_point if r is not None]
    return (min(finite) if finite else math.inf), tuple(per_point)


def ekeland_premetric(f, g, eps: float, x0: int, budget: OrbitBudget | None = None) -> EkelandCertificate:
    """Find ``v`` with ``f(v) <= f(x) + eps*g(x, v)`` for every ``x``.

    Follows the strict descent map ``S(x) = {y : f(y) + eps*g(y, x) < f(x)}``,
    which needs no symmetry or triangle inequality from ``g``.
    """
    f = _objective(f)
    g = _table(g)
    n = _check_size(f, g)
    x0 = _check_start(x0, n)
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    if not math.isfinite(f[x0]):
        raise ValueError(f"start point {x0} is outside the domain of f")
    vals = f.values

    def S(x: int) -> list[int]:
        return [y for y in range(n) if vals[y] + eps * float(g[y, x]) < vals[x]]

    budget = budget or default_budget(f[x0] - f.min, eps, n)
    orbit, outcome = _run(greedy_orbit, S, g, x0, budget, n)
    v = outcome.endpoint
    dom, per_point = _domination(f, g, eps, v, first_is_point=False)
    return EkelandCertificate(PREMETRIC_MODE, v, eps, x0, dom, None, per_point, orbit, outcome)


def ekeland_metric(f, d, lam: float, x0: int, budget: OrbitBudget | None = None) -> EkelandCertificate:
    """Full Ekeland principle on a finite metric space.

    Returns ``x_lam`` with ``lam*d(x_lam, x0) <= f(x0) - f(x_lam)`` and
    ``f(x) + lam*d(x_lam, x) > f(x_lam)`` for all ``x != x_lam``. The
    non-strict map ``S(x) = {y : f(y) + lam*d(y, x) <= f(x)}`` is idempotent
    thanks to the triangle inequality, so the orbit ends where ``S`` collapses
    to the point itself.
    """
    f = _objective(f)
    if isinstance(d, FiniteSpace):
        cls, d = d.distance_class, d.dist
    else:
        d = np.asarray(d, dtype=float)
        cls = classify_distance(d)
    if cls.kind != METRIC:
        raise ValueError(f"metric Ekeland needs a metric, got {cls.kind}")
    n = _check_size(f, d)
    x0 = _check_start(x0, n)
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam!r}")
    if not math.isfinite(f[x0]):
        raise ValueError(f"start point {x0} is outside the domain of f")
    vals = f.values

    def S(x: int) -> list[int]:
        return [y for y in range(n) if vals[y] + lam * float(d[y, x]) <= vals[x]]

    budget = budget or default_budget(f[x0] - f.min, lam, n)
    orbit, outcome = _run(idempotent_orbit, S, d, x0, budget, n)
    v = outcome.endpoint
    dom, per_point = _domination(f, d, lam, v, first_is_point=True)
    descent = (f[x0] - f[v]) - lam * float(d[v, x0])
    return EkelandCertificate(METRIC_MODE, v, lam, x0, dom, descent, per_point, orbit, outcome)


@dataclass(frozen=True)
class VerificationReport:
    ok: bool
    domination_residual: float
    descent_residual: float | None
    violations: tuple[int, ...]
    matches_reported: bool


def verify_certificate(space, f, distance, certificate: EkelandCertificate) -> VerificationReport:
    """Recompute an Ekeland certificate by plain enumeration.

    Shares no code with the solvers. ``space`` supplies the point count (a
    ``FiniteSpace`` or an int); ``distance`` is a table or a callable.
    Violations are points whose residual is negative, or non-positive in
    metric mode.
    """
    n = len(space) if not isinstance(space, int) else space
    dist = distance if callable(distance) else (lambda i, j, _t=distance: float(_t[i][j]))
    fv = [float(v) for v in f]
    v = certificate.point
    lam = certificate.scale
    metric = certificate.mode == METRIC_MODE

    best = math.inf
    violations = []
    for x in range(n):
        if x == v:
            continue
        r = fv[x] + lam * (dist(v, x) if metric else dist(x, v)) - fv[v]
        if r < best:
            best = r
        if r < 0 or (metric and r <= 0):
            violations.append(x)

    descent = None
    if metric:
        x0 = certificate.x0
        descent = (fv[x0] - fv[v]) - lam * dist(v, x0)
    ok = not violations and (descent is None or descent >= 0)
    matches = best == certificate.domination_residual and descent == certificate.descent_residual
    return VerificationReport(ok, best, descent, tuple(violations), matches)


# --------------------------------------------------------------------------
# Caristi and Takahashi
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CaristiInstance:
    """Map ``T`` (one list of successors per point), objective and premetric."""

    T: tuple[tuple[int, ...], ...]
    f: ObjectiveTable
    g: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "f", _objective(self.f))
        object.__setattr__(self, "g", _table(self.g))
        n = _check_size(self.f, self.g)
        T = tuple(tuple(int(y) for y in row) for row in self.T)
        if len(T) != n:
            raise ValueError(f"T has {len(T)} values but the space has {n} points")
        for x, row in enumerate(T):
            if any(not 0 <= y < n for y in row):
                raise IndexError(f"T({x}) refers to a point outside the space")
        object.__setattr__(self, "T", T)

    def __len__(self) -> int:
        return len(self.T)


def check_caristi_condition(instance: CaristiInstance) -> HypothesisCheck:
    """Every ``x`` needs ``y in T(x)`` with ``f(y) + g(y, x) <= f(x)``."""
    f, g = instance.f.values, instance.g
    failures = tuple(
        x
        for x, row in enumerate(instance.T)
        if not any(f[y] + float(g[y, x]) <= f[x] for y in row)
    )
    return HypothesisCheck("CK condition", not failures, len(instance), failures)


def _halved_descent_map(f: ObjectiveTable, g: np.ndarray) -> SetValuedMap:
    vals, n = f.values, len(f)

    def S(x: int) -> list[int]:
        return [y for y in range(n) if vals[y] + 0.5 * float(g[y, x]) < vals[x]]

    return S


@dataclass(frozen=True)
class FixedPointResult:
    point: int
    orbit: Orbit = field(repr=False)
    outcome: OrbitOutcome = field(repr=False)


def caristi_fixed_point(instance: CaristiInstance, x0: int, budget: OrbitBudget | None = None) -> FixedPointResult:
    """Find ``x`` with ``x in T(x)`` for a map satisfying the Caristi condition.

    The orbit follows ``S(x) = {y : f(y) + g(y, x)/2 < f(x)}``. At its end the
    Caristi witness of ``T`` cannot move, so it is the point itself.
    """
    check_caristi_condition(instance).raise_if_failed()
    f, g, n = instance.f, instance.g, len(instance)
    x0 = _check_start(x0, n)
    budget = budget or default_budget(f[x0] - f.min, 1.0, n)
    orbit, outcome = _run(greedy_orbit, _halved_descent_map(f, g), g, x0, budget, n)
    xbar = outcome.endpoint
    if xbar not in instance.T[xbar]:
        # only reachable when rounding breaks g/2 < g for a tiny g
        raise RuntimeError(f"orbit ended at {xbar}, which is not fixed by T (floating-point loss)")
    return FixedPointResult(xbar, orbit, outcome)


def check_takahashi_condition(f, g) -> HypothesisCheck:
    """Every ``x`` above the infimum needs ``y != x`` with ``f(y) + g(y, x) <= f(x)``."""
    f = _objective(f)
    g = _table(g)
    n = _check_size(f, g)
    lo = f.min
    above = [x for x in range(n) if f[x] > lo]
    failures = tuple(
        x for x in above if not any(y != x and f[y] + float(g[y, x]) <= f[x] for y in range(n))
    )
    return HypothesisCheck("Takahashi condition", not failures, len(above), failures)


@dataclass(frozen=True)
class TakahashiResult:
    v: int
    is_min: bool
    condition_witness_failure: int | None
    orbit: Orbit = field(repr=False)
    outcome: OrbitOutcome = field(repr=False)


def takahashi_minimize(f, g, x0: int, budget: OrbitBudget | None = None) -> TakahashiResult:
    """Locate a minimizer, or a point where the Takahashi hypothesis breaks.

    The orbit uses the same halved descent map as the Caristi solver. Its end
    ``v`` is either a global minimizer or a point above the minimum with no
    ``y != v`` satisfying ``g(y, v) <= f(v) - f(y)``.
    """
    f = _objective(f)
    g = _table(g)
    n = _check_size(f, g)
    x0 = _check_start(x0, n)
    budget = budget or default_budget(f[x0] - f.min, 1.0, n)
    orbit, outcome = _run(greedy_orbit, _halved_descent_map(f, g), g, x0, budget, n)
    v = outcome.endpoint
    is_min = f[v] == f.min
    witness = None
    if not is_min:
        escapes = [y for y in range(n) if y != v and f[y] + float(g[y, v]) <= f[v]]
        if not escapes:
            witness = v
    return TakahashiResult(v, is_min, witness, orbit, outcome)


# --------------------------------------------------------------------------
# Oettli-Thera
# --------------------------------------------------------------------------


def _ext_table(rows, what: str) -> np.ndarray:
    p = np.array(rows, dtype=float)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise ValueError(f"{what} must be square, got shape {p.shape}")
    if np.isnan(p).any() or (p == -math.inf).any():
        raise ValueError(f"{what} contains NaN or -inf")
    return p


def triangle_failures(p: np.ndarray) -> list[tuple[int, int, int]]:
    """Triples ``(x, y, z)`` with ``p(x, z) > p(x, y) + p(y, z)``."""
    through = p[:, :, None] + p[None, :, :]
    return [tuple(int(i) for i in t) for t in np.argwhere(p[:, None, :] > through)]


@dataclass(frozen=True)
class OettliInstance:
    """Generalized pseudometric ``p`` (may hold +inf), metric ``d``, start and target set."""

    p: np.ndarray = field(repr=False)
    d: np.ndarray = field(repr=False)
    x0: int
    psi: frozenset[int]

    def __post_init__(self):
        p = _ext_table(self.p, "p")
        d = np.asarray(self.d, dtype=float)
        if classify_distance(d).kind != METRIC:
            raise ValueError("d must be a metric")
        if p.shape != d.shape:
            raise ValueError("p and d must have the same size")
        if (np.diag(p) != 0).any():
            raise ValueError("p must vanish on the diagonal")
        bad = triangle_failures(p)
        if bad:
            raise ValueError(f"p fails the triangle inequality at {bad[0]}")
        n = p.shape[0]
        _check_start(self.x0, n)
        psi = frozenset(int(x) for x in self.psi)
        if any(not 0 <= x < n for x in psi):
            raise IndexError("Psi refers to a point outside the space")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "psi", psi)

    def __len__(self) -> int:
        return self.p.shape[0]

    def descent_set(self) -> list[int]:
        """The set ``A = {x : p(x0, x) + d(x0, x) <= 0}``; always contains ``x0``."""
        x0 = self.x0
        return [x for x in range(len(self)) if self.p[x0, x] + self.d[x0, x] <= 0]

    def S(self, x: int) -> list[int]:
        return [y for y in range(len(self)) if self.p[x, y] + self.d[x, y] <= 0]


def check_oettli_hypothesis(instance: OettliInstance) -> HypothesisCheck:
    """Each ``x`` in ``A`` but outside ``Psi`` must have an escape ``y != x``."""
    outside = [x for x in instance.descent_set() if x not in instance.psi]
    failures = tuple(x for x in outside if not any(y != x for y in instance.S(x)))
    return HypothesisCheck("Oettli-Thera escape condition", not failures, len(outside), failures)


@dataclass(frozen=True)
class OettliResult:
    point: int
    in_A: bool
    in_Psi: bool
    A: tuple[int, ...]
    orbit: Orbit = field(repr=False)
    outcome: OrbitOutcome = field(repr=False)


def oettli_thera(instance: OettliInstance, budget: OrbitBudget | None = None) -> OettliResult:
    """Find a point of ``A`` that lies in ``Psi``.

    Runs the idempotent orbit of ``S(x) = {y : p(x, y) + d(x, y) <= 0}``,
    frozen at points of ``Psi`` so that a start already in ``Psi`` is kept.
    The orbit stays in ``A`` by the triangle inequality, and its length is
    bounded by ``-min p(x0, .)``.
    """
    check_oettli_hypothesis(instance).raise_if_failed()
    n, x0 = len(instance), instance.x0
    gap = -float(np.min(instance.p[x0]))
    budget = budget or default_budget(gap, 1.0, n)
    psi = instance.psi

    def S(x: int) -> list[int]:
        return [x] if x in psi else instance.S(x)

    orbit, outcome = _run(idempotent_orbit, S, instance.d, x0, budget, n)
    x = outcome.endpoint
    A = tuple(instance.descent_set())
    in_A = instance.p[x0, x] + instance.d[x0, x] <= 0
    return OettliResult(x, bool(in_A), x in instance.psi, A, orbit, outcome)


# --------------------------------------------------------------------------
# Fabian-Preiss
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FabianPreissInstance:
    """Pseudometrics ``p_i`` and objectives ``f_i`` with ``p_{i0}`` the host metric."""

    pseudometrics: tuple[np.ndarray, ...] = field(repr=False)
    objectives: tuple[ObjectiveTable, ...]
    i0: int
    x0: int
    metric: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        ps = tuple(np.asarray(p, dtype=float) for p in self.pseudometrics)
        fs = tuple(_objective(f) for f in self.objectives)
        if not ps or len(ps) != len(fs):
            raise ValueError("need one objective per pseudometric and at least one pair")
        n = ps[0].shape[0]
        for i, p in enumerate(ps):
            if p.shape != (n, n) or not np.isfinite(p).all() or (p < 0).any():
                raise ValueError(f"pseudometric {i} must be a finite nonnegative {n}x{n} table")
            if (np.diag(p) != 0).any() or (p != p.T).any():
                raise ValueError(f"pseudometric {i} must be symmetric with zero diagonal")
            bad = triangle_failures(p)
            if bad:
                raise ValueError(f"pseudometric {i} fails the triangle inequality at {bad[0]}")
            if len(fs[i]) != n:
                raise ValueError(f"objective {i} has {len(fs[i])} values, expected {n}")
        if not 0 <= self.i0 < len(ps):
            raise IndexError(f"i0={self.i0} is not a valid index")
        d = ps[self.i0] if self.metric is None else np.asarray(self.metric, dtype=float)
        if (ps[self.i0] != d).any():
            raise ValueError(f"pseudometric {self.i0} must equal the host metric")
        if classify_distance(d).kind != METRIC:
            raise ValueError("the host metric is not a metric")
        _check_start(self.x0, n)
        for i, f in enumerate(fs):
            if not math.isfinite(f[self.x0]):
                raise ValueError(f"start point {self.x0} is outside the domain of f_{i}")
        object.__setattr__(self, "pseudometrics", ps)
        object.__setattr__(self, "objectives", fs)
        object.__setattr__(self, "metric", d)

    def __len__(self) -> int:
        return self.metric.shape[0]

    def _moves(self, x: int, y: int) -> bool:
        return all(
            p[x, y] + f[y] <= f[x] for p, f in zip(self.pseudometrics, self.objectives)
        )

    def reachable_set(self) -> list[int]:
        """``Phi = {x : p_i(x0, x) <= f_i(x0) - f_i(x) for all i}``."""
        return [x for x in range(len(self)) if self._moves(self.x0, x)]


def check_fabian_preiss_hypothesis(instance: FabianPreissInstance) -> HypothesisCheck:
    """Each ``x`` in ``Phi`` with ``f_{i0}(x) > 0`` needs a joint descent ``y != x``."""
    f0 = instance.objectives[instance.i0]
    positive = [x for x in instance.reachable_set() if f0[x] > 0]
    n = len(instance)
    failures = tuple(
        x for x in positive if not any(y != x and instance._moves(x, y) for y in range(n))
    )
    return HypothesisCheck("Fabian-Preiss descent condition", not failures, len(positive), failures)


@dataclass(frozen=True)
class FabianPreissResult:
    point: int
    f_i0_value: float
    phi: tuple[int, ...]
    orbit: Orbit = field(repr=False)
    outcome: OrbitOutcome = field(repr=False)


def fabian_preiss(instance: FabianPreissInstance, budget: OrbitBudget | None = None) -> FabianPreissResult:
    """Find ``x`` in ``Phi`` with ``f_{i0}(x) <= 0``.

    The orbit lives inside ``Phi`` and moves along
    ``S(x) = {y in Phi : p_i(x, y) + f_i(y) <= f_i(x) for all i}``.
    """
    check_fabian_preiss_hypothesis(instance).raise_if_failed()
    phi = instance.reachable_set()
    members = set(phi)

    def S(x: int) -> list[int]:
        return [y for y in phi if instance._moves(x, y)] if x in members else []

    f0 = instance.objectives[instance.i0]
    x0, n = instance.x0, len(instance)
    gap = f0[x0] - min(f0[x] for x in phi)
    budget = budget or default_budget(gap, 1.0, n)
    orbit, outcome = _run(idempotent_orbit, S, instance.metric, x0, budget, n)
    x = outcome.endpoint
    return FabianPreissResult(x, f0[x], tuple(phi), orbit, outcome)
