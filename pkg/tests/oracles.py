"""Brute-force oracles and random instance generators for the test suite.

Everything here is written with plain loops and shares no code with the
package, so it can serve as an independent check.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def shortest_paths(weights):
    """Floyd-Warshall closure of a complete weighted digraph (plain lists)."""
    n = len(weights)
    d = [[0 if i == j else weights[i][j] for j in range(n)] for i in range(n)]
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return d


def random_metric(rng, n, lo=1, hi=9):
    w = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            w[i][j] = w[j][i] = int(rng.integers(lo, hi + 1))
    return shortest_paths(w)


def random_quasimetric(rng, n, lo=1, hi=9):
    """Asymmetric integer quasi-metric (n >= 2): resamples until asymmetric."""
    while True:
        w = [[0 if i == j else int(rng.integers(lo, hi + 1)) for j in range(n)] for i in range(n)]
        d = shortest_paths(w)
        if any(d[i][j] != d[j][i] for i in range(n) for j in range(n)):
            return d


def is_symmetric(d):
    n = len(d)
    return all(d[i][j] == d[j][i] for i in range(n) for j in range(n))


def has_triangle(d):
    n = len(d)
    return all(d[i][k] <= d[i][j] + d[j][k] for i, j, k in itertools.product(range(n), repeat=3))


def classify_oracle(d):
    sym, tri = is_symmetric(d), has_triangle(d)
    if sym and tri:
        return "Metric"
    if tri:
        return "QuasiMetric"
    if sym:
        return "SymmetricPremetric"
    return "Premetric"


def ekeland_points_premetric(f, g, eps):
    """All v with f(v) <= f(x) + eps*g(x, v) for every x."""
    n = len(f)
    return {v for v in range(n) if all(f[v] <= f[x] + eps * g[x][v] for x in range(n))}


def ekeland_points_metric(f, d, lam, x0):
    """All x_lam satisfying both metric Ekeland inequalities."""
    n = len(f)
    out = set()
    for v in range(n):
        if not lam * d[v][x0] <= f[x0] - f[v]:
            continue
        if all(f[x] + lam * d[v][x] > f[v] for x in range(n) if x != v):
            out.add(v)
    return out


def harmonic(n):
    from fractions import Fraction

    return sum(Fraction(1, k) for k in range(1, n + 1))


def as_array(d):
    return np.array(d, dtype=float)


INF = math.inf
