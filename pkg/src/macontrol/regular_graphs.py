"""Controllability shortcuts for in-degree regular graphs with unit weights.

With every in-degree equal to ``d`` the Laplacian is ``d I - A``, so the
Krylov space of ``L`` from agent 1 equals that of ``A``, whose entries count
walks. Everything here is exact integer arithmetic.
"""
from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from .errors import BudgetExceeded, NotInDegreeRegular, UnitWeightsRequired
from .graph_core import DirectedGraph, adjacency, is_in_degree_regular
from .leader_select import DEFAULT_BUDGET


def _require_regular(g: DirectedGraph):
    if not is_in_degree_regular(g):
        raise NotInDegreeRegular(f"in-degrees differ: {g.in_degrees()}")
    odd = [e for e in g.edges if e.weight != 1.0]
    if odd:
        e = odd[0]
        raise UnitWeightsRequired(
            f"walk-count tests assume unit weights; edge {e.src}->{e.dst} has weight {e.weight}"
        )


def _int_adjacency(g) -> np.ndarray:
    return adjacency(g, weighted=False).astype(object)


def walk_sum_matrix(g: DirectedGraph) -> np.ndarray:
    """``S = A + A^2 + ... + A^(n-1)``; ``S[i, j]`` counts walks from j+1 to i+1."""
    _require_regular(g)
    A = _int_adjacency(g)
    S = np.zeros((g.n, g.n), dtype=object)
    P = np.eye(g.n, dtype=int).astype(object)
    for _ in range(g.n - 1):
        P = P.dot(A)
        S = S + P
    return S


def path_count_matrix(g: DirectedGraph) -> np.ndarray:
    """``m[i, j]`` = number of length-(j+1) walks from agent 1 to agent i+2.

    Returned as an ``(n-1, n-1)`` object array of Python ints.
    """
    _require_regular(g)
    if g.n < 2:
        raise ValueError("path count matrix needs at least two agents")
    A = _int_adjacency(g)
    v = np.zeros(g.n, dtype=object)
    v[0] = 1
    cols = []
    for _ in range(g.n - 1):
        v = A.dot(v)
        cols.append(v[1:])
    return np.column_stack(cols)


def integer_det(M) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    a = [[int(x) for x in row] for row in M]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] if n else 1


def regular_slc_by_agent1(g: DirectedGraph) -> bool:
    """Agent 1 alone controls ``g`` iff the path count matrix is invertible."""
    if g.n == 1:
        _require_regular(g)
        return True
    return integer_det(path_count_matrix(g)) != 0


def _column_cover(S, j) -> frozenset:
    return frozenset(i for i in range(S.shape[0]) if i == j or S[i, j] != 0)


def regular_never_slc(g: DirectedGraph) -> bool:
    """True when every column of ``S`` has an off-diagonal zero, i.e. no
    single agent reaches all others; no single leader can then work."""
    S = walk_sum_matrix(g)
    return all(len(_column_cover(S, j)) < g.n for j in range(g.n))


def regular_leader_lower_bound(g: DirectedGraph, budget: int = DEFAULT_BUDGET) -> int:
    """Fewest columns of ``S`` that jointly cover every agent.

    Column ``j`` covers the agents reachable from ``j`` and ``j`` itself.
    This is a lower bound on the number of leaders.
    """
    S = walk_sum_matrix(g)
    n = g.n
    covers = [_column_cover(S, j) for j in range(n)]
    everyone = frozenset(range(n))
    examined = 0
    for m in range(1, n + 1):
        examined += math.comb(n, m)
        if examined > budget:
            raise BudgetExceeded(f"set cover of size {m} needs {examined} candidates")
        for cols in combinations(range(n), m):
            if frozenset().union(*(covers[j] for j in cols)) == everyone:
                return m
    return n


def regular_structural(g: DirectedGraph) -> bool:
    """Some column of ``S`` is nonzero off the diagonal (a spanning-tree root exists)."""
    S = walk_sum_matrix(g)
    return any(len(_column_cover(S, j)) == g.n for j in range(g.n))
