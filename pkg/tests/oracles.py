"""Independent reference implementations used by the tests.

Everything here avoids the package's numerical machinery: ranks are computed
by Gaussian elimination over exact rationals, so the float routines are
checked against arithmetic that cannot suffer from rounding.
"""
from fractions import Fraction
from itertools import combinations

import numpy as np

from macontrol.graph_core import DirectedGraph


def exact_rank(rows) -> int:
    M = [[Fraction(x) for x in row] for row in rows]
    rank = 0
    ncols = len(M[0]) if M else 0
    for c in range(ncols):
        pivot = next((i for i in range(rank, len(M)) if M[i][c] != 0), None)
        if pivot is None:
            continue
        M[rank], M[pivot] = M[pivot], M[rank]
        for i in range(len(M)):
            if i != rank and M[i][c] != 0:
                f = M[i][c] / M[rank][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[rank])]
        rank += 1
    return rank


def exact_laplacian(g: DirectedGraph):
    n = g.n
    L = [[Fraction(0)] * n for _ in range(n)]
    for e in g.edges:
        w = Fraction(e.weight)
        L[e.dst - 1][e.src - 1] -= w
        L[e.dst - 1][e.dst - 1] += w
    return L


def exact_kalman_rank(g: DirectedGraph, leaders) -> int:
    """Rank of (B, LB, ..., L^(n-1) B) in exact rational arithmetic."""
    n = g.n
    L = exact_laplacian(g)
    cols = []
    for leader in leaders:
        v = [Fraction(int(i == leader - 1)) for i in range(n)]
        for _ in range(n):
            cols.append(v)
            v = [sum(L[i][j] * v[j] for j in range(n)) for i in range(n)]
    return exact_rank([[c[i] for c in cols] for i in range(n)])


def exact_controllable(g, leaders) -> bool:
    return exact_kalman_rank(g, leaders) == g.n


def brute_force_min_leaders(g: DirectedGraph, required=()) -> tuple[int, list[tuple]]:
    """Smallest leader sets by trying every subset with the exact oracle."""
    others = [v for v in range(1, g.n + 1) if v not in required]
    for k in range(max(len(required), 1), g.n + 1):
        found = [
            tuple(sorted(tuple(required) + extra))
            for extra in combinations(others, k - len(required))
            if exact_controllable(g, tuple(required) + extra)
        ]
        if found:
            return k, sorted(found)
    raise AssertionError("the full agent set is always controllable")


def bfs_reachable(g: DirectedGraph, sources) -> set:
    succ = {v: [] for v in range(1, g.n + 1)}
    for e in g.edges:
        succ[e.src].append(e.dst)
    seen, stack = set(sources), list(sources)
    while stack:
        for w in succ[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def has_spanning_tree(g) -> bool:
    return any(len(bfs_reachable(g, [v])) == g.n for v in range(1, g.n + 1))


# -- random instance generators ------------------------------------------------

def random_digraph(rng: np.random.Generator, n: int, p: float = 0.4, unit=False) -> DirectedGraph:
    edges = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j and rng.random() < p:
                w = 1.0 if unit else float(rng.uniform(0.5, 1.5))
                edges.append((i, j, w))
    return DirectedGraph(n, edges)


def random_tree(rng, n: int, weights=None, root=1) -> DirectedGraph:
    """Random tree with every node's parent among earlier nodes, then a random
    relabelling that sends the first node to ``root``."""
    perm = [root] + [v for v in rng.permutation(np.arange(1, n + 1)).tolist() if v != root]
    edges = []
    for i in range(2, n + 1):
        parent = int(rng.integers(1, i))
        w = 1.0 if weights is None else float(rng.choice(weights))
        edges.append((perm[parent - 1], perm[i - 1], w))
    return DirectedGraph(n, edges)


def random_spanning_graph(rng, n: int, extra_p: float = 0.25, unit=True) -> DirectedGraph:
    """A random tree plus random extra edges, relabelled at random."""
    pairs = {(int(rng.integers(1, i)), i) for i in range(2, n + 1)}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j and rng.random() < extra_p:
                pairs.add((i, j))
    perm = rng.permutation(np.arange(1, n + 1)).tolist()
    edges = []
    for a, b in sorted(pairs):
        w = 1.0 if unit else float(rng.uniform(0.5, 1.5))
        edges.append((perm[a - 1], perm[b - 1], w))
    return DirectedGraph(n, edges)


def random_regular(rng, n: int, d: int) -> DirectedGraph:
    """Every node gets exactly ``d`` distinct in-neighbours, unit weights."""
    edges = []
    for v in range(1, n + 1):
        others = [u for u in range(1, n + 1) if u != v]
        for u in rng.choice(others, size=d, replace=False).tolist():
            edges.append((u, v))
    return DirectedGraph(n, edges)


def circulant(n: int, steps) -> DirectedGraph:
    return DirectedGraph(n, [(i, (i - 1 + s) % n + 1) for i in range(1, n + 1) for s in steps])


def cycle(n: int) -> DirectedGraph:
    return circulant(n, [1])


EXAMPLE1 = DirectedGraph(4, [(1, 2), (1, 3), (2, 3), (1, 4), (2, 4), (3, 4)])
EXAMPLE2 = DirectedGraph(5, [(1, 2), (5, 2), (2, 3), (3, 4), (3, 5), (4, 5)])
