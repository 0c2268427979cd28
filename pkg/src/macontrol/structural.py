"""Structural controllability: verdicts that depend on topology only."""
from __future__ import annotations

from itertools import combinations

import numpy as np

from .errors import NotATree, NotDiagonalizable, RepeatedCrossBranchWeights
from .graph_core import (
    DirectedGraph,
    bfs_relabel,
    laplacian,
    reachable_set,
    source_components,
    tree_root,
)
from .leader_select import LeaderSet, kalman_verdict

WEIGHT_LOW, WEIGHT_HIGH = 0.5, 1.5


def structurally_controllable(g: DirectedGraph, leaders) -> bool:
    """Some positive weighting makes ``g`` controllable from ``leaders``
    exactly when every agent is reachable from a leader."""
    leaders = LeaderSet.of(leaders, g.n)
    return len(reachable_set(g, leaders)) == g.n


def min_structural_leaders(g: DirectedGraph) -> tuple[int, LeaderSet]:
    """Fewest leaders for structural controllability, with a witness set
    (the smallest node of every source component)."""
    comps = source_components(g)
    return len(comps), LeaderSet(tuple(min(c) for c in comps))


def _ancestors(t: DirectedGraph) -> dict[int, set[int]]:
    parent = {e.dst: e.src for e in t.edges}
    anc = {}
    for v in range(1, t.n + 1):
        chain, u = set(), v
        while u in parent:
            u = parent[u]
            chain.add(u)
        anc[v] = chain
    return anc


def _check_root(t: DirectedGraph, root: int):
    actual = tree_root(t)
    if actual != root:
        raise NotATree(f"tree is rooted at {actual}, not {root}")


def cross_branch_collisions(t: DirectedGraph) -> list[tuple]:
    """Pairs of tree edges with equal weights whose children are unrelated."""
    anc = _ancestors(t)
    clashes = []
    for e, f in combinations(t.edges, 2):
        if e.weight != f.weight:
            continue
        if e.dst not in anc[f.dst] and f.dst not in anc[e.dst]:
            clashes.append((e, f))
    return clashes


def tree_weight_controllable(t: DirectedGraph, root: int) -> bool:
    """Is the tree controllable from its root?

    True iff no two edges leading into different branches carry the same
    weight. Weights are compared exactly as given.
    """
    _check_root(t, root)
    return not cross_branch_collisions(t)


def tree_eig_matrix(t: DirectedGraph, root: int) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form eigenvectors of a tree Laplacian.

    Nodes are first relabelled breadth-first from ``root`` (see
    :func:`bfs_relabel`); in those labels the Laplacian is lower triangular,
    its eigenvalues are the diagonal entries and the eigenvector matrix is
    unit lower triangular with

        p[i, j] = l[i, k] * p[k, j] / (lambda_j - l[i, i])    (i > j)

    where ``k`` is the parent of ``i``. Returns ``(P, D)`` with
    ``L @ P == P @ D`` for the relabelled Laplacian ``L``.
    """
    _check_root(t, root)
    clashes = cross_branch_collisions(t)
    if clashes:
        e, f = clashes[0]
        raise RepeatedCrossBranchWeights(
            f"edges {e.src}->{e.dst} and {f.src}->{f.dst} share weight {e.weight}"
        )
    _, h = bfs_relabel(t, root)
    L = laplacian(h)
    n = h.n
    lam = np.diag(L).copy()
    parent = {e.dst - 1: e.src - 1 for e in h.edges}
    P = np.eye(n)
    for i in range(1, n):
        k = parent[i]
        for j in range(i):
            if P[k, j] == 0.0:
                continue
            gap = lam[j] - L[i, i]
            if gap == 0.0:
                raise NotDiagonalizable(
                    f"relabelled nodes {j + 1} and {i + 1} lie on one branch with equal in-weight"
                )
            P[i, j] = L[i, k] * P[k, j] / gap
    return P, np.diag(lam)


def certify_by_random_weights(g: DirectedGraph, leaders, trials: int = 20,
                              seed: int = 0) -> dict | None:
    """Search for a controllable weighting of ``g``'s edges.

    Trial ``t`` draws every edge weight uniformly from [0.5, 1.5] with seed
    ``seed + t``. Returns ``{(src, dst): weight}`` for the first trial whose
    Kalman test passes, or ``None`` (immediately, if reachability already
    rules controllability out).
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    leaders = LeaderSet.of(leaders, g.n)
    if not structurally_controllable(g, leaders):
        return None
    keys = [(e.src, e.dst) for e in g.edges]
    for trial in range(trials):
        rng = np.random.default_rng(seed + trial)
        weights = dict(zip(keys, rng.uniform(WEIGHT_LOW, WEIGHT_HIGH, len(keys)).tolist()))
        h = g.with_weights(weights)
        if kalman_verdict(laplacian(h), leaders).controllable:
            return weights
    return None
