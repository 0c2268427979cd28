"""Restore single-leader controllability by reweighting as few edges as possible.

The number of edges that must change equals the rank deficiency of the
controllability matrix. The procedure:

1. relabel nodes breadth-first from a spanning-tree root (the leader);
2. find the rows of the controllability matrix that depend on earlier rows;
3. for the ``j``-th such row ``i``, raise the weight of the edge into ``i``
   from its lowest-labelled in-neighbour by ``j * theta``;
4. repeat with ``theta *= 1.1`` until the rank is full.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import IterationLimitExceeded, NoOffDiagonalEntry, NoSpanningTree, PlanMismatch
from .graph_core import (
    DirectedGraph,
    Edge,
    bfs_relabel,
    invert_permutation,
    laplacian,
    spanning_tree_roots,
)
from .leader_select import ControllabilityVerdict, controllability_matrix, kalman_verdict
from .spectral import EPS, numerical_rank

THETA_GROWTH = 1.1


@dataclass(frozen=True)
class AdjustedEdge:
    src: int
    dst: int
    old_weight: float
    new_weight: float


@dataclass(frozen=True)
class AdjustmentPlan:
    root: int
    # relabel_permutation[v - 1] is the working label of original node v
    relabel_permutation: tuple[int, ...]
    initial_rank: int
    adjusted_edges: tuple[AdjustedEdge, ...]
    iterations: int
    final_rank: int
    theta_final: float
    n: int
    diagnostics: tuple[str, ...] = field(default=())

    @property
    def succeeded(self) -> bool:
        return self.final_rank == self.n

    def new_weights(self) -> dict[tuple[int, int], float]:
        return {(e.src, e.dst): e.new_weight for e in self.adjusted_edges}

    def apply(self, g: DirectedGraph) -> DirectedGraph:
        for e in self.adjusted_edges:
            if (e.src, e.dst) not in g.weights:
                raise PlanMismatch(f"edge {e.src}->{e.dst} is not in the graph")
        return g.with_weights(self.new_weights())


def _normalised_columns(C):
    norms = np.linalg.norm(C, axis=0)
    return C[:, norms > 0] / norms[norms > 0]


def rank_deficiency(L, leader: int, tol: float | None = None) -> int:
    L = np.asarray(L)
    return L.shape[0] - kalman_verdict(L, [leader], tol).rank


def dependent_rows(C, tol: float | None = None) -> list[int]:
    """1-based indices of rows that are combinations of earlier rows.

    Rows are scanned top-down and kept while they raise the rank, so the
    first of any dependent group survives. Deleting the returned rows
    leaves a full-row-rank matrix.
    """
    C = _normalised_columns(np.asarray(C, dtype=float))
    if C.size == 0:
        return list(range(1, C.shape[0] + 1))
    if tol is None:
        tol = max(C.shape) * EPS * float(np.linalg.norm(C, 2))
    kept, dropped = [], []
    for i in range(C.shape[0]):
        if numerical_rank(C[kept + [i]], tol) > len(kept):
            kept.append(i)
        else:
            dropped.append(i + 1)
    return dropped


def select_edge_for_row(L, i: int) -> Edge:
    """Edge into agent ``i`` from the lowest-labelled agent in its row of ``L``."""
    L = np.asarray(L)
    nz = np.flatnonzero(L[i - 1])
    if nz.size == 0 or nz[0] == i - 1:
        raise NoOffDiagonalEntry(f"row {i} has no in-neighbour left of the diagonal")
    j = int(nz[0]) + 1
    return Edge(j, i, float(-L[i - 1, j - 1]))


def apply_delta(L, edge, delta: float) -> np.ndarray:
    """Raise the weight of ``edge = (j, i)`` by ``delta``; rows keep summing to 0."""
    j, i = edge[0], edge[1]
    L = np.array(L, dtype=float)
    if L[i - 1, j - 1] == 0:
        raise PlanMismatch(f"no edge {j}->{i} in this Laplacian")
    L[i - 1, j - 1] -= delta
    L[i - 1, i - 1] += delta
    return L


def adjust_weights(
    g: DirectedGraph,
    theta0: float = 0.1,
    max_iterations: int = 200,
    tol: float | None = None,
    root: int | None = None,
    fallback_patience: int | None = 10,
) -> AdjustmentPlan:
    """Find the fewest edges whose reweighting makes ``g`` controllable from
    a single root.

    Every spanning-tree root is tried (or only ``root`` when given). A root
    that already controls the graph gives an empty plan. Otherwise the root
    with the highest controllability rank is used, which minimises the
    number of edges to touch; ties go to the smallest node id.

    Raises
    ------
    NoSpanningTree
        ``g`` has no spanning tree, or ``root`` does not reach every node.
    IterationLimitExceeded
        Rank still deficient after ``max_iterations``; ``exc.plan`` holds
        the partial plan.

    Notes
    -----
    Each row set gets ``fallback_patience`` escalation rounds before the
    next one is tried (``None`` spends the whole budget on the first set).
    Every attempt restarts from the original weights, so the plan always
    touches exactly as many edges as the rank deficiency.
    """
    if theta0 <= 0:
        raise ValueError("theta0 must be positive")
    n = g.n
    roots = sorted(spanning_tree_roots(g))
    if not roots:
        raise NoSpanningTree("graph has no spanning tree; single-leader adjustment impossible")
    if root is not None:
        if root not in roots:
            raise NoSpanningTree(f"node {root} does not reach every node")
        roots = [root]

    best = None
    for r in roots:
        perm, h = bfs_relabel(g, r)
        L = laplacian(h)
        rank = kalman_verdict(L, [1], tol).rank
        if rank == n:
            return AdjustmentPlan(r, perm, rank, (), 0, rank, 0.0, n)
        if best is None or rank > best[3]:
            best = (r, perm, L, rank)
    r, perm, L, initial_rank = best

    C = controllability_matrix(L, [1])
    rows = dependent_rows(C, tol)
    diagnostics = []
    if len(rows) != n - initial_rank:
        diagnostics.append(
            f"row elimination found {len(rows)} dependent rows for rank deficiency "
            f"{n - initial_rank}"
        )

    # The rows picked by elimination do not always work: reweighting the edge
    # into one of them can move the dependency elsewhere. Other row sets of
    # the same size are then tried, each starting from the original weights.
    L0 = L
    iterations, used, targets_rows = 0, 0, ()
    for choice in _row_choices(C, rows, tol):
        if iterations:
            diagnostics.append(
                f"rows {list(targets_rows)} did not restore full rank after "
                f"{used} iterations; retrying with rows {list(choice)}"
            )
        targets_rows = choice
        targets = [select_edge_for_row(L0, i) for i in choice]
        patience = max_iterations - iterations
        if fallback_patience is not None:
            patience = min(patience, fallback_patience)
        L, rank, used, theta_used = _escalate(L0, targets, theta0, patience, tol)
        iterations += used
        if rank == n or iterations >= max_iterations:
            break
    inv = invert_permutation(perm)
    old = g.weights
    adjusted = []
    for e in targets:
        src, dst = inv[e.src - 1], inv[e.dst - 1]
        new = float(-L[e.dst - 1, e.src - 1])
        assert new > 0
        adjusted.append(AdjustedEdge(src, dst, old[src, dst], new))
    plan = AdjustmentPlan(
        r, perm, initial_rank, tuple(adjusted), iterations, rank, theta_used, n,
        tuple(diagnostics),
    )
    if rank < n:
        raise IterationLimitExceeded(plan)
    return plan


def _escalate(L, targets, theta, max_rounds, tol):
    n = L.shape[0]
    rank = kalman_verdict(L, [1], tol).rank
    rounds, theta_used = 0, 0.0
    while rank < n and rounds < max_rounds:
        for j, e in enumerate(targets, start=1):
            L = apply_delta(L, e, j * theta)
        theta_used = theta
        rounds += 1
        rank = kalman_verdict(L, [1], tol).rank
        theta *= THETA_GROWTH
    return L, rank, rounds, theta_used


def _row_choices(C, first, tol):
    """``first``, then every other set of rows (never row 1) of the same size
    whose removal leaves the rank unchanged, in lexicographic order."""
    yield tuple(first)
    Cn = _normalised_columns(np.asarray(C, dtype=float))
    if tol is None:
        tol = max(Cn.shape) * EPS * float(np.linalg.norm(Cn, 2))
    n = Cn.shape[0]
    target = numerical_rank(Cn, tol)
    for rows in combinations(range(2, n + 1), len(first)):
        if rows == tuple(first):
            continue
        keep = [i for i in range(n) if i + 1 not in rows]
        if numerical_rank(Cn[keep], tol) == target:
            yield rows


def verify_plan(g: DirectedGraph, plan: AdjustmentPlan, tol: float | None = None) -> ControllabilityVerdict:
    """Rebuild the adjusted graph from scratch and run the Kalman test with
    the plan's root as the only leader."""
    return kalman_verdict(laplacian(plan.apply(g)), [plan.root], tol)
