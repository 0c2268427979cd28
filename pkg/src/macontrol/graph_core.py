"""Directed weighted interaction graphs and their combinatorial structure.

Nodes are labelled ``1..n`` everywhere in the public API. An edge
``(src, dst, w)`` means agent ``dst`` listens to agent ``src`` with weight
``w``, so it contributes ``-w`` to entry ``(dst, src)`` of the Laplacian.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import networkx as nx
import numpy as np

from .errors import GraphError, GraphParseError, NotATree, UnreachableNodes


class Edge(NamedTuple):
    src: int
    dst: int
    weight: float = 1.0


@dataclass(frozen=True)
class DirectedGraph:
    """Immutable weighted digraph on nodes ``1..n``.

    Edges are kept sorted by ``(src, dst)`` so that two graphs with the same
    edge set compare equal regardless of construction order.
    """

    n: int
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise GraphError(f"node count must be a positive integer, got {self.n!r}")
        seen = set()
        clean = []
        for e in self.edges:
            src, dst, w = _as_edge(e)
            if not (1 <= src <= self.n and 1 <= dst <= self.n):
                raise GraphError(f"edge {src}->{dst} outside nodes 1..{self.n}")
            if src == dst:
                raise GraphError(f"self-loop at node {src}")
            if (src, dst) in seen:
                raise GraphError(f"duplicate edge {src}->{dst}")
            if not (math.isfinite(w) and w > 0):
                raise GraphError(f"edge {src}->{dst} has non-positive weight {w!r}")
            seen.add((src, dst))
            clean.append(Edge(src, dst, w))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "edges", tuple(sorted(clean)))

    @classmethod
    def from_laplacian(cls, L, tol: float = 0.0) -> "DirectedGraph":
        """Read the edge set back off a Laplacian (off-diagonal entries < -tol)."""
        L = np.asarray(L, dtype=float)
        n = L.shape[0]
        edges = [
            Edge(j + 1, i + 1, float(-L[i, j]))
            for i in range(n)
            for j in range(n)
            if i != j and L[i, j] < -tol
        ]
        return cls(n, tuple(edges))

    @property
    def weights(self) -> dict[tuple[int, int], float]:
        return {(e.src, e.dst): e.weight for e in self.edges}

    def with_weights(self, new_weights: dict[tuple[int, int], float]) -> "DirectedGraph":
        """Copy of the graph with some existing edges reweighted."""
        current = self.weights
        missing = set(new_weights) - set(current)
        if missing:
            raise GraphError(f"cannot reweight absent edges {sorted(missing)}")
        current.update(new_weights)
        return DirectedGraph(self.n, tuple(Edge(s, d, w) for (s, d), w in current.items()))

    def parents(self, v: int) -> list[int]:
        return [e.src for e in self.edges if e.dst == v]

    def children(self, v: int) -> list[int]:
        return [e.dst for e in self.edges if e.src == v]

    def in_degrees(self) -> list[int]:
        """Neighbour counts (unweighted in-degree)."""
        deg = [0] * self.n
        for e in self.edges:
            deg[e.dst - 1] += 1
        return deg

    def weighted_in_degrees(self) -> list[float]:
        """Row sums of the adjacency matrix (the Laplacian diagonal)."""
        deg = [0.0] * self.n
        for e in self.edges:
            deg[e.dst - 1] += e.weight
        return deg

    def relabel(self, perm) -> "DirectedGraph":
        """Rename node ``v`` to ``perm[v - 1]``."""
        return DirectedGraph(
            self.n, tuple(Edge(perm[e.src - 1], perm[e.dst - 1], e.weight) for e in self.edges)
        )

    def to_networkx(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(1, self.n + 1))
        g.add_weighted_edges_from(self.edges)
        return g


def _as_edge(e) -> tuple[int, int, float]:
    if len(e) == 2:
        src, dst = e
        w = 1.0
    elif len(e) == 3:
        src, dst, w = e
    else:
        raise GraphError(f"edge must be (src, dst[, weight]), got {e!r}")
    try:
        return int(src), int(dst), float(w)
    except (TypeError, ValueError) as exc:
        raise GraphError(f"bad edge {e!r}") from exc


@dataclass(frozen=True)
class DistancePartition:
    cells: tuple[frozenset, ...]
    unreachable: frozenset

    @property
    def depth(self) -> int:
        return len(self.cells) - 1

    def distance(self, w: int) -> float:
        for i, cell in enumerate(self.cells):
            if w in cell:
                return i
        return math.inf


def laplacian(g: DirectedGraph) -> np.ndarray:
    """Weighted Laplacian ``L = D - A`` with ``D`` the weighted in-degrees.

    Examples
    --------
    >>> laplacian(DirectedGraph(2, ((1, 2, 0.5),)))
    array([[ 0. ,  0. ],
           [-0.5,  0.5]])
    """
    L = np.zeros((g.n, g.n))
    for e in g.edges:
        L[e.dst - 1, e.src - 1] = -e.weight
    # diagonal is minus the off-diagonal row sum so that L @ 1 vanishes
    np.fill_diagonal(L, 0.0)
    np.fill_diagonal(L, -L.sum(axis=1))
    return L


def adjacency(g: DirectedGraph, weighted: bool = True) -> np.ndarray:
    """``a[i, j]`` is the weight of edge ``j -> i`` (or 1 when unweighted)."""
    A = np.zeros((g.n, g.n), dtype=float if weighted else int)
    for e in g.edges:
        A[e.dst - 1, e.src - 1] = e.weight if weighted else 1
    return A


def _successors(g: DirectedGraph) -> list[list[int]]:
    succ = [[] for _ in range(g.n + 1)]
    for e in g.edges:
        succ[e.src].append(e.dst)
    for s in succ:
        s.sort()
    return succ


def distance_partition(g: DirectedGraph, v: int) -> DistancePartition:
    """Breadth-first layering of the nodes by distance from ``v``."""
    if not 1 <= v <= g.n:
        raise GraphError(f"node {v} outside 1..{g.n}")
    succ = _successors(g)
    dist = {v: 0}
    queue = deque([v])
    while queue:
        u = queue.popleft()
        for w in succ[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    depth = max(dist.values())
    cells = [set() for _ in range(depth + 1)]
    for w, d in dist.items():
        cells[d].add(w)
    unreachable = frozenset(range(1, g.n + 1)) - dist.keys()
    return DistancePartition(tuple(frozenset(c) for c in cells), unreachable)


def bfs_relabel(g: DirectedGraph, root: int) -> tuple[tuple[int, ...], DirectedGraph]:
    """Relabel nodes layer by layer from ``root`` (ascending ids inside a layer).

    Returns ``(perm, relabelled)`` where ``perm[v - 1]`` is the new label of
    original node ``v``. After relabelling, every node other than 1 has an
    in-neighbour with a smaller label.
    """
    part = distance_partition(g, root)
    if part.unreachable:
        raise UnreachableNodes(part.unreachable)
    order = [v for cell in part.cells for v in sorted(cell)]
    perm = [0] * g.n
    for new, old in enumerate(order, start=1):
        perm[old - 1] = new
    return tuple(perm), g.relabel(perm)


def invert_permutation(perm) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for old, new in enumerate(perm, start=1):
        inv[new - 1] = old
    return tuple(inv)


def reachable_set(g: DirectedGraph, sources: Iterable[int]) -> frozenset:
    succ = _successors(g)
    seen = set()
    stack = []
    for s in sources:
        if not 1 <= s <= g.n:
            raise GraphError(f"node {s} outside 1..{g.n}")
        if s not in seen:
            seen.add(s)
            stack.append(s)
    while stack:
        u = stack.pop()
        for w in succ[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return frozenset(seen)


def source_components(g: DirectedGraph) -> list[frozenset]:
    """Strongly connected components with no incoming edge, ordered by min node."""
    cond = nx.condensation(g.to_networkx())
    comps = [
        frozenset(cond.nodes[c]["members"]) for c in cond.nodes if cond.in_degree(c) == 0
    ]
    return sorted(comps, key=min)


def spanning_tree_roots(g: DirectedGraph) -> frozenset:
    """Nodes from which every node is reachable (empty if there are none)."""
    sources = source_components(g)
    return sources[0] if len(sources) == 1 else frozenset()


def min_forest_root_count(g: DirectedGraph) -> int:
    """Fewest trees in a spanning forest: one per source component."""
    return len(source_components(g))


def tree_root(t: DirectedGraph) -> int:
    """Root of a directed (out-)tree; raises :class:`NotATree` otherwise."""
    if len(t.edges) != t.n - 1:
        raise NotATree(f"a tree on {t.n} nodes has {t.n - 1} edges, got {len(t.edges)}")
    roots = [v for v, d in enumerate(t.in_degrees(), start=1) if d == 0]
    if len(roots) != 1:
        raise NotATree(f"expected exactly one node without parent, got {roots}")
    if len(reachable_set(t, roots)) != t.n:
        raise NotATree("not every node is reachable from the root")
    return roots[0]


def different_branches(t: DirectedGraph, a: int, b: int) -> bool:
    """True when neither of ``a``, ``b`` is an ancestor of the other in tree ``t``."""
    tree_root(t)
    if a == b:
        raise GraphError("different_branches needs two distinct nodes")
    return b not in reachable_set(t, [a]) and a not in reachable_set(t, [b])


def is_in_degree_regular(g: DirectedGraph) -> bool:
    return len(set(g.in_degrees())) == 1


# -- text format -----------------------------------------------------------

def parse_graph(text: str) -> DirectedGraph:
    """Parse the line-oriented graph format.

    ``#`` starts a comment. The first data line is ``n <count>``; every
    following data line is ``<src> <dst> [<weight>]`` (weight defaults to 1).
    """
    n = None
    edges = []
    seen = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if n is None:
            if len(fields) != 2 or fields[0] != "n":
                raise GraphParseError("expected header 'n <node-count>'", line_no)
            try:
                n = int(fields[1])
            except ValueError:
                raise GraphParseError(f"bad node count {fields[1]!r}", line_no) from None
            if n < 1:
                raise GraphParseError("node count must be positive", line_no)
            continue
        if len(fields) not in (2, 3):
            raise GraphParseError("expected '<src> <dst> [<weight>]'", line_no)
        try:
            src, dst = int(fields[0]), int(fields[1])
        except ValueError:
            raise GraphParseError("node ids must be integers", line_no) from None
        try:
            w = float(fields[2]) if len(fields) == 3 else 1.0
        except ValueError:
            raise GraphParseError(f"bad weight {fields[2]!r}", line_no) from None
        if src == dst:
            raise GraphParseError(f"self-loop at node {src}", line_no)
        if not (1 <= src <= n and 1 <= dst <= n):
            raise GraphParseError(f"edge {src}->{dst} outside nodes 1..{n}", line_no)
        if not (math.isfinite(w) and w > 0):
            raise GraphParseError(f"weight must be positive and finite, got {fields[2]}", line_no)
        if (src, dst) in seen:
            raise GraphParseError(
                f"duplicate edge {src}->{dst} (first on line {seen[src, dst]})", line_no
            )
        seen[src, dst] = line_no
        edges.append(Edge(src, dst, w))
    if n is None:
        raise GraphParseError("missing header 'n <node-count>'")
    return DirectedGraph(n, tuple(edges))


def format_graph(g: DirectedGraph) -> str:
    """Serialise ``g``; ``parse_graph(format_graph(g)) == g``."""
    lines = [f"n {g.n}"]
    lines += [f"{e.src} {e.dst} {e.weight!r}" for e in g.edges]
    return "\n".join(lines) + "\n"


def load_graph(path) -> DirectedGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())
