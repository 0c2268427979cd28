"""Controllability verdicts for leader sets and minimum leader selection."""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

import numpy as np

from .errors import BudgetExceeded, LeaderSetError, SpectrumMismatch
from .spectral import EPS, Spectrum, eigen_decompose, is_cyclic, numerical_rank

# |entry| > ZERO_TOL * ||row|| counts as a nonzero eigenvector entry
ZERO_TOL = 1e-7
DEFAULT_BUDGET = 2_000_000


@dataclass(frozen=True, order=True)
class LeaderSet:
    agents: tuple[int, ...]

    def __post_init__(self):
        agents = tuple(int(a) for a in self.agents)
        if not agents:
            raise LeaderSetError("leader set must be nonempty")
        if len(set(agents)) != len(agents):
            raise LeaderSetError(f"duplicate leaders in {agents}")
        if min(agents) < 1:
            raise LeaderSetError(f"leader ids are 1-based, got {agents}")
        object.__setattr__(self, "agents", tuple(sorted(agents)))

    @classmethod
    def of(cls, agents, n: int | None = None) -> "LeaderSet":
        ls = agents if isinstance(agents, cls) else cls(tuple(agents))
        if n is not None and ls.agents[-1] > n:
            raise LeaderSetError(f"leader {ls.agents[-1]} outside 1..{n}")
        return ls

    def __iter__(self):
        return iter(self.agents)

    def __len__(self):
        return len(self.agents)

    def __contains__(self, a):
        return a in self.agents

    def __repr__(self):
        return f"LeaderSet({set(self.agents) or '{}'})"


@dataclass(frozen=True)
class ControllabilityVerdict:
    controllable: bool
    rank: int | None
    method: str  # "kalman", "pbh" or "both"
    tolerance: float


def input_matrix(leaders, n: int) -> np.ndarray:
    """``B = (e_{i1}, ..., e_{im})`` for the sorted leader ids."""
    leaders = LeaderSet.of(leaders, n)
    B = np.zeros((n, len(leaders)))
    for k, i in enumerate(leaders):
        B[i - 1, k] = 1.0
    return B


def _as_input(B, n):
    if isinstance(B, np.ndarray):
        return B.reshape(n, -1)
    return input_matrix(B, n)


def controllability_matrix(L, B) -> np.ndarray:
    """``(B, LB, L^2 B, ..., L^{n-1} B)``.

    The sign of ``L`` is immaterial for the rank, so ``L`` is used rather
    than the system matrix ``-L``.
    """
    L = np.asarray(L)
    n = L.shape[0]
    B = _as_input(B, n)
    blocks = [B]
    for _ in range(n - 1):
        blocks.append(L @ blocks[-1])
    return np.hstack(blocks)


def kalman_verdict(L, B, tol: float | None = None) -> ControllabilityVerdict:
    """Rank test on the controllability matrix.

    ``B`` may be an input matrix or an iterable of leader ids. Columns are
    scaled to unit norm before the rank is taken (a rank-preserving change
    that keeps powers of large Laplacians from swamping the early columns).
    """
    L = np.asarray(L)
    n = L.shape[0]
    C = controllability_matrix(L, B)
    norms = np.linalg.norm(C, axis=0)
    C = C[:, norms > 0] / norms[norms > 0]
    if tol is None:
        tol = max(C.shape, default=1) * EPS * (float(np.linalg.norm(C, 2)) if C.size else 0.0)
    rank = numerical_rank(C, tol) if C.size else 0
    return ControllabilityVerdict(rank == n, rank, "kalman", float(tol))


def _check_spectrum(L, spectrum: Spectrum):
    n = L.shape[0]
    if spectrum.n != n or sum(e.alg_mult for e in spectrum) != n:
        raise SpectrumMismatch(f"spectrum is for n={spectrum.n}, matrix has n={n}")
    bound = 10 * spectrum.tol_rank + 1e3 * n * EPS * float(np.linalg.norm(L, 2))
    for e in spectrum:
        res = np.linalg.norm(e.left_basis @ L - e.value * e.left_basis, axis=1)
        if np.any(res > bound):
            raise SpectrumMismatch(
                f"left eigenvectors of {e.value} do not match the matrix (residual {res.max():.3g})"
            )


def omega_matrix(spectrum: Spectrum, leaders, lam) -> np.ndarray:
    """Left eigenvector basis of ``lam`` restricted to the leader columns."""
    rec = spectrum.find(lam)
    idx = [i - 1 for i in LeaderSet.of(leaders, spectrum.n)]
    return rec.left_basis[:, idx]


def _omega_full_rank(spectrum, cols, tol) -> bool:
    for e in spectrum:
        if numerical_rank(e.left_basis[:, cols], tol) < e.geo_mult:
            return False
    return True


def pbh_verdict(L, B, spectrum: Spectrum | None = None, tol: float = ZERO_TOL) -> ControllabilityVerdict:
    """Eigenvector test: ``W_lambda^H B`` must have rank ``geo_mult(lambda)``
    for every distinct eigenvalue.

    ``rank`` in the result is ``n`` minus the total eigenvector deficiency,
    which equals the Kalman rank whenever the system is controllable.
    """
    L = np.asarray(L)
    n = L.shape[0]
    if spectrum is None:
        spectrum = eigen_decompose(L)
    else:
        _check_spectrum(L, spectrum)
    B = _as_input(B, n)
    deficiency = 0
    for e in spectrum:
        deficiency += e.geo_mult - numerical_rank(e.left_basis @ B, tol)
    return ControllabilityVerdict(deficiency == 0, n - deficiency, "pbh", tol)


def r_leader_test(L, spectrum: Spectrum | None, leaders, tol: float = ZERO_TOL) -> bool:
    """Do the given agents control the system together?"""
    L = np.asarray(L)
    if spectrum is None:
        spectrum = eigen_decompose(L)
    leaders = LeaderSet.of(leaders, L.shape[0])
    return _omega_full_rank(spectrum, [i - 1 for i in leaders], tol)


def slc_candidates(L, spectrum: Spectrum | None = None, tol: float = ZERO_TOL) -> frozenset:
    """Agents that can control the system alone.

    Empty unless ``L`` is cyclic; otherwise the agents whose entry is
    nonzero in the left eigenvector of every eigenvalue, each confirmed by
    the Kalman rank test.
    """
    L = np.asarray(L)
    if spectrum is None:
        spectrum = eigen_decompose(L)
    if not is_cyclic(spectrum):
        return frozenset()
    n = L.shape[0]
    ok = np.ones(n, dtype=bool)
    for e in spectrum:
        w = e.left_basis[0]
        ok &= np.abs(w) > tol * np.linalg.norm(w)
    found = set()
    for i in np.flatnonzero(ok) + 1:
        if kalman_verdict(L, [int(i)]).controllable:
            found.add(int(i))
    return frozenset(found)


def is_slc(L, spectrum: Spectrum | None = None, tol: float = ZERO_TOL) -> bool:
    return bool(slc_candidates(L, spectrum, tol))


def min_leader_bounds(spectrum: Spectrum) -> tuple[int, int]:
    """Largest and total geometric multiplicity bound the minimum leader count."""
    geo = [e.geo_mult for e in spectrum]
    return max(geo), sum(geo)


def minimal_leader_sets(
    L,
    spectrum: Spectrum | None = None,
    *,
    max_cardinality: int | None = None,
    required_agents: Iterable[int] = (),
    enumerate_all: bool = True,
    budget: int = DEFAULT_BUDGET,
    tol: float = ZERO_TOL,
) -> list[LeaderSet]:
    """Smallest leader sets that make the system controllable.

    Candidates are enumerated in lexicographic order by increasing size,
    starting from the largest geometric multiplicity (no smaller set can
    work). Every set contains ``required_agents``. Returns all sets of the
    minimum size, or only the first one when ``enumerate_all`` is false; an
    empty list if nothing up to ``max_cardinality`` works.

    Raises
    ------
    BudgetExceeded
        If the number of candidates examined would pass ``budget``.
    """
    L = np.asarray(L)
    n = L.shape[0]
    if spectrum is None:
        spectrum = eigen_decompose(L)
    required = sorted(set(int(a) for a in required_agents))
    if required:
        LeaderSet.of(required, n)
    free = [i for i in range(1, n + 1) if i not in required]
    lower, _ = min_leader_bounds(spectrum)
    top = n if max_cardinality is None else min(max_cardinality, n)

    examined = 0
    for k in range(max(lower, len(required), 1), top + 1):
        examined += math.comb(len(free), k - len(required))
        if examined > budget:
            raise BudgetExceeded(
                f"searching size-{k} leader sets needs {examined} candidates (budget {budget})"
            )
        found = []
        for extra in combinations(free, k - len(required)):
            agents = tuple(sorted(required + list(extra)))
            if _omega_full_rank(spectrum, [a - 1 for a in agents], tol):
                found.append(LeaderSet(agents))
                if not enumerate_all:
                    return found
        if found:
            return sorted(found)
    return []
