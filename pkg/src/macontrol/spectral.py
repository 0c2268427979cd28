"""Dense eigen-analysis of Laplacians: distinct eigenvalues, multiplicities,
left eigenvector bases and numerical rank.

Jordan chains are never formed. Every controllability condition downstream
only needs the left eigenvectors (the rows of the inverse Jordan basis that
close each Jordan block), and those come out of an SVD of ``L - lambda I``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import EigensolverFailure, NotAnEigenvalue

EPS = np.finfo(float).eps

# clusters closer than this (relative) are candidates for a defective merge
DEFECT_SPREAD = 0.05
# eigenvectors of fragments of one defective eigenvalue are this close
ALIGN = 1e-2
# phase normalisation ignores components this small relative to the row norm
PHASE_ZERO = 1e-7


def numerical_rank(A, tol: float | None = None) -> int:
    """Count singular values above ``tol``.

    The automatic threshold is ``sigma_max * max(rows, cols) * eps``.

    >>> numerical_rank(np.eye(3)), numerical_rank(np.zeros((2, 4)))
    (3, 0)
    """
    A = np.atleast_2d(np.asarray(A))
    if A.size == 0:
        return 0
    s = scipy.linalg.svdvals(A)
    if tol is None:
        tol = s[0] * max(A.shape) * EPS
    return int(np.count_nonzero(s > tol))


def default_cluster_tol(values) -> float:
    return 1e-8 * (1.0 + float(np.max(np.abs(values), initial=0.0)))


def default_rank_tol(L) -> float:
    """Singular-value cutoff used for eigenspace dimensions.

    Also the residual bound every left eigenvector satisfies.
    """
    L = np.asarray(L)
    return 1e3 * L.shape[0] * EPS * max(1.0, float(np.linalg.norm(L, 2)))


@dataclass(frozen=True, eq=False)
class EigenRecord:
    value: complex
    alg_mult: int
    geo_mult: int
    # geo_mult x n, rows w with w @ L ~= value * w, orthonormal
    left_basis: np.ndarray

    @property
    def is_real(self) -> bool:
        return self.value.imag == 0.0


@dataclass(frozen=True, eq=False)
class Spectrum:
    eigs: tuple[EigenRecord, ...]
    n: int
    tol: float
    tol_rank: float

    def __iter__(self):
        return iter(self.eigs)

    def __len__(self):
        return len(self.eigs)

    @property
    def values(self) -> list[complex]:
        return [e.value for e in self.eigs]

    def find(self, lam, tol: float | None = None) -> EigenRecord:
        tol = self.tol if tol is None else tol
        best = min(self.eigs, key=lambda e: abs(e.value - lam))
        if abs(best.value - lam) > tol:
            raise NotAnEigenvalue(f"{lam} is not an eigenvalue (closest {best.value})")
        return best


def _cluster_center(vals) -> complex:
    return complex(np.mean(vals))


def _power_ranks(L, mu, kmax, rel_tol):
    """``rank((L - mu I)^k)`` for k = 1..kmax, on the unit-norm shift.

    Returns the ranks and whether any singular value sat within a factor 10
    of the cutoff.
    """
    n = L.shape[0]
    A = L - mu * np.eye(n)
    norm = float(np.linalg.norm(A, 2))
    if norm == 0.0:
        return [0] * kmax, False
    A = A / norm
    P = np.eye(n)
    ranks, close = [], False
    for _ in range(kmax):
        P = P @ A
        s = scipy.linalg.svdvals(P)
        close |= bool(np.any((s > rel_tol / 10) & (s < rel_tol * 10)))
        ranks.append(int(np.count_nonzero(s > rel_tol)))
    return ranks, close


def _initial_clusters(vals, tol) -> list[list[int]]:
    # single linkage on |lambda_i - lambda_j| <= tol
    n = len(vals)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(vals[i] - vals[j]) <= tol:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _merge_defective(L, vals, vecs, clusters, spread, tol_rank) -> list[list[int]]:
    """Re-join fragments of perturbed Jordan blocks.

    A defective eigenvalue of multiplicity k comes back from the eigensolver
    as k values scattered over a radius of order eps**(1/k), all with nearly
    the same eigenvector. Two clusters within ``spread`` of each other are
    joined when ``L - mu I`` is numerically singular at the mean ``mu`` of
    the union and every member's right eigenvector lies (up to
    ``1 - ALIGN``) in the right null space there.
    """
    n = L.shape[0]
    clusters = [list(c) for c in clusters]
    while True:
        centers = [_cluster_center(vals[c]) for c in clusters]
        pairs = sorted(
            (abs(centers[a] - centers[b]), a, b)
            for a in range(len(clusters))
            for b in range(a + 1, len(clusters))
            if abs(centers[a] - centers[b]) <= spread
        )
        for _, a, b in pairs:
            union = clusters[a] + clusters[b]
            _, s, Vh = scipy.linalg.svd(L - _cluster_center(vals[union]) * np.eye(n))
            rank = int(np.count_nonzero(s > tol_rank))
            if rank == n:
                continue
            null = Vh[rank:].conj()
            x = vecs[:, union] / np.linalg.norm(vecs[:, union], axis=0)
            if np.all(np.linalg.norm(null @ x, axis=0) >= 1 - ALIGN):
                clusters[a] = union
                del clusters[b]
                break
        else:
            return clusters


def _normalise_rows(W: np.ndarray) -> np.ndarray:
    W = W.copy()
    for k, row in enumerate(W):
        norm = np.linalg.norm(row)
        idx = np.flatnonzero(np.abs(row) > PHASE_ZERO * norm)
        if idx.size:
            first = row[idx[0]]
            W[k] = row * (abs(first) / first)
    if np.all(np.abs(W.imag) == 0):
        return W.real.copy()
    return W


def left_null_basis(A, tol_rank) -> np.ndarray:
    """Orthonormal rows spanning ``{w : w @ A ~= 0}``."""
    U, s, _ = scipy.linalg.svd(A)
    rank = int(np.count_nonzero(s > tol_rank))
    return _normalise_rows(U[:, rank:].conj().T)


def eigen_decompose(L, tol_cluster: float | None = None, tol_rank: float | None = None) -> Spectrum:
    """Distinct eigenvalues of ``L`` with multiplicities and left eigenvectors.

    Parameters
    ----------
    L : (n, n) array_like
    tol_cluster : float, optional
        Eigenvalues closer than this are one distinct eigenvalue. Defaults to
        ``1e-8 * (1 + max|lambda|)``. Fragments of defective eigenvalues
        further apart than this are still merged (see ``_merge_defective``).
    tol_rank : float, optional
        Singular-value cutoff for ``rank(L - lambda I)``; defaults to
        ``1e3 * n * eps * ||L||_2``.

    Returns
    -------
    Spectrum
        Records sorted by (real part, imaginary part). Conjugate pairs are
        kept as two separate entries.
    """
    L = np.asarray(L)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {L.shape}")
    if not np.all(np.isfinite(L)):
        raise ValueError("matrix has non-finite entries")
    n = L.shape[0]
    try:
        vals, vecs = scipy.linalg.eig(L)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigensolverFailure(str(exc)) from exc
    if not np.all(np.isfinite(vals)):
        raise EigensolverFailure("eigensolver returned non-finite values")

    if tol_cluster is None:
        tol_cluster = default_cluster_tol(vals)
    if tol_rank is None:
        tol_rank = default_rank_tol(L)
    scale = 1.0 + float(np.max(np.abs(vals), initial=0.0))

    clusters = _initial_clusters(vals, tol_cluster)
    clusters = _merge_defective(L, vals, vecs, clusters, DEFECT_SPREAD * scale, tol_rank)

    records = []
    for members in clusters:
        mu = _cluster_center(vals[members])
        if abs(mu.imag) <= tol_cluster:
            mu = complex(mu.real, 0.0)
        shifted = L - mu * np.eye(n) if mu.imag else L - mu.real * np.eye(n)
        basis = left_null_basis(shifted, tol_rank)
        if basis.shape[0] == 0:
            raise EigensolverFailure(
                f"eigenvalue {mu} has no numerical eigenvector at rank tolerance {tol_rank:g}"
            )
        records.append(EigenRecord(mu, len(members), basis.shape[0], basis))
    records.sort(key=lambda r: (round(r.value.real, 12), round(r.value.imag, 12)))
    return Spectrum(tuple(records), n, float(tol_cluster), float(tol_rank))


def is_cyclic(s: Spectrum) -> bool:
    """Nonderogatory test: every eigenvalue has a single Jordan block."""
    return all(e.geo_mult == 1 for e in s)


class JordanBlocks(NamedTuple):
    sizes: list[int]
    low_confidence: bool


def jordan_block_sizes(L, lam, tol_rank: float | None = None,
                       tol_cluster: float | None = None) -> JordanBlocks:
    """Jordan block sizes of ``lam`` from the Weyr characteristic.

    ``rank((L - lam I)^k)`` for k = 0, 1, ... gives the number of blocks of
    size at least k as consecutive rank drops. For reporting only.
    """
    L = np.asarray(L)
    n = L.shape[0]
    spec = eigen_decompose(L, tol_cluster=tol_cluster, tol_rank=tol_rank)
    rec = spec.find(lam)
    rel_tol = spec.tol_rank / max(1.0, float(np.linalg.norm(L, 2)))
    powers, low_conf = _power_ranks(L, rec.value, rec.alg_mult, rel_tol)
    ranks = [n] + powers
    # at_least[k-1] = number of blocks of size >= k
    at_least = [ranks[k - 1] - ranks[k] for k in range(1, len(ranks))]
    sizes = []
    for k, cnt in enumerate(at_least, start=1):
        nxt = at_least[k] if k < len(at_least) else 0
        sizes += [k] * (cnt - nxt)
    sizes.sort(reverse=True)
    if sum(sizes) != rec.alg_mult or len(sizes) != rec.geo_mult:
        low_conf = True
    return JordanBlocks(sizes, low_conf)
