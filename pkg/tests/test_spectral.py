from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from macontrol.errors import NotAnEigenvalue
from macontrol.graph_core import DirectedGraph, laplacian
from macontrol.spectral import (
    EPS,
    eigen_decompose,
    is_cyclic,
    jordan_block_sizes,
    numerical_rank,
)

from oracles import EXAMPLE1, EXAMPLE2, exact_laplacian, exact_rank, random_digraph, random_spanning_graph, random_tree


def _residual_ok(L, spec):
    n = L.shape[0]
    bound = 1e3 * n * EPS * max(1.0, np.linalg.norm(L, 2))
    for e in spec:
        W = e.left_basis
        assert W.shape == (e.geo_mult, n)
        assert np.linalg.norm(W @ L - e.value * W, axis=1).max() <= bound
        np.testing.assert_allclose(W.conj() @ W.T, np.eye(e.geo_mult), atol=1e-10)


def test_example1_spectrum():
    L = laplacian(EXAMPLE1)
    spec = eigen_decompose(L)
    assert spec.values == [0, 1, 2, 3]
    assert [(e.alg_mult, e.geo_mult) for e in spec] == [(1, 1)] * 4
    assert is_cyclic(spec)
    _residual_ok(L, spec)


def test_example2_spectrum():
    L = laplacian(EXAMPLE2)
    spec = eigen_decompose(L)
    expected = [0, 0.2451, 1.8774 - 0.7449j, 1.8774 + 0.7449j, 2]
    assert len(spec) == 5
    for got, want in zip(spec.values, expected):
        assert abs(got - want) < 1e-3
    assert is_cyclic(spec)
    # the eigenvalue 2 has left eigenvector proportional to e4 - e5
    w = spec.find(2).left_basis[0]
    np.testing.assert_allclose(w, np.array([0, 0, 0, 1, -1]) / np.sqrt(2), atol=1e-12)
    _residual_ok(L, spec)


def test_identity_spectrum():
    spec = eigen_decompose(np.eye(3))
    assert len(spec) == 1
    e = spec.eigs[0]
    assert (e.value, e.alg_mult, e.geo_mult) == (1, 3, 3)
    assert not is_cyclic(spec)


def test_left_basis_is_phase_normalised():
    spec = eigen_decompose(laplacian(EXAMPLE2))
    for e in spec:
        row = e.left_basis[0]
        first = row[np.flatnonzero(np.abs(row) > 1e-7)[0]]
        assert abs(first.imag) < 1e-12 and first.real > 0


def test_find_rejects_non_eigenvalues():
    spec = eigen_decompose(laplacian(EXAMPLE1))
    assert spec.find(2 + 1e-12).value == 2
    with pytest.raises(NotAnEigenvalue):
        spec.find(1.5)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        eigen_decompose(np.ones((2, 3)))
    with pytest.raises(ValueError):
        eigen_decompose(np.array([[np.nan]]))


def test_unit_path_is_one_defective_block():
    # every follower on a unit path has in-weight 1, so 1 is an eigenvalue of
    # algebraic multiplicity n-1 with a single Jordan block
    for n in range(2, 9):
        g = DirectedGraph(n, [(i, i + 1) for i in range(1, n)])
        spec = eigen_decompose(laplacian(g))
        e = spec.find(1)
        assert (e.alg_mult, e.geo_mult) == (n - 1, 1)
        assert is_cyclic(spec)
        assert jordan_block_sizes(laplacian(g), 1).sizes == [n - 1]


def test_unit_star_is_semisimple():
    g = DirectedGraph(4, [(1, 2), (1, 3), (1, 4)])
    e = eigen_decompose(laplacian(g)).find(1)
    assert (e.alg_mult, e.geo_mult) == (3, 3)
    assert jordan_block_sizes(laplacian(g), 1).sizes == [1, 1, 1]


def test_jordan_block_examples():
    assert jordan_block_sizes(laplacian(EXAMPLE1), 1).sizes == [1]
    assert jordan_block_sizes(np.eye(3), 1).sizes == [1, 1, 1]
    blocks = jordan_block_sizes(np.array([[0.0, 1.0], [0.0, 0.0]]), 0)
    assert blocks.sizes == [2] and not blocks.low_confidence
    with pytest.raises(NotAnEigenvalue):
        jordan_block_sizes(np.eye(2), 3)


def test_numerical_rank_examples():
    assert numerical_rank(np.eye(4)) == 4
    assert numerical_rank(np.zeros((2, 5))) == 0
    assert numerical_rank(np.zeros((0, 3))) == 0
    assert numerical_rank(np.diag([1.0, 1e-3]), tol=1e-2) == 1


def _exact_geo_mult(g, lam):
    L = exact_laplacian(g)
    lam = Fraction(lam)
    shifted = [[L[i][j] - (lam if i == j else 0) for j in range(g.n)] for i in range(g.n)]
    return g.n - exact_rank(shifted)


def test_multiplicities_match_exact_arithmetic_on_trees():
    # tree Laplacians are triangular after relabelling: the eigenvalues are the
    # in-weights, so algebraic and geometric multiplicities can be checked exactly
    rng = np.random.default_rng(11)
    for _ in range(150):
        n = int(rng.integers(1, 9))
        t = random_tree(rng, n, [1, 2, 3])
        L = laplacian(t)
        spec = eigen_decompose(L)
        diag = np.diag(L)
        assert sorted(e.value.real for e in spec) == sorted(set(diag))
        for e in spec:
            assert e.alg_mult == int(np.sum(diag == e.value.real))
            assert e.geo_mult == _exact_geo_mult(t, e.value.real)
        _residual_ok(L, spec)


def test_multiplicities_match_exact_arithmetic_on_unit_graphs():
    rng = np.random.default_rng(12)
    for _ in range(150):
        n = int(rng.integers(1, 8))
        g = random_spanning_graph(rng, n)
        L = laplacian(g)
        spec = eigen_decompose(L)
        assert sum(e.alg_mult for e in spec) == n
        for e in spec:
            assert 1 <= e.geo_mult <= e.alg_mult
            if e.value.imag == 0 and float(e.value.real).is_integer():
                assert e.geo_mult == _exact_geo_mult(g, int(e.value.real))
        _residual_ok(L, spec)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_zero_is_always_an_eigenvalue(seed):
    rng = np.random.default_rng(seed)
    g = random_digraph(rng, int(rng.integers(1, 9)))
    L = laplacian(g)
    spec = eigen_decompose(L)
    assert spec.find(0, tol=1e-8)
    assert numerical_rank(L) <= g.n - 1
    assert sum(e.alg_mult for e in spec) == g.n
    _residual_ok(L, spec)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_cyclicity_invariant_under_permutation(seed):
    rng = np.random.default_rng(seed)
    unit = bool(rng.integers(0, 2))
    g = random_digraph(rng, int(rng.integers(1, 8)), p=0.35, unit=unit)
    L = laplacian(g)
    P = np.eye(g.n)[rng.permutation(g.n)]
    assert is_cyclic(eigen_decompose(L)) == is_cyclic(eigen_decompose(P @ L @ P.T))


@settings(max_examples=80, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 6)),
              elements=st.floats(-10, 10)),
       arrays(np.float64, st.integers(1, 4), elements=st.floats(-10, 10)))
def test_rank_monotone_when_appending_columns(A, extra):
    col = np.resize(extra, A.shape[0])[:, None]
    tol = 1e-9
    assert numerical_rank(np.hstack([A, col]), tol) >= numerical_rank(A, tol)
