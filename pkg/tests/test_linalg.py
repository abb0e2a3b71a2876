import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from coreep.errors import OverflowFailure
from coreep.linalg import (
    EPS,
    as_matrix,
    matrix_exponential,
    numerical_rank,
    ordered_schur,
    spectral_norm,
    svd,
)

from conftest import cnormal


def test_as_matrix_rejects_bad_input():
    with pytest.raises(ValueError):
        as_matrix([1.0, 2.0])
    with pytest.raises(ValueError):
        as_matrix([[np.nan]])
    with pytest.raises(ValueError):
        as_matrix(np.ones((2, 3)), square=True)


def test_svd_reconstructs(rng):
    a = cnormal(rng, 5, 3)
    s = svd(a)
    assert np.allclose(s.reconstruct(), a, atol=1e-13)
    assert np.all(np.diff(s.singular_values) <= 0)


@pytest.mark.parametrize(
    "a, rank",
    [
        (np.zeros((3, 3)), 0),
        (np.eye(4), 4),
        (np.diag([1.0, 1e-20, 0.0]), 1),
        (np.array([[0.0, 1.0], [0.0, 0.0]]), 1),
        (np.outer([1, 2, 3], [1, 1j, -1]), 1),
    ],
)
def test_numerical_rank(a, rank):
    assert numerical_rank(a) == rank


def test_numerical_rank_explicit_tol():
    a = np.diag([1.0, 1e-6, 1e-9])
    assert numerical_rank(a, tol=1e-7) == 2
    assert numerical_rank(a, tol=1e-12) == 3


def test_spectral_norm_matches_numpy(rng):
    a = cnormal(rng, 6, 6)
    assert spectral_norm(a) == pytest.approx(np.linalg.norm(a, 2), rel=1e-14)


@pytest.mark.parametrize("n", [1, 2, 5, 9])
def test_ordered_schur_puts_nonzero_eigenvalues_first(rng, n):
    # Zero eigenvalues sit in a zero diagonal block, so they are semisimple.
    p = n - n // 2
    t = np.triu(cnormal(rng, n, n))
    t[np.diag_indices(p)] = 1 + rng.uniform(size=p)
    t[p:, p:] = 0
    perm = rng.permutation(n)
    q = scipy.linalg.qr(cnormal(rng, n, n))[0]
    a = q @ t[np.ix_(perm, perm)] @ q.conj().T
    res = ordered_schur(a)
    assert np.allclose(res.Q @ res.R @ res.Q.conj().T, a, atol=1e-12 * (1 + spectral_norm(a)))
    assert np.allclose(res.Q.conj().T @ res.Q, np.eye(n), atol=1e-13)
    assert np.allclose(np.tril(res.R, -1), 0)
    assert res.split == p
    assert np.all(np.abs(res.eigenvalues[:p]) > 0.5)
    assert np.all(np.abs(res.eigenvalues[p:]) < 1e-10)


def test_matrix_exponential_zero_and_diag():
    assert np.array_equal(matrix_exponential(np.zeros((3, 3))), np.eye(3))
    d = np.diag([1.0, -2.0, 0.5j])
    assert np.allclose(matrix_exponential(d), np.diag(np.exp(np.diag(d))), rtol=1e-14)


def test_matrix_exponential_nilpotent():
    n = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]])
    expected = np.eye(3) + n + n @ n / 2
    assert np.allclose(matrix_exponential(n), expected, atol=1e-15)


@pytest.mark.parametrize("scale", [1e-3, 1.0, 10.0, 50.0])
def test_matrix_exponential_against_scipy(rng, scale):
    a = scale * cnormal(rng, 6, 6) / 6
    ref = scipy.linalg.expm(a)
    err = spectral_norm(matrix_exponential(a) - ref) / spectral_norm(ref)
    assert err < 1e-11


def test_matrix_exponential_overflow():
    with pytest.raises(OverflowFailure):
        matrix_exponential(np.array([[1e4]]))


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=6), st.integers(min_value=0, max_value=2**31))
def test_expm_inverse_property(n, seed):
    r = np.random.default_rng(seed)
    a = cnormal(r, n, n)
    prod = matrix_exponential(a) @ matrix_exponential(-a)
    assert np.allclose(prod, np.eye(n), atol=1e-10 * np.exp(2 * spectral_norm(a)))


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=8), st.integers(min_value=1, max_value=8),
       st.integers(min_value=0, max_value=2**31))
def test_rank_of_product_property(n, r, seed):
    g = np.random.default_rng(seed)
    r = min(r, n)
    a = cnormal(g, n, r) @ cnormal(g, r, n)
    assert numerical_rank(a) == r


def test_eps_value():
    assert EPS == np.finfo(float).eps
