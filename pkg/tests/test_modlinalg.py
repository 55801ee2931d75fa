import numpy as np
import pytest
import scipy.sparse as sp
import sympy
from hypothesis import given, settings, strategies as st
from sympy.polys.matrices import DomainMatrix

from sympair.modlinalg import (RowSpaceBuilder, charpoly_mod, inv_mod, matmul_mod,
                               nullspace_mod, poly_divmod, poly_gcd, poly_mul, poly_roots_mod,
                               rank_mod, rref_mod, solve_rows_mod)

PRIMES = [2, 3, 5, 7, 101, 65537, 2147483629]


def rand_mat(rng, r, c, p):
    return rng.integers(0, p, (r, c), dtype=np.int64)


@pytest.mark.parametrize("p", PRIMES)
def test_matmul_against_exact_integers(p):
    rng = np.random.default_rng(p % 1000)
    A, B = rand_mat(rng, 7, 40, p), rand_mat(rng, 40, 5, p)
    ref = (A.astype(object) @ B.astype(object)) % p
    assert np.array_equal(matmul_mod(A, B, p), ref.astype(np.int64))


def test_matmul_empty_inner_dimension():
    assert matmul_mod(np.zeros((3, 0), np.int64), np.zeros((0, 2), np.int64), 7).shape == (3, 2)


@pytest.mark.parametrize("p", [2, 3, 7, 101, 65537])
def test_rank_and_nullspace_against_sympy(p):
    rng = np.random.default_rng(p)
    for _ in range(5):
        # low-rank product so the rank is interesting
        M = matmul_mod(rand_mat(rng, 6, 3, p), rand_mat(rng, 3, 8, p), p)
        R, piv = rref_mod(M, p)
        dm = DomainMatrix.from_Matrix(sympy.Matrix(M.tolist())).convert_to(sympy.GF(p))
        assert len(piv) == dm.rank() == rank_mod(M, p)
        N = nullspace_mod(M, p)
        assert N.shape[0] == M.shape[1] - len(piv)
        assert not matmul_mod(M, N.T, p).any()
        assert rank_mod(N, p) == N.shape[0]
        # rref is reduced: pivot columns are unit vectors
        assert np.array_equal(R[:, piv], np.eye(len(piv), dtype=np.int64))


@given(st.integers(1, 6), st.sampled_from([2, 3, 5, 13, 10007]), st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_inverse_property(n, p, seed):
    rng = np.random.default_rng(seed)
    M = rand_mat(rng, n, n, p)
    if rank_mod(M, p) < n:
        return
    Mi = inv_mod(M, p)
    assert np.array_equal(matmul_mod(M, Mi, p), np.eye(n, dtype=np.int64))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_solve_rows_property(seed):
    p = 31
    rng = np.random.default_rng(seed)
    W = rref_mod(rand_mat(rng, 4, 9, p), p)[0]
    C = rand_mat(rng, 3, W.shape[0], p)
    V = matmul_mod(C, W, p)
    assert np.array_equal(solve_rows_mod(W, V, p), C)


@pytest.mark.parametrize("p", [2, 5, 101])
def test_charpoly_against_sympy(p):
    rng = np.random.default_rng(p + 7)
    x = sympy.Symbol("x")
    for n in [1, 2, 5, 8]:
        M = rand_mat(rng, n, n, p)
        ref = sympy.Poly(sympy.Matrix(M.tolist()).charpoly(x).as_expr(), x, modulus=p)
        want = [int(c) % p for c in reversed(ref.all_coeffs())]
        got = [int(c) for c in charpoly_mod(M, p)]
        assert got == want


@pytest.mark.parametrize("p", [3, 13, 401])
def test_roots_of_split_polynomials(p):
    rng = np.random.default_rng(p)
    for _ in range(5):
        roots = sorted(set(int(r) for r in rng.integers(0, p, 4)))
        f = np.array([1], dtype=np.int64)
        for r in roots:
            f = poly_mul(f, np.array([-r % p, 1]), p)
        assert sorted(int(r) for r in poly_roots_mod(f, p)) == roots


def test_roots_skip_irreducible_factor():
    # x^2 + 1 has no roots mod 3
    f = poly_mul(np.array([1, 0, 1]), np.array([-2 % 3, 1]), 3)
    assert [int(r) for r in poly_roots_mod(f, 3)] == [2]


@given(st.lists(st.integers(0, 96), min_size=1, max_size=6),
       st.lists(st.integers(0, 96), min_size=1, max_size=4))
@settings(max_examples=60, deadline=None)
def test_poly_divmod_property(a, b):
    p = 97
    a, b = np.array(a), np.array(b)
    if not (b % p).any():
        return
    q, r = poly_divmod(a, b, p)
    back = poly_mul(q, b, p)
    n = max(len(back), len(r), len(a))
    pad = lambda v: np.pad(np.asarray(v) % p, (0, n - len(v)))
    assert np.array_equal((pad(back) + pad(r)) % p, pad(a))
    g = poly_gcd(a, b, p)
    assert not poly_divmod(a, g, p)[1].any() and not poly_divmod(b, g, p)[1].any()


@pytest.mark.parametrize("p", [2, 7, 65537])
def test_row_space_builder_matches_rref(p):
    rng = np.random.default_rng(3)
    M = matmul_mod(rand_mat(rng, 30, 6, p), rand_mat(rng, 6, 20, p), p)
    b = RowSpaceBuilder(20, p)
    for i in range(0, 30, 7):
        chunk = M[i:i + 7]
        b.add(sp.csr_matrix(chunk) if i % 2 else chunk)
    assert b.rank == rank_mod(M, p)
    K = b.kernel_basis()
    assert K.shape[0] == 20 - b.rank
    assert not matmul_mod(M, K.T, p).any()
