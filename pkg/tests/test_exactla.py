from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st
from sympy.matrices.normalforms import smith_normal_form

from torsionforge import exactla as la

from conftest import as_np, int_matrices


def sympy_divisors(M):
    if 0 in M.shape:
        return []
    D = smith_normal_form(sympy.Matrix(M.tolist()), domain=sympy.ZZ)
    return [abs(int(D[i, i])) for i in range(min(D.shape)) if D[i, i] != 0]


def det_int(M):
    return int(sympy.Matrix(M.tolist()).det()) if M.shape[0] else 1


def test_snf_examples():
    assert la.snf([[2, 4], [6, 8]]).divisors == (2, 4)
    assert la.snf(la.identity(4)).divisors == (1, 1, 1, 1)
    assert la.snf(la.zeros(3, 2)).divisors == ()


@given(int_matrices())
def test_snf_factorization_and_unimodularity(data):
    rows, shape = data
    M = as_np(rows, shape)
    res = la.snf(M)
    assert np.array_equal(res.U @ M @ res.V, res.D)
    assert abs(det_int(res.U)) == 1 and abs(det_int(res.V)) == 1
    d = list(res.divisors)
    assert all(b % a == 0 for a, b in zip(d, d[1:]))
    off = res.D.copy()
    for k in range(len(d)):
        off[k, k] = 0
    assert la.is_zero(off)


@given(int_matrices())
def test_snf_matches_sympy(data):
    rows, shape = data
    M = as_np(rows, shape)
    assert list(la.snf(M).divisors) == sympy_divisors(M)


def test_kernel_examples():
    K = la.kernel_saturated([[1, -1]])
    assert K.shape == (2, 1) and abs(K[0, 0]) == 1 and K[0, 0] == K[1, 0]
    assert la.kernel_saturated([[2]]).shape == (1, 0)
    K = la.kernel_saturated([[1, 1, 0], [0, 0, 0]])
    assert K.shape == (3, 2)
    # the lattice spanned by K is exactly {(a, -a, b)}
    assert la.snf(K).divisors == (1, 1)
    for v in ([1, -1, 0], [0, 0, 1]):
        aug = np.concatenate([K, la.as_int_matrix([[x] for x in v])], axis=1)
        assert la.rank_q(aug) == 2


@given(int_matrices(min_dim=1))
def test_kernel_saturated_is_primitive(data):
    rows, shape = data
    M = as_np(rows, shape)
    K = la.kernel_saturated(M)
    assert K.shape[1] == shape[1] - la.rank_q(M)
    assert la.is_zero(M @ K)
    assert all(d == 1 for d in la.snf(K).divisors)


def test_gram_det_examples():
    assert la.gram_det(la.identity(2)) == 1
    assert la.gram_det([[1], [1]]) == 2
    assert la.gram_det([[1, 1], [0, 2]]) == 4


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 4))
def test_gram_det_unimodular_invariance(seed, k):
    import random
    from torsionforge.corpus import random_unimodular
    r = random.Random(seed)
    B = la.as_int_matrix([[r.randint(-4, 4) for _ in range(k)] for _ in range(k + 1)])
    G = la.as_rational_matrix([[Fraction(2) if i == j else Fraction(1, 2) if abs(i - j) == 1 else 0
                                for j in range(k + 1)] for i in range(k + 1)])
    U = random_unimodular(r, k)
    assert la.gram_det(B @ U, G) == la.gram_det(B, G)


@given(int_matrices(max_dim=5))
def test_rational_routines_match_sympy(data):
    rows, shape = data
    M = as_np(rows, shape)
    S = sympy.Matrix(M.tolist()) if 0 not in shape else None
    r = la.rank_q(M)
    assert r == (S.rank() if S is not None else 0)
    if S is not None:
        R, piv = la.rref(M)
        SR, spiv = S.rref()
        assert list(piv) == list(spiv)
        assert all(Fraction(R[i, j]) == Fraction(str(SR[i, j])) for i in range(shape[0]) for j in range(shape[1]))
        N = la.nullspace_q(M)
        assert N.shape[1] == shape[1] - r
        assert all(x == 0 for x in (M @ N).flat)


@given(st.integers(1, 5).flatmap(lambda n: st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n),
                                                    min_size=n, max_size=n)))
def test_det_inverse_charpoly(rows):
    M = la.as_int_matrix(rows)
    S = sympy.Matrix(rows)
    assert la.det_q(M) == Fraction(int(S.det()))
    x = sympy.Symbol("x")
    want = [Fraction(int(c)) for c in reversed(S.charpoly(x).all_coeffs())]
    assert la.charpoly(M) == want
    if S.det() != 0:
        inv = la.inverse_q(M)
        assert all(Fraction(inv[i, j]) == Fraction(str(S.inv()[i, j]))
                   for i in range(len(rows)) for j in range(len(rows)))


@given(int_matrices(max_dim=5), st.sampled_from([2, 3, 5, 7]))
def test_rank_mod_p_matches_sympy(data, p):
    rows, shape = data
    M = as_np(rows, shape)
    want = 0
    if 0 not in shape:
        from sympy.polys.matrices import DomainMatrix
        want = DomainMatrix.from_list_sympy(*shape, rows).convert_to(sympy.GF(p)).rank()
    assert la.rank_mod_p(M, p) == want
    N = la.nullspace_mod_p(M, p)
    assert N.shape[1] == shape[1] - want
    assert all(x % p == 0 for x in (M @ N).flat)


def test_matmul_exact_for_big_and_rational_entries():
    A = la.as_int_matrix([[2 ** 70, 1], [3, -(2 ** 65)]])
    B = la.as_int_matrix([[5, 2 ** 40], [7, 1]])
    assert np.array_equal(la.matmul(A, B), A @ B)
    Q = la.as_rational_matrix([[Fraction(1, 3), 2], [0, Fraction(-5, 7)]])
    assert all(la.matmul(Q, Q).flat == (Q @ Q).flat)


def test_positive_definite():
    assert la.is_positive_definite(la.identity(3))
    assert not la.is_positive_definite([[0]])
    assert not la.is_positive_definite([[1, 2], [2, 1]])


def test_saturated_left_inverse_rejects_non_primitive():
    with pytest.raises(la.LinAlgError):
        la.saturated_left_inverse(la.as_int_matrix([[2], [0]]))
    L = la.saturated_left_inverse(la.as_int_matrix([[1], [2]]))
    assert L @ la.as_int_matrix([[1], [2]]) == np.array([[1]])
