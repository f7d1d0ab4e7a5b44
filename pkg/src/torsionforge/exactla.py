"""Exact integer and rational linear algebra.

Matrices are numpy arrays of dtype ``object`` holding Python ``int`` or
``fractions.Fraction`` entries, so every product and elimination step is exact.
Nothing in here touches floating point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


class LinAlgError(ValueError):
    pass


def as_int_matrix(data, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Build an exact integer matrix; ``rows``/``cols`` pin the shape of empty input."""
    if isinstance(data, np.ndarray) and data.ndim == 2 and data.size == 0:
        r = data.shape[0] if rows is None else rows
        c = data.shape[1] if cols is None else cols
        return np.zeros((r, c), dtype=object)
    rows_list = [list(r) for r in data]
    if not rows_list or all(len(r) == 0 for r in rows_list):
        r = len(rows_list) if rows is None else rows
        return np.zeros((r, 0 if cols is None else cols), dtype=object)
    width = len(rows_list[0])
    if any(len(r) != width for r in rows_list):
        raise LinAlgError("ragged matrix")
    out = np.empty((len(rows_list), width), dtype=object)
    for i, r in enumerate(rows_list):
        for j, x in enumerate(r):
            out[i, j] = int(x)
    if rows is not None and out.shape[0] != rows:
        raise LinAlgError(f"expected {rows} rows, got {out.shape[0]}")
    if cols is not None and out.shape[1] != cols:
        raise LinAlgError(f"expected {cols} columns, got {out.shape[1]}")
    return out


def as_rational_matrix(data) -> np.ndarray:
    a = np.array(data, dtype=object)
    if a.ndim != 2:
        raise LinAlgError("expected a 2-d matrix")
    out = np.empty(a.shape, dtype=object)
    for idx, x in np.ndenumerate(a):
        out[idx] = Fraction(x)
    return out


def identity(n: int) -> np.ndarray:
    out = np.zeros((n, n), dtype=object)
    for i in range(n):
        out[i, i] = 1
    return out


def zeros(m: int, n: int) -> np.ndarray:
    return np.zeros((m, n), dtype=object)


def is_zero(M: np.ndarray) -> bool:
    return all(x == 0 for x in M.flat)


def _scaled(A: np.ndarray):
    """(integer matrix, d) with A = integer / d."""
    den = 1
    for x in A.flat:
        if isinstance(x, Fraction) and x.denominator != 1:
            den = den * x.denominator // math.gcd(den, x.denominator)
    out = np.empty(A.shape, dtype=object)
    for idx, x in np.ndenumerate(A):
        out[idx] = int(x * den) if den != 1 else int(x)
    return out, den


def matmul(A, B) -> np.ndarray:
    """Exact product, routed through machine integers when the entries allow it."""
    A = np.asarray(A, dtype=object)
    B = np.asarray(B, dtype=object)
    if A.size == 0 or B.size == 0:
        return A @ B if A.shape[1] else zeros(A.shape[0], B.shape[1])
    Ai, da = _scaled(A)
    Bi, db = _scaled(B)
    amax = max(abs(x) for x in Ai.flat)
    bmax = max(abs(x) for x in Bi.flat)
    if amax * bmax * A.shape[1] < 2 ** 62:
        P = np.array((Ai.astype(np.int64) @ Bi.astype(np.int64)).tolist(), dtype=object)
        P = P.reshape(A.shape[0], B.shape[1])
    else:
        P = Ai @ Bi
    den = da * db
    if den == 1:
        return P
    out = np.empty(P.shape, dtype=object)
    for idx, x in np.ndenumerate(P):
        out[idx] = Fraction(x, den)
    return out


def to_int(M: np.ndarray) -> np.ndarray:
    """Cast a rational matrix with integral entries back to ints."""
    out = np.empty(M.shape, dtype=object)
    for idx, x in np.ndenumerate(M):
        x = Fraction(x)
        if x.denominator != 1:
            raise LinAlgError("matrix is not integral")
        out[idx] = x.numerator
    return out


# ---------------------------------------------------------------- Smith form


@dataclass(frozen=True)
class SnfResult:
    U: np.ndarray
    D: np.ndarray
    V: np.ndarray
    divisors: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.divisors)


def _min_pivot(A, t):
    best = None
    m, n = A.shape
    for i in range(t, m):
        for j in range(t, n):
            x = A[i, j]
            if x != 0 and (best is None or abs(x) < best[0]):
                best = (abs(x), i, j)
    return best


def snf(M) -> SnfResult:
    """Smith normal form ``U @ M @ V = D`` with ``U``, ``V`` unimodular.

    Pivot is the nonzero entry of least absolute value, ties broken in
    row-major order.
    """
    A = as_int_matrix(M) if not isinstance(M, np.ndarray) else M.astype(object).copy()
    m, n = A.shape
    U = identity(m)
    V = identity(n)
    t = 0
    while t < min(m, n):
        piv = _min_pivot(A, t)
        if piv is None:
            break
        _, i, j = piv
        if i != t:
            A[[t, i]] = A[[i, t]]
            U[[t, i]] = U[[i, t]]
        if j != t:
            A[:, [t, j]] = A[:, [j, t]]
            V[:, [t, j]] = V[:, [j, t]]
        clean = True
        a = A[t, t]
        for i in range(t + 1, m):
            if A[i, t] != 0:
                q = A[i, t] // a
                A[i] = A[i] - q * A[t]
                U[i] = U[i] - q * U[t]
                if A[i, t] != 0:
                    clean = False
        for j in range(t + 1, n):
            if A[t, j] != 0:
                q = A[t, j] // a
                A[:, j] = A[:, j] - q * A[:, t]
                V[:, j] = V[:, j] - q * V[:, t]
                if A[t, j] != 0:
                    clean = False
        if not clean:
            continue
        # divisibility: fold an offending row into the pivot row and redo
        bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                    if A[i, j] % a != 0), None)
        if bad is not None:
            i = bad[0]
            A[t] = A[t] + A[i]
            U[t] = U[t] + U[i]
            continue
        if a < 0:
            A[t] = -A[t]
            U[t] = -U[t]
        t += 1
    divisors = tuple(int(A[k, k]) for k in range(min(m, n)) if A[k, k] != 0)
    return SnfResult(U, A, V, divisors)


def kernel_saturated(M) -> np.ndarray:
    """Columns form a basis of ker(M) over Z; the span is automatically primitive."""
    M = M if isinstance(M, np.ndarray) else as_int_matrix(M)
    res = snf(M)
    return res.V[:, res.rank:].copy()


def saturated_left_inverse(B: np.ndarray) -> np.ndarray:
    """Integer ``L`` with ``L @ B = I`` for a matrix with primitive column span."""
    res = snf(B)
    k = B.shape[1]
    if res.rank != k or any(d != 1 for d in res.divisors):
        raise LinAlgError("columns do not span a saturated lattice")
    # U B V = [I; 0]  =>  (V [I 0] U) B = I
    return res.V @ res.U[:k, :]


def saturate(B: np.ndarray) -> np.ndarray:
    """Basis of the saturation (Q-span intersected with Z^n) of the columns of B."""
    n = B.shape[0]
    if B.shape[1] == 0:
        return zeros(n, 0)
    # saturation of span(B) = kernel of the saturated left annihilator
    ann = kernel_saturated(B.T).T
    if ann.shape[0] == 0:
        return identity(n)
    return kernel_saturated(ann)


def unimodular_inverse(U: np.ndarray) -> np.ndarray:
    return to_int(inverse_q(U))


# ----------------------------------------------------------- rational algebra


def _row_gcd_reduce(A: np.ndarray, rows) -> None:
    for i in rows:
        g = math.gcd(*A[i].tolist())
        if g > 1:
            A[i] = A[i] // g


def rref(M) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over Q and the pivot columns.

    Elimination runs fraction-free on an integer scaling of M (rows kept
    primitive); only the final normalization introduces fractions."""
    A0 = np.asarray(M, dtype=object)
    m, n = A0.shape
    A = np.empty((m, n), dtype=object)
    for i in range(m):
        den = 1
        for x in A0[i]:
            if isinstance(x, Fraction) and x.denominator != 1:
                den = den * x.denominator // math.gcd(den, x.denominator)
        for j in range(n):
            A[i, j] = int(A0[i, j] * den)
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = [i for i in range(r, m) if A[i, c] != 0]
        if not nz:
            continue
        p = min(nz, key=lambda i: abs(A[i, c]))
        if p != r:
            A[[r, p]] = A[[p, r]]
        others = [i for i in range(m) if i != r and A[i, c] != 0]
        if others:
            piv = A[r, c]
            col = A[others, c].reshape(-1, 1)
            A[others] = A[others] * piv - col * A[r].reshape(1, -1)
            _row_gcd_reduce(A, others)
        pivots.append(c)
        r += 1
    out = np.empty((m, n), dtype=object)
    for i in range(m):
        lead = A[i, pivots[i]] if i < len(pivots) else 1
        for j in range(n):
            out[i, j] = Fraction(A[i, j], lead)
    return out, pivots


def rank_q(M) -> int:
    M = np.asarray(M, dtype=object)
    if M.size == 0:
        return 0
    return len(rref(M)[1])


def nullspace_q(M) -> np.ndarray:
    """Rational basis of the right kernel, one vector per free column."""
    M = np.asarray(M, dtype=object)
    n = M.shape[1]
    if M.shape[0] == 0:
        return as_rational_matrix(identity(n)) if n else zeros(0, 0)
    R, piv = rref(M)
    free = [c for c in range(n) if c not in piv]
    out = zeros(n, len(free))
    for k, f in enumerate(free):
        out[f, k] = Fraction(1)
        for r, c in enumerate(piv):
            out[c, k] = -R[r, f]
    return out


def det_q(M) -> Fraction:
    A = as_rational_matrix(M)
    n = A.shape[0]
    if A.shape != (n, n):
        raise LinAlgError("determinant of a non-square matrix")
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if A[i, c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[[c, p]] = A[[p, c]]
            det = -det
        det *= A[c, c]
        for i in range(c + 1, n):
            if A[i, c] != 0:
                A[i] = A[i] - (A[i, c] / A[c, c]) * A[c]
    return det


def inverse_q(M) -> np.ndarray:
    A = as_rational_matrix(M)
    n = A.shape[0]
    R, piv = rref(np.hstack([A, as_rational_matrix(identity(n))]) if n else A)
    if n and piv[:n] != list(range(n)):
        raise LinAlgError("singular matrix")
    return R[:, n:] if n else zeros(0, 0)


def solve_q(A, b) -> np.ndarray:
    """Exact solution of a nonsingular square system (b may have many columns)."""
    return inverse_q(A) @ as_rational_matrix(b)


def column_basis(M) -> list[int]:
    """Indices of a maximal independent set of columns (rref pivots)."""
    M = np.asarray(M, dtype=object)
    if M.size == 0:
        return []
    return rref(M)[1]


def is_positive_definite(G) -> bool:
    """Sylvester-style test by exact symmetric elimination."""
    A = as_rational_matrix(G)
    n = A.shape[0]
    if A.shape != (n, n):
        return False
    if any(A[i, j] != A[j, i] for i in range(n) for j in range(i)):
        return False
    for c in range(n):
        if A[c, c] <= 0:
            return False
        for i in range(c + 1, n):
            if A[i, c] != 0:
                A[i] = A[i] - (A[i, c] / A[c, c]) * A[c]
    return True


def gram_det(B, G=None) -> Fraction:
    """det(B^T G B) as an exact rational; the squared covolume of span(B)."""
    B = as_rational_matrix(B) if not (isinstance(B, np.ndarray) and B.size == 0) else B
    n = B.shape[0]
    G = as_rational_matrix(identity(n)) if G is None else as_rational_matrix(G)
    if G.shape != (n, n):
        raise LinAlgError("metric size does not match ambient dimension")
    if n and not is_positive_definite(G):
        raise LinAlgError("metric is not positive definite")
    if B.shape[1] == 0:
        return Fraction(1)
    d = det_q(B.T @ G @ B)
    if d == 0:
        raise LinAlgError("columns are dependent (Gram determinant is zero)")
    return d


def charpoly(M) -> list[Fraction]:
    """Coefficients c_0..c_n of det(xI - M), lowest degree first (Faddeev-LeVerrier)."""
    A = as_rational_matrix(M)
    n = A.shape[0]
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    Mk = zeros(n, n)
    I = as_rational_matrix(identity(n))
    for k in range(1, n + 1):
        Mk = A @ Mk + coeffs[n - k + 1] * I
        AM = A @ Mk
        coeffs[n - k] = -sum((AM[i, i] for i in range(n)), Fraction(0)) / k
    return coeffs


def pseudo_determinant(M) -> tuple[Fraction, int]:
    """Product of the nonzero eigenvalues of a diagonalizable M, and its nullity."""
    M = np.asarray(M, dtype=object)
    n = M.shape[0]
    if n == 0:
        return Fraction(1), 0
    nullity = n - rank_q(M)
    c = charpoly(M)
    return c[nullity] * (-1) ** (n - nullity), nullity


# ---------------------------------------------------------- prime field work


def rref_mod_p(M, p: int) -> tuple[np.ndarray, list[int]]:
    A = np.array([[int(x) % p for x in row] for row in np.asarray(M, dtype=object)],
                 dtype=np.int64).reshape(np.asarray(M).shape)
    m, n = A.shape
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r] = (A[r] * pow(int(A[r, c]), -1, p)) % p
        col = A[:, c].copy()
        col[r] = 0
        A = (A - np.outer(col, A[r])) % p
        pivots.append(c)
        r += 1
    return A, pivots


def rank_mod_p(M, p: int) -> int:
    M = np.asarray(M, dtype=object)
    if M.size == 0:
        return 0
    return len(rref_mod_p(M, p)[1])


def nullspace_mod_p(M, p: int) -> np.ndarray:
    M = np.asarray(M, dtype=object)
    n = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(n, dtype=np.int64)
    R, piv = rref_mod_p(M, p)
    free = [c for c in range(n) if c not in piv]
    out = np.zeros((n, len(free)), dtype=np.int64)
    for k, f in enumerate(free):
        out[f, k] = 1
        for r, c in enumerate(piv):
            out[c, k] = (-R[r, f]) % p
    return out
