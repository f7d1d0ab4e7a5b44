"""Reidemeister torsion (two exact routes) and finite-dimensional analytic torsion.

Conventions, all absolute values:

* ``omega="combinatorial"`` uses c_i times the standard volume form of the
  integral basis; ``omega="metric"`` uses the Riemannian volume sqrt(det G_i).
* ``mu="integral"`` gives an integral basis of H^i_free volume 1;
  ``mu="harmonic"`` gives it the metric covolume of its harmonic projections.
* ``mu_scale`` multiplies mu_i by a positive rational per degree.

With these, log RT = sum_i (-1)^(i+1) [log omega_i(basis_i) - log mu_i(h_i)].
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.linalg

from . import exactla as la
from .complexes import CochainComplex, cohomology, integral_cohomology, laplacian, validate

MU_CHOICES = ("integral", "harmonic")
OMEGA_CHOICES = ("combinatorial", "metric")


@dataclass(frozen=True)
class TorsionValue:
    log_value: float
    exact_square: Fraction | None = None

    @classmethod
    def from_square(cls, sq: Fraction) -> "TorsionValue":
        sq = Fraction(sq)
        if sq <= 0:
            raise ValueError("torsion square must be positive")
        return cls(0.5 * _log_fraction(sq), sq)

    @property
    def value(self) -> float:
        return math.exp(self.log_value)


def _log_fraction(x: Fraction) -> float:
    # exact enough for big numerators where float(x) would overflow
    return math.log(x.numerator) - math.log(x.denominator)


def _check_options(C, mu, omega, mu_scale):
    if mu not in MU_CHOICES:
        raise ValueError(f"mu must be one of {MU_CHOICES}")
    if omega not in OMEGA_CHOICES:
        raise ValueError(f"omega must be one of {OMEGA_CHOICES}")
    if mu_scale is None:
        return [Fraction(1)] * len(C.ranks)
    mu_scale = [Fraction(c) for c in mu_scale]
    if len(mu_scale) != len(C.ranks) or any(c <= 0 for c in mu_scale):
        raise ValueError("mu_scale needs one positive rational per degree")
    return mu_scale


def _omega_sq(C: CochainComplex, i: int, omega: str) -> Fraction:
    if omega == "metric":
        return la.det_q(C.G(i)) if C.ranks[i] else Fraction(1)
    return C.volume_scale[i] ** 2


def rt_via_cohomology(C: CochainComplex, mu: str = "harmonic", *, omega: str = "combinatorial",
                      mu_scale=None) -> TorsionValue:
    """Torsion ratio of H_tors times the alternating regulator ratio."""
    scale = _check_options(C, mu, omega, mu_scale)
    report = cohomology(C)
    sq = Fraction(1)
    for h in report.degrees:
        i = h.degree
        term = Fraction(h.torsion_order ** 2)
        term *= _omega_sq(C, i, omega)
        term /= scale[i] ** 2 * (h.regulator_sq if mu == "harmonic" else 1)
        sq = sq * term if i % 2 else sq / term
    return TorsionValue.from_square(sq)


def rt_via_determinant_line(C: CochainComplex, mu: str = "harmonic", *,
                            omega: str = "combinatorial", mu_scale=None) -> TorsionValue:
    """Evaluate omega (x) mu^-1 on the determinant-line element of an explicit splitting.

    In degree i the basis is (d b^{i-1}, h^i, b^i): b^i are standard vectors on a
    pivot set of d^i and h^i lift an integral basis of H^i_free.
    """
    scale = _check_options(C, mu, omega, mu_scale)
    validate(C)
    n = len(C.ranks)
    lifts = []
    for i in range(n):
        d = C.d(i)
        piv = la.column_basis(d)
        b = la.zeros(C.ranks[i], len(piv))
        for k, j in enumerate(piv):
            b[j, k] = 1
        lifts.append(b)
    sq = Fraction(1)
    for i in range(n):
        r = C.ranks[i]
        if r == 0:
            # the empty degree still carries its scale on det(0) = R
            term = 1 / scale[i] ** 2
            sq = sq * term if i % 2 else sq / term
            continue
        h = integral_cohomology(C, i)[2]
        bd = C.d(i - 1) @ lifts[i - 1] if i > 0 else la.zeros(r, 0)
        basis = np.hstack([bd, h, lifts[i]])
        if basis.shape != (r, r):
            raise la.LinAlgError(f"splitting in degree {i} has shape {basis.shape}")
        det = la.det_q(basis)
        w_sq = det * det * _omega_sq(C, i, omega)
        m_sq = scale[i] ** 2
        if mu == "harmonic" and h.shape[1]:
            # covolume of h orthogonal to the boundaries: ratio of Gram determinants
            G = C.G(i)
            both = np.hstack([bd, h])
            full = la.det_q(la.matmul(la.matmul(both.T, G), both))
            base = la.det_q(la.matmul(la.matmul(bd.T, G), bd)) if bd.shape[1] else Fraction(1)
            m_sq *= full / base
        term = w_sq / m_sq
        sq = sq * term if i % 2 else sq / term
    return TorsionValue.from_square(sq)


# --------------------------------------------------------------- analytic


def _float(M) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in M], dtype=float).reshape(M.shape)


def laplacian_spectrum(C: CochainComplex, i: int):
    """Eigenvalues and G-orthonormal eigenvectors of the degree-i Laplacian."""
    r = C.ranks[i]
    if r == 0:
        return np.zeros(0), np.zeros((0, 0))
    G = _float(C.G(i))
    A = G @ _float(laplacian(C, i))
    A = 0.5 * (A + A.T)
    return scipy.linalg.eigh(A, G)


def _positive(w: np.ndarray) -> np.ndarray:
    if w.size == 0:
        return np.zeros(0, dtype=bool)
    top = max(float(np.max(w)), 0.0)
    return w > 1e-10 * top if top > 0 else np.zeros(w.shape, dtype=bool)


EXACT_SIZE_LIMIT = 40


def log_det_prime(C: CochainComplex, i: int, method: str = "auto") -> float:
    """log of the product of positive Laplacian eigenvalues in degree i."""
    r = C.ranks[i]
    if r == 0:
        return 0.0
    if method == "auto":
        method = "charpoly" if r <= EXACT_SIZE_LIMIT else "eigen"
    if method == "charpoly":
        pdet, nullity = la.pseudo_determinant(laplacian(C, i))
        return 0.0 if nullity == r else _log_fraction(abs(pdet))
    w, _ = laplacian_spectrum(C, i)
    return float(np.sum(np.log(w[_positive(w)])))


def analytic_torsion_fd(C: CochainComplex, method: str = "auto") -> TorsionValue:
    """log T = 1/2 sum_i (-1)^(i+1) i log det' Laplacian_i."""
    validate(C)
    total = 0.0
    for i in range(1, len(C.ranks)):
        total += (-1) ** (i + 1) * i * log_det_prime(C, i, method)
    return TorsionValue(0.5 * total)
