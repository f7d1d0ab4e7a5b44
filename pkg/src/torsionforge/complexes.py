"""Cochain complexes of free Z-modules with inner products and volume forms.

Degree ``i`` has rank ``r_i``; ``diff[i]`` is the ``r_{i+1} x r_i`` integer
matrix of ``d^i``.  Each degree carries a rational positive-definite metric
``G_i`` (identity by default) and a positive rational ``volume_scale`` c_i: the
chain volume form is c_i times the standard form of the given basis.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exactla as la


class ComplexError(ValueError):
    pass


class DifferentialSquareNonzero(ComplexError):
    def __init__(self, degree: int):
        super().__init__(f"d^{degree + 1} d^{degree} != 0")
        self.degree = degree


class MetricNotPositiveDefinite(ComplexError):
    def __init__(self, degree: int):
        super().__init__(f"metric in degree {degree} is not positive definite")
        self.degree = degree


class NotACocycle(ComplexError):
    pass


@dataclass(frozen=True, eq=False)
class CochainComplex:
    ranks: tuple[int, ...]
    diff: tuple[np.ndarray, ...]
    metric: tuple[np.ndarray, ...]
    volume_scale: tuple[Fraction, ...]

    @classmethod
    def build(cls, ranks, diff, metric=None, volume_scale=None) -> "CochainComplex":
        ranks = tuple(int(r) for r in ranks)
        if not ranks:
            raise ComplexError("a complex needs at least one degree")
        if len(diff) != len(ranks) - 1:
            raise ComplexError(f"expected {len(ranks) - 1} differentials, got {len(diff)}")
        ds = tuple(la.as_int_matrix(d, ranks[i + 1], ranks[i]) for i, d in enumerate(diff))
        if metric is None:
            gs = tuple(la.as_rational_matrix(la.identity(r)) if r else la.zeros(0, 0)
                       for r in ranks)
        else:
            if len(metric) != len(ranks):
                raise ComplexError("one metric per degree required")
            gs = []
            for i, (g, r) in enumerate(zip(metric, ranks)):
                g = la.as_rational_matrix(g) if r else la.zeros(0, 0)
                if g.shape != (r, r):
                    raise ComplexError(f"metric in degree {i} has shape {g.shape}, expected {(r, r)}")
                gs.append(g)
            gs = tuple(gs)
        if volume_scale is None:
            cs = tuple(Fraction(1) for _ in ranks)
        else:
            cs = tuple(Fraction(c) for c in volume_scale)
            if len(cs) != len(ranks):
                raise ComplexError("one volume scale per degree required")
            if any(c <= 0 for c in cs):
                raise ComplexError("volume scales must be positive")
        return cls(ranks, ds, gs, cs)

    @property
    def top_degree(self) -> int:
        return len(self.ranks) - 1

    def d(self, i: int) -> np.ndarray:
        """d^i, with zero maps outside the stored range."""
        if 0 <= i < len(self.diff):
            return self.diff[i]
        rows = self.ranks[i + 1] if 0 <= i + 1 < len(self.ranks) else 0
        cols = self.ranks[i] if 0 <= i < len(self.ranks) else 0
        return la.zeros(rows, cols)

    def G(self, i: int) -> np.ndarray:
        if 0 <= i < len(self.ranks):
            return self.metric[i]
        return la.zeros(0, 0)

    def euler_characteristic(self) -> int:
        return sum((-1) ** i * r for i, r in enumerate(self.ranks))

    def with_volume_scale(self, scale) -> "CochainComplex":
        return CochainComplex(self.ranks, self.diff, self.metric,
                              tuple(Fraction(c) for c in scale))

    # -- serialization ------------------------------------------------------

    @classmethod
    def from_json(cls, doc: dict) -> "CochainComplex":
        ranks = doc["ranks"]
        diff = [[[int(x) for x in row] for row in d] for d in doc.get("diff", [])]
        metric = doc.get("metric")
        if metric is not None:
            metric = [[[Fraction(str(x)) for x in row] for row in g] for g in metric]
        scale = doc.get("volume_scale")
        if scale is not None:
            scale = [Fraction(str(c)) for c in scale]
        return cls.build(ranks, diff, metric, scale)

    def to_json(self) -> dict:
        def num(x):
            return x if isinstance(x, int) or abs(x) < 2 ** 53 else str(x)

        doc = {
            "ranks": list(self.ranks),
            "diff": [[[num(int(x)) for x in row] for row in d] for d in self.diff],
        }
        if not all(_is_identity(g) for g in self.metric):
            doc["metric"] = [[[str(x) for x in row] for row in g] for g in self.metric]
        if any(c != 1 for c in self.volume_scale):
            doc["volume_scale"] = [str(c) for c in self.volume_scale]
        return doc


def _is_identity(g) -> bool:
    n = g.shape[0]
    return all(g[i, j] == (1 if i == j else 0) for i in range(n) for j in range(n))


def validate(C: CochainComplex) -> None:
    for i in range(len(C.diff) - 1):
        if not la.is_zero(la.matmul(C.diff[i + 1], C.diff[i])):
            raise DifferentialSquareNonzero(i)
    for i, g in enumerate(C.metric):
        if g.shape[0] and not la.is_positive_definite(g):
            raise MetricNotPositiveDefinite(i)


# ------------------------------------------------------------------ Hodge


def adjoint(C: CochainComplex, i: int) -> np.ndarray:
    """(d^i)^*: C^{i+1} -> C^i with respect to G_i, G_{i+1}."""
    d = C.d(i)
    if d.size == 0:
        return la.zeros(d.shape[1], d.shape[0])
    return la.matmul(la.matmul(la.inverse_q(C.G(i)), d.T), C.G(i + 1))


def laplacian(C: CochainComplex, i: int) -> np.ndarray:
    r = C.ranks[i]
    out = la.as_rational_matrix(la.zeros(r, r)) if r else la.zeros(0, 0)
    if i < len(C.diff):
        out = out + la.matmul(adjoint(C, i), C.d(i))
    if i > 0:
        out = out + la.matmul(C.d(i - 1), adjoint(C, i - 1))
    return out


def _project_off_span(z: np.ndarray, D: np.ndarray, G: np.ndarray) -> np.ndarray:
    """z minus its G-orthogonal projection onto the column span of D."""
    cols = la.column_basis(D)
    if not cols:
        return la.as_rational_matrix(z)
    Db = la.as_rational_matrix(D[:, cols])
    DtG = la.matmul(Db.T, G)
    y = la.solve_q(la.matmul(DtG, Db), la.matmul(DtG, z))
    return la.as_rational_matrix(z) - la.matmul(Db, y)


def harmonic_project(C: CochainComplex, i: int, cocycle) -> np.ndarray:
    """G_i-orthogonal projection of a cocycle onto ker(Laplacian_i); returns a column."""
    z = np.asarray(cocycle, dtype=object).reshape(-1, 1)
    if z.shape[0] != C.ranks[i]:
        raise ComplexError(f"cochain has length {z.shape[0]}, degree {i} has rank {C.ranks[i]}")
    if not la.is_zero(C.d(i) @ z):
        raise NotACocycle(f"d^{i} of the given cochain is nonzero")
    return _project_off_span(z, C.d(i - 1), C.G(i))


# ---------------------------------------------------------------- cohomology


@dataclass
class DegreeCohomology:
    degree: int
    betti: int
    torsion_divisors: list[int]
    regulator_sq: Fraction
    harmonic_basis: np.ndarray
    free_basis: np.ndarray = field(repr=False)  # integral cocycles lifting a basis of H_free

    @property
    def torsion_order(self) -> int:
        out = 1
        for d in self.torsion_divisors:
            out *= d
        return out


@dataclass
class CohomologyReport:
    degrees: list[DegreeCohomology]

    @property
    def betti(self) -> list[int]:
        return [h.betti for h in self.degrees]

    @property
    def torsion(self) -> list[list[int]]:
        return [h.torsion_divisors for h in self.degrees]

    def __getitem__(self, i) -> DegreeCohomology:
        return self.degrees[i]


def adapted_cocycle_basis(C: CochainComplex, i: int):
    """Cocycle basis ``Zp`` with boundaries = span(d_j * Zp[:, j] for j < rank).

    Returns ``(Zp, divisors, rank)``: the first ``rank`` columns carry H_tors
    (orders ``divisors``), the remaining columns lift a basis of H_free.
    """
    Z = la.kernel_saturated(C.d(i)) if C.ranks[i] else la.zeros(0, 0)
    if Z.shape[1] == 0:
        return la.zeros(C.ranks[i], 0), (), 0
    X = la.saturated_left_inverse(Z) @ C.d(i - 1)  # boundaries in cocycle coordinates
    res = la.snf(X)
    # U X V = D, so the columns of Z U^{-1} are adapted to the boundary lattice
    return Z @ la.unimodular_inverse(res.U), res.divisors, res.rank


def integral_cohomology(C: CochainComplex, i: int):
    """Saturated cocycle basis, torsion divisors and free-part lifts in degree i."""
    Zp, divisors, rank = adapted_cocycle_basis(C, i)
    return Zp, [d for d in divisors if d > 1], Zp[:, rank:]


def cohomology(C: CochainComplex) -> CohomologyReport:
    validate(C)
    out = []
    for i in range(len(C.ranks)):
        _, torsion, free = integral_cohomology(C, i)
        harm = la.zeros(C.ranks[i], 0)
        if free.shape[1]:
            harm = np.hstack([_project_off_span(free[:, [j]], C.d(i - 1), C.G(i))
                              for j in range(free.shape[1])])
        reg = la.gram_det(harm, C.G(i)) if free.shape[1] else Fraction(1)
        out.append(DegreeCohomology(i, free.shape[1], torsion, reg, harm, free))
    return CohomologyReport(out)


def betti_mod_p(C: CochainComplex, p: int) -> list[int]:
    """Dimensions of H^i(C tensor F_p)."""
    ranks = [la.rank_mod_p(C.d(i), p) for i in range(len(C.ranks))]
    return [C.ranks[i] - ranks[i] - (ranks[i - 1] if i else 0) for i in range(len(C.ranks))]
