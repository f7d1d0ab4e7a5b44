"""Exact twisted trace formula for a finite group G, an automorphism sigma of
prime order and a sigma-stable subgroup Gamma, with counting measures.

The twisted right regular action on functions on Gamma\\G is

    (R(f) phi)(Gamma x) = sum_g f(g) phi(Gamma sigma^{-1}(x g)),

so trace R(f) = sum_{x in Gamma\\G} sum_{gamma in Gamma} f(x^{-1} gamma sigma(x)),
and the class of delta under gamma -> y gamma sigma(y)^{-1} contributes
(1/|Gamma^delta|) sum_{x in G} f(x^{-1} delta sigma(x)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy

from .basechange import (MismatchBetweenFormulas, TwistedGroupSpace, _check_stable, _labels,
                         _norm_map, _orbit, _stabilizer, coset_labels, element_from_json,
                         element_to_json, h1 as h1_count)


class GroupNotAbelian(ValueError):
    pass


@dataclass
class TwistedTestFunction:
    """f(g x sigma) for g in the support; zero elsewhere."""

    values: dict[int, Fraction]

    @classmethod
    def build(cls, values) -> "TwistedTestFunction":
        return cls({int(g): Fraction(v) for g, v in dict(values).items() if Fraction(v) != 0})

    @classmethod
    def indicator(cls, g: int) -> "TwistedTestFunction":
        return cls({int(g): Fraction(1)})

    @classmethod
    def from_json(cls, T: TwistedGroupSpace, doc) -> "TwistedTestFunction":
        entries = doc["support"] if isinstance(doc, dict) else doc
        out: dict[int, Fraction] = {}
        for e in entries:
            g = element_from_json(T, e["element"])
            out[g] = out.get(g, Fraction(0)) + Fraction(str(e["value"]))
        return cls.build(out)

    def to_json(self, T: TwistedGroupSpace) -> dict:
        return {"support": [{"element": element_to_json(T, g), "value": str(v)}
                            for g, v in sorted(self.values.items())]}

    def integer_form(self, n: int):
        """(numerators over a common denominator as an object array, denominator)."""
        den = 1
        for v in self.values.values():
            den = den * v.denominator // math.gcd(den, v.denominator)
        num = np.zeros(n, dtype=object)
        num[:] = 0
        for g, v in self.values.items():
            num[g] = int(v * den)
        return num, den


@dataclass
class OperatorTrace:
    value: Fraction
    matrix_trace: Fraction
    double_sum: Fraction
    coset_count: int


def operator_trace(T: TwistedGroupSpace, Gamma, f: TwistedTestFunction) -> OperatorTrace:
    G = T.group
    Gamma = np.asarray(Gamma, dtype=np.int64)
    _check_stable(T, Gamma)
    label, reps = coset_labels(G, Gamma)
    k = len(reps)
    num, den = f.integer_form(G.order)
    sig_inv = T.sigma_inv
    M = np.zeros((k, k), dtype=object)
    M[:] = 0
    rows = np.arange(k)
    for g, v in f.values.items():
        cols = label[sig_inv[G.mul_many(reps, g)]]
        np.add.at(M, (rows, cols), int(num[g]))
    matrix_trace = Fraction(int(sum(M[i, i] for i in range(k))), den)
    idx = G.mul_many(G.mul_many(G.inv[reps][:, None], Gamma[None, :]), T.sigma[reps][:, None])
    double = Fraction(int(num[idx].sum()), den)
    if matrix_trace != double:
        raise MismatchBetweenFormulas(f"operator trace: matrix {matrix_trace} != double sum {double}")
    return OperatorTrace(matrix_trace, matrix_trace, double, k)


@dataclass
class GeometricTerm:
    representative: int
    class_size: int
    centralizer_in_gamma: int
    centralizer_in_group: int
    volume: Fraction          # |G^delta| / |Gamma^delta|
    orbital_sum: Fraction     # sum over G^delta\G of f(x^{-1} delta sigma(x))
    contribution: Fraction
    in_z1: bool


@dataclass
class TraceFormulaReport:
    operator_trace: Fraction
    geometric_terms: list[GeometricTerm]
    geometric_total: Fraction
    h1_gamma: int
    h1_group: int
    z1_contribution: Fraction          # sum of the terms with norm(delta) = e
    h1_term: Fraction | None          # |H1(Gamma)| vol(Gamma^s\G^s) orbital of e, if H1(G) = 1
    identity_holds: bool

    @property
    def h1_term_matches(self) -> bool | None:
        return None if self.h1_term is None else self.h1_term == self.z1_contribution


def geometric_side(T: TwistedGroupSpace, Gamma, f: TwistedTestFunction,
                   op: OperatorTrace | None = None) -> TraceFormulaReport:
    G = T.group
    Gamma = np.asarray(Gamma, dtype=np.int64)
    _check_stable(T, Gamma)
    op = op or operator_trace(T, Gamma, f)
    num, den = f.integer_form(G.order)
    X = np.arange(G.order)
    sig = T.sigma
    inv = G.inv
    xinv = inv[X]
    xsig = sig[X]

    def orbital_total(delta: int) -> int:  # sum over all x in G
        return int(num[G.mul_many(G.mul_many(xinv, delta), xsig)].sum())

    _, reps, sizes = _labels(lambda g: _orbit(G, sig, g, Gamma), Gamma, G.order)
    norms = _norm_map(G, sig, T.p, np.array(reps, dtype=np.int64))
    terms = []
    for r, s, n in zip(reps, sizes, norms):
        zg = len(Gamma) // s
        zG = len(_stabilizer(G, sig, r, X))
        total = orbital_total(r)
        orbital = Fraction(total, den * zG)
        vol = Fraction(zG, zg)
        terms.append(GeometricTerm(r, s, zg, zG, vol, orbital, vol * orbital, int(n) == G.e))
    geo = sum((t.contribution for t in terms), Fraction(0))
    h1_gamma = h1_count(T, Gamma)
    h1_group = h1_count(T)
    z1 = sum((t.contribution for t in terms if t.in_z1), Fraction(0))
    h1_term = None
    if h1_group == 1:
        fixed_G = int(np.sum(sig == X))
        fixed_Gamma = int(np.sum(sig[Gamma] == Gamma))
        orbital_e = Fraction(orbital_total(G.e), den * fixed_G)
        h1_term = h1_gamma * Fraction(fixed_G, fixed_Gamma) * orbital_e
    return TraceFormulaReport(op.value, terms, geo, h1_gamma, h1_group, z1, h1_term,
                              geo == op.value)


def _cyclotomic_value(coeffs: list[int], N: int) -> Fraction:
    """sum_k coeffs[k] zeta_N^k, which must be rational."""
    x = sympy.Symbol("x")
    poly = sympy.Poly(list(reversed(coeffs)), x, domain=sympy.QQ)
    rem = poly.rem(sympy.Poly(sympy.cyclotomic_poly(N, x), x, domain=sympy.QQ))
    if rem.degree() > 0:
        raise MismatchBetweenFormulas("spectral side is not rational")
    c = rem.coeffs()[0] if not rem.is_zero else 0
    return Fraction(int(sympy.numer(c)), int(sympy.denom(c)))


def spectral_side_abelian(T: TwistedGroupSpace, Gamma, f: TwistedTestFunction) -> Fraction:
    """Sum over sigma-stable characters trivial on Gamma of sum_g f(g) chi(g),
    with each extension normalized by chi~(e x sigma) = 1."""
    G = T.group
    if not G.is_abelian():
        raise GroupNotAbelian(f"{G.name} is not abelian")
    if G.kind != "abelian":
        raise GroupNotAbelian("spectral side needs the Z/n1 x ... x Z/nk model")
    Gamma = np.asarray(Gamma, dtype=np.int64)
    _check_stable(T, Gamma)
    mods = np.array(G.data["moduli"], dtype=np.int64)
    N = int(np.lcm.reduce(mods)) if len(mods) else 1
    keys = np.array(G.keys, dtype=np.int64).reshape(G.order, len(mods))
    # chi_a(x) = zeta_N^{sum a_i x_i N / n_i}
    E = (keys * (N // mods)) @ keys.T % N   # rows: characters a, columns: elements x
    stable = np.all(E[:, T.sigma] == E, axis=1) & np.all(E[:, Gamma] == 0, axis=1)
    num, den = f.integer_form(G.order)
    coeffs = [0] * N
    support = np.array(sorted(f.values), dtype=np.int64)
    for a in np.nonzero(stable)[0]:
        for x in support:
            coeffs[int(E[a, x])] += int(num[x])
    return _cyclotomic_value(coeffs, N) / den


@dataclass
class TTFCheck:
    trace: OperatorTrace
    report: TraceFormulaReport
    spectral: Fraction | None

    @property
    def ok(self) -> bool:
        return self.report.identity_holds and (self.spectral is None or self.spectral == self.trace.value)


def verify(T: TwistedGroupSpace, Gamma, f: TwistedTestFunction, spectral: bool | None = None) -> TTFCheck:
    op = operator_trace(T, Gamma, f)
    rep = geometric_side(T, Gamma, f, op)
    spectral_value = None
    want = spectral if spectral is not None else T.group.kind == "abelian"
    if want:
        spectral_value = spectral_side_abelian(T, Gamma, f)
    return TTFCheck(op, rep, spectral_value)
