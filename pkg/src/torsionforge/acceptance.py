"""The acceptance suite: thirteen checks over seeded corpora.

Each check returns a ``CriterionResult``; ``run_suite`` runs a named subset.
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction


from . import basechange as bc
from . import corpus as cp
from . import equivariant as eq
from . import groups as gr
from . import simplicial as simp
from . import ttf
from .complexes import CochainComplex, cohomology
from .config import SuiteConfig
from .rtorsion import analytic_torsion_fd, rt_via_cohomology, rt_via_determinant_line


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    data: dict = field(default_factory=dict)

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] criterion {self.number:2d} {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _timed(fn):
    def wrapper(cfg: SuiteConfig | None = None) -> CriterionResult:
        cfg = cfg or SuiteConfig()
        t0 = time.perf_counter()
        res = fn(cfg)
        res.seconds = time.perf_counter() - t0
        limit = cfg.time_limits.get(res.number)
        if limit is not None and res.seconds > limit:
            res.passed = False
            res.detail += f"; runtime {res.seconds:.1f}s exceeds {limit}s"
        return res
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def twisted_circle(n: int = 3) -> CochainComplex:
    return CochainComplex.build([1, 1], [[[n]]])


def _complexes(cfg: SuiteConfig, count: int, salt: int = 0):
    return cp.random_complex_corpus(cfg.seed ^ salt, count, max_rank=cfg.max_rank,
                                    max_entry=cfg.max_entry)


# ------------------------------------------------------------------ torsion


@_timed
def rt_oracle_equivalence(cfg):
    """Cohomology route and determinant-line route give the same exact square."""
    bad = []
    cs = _complexes(cfg, cfg.rt_count)
    for k, C in enumerate(cs):
        for mu in ("harmonic", "integral"):
            a = rt_via_cohomology(C, mu).exact_square
            b = rt_via_determinant_line(C, mu).exact_square
            if a != b:
                bad.append((k, mu))
    return CriterionResult(1, "RT route equivalence", not bad,
                           f"{len(cs)} complexes x 2 volume conventions, {len(bad)} exact mismatches",
                           data={"mismatches": bad})


@_timed
def scaling_law(cfg):
    """Rescaling the cohomology volume forms by c_i multiplies RT by prod c_even / prod c_odd."""
    rng = random.Random(cfg.seed ^ 0x5CA1E)
    bad = 0
    cs = _complexes(cfg, cfg.scaling_count, salt=0x2)
    for C in cs:
        scale = cp.random_positive_scales(rng, len(C.ranks))
        expect = Fraction(1)
        for i, c in enumerate(scale):
            expect = expect * c if i % 2 == 0 else expect / c
        for route in (rt_via_cohomology, rt_via_determinant_line):
            for mu in ("harmonic", "integral"):
                base = route(C, mu).exact_square
                scaled = route(C, mu, mu_scale=scale).exact_square
                if scaled / base != expect ** 2:
                    bad += 1
    return CriterionResult(2, "scaling law", bad == 0,
                           f"{len(cs)} complexes, both routes and conventions, {bad} failures")


@_timed
def torsion_ratio(cfg):
    """With integral cohomology volume forms RT = prod_odd |H_tors| / prod_even |H_tors|."""
    cs = _complexes(cfg, cfg.scaling_count, salt=0x3)
    bad = 0
    for C in cs:
        expect = Fraction(1)
        for h in cohomology(C).degrees:
            expect = expect * h.torsion_order if h.degree % 2 else expect / h.torsion_order
        for route in (rt_via_cohomology, rt_via_determinant_line):
            if route(C, "integral").exact_square != expect ** 2:
                bad += 1
    special = rt_via_cohomology(twisted_circle(3), "integral").exact_square
    ok = bad == 0 and special == 9
    return CriterionResult(3, "torsion ratio", ok,
                           f"{len(cs)} complexes, {bad} failures; d0=[3] gives RT^2 = {special}")


@_timed
def finite_cheeger_mueller(cfg):
    """Analytic torsion equals RT with harmonic volume forms."""
    cs = _complexes(cfg, cfg.rt_count)
    worst = 0.0
    for C in cs:
        a = analytic_torsion_fd(C).log_value
        r = rt_via_cohomology(C, "harmonic", omega="metric").log_value
        worst = max(worst, abs(a - r))
    return CriterionResult(4, "finite Cheeger-Mueller", worst <= cfg.tolerance,
                           f"{len(cs)} complexes, max |difference| {worst:.2e}", data={"max_error": worst})


# -------------------------------------------------------------- equivariant


@_timed
def equivariant_cm(cfg):
    """Equivariant analytic torsion equals rt_sigma for involutions."""
    items = cp.involution_corpus(cfg.seed, cfg.involution_count)
    worst = 0.0
    for C, act in items:
        worst = max(worst, abs(eq.analytic_torsion_sigma_fd(C, act) - eq.rt_sigma(C, act)))
    pair, swap = eq.swap_action(twisted_circle(3))
    swap_vals = (eq.rt_sigma(pair, swap), eq.analytic_torsion_sigma_fd(pair, swap))
    C3 = twisted_circle(3)
    sign = eq.sign_action(C3)
    sign_vals = (eq.rt_sigma(C3, sign), eq.analytic_torsion_sigma_fd(C3, sign))
    tol = cfg.tolerance
    ok = (worst <= tol and all(abs(v) <= tol for v in swap_vals)
          and all(abs(v + math.log(3)) <= tol for v in sign_vals))
    return CriterionResult(5, "equivariant Cheeger-Mueller (p = 2)", ok,
                           f"{len(items)} involutions, max |difference| {worst:.2e}; "
                           f"swap {swap_vals[0]:.1e}, sign on d0=[3] {sign_vals[0]:.6f}")


@_timed
def product_formula(cfg):
    """T(C x D) = T(C) Lef(D) + Lef(C) T(D) for the product involution."""
    rng = random.Random(cfg.seed ^ 0x9A1E)
    worst = 0.0
    for _ in range(cfg.product_count):
        (C, a), (D, b) = cp.random_involution(rng, max_rank=2), cp.random_involution(rng, max_rank=2)
        T, ab = eq.product_with_action(C, a, D, b)
        lhs = eq.analytic_torsion_sigma_fd(T, ab)
        rhs = (eq.analytic_torsion_sigma_fd(C, a) * eq.lefschetz(D, b).lefschetz
               + eq.lefschetz(C, a).lefschetz * eq.analytic_torsion_sigma_fd(D, b))
        worst = max(worst, abs(lhs - rhs))
    return CriterionResult(6, "product formula", worst <= cfg.tolerance,
                           f"{cfg.product_count} pairs, max |difference| {worst:.2e}")


def _simplicial(cfg):
    return cp.simplicial_action_corpus(cfg.seed, random_count=cfg.simplicial_random)


def _named(items, name):
    return next((sim, act) for n, sim, act in items if n == name)


@_timed
def smith_suite(cfg):
    """Chain-level Smith sequences and dim H(M^s; F_p) <= dim H(M; F_p)."""
    items = _simplicial(cfg)
    failures = []
    for name, sim, act in items:
        rep = eq.smith_check(sim, act)
        if not (rep.inequality_holds and rep.sequence_exact):
            failures.append(name)
    refl = eq.smith_check(*_named(items, "square circle, reflection"))
    rot = eq.smith_check(*_named(items, "square circle, half turn"))
    ok = (not failures and len(items) >= 20 and (refl.fixed_dim, refl.total_dim) == (2, 2)
          and (rot.fixed_dim, rot.total_dim) == (0, 2))
    return CriterionResult(7, "Smith suite", ok,
                           f"{len(items)} regular actions, {len(failures)} failures; reflection "
                           f"{refl.fixed_dim}<={refl.total_dim}, rotation {rot.fixed_dim}<={rot.total_dim}",
                           data={"failures": failures})


@_timed
def lefschetz_fixed_points(cfg):
    """Lefschetz number over Q equals the Euler characteristic of the fixed set."""
    items = _simplicial(cfg)
    failures = []
    values = {}
    for name, sim, act in items:
        C = simp.cochain_complex_of(sim)
        lef = eq.lefschetz(C, eq.action_from_simplicial(sim, act)).lefschetz
        chi = simp.fixed_subcomplex(sim, act).euler_characteristic
        values[name] = lef
        if lef != chi:
            failures.append(name)
    ok = (not failures and values["square circle, reflection"] == 2
          and values["square circle, half turn"] == 0)
    return CriterionResult(8, "Lefschetz equals fixed-point Euler characteristic", ok,
                           f"{len(items)} actions, {len(failures)} failures; reflection "
                           f"{values['square circle, reflection']}, rotation {values['square circle, half turn']}",
                           data={"failures": failures})


@_timed
def concrete_main_terms(cfg):
    """(a) = -(b) + (c) when the p-primary and F_p error inputs vanish."""
    items = cp.concretert_instances()
    bad = []
    for name, C, act, F, chi in items:
        rep = eq.concretert_main_terms(C, act, F, chi)
        if not (rep.errors_trivial and rep.equality_holds):
            bad.append(name)
    return CriterionResult(13, "main terms of the twisted torsion comparison", not bad and len(items) >= 5,
                           f"{len(items)} engineered instances, {len(bad)} failures", data={"failures": bad})


# --------------------------------------------------------------- basechange


@_timed
def induced_trace_models(cfg):
    """Coset-action count equals the class formula for every delta in two models."""
    G0 = gr.sl2(3)
    swap = bc.product_swap(G0)
    H_swap = bc.product_subgroup(swap, gr.borel(G0))
    frob = bc.sl2_frobenius(3)
    H_frob = gr.borel(frob.group)
    counts = {}
    ok = True
    spots = {}
    for label, T, H in (("SL2(F3)^2 swap", swap, H_swap), ("SL2(F9) Frobenius", frob, H_frob)):
        try:
            vals = bc.induced_trace_all(T, H)
        except bc.MismatchBetweenFormulas as exc:
            return CriterionResult(9, "induced trace double computation", False, str(exc))
        counts[label] = T.order
        spots[label] = int(vals[T.group.e])
    u0 = G0.index[(1, 1, 0, 1)]
    spots["swap (u, e)"] = bc.induced_trace(swap, H_swap, u0 + G0.order * G0.e)
    spots["Frobenius u"] = bc.induced_trace(frob, H_frob, frob.group.index[(1, 1, 0, 1)])
    ok = (spots["SL2(F3)^2 swap"] == 4 and spots["SL2(F9) Frobenius"] == 4
          and spots["swap (u, e)"] == 1 and spots["Frobenius u"] == 1)
    detail = ", ".join(f"{k}: {v}" for k, v in spots.items())
    return CriterionResult(9, "induced trace double computation", ok,
                           f"all delta in groups of order {list(counts.values())}; {detail}")


@_timed
def c_ratio(cfg):
    """Fixed-point ratios in the split SL2 Borel family."""
    rows = bc.c_ratio_sweep(cfg.sweep_primes)
    unip = [r for r in rows if r.kind == "unipotent"]
    semi = [r for r in rows if r.kind == "semisimple"]
    ok = all(r.ratio == Fraction(1, r.prime + 1) for r in unip)
    ok = ok and all(a.ratio > b.ratio for a, b in zip(unip, unip[1:]))
    ok = ok and all(r.ratio <= Fraction(2, r.prime + 1) for r in semi)
    bound = max(r.c_coset_pairs * 1 for r in rows if r.kind != "trivial")
    ok = ok and all(r.c_coset_pairs <= 2 for r in rows if r.kind != "trivial")
    ratios = " ".join(str(r.ratio) for r in unip)
    return CriterionResult(10, "c ratio sweep", ok,
                           f"unipotent ratios {ratios}; max c over non-trivial norms {bound}",
                           data={"tsv": bc.sweep_tsv(rows)})


@_timed
def h1_triviality(cfg):
    """H^1 of the swap on G0 x G0 and of Frobenius on SL2(F9) is trivial."""
    vals = {}
    for G0 in cp.h1_product_bases():
        vals[f"{G0.name}^2 swap"] = bc.h1(bc.product_swap(G0))
    vals["SL2(F9) Frobenius"] = bc.h1(bc.sl2_frobenius(3))
    ok = all(v == 1 for v in vals.values()) and len(vals) >= 6
    return CriterionResult(11, "H1 triviality", ok, ", ".join(f"{k}: {v}" for k, v in vals.items()))


# ----------------------------------------------------------------------- ttf


@_timed
def twisted_trace_formula(cfg):
    """Operator trace = geometric side exactly; abelian spectral side agrees."""
    items = cp.ttf_corpus(cfg.seed, cfg.ttf_count)
    bad, spectral = [], 0
    for k, (name, T, Gamma, f) in enumerate(items):
        check = ttf.verify(T, Gamma, f)
        if check.spectral is not None:
            spectral += 1
        if not check.ok:
            bad.append((k, name))
    biggest = max(T.order for _, T, _, _ in items)
    return CriterionResult(12, "twisted trace formula", not bad,
                           f"{len(items)} instances (|G| <= {biggest}), {spectral} with spectral side, "
                           f"{len(bad)} failures", data={"failures": bad})


CRITERIA = {
    1: rt_oracle_equivalence,
    2: scaling_law,
    3: torsion_ratio,
    4: finite_cheeger_mueller,
    5: equivariant_cm,
    6: product_formula,
    7: smith_suite,
    8: lefschetz_fixed_points,
    9: induced_trace_models,
    10: c_ratio,
    11: h1_triviality,
    12: twisted_trace_formula,
    13: concrete_main_terms,
}

SUITES = {
    "torsion": (1, 2, 3, 4),
    "equivariant": (5, 6, 7, 8, 13),
    "basechange": (9, 10, 11),
    "ttf": (12,),
    "all": tuple(range(1, 14)),
}


def run_suite(suite: str = "all", cfg: SuiteConfig | None = None) -> list[CriterionResult]:
    cfg = cfg or SuiteConfig()
    return [CRITERIA[n](cfg) for n in SUITES[suite]]
