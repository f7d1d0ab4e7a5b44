import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torsionforge import basechange as bc
from torsionforge import corpus as cp
from torsionforge import groups as gr
from torsionforge import ttf


def brute_trace(T, Gamma, f):
    """trace of (R(f) phi)(Gamma x) = sum_g f(g) phi(Gamma sigma^{-1}(x g)) on explicit cosets."""
    G = T.group
    Gs = set(int(g) for g in Gamma)
    cosets = sorted({frozenset(G.mul(h, x) for h in Gs) for x in range(G.order)}, key=min)
    where = {g: k for k, c in enumerate(cosets) for g in c}
    sinv = T.sigma_inv
    total = Fraction(0)
    for c in cosets:
        x = min(c)
        for g, v in f.values.items():
            if where[int(sinv[G.mul(x, g)])] == where[x]:
                total += v
    return total


def random_function(rng, n, size=None):
    size = size or rng.randint(1, min(n, 12))
    return ttf.TwistedTestFunction.build(
        {g: Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for g in rng.sample(range(n), size)})


def test_zero_function():
    T = cp.twisted_model("S3^2 swap")
    f = ttf.TwistedTestFunction.build({})
    check = ttf.verify(T, np.array([T.group.e]), f)
    assert check.trace.value == 0 and check.report.geometric_total == 0
    A = cp.twisted_model("Z/5 inversion")
    assert ttf.spectral_side_abelian(A, np.array([A.group.e]), f) == 0


def test_indicator_of_identity_counts_fixed_cosets():
    G0 = gr.sl2(3)
    T = bc.product_swap(G0)
    H = bc.product_subgroup(T, gr.borel(G0))
    f = ttf.TwistedTestFunction.indicator(T.group.e)
    assert ttf.operator_trace(T, H, f).value == bc.induced_trace(T, H, T.group.e) == 4
    T9 = bc.sl2_frobenius(3)
    B = gr.borel(T9.group)
    assert ttf.operator_trace(T9, B, ttf.TwistedTestFunction.indicator(T9.group.e)).value == 4


def test_whole_group_is_one_coset():
    T = cp.twisted_model("S3^3 shift")
    f = random_function(random.Random(1), T.order)
    G = np.arange(T.order)
    op = ttf.operator_trace(T, G, f)
    assert op.coset_count == 1
    assert op.value == sum(f.values.values())


def test_trivial_gamma_free_quotient():
    T = cp.twisted_model("Q8^2 swap")
    G = T.group
    f = random_function(random.Random(2), T.order)
    want = sum((f.values.get(G.mul(G.mul(int(G.inv[x]), G.e), int(T.sigma[x])), 0) for x in range(G.order)),
               Fraction(0))
    rep = ttf.geometric_side(T, np.array([G.e]), f)
    assert rep.operator_trace == want == rep.geometric_total


def test_documented_values():
    z5 = cp.twisted_model("Z/5 inversion")
    f = ttf.TwistedTestFunction.build({0: 1, 1: Fraction(1, 2), 2: 3})
    check = ttf.verify(z5, np.array([z5.group.e]), f)
    assert check.trace.value == check.spectral == Fraction(9, 2)


def test_diagonal_characters_for_swap():
    T = cp.twisted_model("Z/3^2 swap")
    G = T.group
    # with f the indicator of g the spectral side sums the sigma-stable characters at g,
    # which are the diagonal ones chi_(a, a)
    for g in range(G.order):
        x = G.keys[g]
        f = ttf.TwistedTestFunction.indicator(g)
        s = ttf.spectral_side_abelian(T, np.array([G.e]), f)
        assert s == (3 if (x[0] + x[1]) % 3 == 0 else 0)


def test_spectral_side_needs_abelian_model():
    T = cp.twisted_model("S3^2 swap")
    with pytest.raises(ttf.GroupNotAbelian):
        ttf.spectral_side_abelian(T, np.array([T.group.e]), ttf.TwistedTestFunction.indicator(0))


corpus = cp.ttf_corpus(seed=0xB45E, count=60)


@settings(max_examples=30)
@given(st.sampled_from(corpus))
def test_trace_formula_on_corpus(item):
    name, T, Gamma, f = item
    check = ttf.verify(T, Gamma, f)
    assert check.report.identity_holds, name
    if T.order <= 400:
        assert brute_trace(T, Gamma, f) == check.trace.value
    if check.spectral is not None:
        assert check.spectral == check.trace.value


@settings(max_examples=20)
@given(st.sampled_from(["S3^2 swap", "SL2(F3)^2 swap", "Z/3^2 swap", "A4^2 swap", "S4 by transposition"]),
       st.integers(0, 2 ** 32 - 1))
def test_nested_subgroups(name, seed):
    """For Gamma' inside Gamma both formulas hold, so the change of trace is
    the change of the geometric sides."""
    rng = random.Random(seed)
    T = cp.twisted_model(name)
    big = cp.random_stable_subgroup(rng, T)
    gens = [g for g in rng.sample(list(big), min(2, len(big)))]
    orbit = [int(T.sigma_power(k)[g]) for g in gens for k in range(T.p)]
    small = T.group.closure(orbit)
    assert set(small.tolist()) <= set(big.tolist())
    f = random_function(rng, T.order)
    fine, coarse = ttf.verify(T, small, f).report, ttf.verify(T, big, f).report
    assert fine.identity_holds and coarse.identity_holds
    assert fine.operator_trace - coarse.operator_trace == fine.geometric_total - coarse.geometric_total
    if len(small) == 1:
        assert fine.operator_trace * 1 == brute_trace(T, small, f)


def test_h1_term_for_invariant_functions():
    # for f constant on twisted classes and Gamma = G, the norm-trivial part is one term
    for name in ("S3^3 shift", "SL2(F9) Frobenius", "Q8^2 swap"):
        T = cp.twisted_model(name)
        G = T.group
        X = np.arange(G.order)
        rep = bc.twisted_classes(T)
        rng = random.Random(5)
        values = {}
        for c in rep.classes:
            v = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
            orbit = np.unique(G.mul_many(G.mul_many(X, c.representative), G.inv[T.sigma[X]]))
            values.update({int(g): v for g in orbit})
        report = ttf.geometric_side(T, X, ttf.TwistedTestFunction.build(values))
        assert report.identity_holds and report.h1_term_matches, name


def test_function_json_round_trip():
    T = cp.twisted_model("S3^3 shift")
    f = random_function(random.Random(4), T.order)
    assert ttf.TwistedTestFunction.from_json(T, f.to_json(T)) == f


def test_unstable_gamma_rejected():
    T = cp.twisted_model("S3^2 swap")
    G = T.group
    left = G.closure([G.index[(1, 0)]])     # a first-factor subgroup, moved by the swap
    with pytest.raises(bc.SubgroupNotSigmaStable):
        ttf.operator_trace(T, left, ttf.TwistedTestFunction.indicator(G.e))
