import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from torsionforge import basechange as bc
from torsionforge import corpus as cp
from torsionforge import groups as gr


def brute_twisted_classes(T, within=None):
    """Orbits of g -> x g sigma(x)^{-1} by plain set iteration."""
    G = T.group
    X = range(G.order) if within is None else [int(x) for x in within]
    seen, orbits = set(), []
    for g in X:
        if g in seen:
            continue
        orb = {G.mul(G.mul(x, g), int(G.inv[T.sigma[x]])) for x in X}
        seen |= orb
        orbits.append(orb)
    return orbits


def brute_norm(T, g):
    G = T.group
    out, cur = g, g
    for _ in range(T.p - 1):
        cur = int(T.sigma[cur])
        out = G.mul(out, cur)
    return out


def brute_h1(T, within=None):
    G = T.group
    return sum(1 for orb in brute_twisted_classes(T, within) if brute_norm(T, min(orb)) == G.e)


def brute_induced_trace(T, H, delta):
    """Cosets Hg with Hg fixed by Hg -> H sigma(g) delta^{-1}."""
    G = T.group
    Hs = set(int(h) for h in H)
    cosets = {frozenset(G.mul(h, g) for h in Hs) for g in range(G.order)}
    count = 0
    dinv = int(G.inv[delta])
    for c in cosets:
        g = min(c)
        image = G.mul(int(T.sigma[g]), dinv)
        count += image in c
    return count


def pair(G, a, b):
    return G.index[(a, b)]


MODELS = ["S3^2 swap", "Q8^2 swap", "S3^3 shift", "SL2(F3)^2 swap", "Z/5 inversion",
          "Z/3^2 swap", "SL2(F9) Frobenius", "A4 conj"]


def model(name):
    if name == "SL2(F9) Frobenius":
        return bc.sl2_frobenius(3)
    if name == "A4 conj":
        return bc.conjugation(gr.alternating_group(4), (1, 0, 2, 3), 2)
    return cp.twisted_model(name)


@pytest.mark.parametrize("name", MODELS)
def test_twisted_classes_match_brute_force(name):
    T = model(name)
    rep = bc.twisted_classes(T)
    brute = brute_twisted_classes(T)
    assert sorted(c.size for c in rep.classes) == sorted(len(o) for o in brute)
    assert sum(c.size for c in rep.classes) == T.order
    assert rep.h1_size == brute_h1(T) == bc.h1(T)


@pytest.mark.parametrize("name", MODELS)
def test_norm_equivariance_exhaustive(name):
    assert bc.norm_equivariance_holds(model(name))


@given(st.sampled_from(MODELS), st.integers(0, 10 ** 6), st.integers(0, 10 ** 6))
def test_norm_equivariance_samples(name, x, g):
    T = model(name)
    G = T.group
    x, g = x % G.order, g % G.order
    lhs = brute_norm(T, bc.twisted_conjugate(T, x, g))
    rhs = G.mul(G.mul(x, brute_norm(T, g)), int(G.inv[x]))
    assert lhs == rhs == bc.norm(T, bc.twisted_conjugate(T, x, g))


def test_class_examples():
    T = bc.linear_automorphism(gr.abelian_group([3]), [[2]], 2)
    assert len(bc.twisted_classes(T).classes) == len(brute_twisted_classes(T))
    G0 = gr.symmetric_group(3)
    T = bc.product_swap(G0)
    assert len(bc.twisted_classes(T).classes) == len(gr_conj_classes(G0))
    triv = bc.trivial_automorphism(gr.abelian_group([1]), 2)
    assert len(bc.twisted_classes(triv).classes) == 1 and bc.h1(triv) == 1


def gr_conj_classes(G):
    return brute_twisted_classes(bc.trivial_automorphism(G, 2))


def test_norm_examples():
    G0 = gr.symmetric_group(3)
    T = bc.product_swap(G0)
    G = T.group
    assert bc.norm(T, G.e) == G.e
    for a in range(6):
        for b in range(6):
            assert G.keys[bc.norm(T, pair(G, a, b))] == (G0.mul(a, b), G0.mul(b, a))


@pytest.mark.parametrize("G0", cp.h1_product_bases(), ids=lambda G: G.name)
@pytest.mark.parametrize("p", [2, 3])
def test_h1_of_products_is_trivial(G0, p):
    if G0.order ** p > 20000:
        pytest.skip("too large for the brute-force oracle")
    T = bc.product_swap(G0, p)
    assert bc.h1(T) == 1
    if G0.order ** p <= 600:
        assert brute_h1(T) == 1


def test_h1_sl2_f9():
    T = bc.sl2_frobenius(3)
    assert T.order == 720 and bc.h1(T) == 1


def test_h1_can_be_nontrivial():
    # inversion on Z/2 is the identity, so H1 counts all of Z/2
    T = bc.trivial_automorphism(gr.abelian_group([2]), 2)
    assert bc.h1(T) == brute_h1(T) == 2


def test_twisted_centralizer_examples():
    T = bc.sl2_frobenius(3)
    z = bc.twisted_centralizer(T, T.group.e)
    assert set(z.elements.tolist()) == set(bc.fixed_subgroup(T).tolist())
    assert z.order == 24
    G0 = gr.symmetric_group(3)
    T = bc.product_swap(G0)
    G = T.group
    for a in range(6):
        d = pair(G, a, G0.e)
        cent = [x for x in range(6) if G0.mul(x, a) == G0.mul(a, x)]
        assert bc.twisted_centralizer(T, d).order == len(cent)


def test_inner_forms_regular_semisimple():
    checked, failures = bc.inner_form_check(bc.sl2_frobenius(3))
    assert checked > 0 and failures == []


@pytest.mark.parametrize("name", ["S3^2 swap", "Q8^2 swap", "SL2(F9) Frobenius", "A4 conj"])
def test_norm_fibers(name):
    for f in bc.norm_fibers(model(name)):
        assert f.twisted_class_count == f.h1_of_centralizer


def test_induced_trace_examples():
    G0 = gr.sl2(3)
    T = bc.product_swap(G0)
    H = bc.product_subgroup(T, gr.borel(G0))
    G = T.group
    assert bc.induced_trace(T, H, G.e) == 4
    u = G0.index[(1, 1, 0, 1)]
    assert bc.induced_trace(T, H, pair(G, u, G0.e)) == 1
    T9 = bc.sl2_frobenius(3)
    assert bc.induced_trace(T9, gr.borel(T9.group), T9.group.e) == 4


@pytest.mark.parametrize("name", ["S3^2 swap", "SL2(F3)^2 swap", "SL2(F9) Frobenius", "S3^3 shift"])
def test_induced_trace_double_computation(name):
    T = model(name)
    rng = random.Random(3)
    for _ in range(3):
        H = cp.random_stable_subgroup(rng, T)
        vals = bc.induced_trace_all(T, H)
        for d in rng.sample(range(T.order), 6):
            assert vals[d] == bc.induced_trace(T, H, d) == brute_induced_trace(T, H, d)


def test_split_case_collapse():
    G0 = gr.sl2(3)
    B = gr.borel(G0)
    T = bc.product_swap(G0)
    H = bc.product_subgroup(T, B)
    G = T.group
    label, reps = bc.coset_labels(G0, B)
    for a in range(0, G0.order, 5):
        for b in range(0, G0.order, 7):
            n = G0.mul(a, b)
            fixed = sum(1 for r in reps if label[G0.mul(r, n)] == label[r])
            d = pair(G, a, b)
            assert bc.induced_trace(T, H, d) == fixed
            assert bc.split_induced_trace(G0, B, a, b) == (fixed, fixed)


def test_sweep_table():
    rows = {(r.prime, r.kind): r for r in bc.c_ratio_sweep()}
    from fractions import Fraction
    for p in (3, 5, 7, 11, 13):
        assert rows[p, "unipotent"].ratio == Fraction(1, p + 1)
        assert rows[p, "trivial"].ratio == 1
        assert rows[p, "semisimple"].ratio == (0 if p == 3 else Fraction(2, p + 1))
        assert all(rows[p, k].c_coset_pairs == rows[p, k].c_norm_fixed for k in ("unipotent", "semisimple"))
    text = bc.sweep_tsv(list(rows.values()))
    assert text.splitlines()[0].split("\t") == ["prime", "norm_type", "c", "index", "ratio"]
    with pytest.raises(gr.EnumerationBoundExceeded):
        bc.c_ratio_sweep((17,))


def test_tensor_trace_identity():
    eye = np.eye(3, dtype=object)
    assert bc.tensor_trace_identity_check(eye, eye) == (3, 3)
    assert bc.tensor_trace_identity_check(np.array([[0, 1], [1, 0]], dtype=object),
                                          np.eye(2, dtype=object)) == (0, 0)
    rng = random.Random(0)
    for _ in range(100):
        A1 = np.array([[rng.randint(-5, 5) for _ in range(3)] for _ in range(3)], dtype=object)
        A2 = np.array([[rng.randint(-5, 5) for _ in range(3)] for _ in range(3)], dtype=object)
        lhs, rhs = bc.tensor_trace_identity_check(A1, A2)
        assert lhs == rhs == sum((A1 @ A2)[i, i] for i in range(3))


def test_subgroup_stability_enforced():
    T = bc.sl2_frobenius(3)
    w = T.group.data["field"].primitive_element()
    with pytest.raises(bc.SubgroupNotSigmaStable):
        bc.subgroup_from_json(T, {"generators": [[[1, w], [0, 1]]]})
    with pytest.raises(bc.SubgroupNotSigmaStable):
        bc.twisted_classes(T, within=T.group.closure([T.group.index[(1, w, 0, 1)]]))


def test_bad_automorphisms():
    with pytest.raises(bc.AutomorphismError):
        bc.group_from_json({"kind": "abelian", "moduli": [5], "sigma": {"matrix": [[2]]}, "order": 2})
    with pytest.raises(bc.AutomorphismError):
        bc.validate_space(bc.conjugation(gr.alternating_group(4), (1, 2, 3, 0), 2))
    with pytest.raises(bc.AutomorphismError):
        bc.conjugation(gr.perm_group([(1, 0, 2)]), (1, 2, 0), 3)
