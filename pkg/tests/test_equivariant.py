import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torsionforge import corpus as cp
from torsionforge import equivariant as eq
from torsionforge import exactla as la
from torsionforge import simplicial as s
from torsionforge.complexes import CochainComplex, cohomology

from conftest import complexes

involutions = st.integers(0, 2 ** 32 - 1).map(lambda k: cp.random_involution(random.Random(k)))


def twisted(n):
    return CochainComplex.build([1, 1], [[[n]]])


def square():
    return s.circle(4)


def test_split_examples():
    C = cp.random_complex(random.Random(5))
    C2, swap = eq.swap_action(C)
    sp = eq.split_isotypic(C2, swap)
    assert sp.fixed_part.ranks == C.ranks and sp.pfs_part.ranks == C.ranks
    sp = eq.split_isotypic(C, eq.sign_action(C))
    assert sum(sp.fixed_part.ranks) == 0 and sp.pfs_part.ranks == C.ranks
    C3, shift = eq.swap_action(C, 3)
    sp = eq.split_isotypic(C3, shift)
    assert sp.fixed_part.ranks == C.ranks
    assert sp.pfs_part.ranks == tuple(2 * r for r in C.ranks)


def test_rt_sigma_examples():
    C = cp.random_complex(random.Random(1))
    assert abs(eq.rt_sigma(*eq.swap_action(C))) < 1e-12
    assert abs(eq.analytic_torsion_sigma_fd(*eq.swap_action(C))) < 1e-9
    T = twisted(3)
    assert abs(eq.rt_sigma(T, eq.sign_action(T)) + math.log(3)) < 1e-12
    assert abs(eq.analytic_torsion_sigma_fd(T, eq.sign_action(T)) + math.log(3)) < 1e-12
    Z = CochainComplex.build([2, 2], [la.zeros(2, 2)])
    assert eq.analytic_torsion_sigma_fd(Z, eq.sign_action(Z)) == 0
    with pytest.raises(eq.ActionInvalid):
        eq.rt_sigma(T, eq.EquivariantAction.build(2, [la.identity(1), la.identity(1)]))


def test_invalid_actions():
    T = twisted(3)
    with pytest.raises(eq.ActionInvalid):
        eq.validate_action(T, eq.EquivariantAction.build(4, [[[1]], [[1]]]))
    with pytest.raises(eq.ActionInvalid):
        eq.validate_action(T, eq.EquivariantAction.build(2, [[[1]], [[-1]]]))   # S d != d S
    C = CochainComplex.build([2], [], metric=[[[2, 0], [0, 1]]])
    with pytest.raises(eq.ActionInvalid):
        eq.validate_action(C, eq.EquivariantAction.build(2, [[[0, 1], [1, 0]]]))  # not an isometry


@given(involutions)
def test_equivariant_cheeger_mueller(pair):
    C, act = pair
    assert abs(eq.analytic_torsion_sigma_fd(C, act) - eq.rt_sigma(C, act)) <= 1e-9


@given(involutions)
def test_isotypic_rank_additivity(pair):
    C, act = pair
    sp = eq.split_isotypic(C, act)
    assert all(a + b == r for a, b, r in zip(sp.fixed_part.ranks, sp.pfs_part.ranks, C.ranks))
    for S in sp.fixed_action.matrices:
        assert np.array_equal(S, la.identity(S.shape[0]))
    for S in sp.pfs_action.matrices:
        assert la.is_zero(eq.poly_p(S, act.order))


@settings(max_examples=15)
@given(involutions, involutions)
def test_product_formula(a, b):
    (C, s1), (D, s2) = a, b
    P, sp = eq.product_with_action(C, s1, D, s2)
    lef_c = eq.lefschetz(C, s1).lefschetz
    lef_d = eq.lefschetz(D, s2).lefschetz
    lhs = eq.analytic_torsion_sigma_fd(P, sp)
    rhs = eq.analytic_torsion_sigma_fd(C, s1) * lef_d + lef_c * eq.analytic_torsion_sigma_fd(D, s2)
    assert abs(lhs - rhs) <= 1e-9


@given(complexes)
def test_lefschetz_of_identity_is_euler_characteristic(C):
    ident = eq.EquivariantAction.build(2, [la.identity(r) for r in C.ranks])
    assert eq.lefschetz(C, ident).lefschetz == C.euler_characteristic()


def test_lefschetz_examples():
    sq = square()
    C = s.cochain_complex_of(sq)
    refl = eq.action_from_simplicial(sq, s.reflection(4))
    rep = eq.lefschetz(C, refl)
    assert rep.traces == [1, -1] and rep.lefschetz == 2
    rot = eq.action_from_simplicial(sq, s.rotation(4, 2, 2))
    rep = eq.lefschetz(C, rot)
    assert rep.traces == [1, 1] and rep.lefschetz == 0


def test_lefschetz_mod_p_agrees_on_torsion_free():
    sq = square()
    C = s.cochain_complex_of(sq)
    refl = eq.action_from_simplicial(sq, s.reflection(4))
    assert eq.lefschetz(C, refl, 2).lefschetz == 0   # 2 mod 2
    assert eq.lefschetz(C, refl, 3).lefschetz == 2


def test_lefschetz_and_smith_on_simplicial_corpus():
    for name, sim, act in cp.simplicial_action_corpus(random_count=6):
        fx = s.fixed_subcomplex(sim, act)
        C = s.cochain_complex_of(sim)
        assert eq.lefschetz(C, eq.action_from_simplicial(sim, act)).lefschetz == fx.euler_characteristic, name
        rep = eq.smith_check(sim, act)
        assert rep.inequality_holds and rep.sequence_exact, name


def test_smith_examples():
    sq = square()
    rep = eq.smith_check(sq, s.reflection(4))
    assert (rep.fixed_dim, rep.total_dim) == (2, 2) and rep.sequence_exact
    rep = eq.smith_check(sq, s.rotation(4, 2, 2))
    assert (rep.fixed_dim, rep.total_dim) == (0, 2)
    disk = s.cone(sq)
    rep = eq.smith_check(disk, s.extend_action(s.reflection(4)))
    assert (rep.fixed_dim, rep.total_dim) == (1, 1)


def test_tensor_examples():
    C = cp.random_complex(random.Random(2))
    empty = CochainComplex.build([0], [])
    assert sum(eq.tensor_complex(C, empty).ranks) == 0
    circle = CochainComplex.build([1, 1], [[[0]]])
    assert eq.tensor_complex(circle, circle).ranks == (1, 2, 1)
    T = eq.tensor_complex(twisted(3), twisted(1))
    assert T.ranks == (1, 2, 1)
    rep = cohomology(T)
    assert rep.betti == [0, 0, 0] and rep.torsion == [[], [], []]


@given(complexes, complexes)
def test_kunneth_euler_characteristic(C, D):
    assert eq.tensor_complex(C, D).euler_characteristic() == C.euler_characteristic() * D.euler_characteristic()


def test_concretert_examples():
    two = s.disjoint_union(s.circle(3), s.circle(3))
    swap = s.SimplicialAction((3, 4, 5, 0, 1, 2), 2)
    rep = eq.concretert_simplicial(two, swap)
    # both main terms vanish; the mod-2 cohomology is nonzero so the error terms are not trivial
    assert rep.log_rt_sigma == 0 and rep.torsion_terms == 0 and rep.regulator_terms == 0
    assert not rep.errors_trivial and rep.equality_holds is None
    with pytest.raises(eq.HypothesisFailed):
        eq.concretert_simplicial(square(), s.reflection(4))


def test_concretert_corpus():
    for name, C, act, F, chi in cp.concretert_instances():
        rep = eq.concretert_main_terms(C, act, F, chi)
        assert rep.errors_trivial, name
        assert rep.equality_holds, name


def test_action_json_round_trip():
    C, act = eq.swap_action(twisted(2))
    again = eq.EquivariantAction.from_json(act.to_json(), C)
    assert all(np.array_equal(a, b) for a, b in zip(act.matrices, again.matrices))
