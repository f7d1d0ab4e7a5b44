import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torsionforge import corpus as cp
from torsionforge import simplicial as s
from torsionforge.complexes import cohomology
from torsionforge.rtorsion import rt_via_cohomology


def coh(sim, ls=None):
    rep = cohomology(s.cochain_complex_of(sim, ls))
    return rep.betti, rep.torsion


def test_catalogue_cohomology():
    assert s.cochain_complex_of(s.circle(4)).ranks == (4, 4)
    assert coh(s.circle(4)) == ([1, 1], [[], []])
    assert coh(s.SimplicialComplexData.build(1, [[0]])) == ([1], [[]])
    assert coh(s.sphere_boundary(3)) == ([1, 0, 1], [[], [], []])
    assert coh(s.torus_grid(3, 3)) == ([1, 2, 1], [[], [], []])
    assert coh(s.rp2_six_vertex()) == ([1, 0, 0], [[], [], [2]])


def test_monodromy_minus_one():
    ls = s.local_system_from_json({"rank": 1, "transport": [{"edge": [0, 2], "matrix": [[-1]]}],
                                   "spanning_tree": [[0, 1], [1, 2]]})
    assert coh(s.circle(3), ls) == ([0, 0], [[], [2]])


def test_regularity_and_subdivision():
    sq = s.circle(4)
    assert s.is_regular(sq, s.reflection(4))
    assert s.is_regular(sq, s.SimplicialAction((0, 1, 2, 3), 2))
    interval = s.SimplicialComplexData.build(2, [[0, 1]])
    sub, _, _ = s.barycentric_subdivide(interval)
    assert sub.vertex_count == 3 and len(sub.facets) == 2
    oct_, act, _ = s.barycentric_subdivide(sq, s.reflection(4))
    assert oct_.vertex_count == 8 and len(oct_.facets) == 8
    assert s.is_regular(oct_, act)


def test_irregular_action_becomes_regular():
    # a triangle whose vertex swap flips the edge {1, 2} onto itself
    tri = s.circle(3)
    act = s.SimplicialAction((0, 2, 1), 2)
    assert not s.is_regular(tri, act)
    sim, act2, _ = s.regularize(tri, act)
    assert s.is_regular(sim, act2)
    with pytest.raises(s.ActionNotRegular):
        s.fixed_subcomplex(tri, act)


def test_fixed_subcomplexes():
    sq = s.circle(4)
    fx = s.fixed_subcomplex(sq, s.reflection(4))
    assert fx.vertices == (0, 2) and fx.euler_characteristic == 2
    free = s.fixed_subcomplex(sq, s.rotation(4, 2, 2))
    assert free.complex is None and free.euler_characteristic == 0
    whole = s.fixed_subcomplex(sq, s.SimplicialAction((0, 1, 2, 3), 2))
    assert whole.complex == sq


def test_invalid_action_rejected():
    with pytest.raises(s.SimplicialError):
        s.validate_action(s.circle(4), s.SimplicialAction((1, 0, 2, 3), 2))


sims = st.sampled_from([s.circle(4), s.circle(5), s.sphere_boundary(3), s.torus_grid(3, 3),
                        s.rp2_six_vertex(), s.cone(s.circle(4))])


@settings(max_examples=12)
@given(sims)
def test_subdivision_invariance(sim):
    sub, _, _ = s.barycentric_subdivide(sim)
    assert coh(sub) == coh(sim)
    # only the torsion part of integral-volume RT is subdivision invariant
    a = rt_via_cohomology(s.cochain_complex_of(sim), "integral").exact_square
    b = rt_via_cohomology(s.cochain_complex_of(sub), "integral").exact_square
    assert a == b


def test_corpus_actions_are_valid_and_regular():
    for name, sim, act in cp.simplicial_action_corpus(random_count=4):
        s.validate_action(sim, act)
        assert s.is_regular(sim, act), name
