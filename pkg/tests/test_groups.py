import itertools

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from torsionforge import groups as gr


@pytest.mark.parametrize("p,deg", [(2, 1), (3, 1), (5, 1), (2, 2), (3, 2), (5, 2), (7, 2)])
def test_field_axioms(p, deg):
    F = gr.FiniteField(p, deg)
    q = p ** deg
    X = np.arange(q)
    assert np.array_equal(F.add, F.add.T) and np.array_equal(F.mul, F.mul.T)
    assert all(F.add[x, F.neg[x]] == 0 for x in X)
    assert all(F.mul[x, F.inv[x]] == 1 for x in X[1:])
    # distributivity and associativity, exhaustively
    for a, b, c in itertools.product(range(q), repeat=3):
        assert F.mul[a, F.add[b, c]] == F.add[F.mul[a, b], F.mul[a, c]]
        assert F.mul[F.mul[a, b], c] == F.mul[a, F.mul[b, c]]
    w = F.primitive_element()
    assert len({F.power(w, k) for k in range(q - 1)}) == q - 1
    if deg == 2:
        assert F.is_irreducible_modulus()
        fixed = [x for x in X if F.frob[x] == x]
        assert fixed == list(range(p))   # the prime field
        assert all(F.frob[F.mul[a, b]] == F.mul[F.frob[a], F.frob[b]] for a in X for b in X)


@pytest.mark.parametrize("p,deg", [(2, 1), (3, 1), (5, 1), (7, 1), (2, 2), (3, 2)])
def test_sl2_orders(p, deg):
    q = p ** deg
    G = gr.sl2(p, deg)
    assert G.order == q * (q * q - 1)
    B = gr.borel(G)
    assert len(B) == q * (q - 1)


def test_small_groups():
    assert gr.symmetric_group(4).order == 24
    assert gr.alternating_group(4).order == 12
    assert gr.dihedral_group(5).order == 10
    Q = gr.quaternion_group()
    assert Q.order == 8 and not Q.is_abelian()
    assert gr.abelian_group([2, 3]).is_abelian()
    assert gr.direct_power(gr.symmetric_group(3), 2).order == 36


@pytest.mark.parametrize("G", [gr.symmetric_group(4), gr.sl2(3), gr.abelian_group([4, 6]),
                               gr.direct_power(gr.dihedral_group(3), 2)], ids=lambda G: G.name)
def test_table_matches_definition(G):
    t = G.table
    for i in range(G.order):
        for j in range(0, G.order, 3):
            assert t[i, j] == G.index[G.op(G.keys[i], G.keys[j])]
    assert all(t[i, G.inv[i]] == G.e for i in range(G.order))
    # associativity via the table
    assert np.array_equal(t[t[:, :, None], np.arange(G.order)[None, None, :]][:8],
                          t[np.arange(G.order)[:, None, None], t[None, :, :]][:8])


@given(st.lists(st.integers(0, 23), min_size=0, max_size=3))
def test_closure_is_a_subgroup(gens):
    G = gr.symmetric_group(4)
    H = G.closure(gens)
    Hs = set(H.tolist())
    assert G.e in Hs
    assert all(G.mul(a, b) in Hs for a in H for b in H)
    assert G.order % len(H) == 0
    assert list(H) == sorted(Hs)


def test_sl2_against_brute_force_enumeration():
    p = 3
    brute = {(a, b, c, d) for a, b, c, d in itertools.product(range(p), repeat=4) if (a * d - b * c) % p == 1}
    G = gr.sl2(p)
    assert set(G.keys) == brute


def test_power_and_orders():
    G = gr.sl2(5)
    orders = [next(k for k in range(1, 61) if G.power(g, k) == G.e) for g in range(G.order)]
    assert max(orders) == 10 and sympy.divisors(120)[-1] == 120
    assert all(120 % o == 0 for o in orders)


def test_enumeration_bound():
    with pytest.raises(gr.EnumerationBoundExceeded):
        gr.enumerate_group([(1, 2, 0)], lambda a, b: tuple(a[x] for x in b), (0, 1, 2), bound=2)
