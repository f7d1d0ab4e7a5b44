"""Seeded random corpora shared by the test suite, the acceptance run and the CLI."""
from __future__ import annotations

import os
import random
from fractions import Fraction

import numpy as np

from . import exactla as la
from .complexes import CochainComplex

DEFAULT_SEED = 0xB45E


def corpus_seed(seed: int | None = None) -> int:
    if seed is not None:
        return seed
    env = os.environ.get("TORSIONFORGE_SEED")
    return int(env, 0) if env else DEFAULT_SEED


def _rand_matrix(rng: random.Random, m: int, n: int, bound: int) -> np.ndarray:
    return la.as_int_matrix([[rng.randint(-bound, bound) for _ in range(n)] for _ in range(m)], m, n)


def random_complex(rng: random.Random, max_rank: int = 5, max_entry: int = 5,
                   max_degree: int = 3) -> CochainComplex:
    """A valid complex: each differential is a random combination of the
    saturated left annihilator of the previous one, so d^2 = 0 by construction."""
    top = rng.randint(1, max_degree)
    ranks = [rng.randint(0, max_rank) for _ in range(top + 1)]
    if sum(ranks) == 0:
        ranks[0] = 1
    diffs = []
    for i in range(top):
        m, n = ranks[i + 1], ranks[i]
        if i == 0:
            d = _rand_matrix(rng, m, n, max_entry)
        else:
            prev = diffs[-1]
            ann = la.kernel_saturated(prev.T).T if prev.shape[0] else la.zeros(0, n)
            if ann.shape[0] == 0:
                d = la.zeros(m, n)
            else:
                coeff = _rand_matrix(rng, m, ann.shape[0], 2)
                d = coeff @ ann
                # keep entries modest
                if any(abs(x) > 40 for x in d.flat):
                    d = la.zeros(m, n)
        diffs.append(d)
    return CochainComplex.build(ranks, diffs)


def random_unimodular(rng: random.Random, n: int, steps: int | None = None) -> np.ndarray:
    U = la.identity(n)
    if n < 2:
        if n == 1 and rng.random() < 0.5:
            U[0, 0] = -1
        return U
    for _ in range(steps if steps is not None else 2 * n):
        i, j = rng.sample(range(n), 2)
        U[i] = U[i] + rng.choice([-1, 1]) * U[j]
    return U


def random_positive_scales(rng: random.Random, n: int) -> list[Fraction]:
    return [Fraction(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(n)]


def conjugate(C: CochainComplex, Us: list[np.ndarray]) -> CochainComplex:
    """Change basis by unimodular U_i: new coordinates x' = U_i^{-1} x."""
    Uinv = [la.unimodular_inverse(U) if U.shape[0] else U for U in Us]
    diffs = [Uinv[i + 1] @ C.d(i) @ Us[i] for i in range(len(C.diff))]
    metric = [U.T @ C.G(i) @ U if U.shape[0] else la.zeros(0, 0) for i, U in enumerate(Us)]
    return CochainComplex.build(C.ranks, diffs, metric, C.volume_scale)


def random_complex_corpus(seed: int, count: int, **kw) -> list[CochainComplex]:
    rng = random.Random(seed)
    return [random_complex(rng, **kw) for _ in range(count)]


# ------------------------------------------------------------ involutions


def conjugate_action(act, Us):
    from .equivariant import EquivariantAction
    mats = [la.unimodular_inverse(U) @ S @ U if U.shape[0] else S for S, U in zip(act.matrices, Us)]
    return EquivariantAction(act.order, tuple(mats))


def _pad(C: CochainComplex, top: int) -> CochainComplex:
    if C.top_degree >= top:
        return C
    ranks = list(C.ranks) + [0] * (top - C.top_degree)
    diffs = [C.d(i) for i in range(top)]
    metric = [C.G(i) if i < len(C.ranks) else la.zeros(0, 0) for i in range(top + 1)]
    return CochainComplex.build(ranks, diffs, metric)


def random_involution(rng: random.Random, max_rank: int = 3, max_degree: int = 2,
                      conjugated: bool = True):
    """C+C with the swap, plus a summand with sigma = -1 and one with sigma = 1,
    optionally in a random unimodular basis with the transported metric."""
    from .equivariant import EquivariantAction, direct_sum, swap_action

    def small():
        return random_complex(rng, max_rank=max_rank, max_degree=max_degree)

    parts = []
    kinds = rng.choice([("swap",), ("sign",), ("swap", "sign"), ("swap", "fix"),
                        ("sign", "fix"), ("swap", "sign", "fix")])
    for kind in kinds:
        if kind == "swap":
            C2, a = swap_action(small())
            parts.append((C2, a.matrices))
        else:
            C = small()
            s = -1 if kind == "sign" else 1
            parts.append((C, tuple(s * la.identity(r) for r in C.ranks)))
    top = max(C.top_degree for C, _ in parts)
    padded = []
    for C, mats in parts:
        P = _pad(C, top)
        mats = list(mats) + [la.zeros(0, 0)] * (top - C.top_degree)
        padded.append((P, mats))
    total = direct_sum(*[P for P, _ in padded])
    from .equivariant import _block_diag
    mats = [_block_diag([m[i] for _, m in padded]) for i in range(top + 1)]
    act = EquivariantAction(2, tuple(mats))
    if all(np.array_equal(S, la.identity(S.shape[0])) for S in act.matrices):
        act = EquivariantAction(2, tuple(-S for S in act.matrices))
    if conjugated:
        Us = [random_unimodular(rng, r) for r in total.ranks]
        total, act = conjugate(total, Us), conjugate_action(act, Us)
    return total, act


def involution_corpus(seed: int, count: int = 20, **kw):
    rng = random.Random(seed ^ 0x5157)
    return [random_involution(rng, **kw) for _ in range(count)]


# ------------------------------------------------------------- simplicial


def prime_order_automorphisms(sim, p: int, limit: int | None = None) -> list[tuple[int, ...]]:
    """Vertex permutations of exact order p preserving the facets (brute force)."""
    import itertools
    n = sim.vertex_count
    facets = set(sim.facets)
    out = []
    for perm in itertools.permutations(range(n)):
        if all(perm[v] == v for v in range(n)):
            continue
        power = list(range(n))
        for _ in range(p):
            power = [perm[v] for v in power]
        if power != list(range(n)):
            continue
        if all(tuple(sorted(perm[v] for v in f)) in facets for f in sim.facets):
            out.append(perm)
            if limit and len(out) >= limit:
                break
    return out


def _random_orbit_complex(rng: random.Random):
    from . import simplicial as simp
    p = rng.choice([2, 2, 3])
    n = rng.randint(p + 1, 7)
    cycles = rng.randint(1, n // p)
    verts = list(range(n))
    rng.shuffle(verts)
    perm = list(range(n))
    for c in range(cycles):
        block = verts[c * p:(c + 1) * p]
        for k, v in enumerate(block):
            perm[v] = block[(k + 1) % p]
    facets = set()
    for _ in range(rng.randint(2, 4)):
        f = tuple(sorted(rng.sample(range(n), rng.choice([2, 3]))))
        for _ in range(p):
            facets.add(f)
            f = tuple(sorted(perm[v] for v in f))
    used = sorted({v for f in facets for v in f})
    # keep the vertex set closed under the permutation
    closed = set(used)
    for v in used:
        w = perm[v]
        while w not in closed:
            closed.add(w)
            w = perm[w]
    relabel = {v: k for k, v in enumerate(sorted(closed))}
    sim = simp.SimplicialComplexData.build(len(relabel), [[relabel[v] for v in f] for f in facets])
    act = simp.SimplicialAction(tuple(relabel[perm[v]] for v in sorted(closed)), p)
    simp.validate_action(sim, act)
    return sim, act


def simplicial_action_corpus(seed: int | None = None, random_count: int = 12,
                             max_vertices: int = 40):
    """Named regular prime-order actions: a fixed catalogue plus random
    orbit-closed complexes made regular by subdivision."""
    from . import simplicial as simp
    seed = corpus_seed(seed)
    items = [
        ("square circle, reflection", simp.circle(4), simp.reflection(4)),
        ("square circle, half turn", simp.circle(4), simp.rotation(4, 2, 2)),
        ("hexagon, third turn", simp.circle(6), simp.rotation(6, 2, 3)),
        ("nonagon, third turn", simp.circle(9), simp.rotation(9, 3, 3)),
        ("decagon, fifth turn", simp.circle(10), simp.rotation(10, 2, 5)),
        ("pentagon, reflection", simp.circle(5), simp.reflection(5)),
        ("hexagon, reflection", simp.circle(6), simp.reflection(6)),
        ("disk, reflection", simp.cone(simp.circle(4)), simp.extend_action(simp.reflection(4))),
        ("disk, third turn", simp.cone(simp.circle(6)), simp.extend_action(simp.rotation(6, 2, 3))),
        ("two circles, swap", simp.disjoint_union(simp.circle(3), simp.circle(3)),
         simp.SimplicialAction((3, 4, 5, 0, 1, 2), 2)),
        ("2-sphere, transposition", simp.sphere_boundary(3), simp.SimplicialAction((1, 0, 2, 3), 2)),
        ("2-sphere, 3-cycle", simp.sphere_boundary(3), simp.SimplicialAction((1, 2, 0, 3), 3)),
        ("3-sphere, free 5-cycle", simp.sphere_boundary(4),
         simp.SimplicialAction((1, 2, 3, 4, 0), 5)),
        ("torus, shift", simp.torus_grid(3, 3), simp.SimplicialAction(
            tuple(((i + 1) % 3) * 3 + j for i in range(3) for j in range(3)), 3)),
        ("torus, flip", simp.torus_grid(3, 3), simp.SimplicialAction(
            tuple(j * 3 + i for i in range(3) for j in range(3)), 2)),
    ]
    rp2 = simp.rp2_six_vertex()
    for p in (2, 3, 5):
        perm = prime_order_automorphisms(rp2, p, limit=1)[0]
        items.append((f"projective plane, order {p}", rp2, simp.SimplicialAction(perm, p)))
    rng = random.Random(seed ^ 0x51C)
    made = 0
    while made < random_count:
        sim, act = _random_orbit_complex(rng)
        try:
            sim, act, _ = simp.regularize(sim, act)
        except simp.ActionNotRegular:
            continue
        if sim.vertex_count > max_vertices:
            continue
        items.append((f"random orbit complex {made}", sim, act))
        made += 1
    out = []
    for name, sim, act in items:
        simp.validate_action(sim, act)
        sim, act, _ = simp.regularize(sim, act)
        out.append((name, sim, act))
    return out


# --------------------------------------------------- engineered main terms


def concretert_instances():
    """(name, complex, action, fixed complex, fixed Euler characteristic) with
    no p-torsion, F_p-acyclic complexes and an empty fixed cell set."""
    from .equivariant import EquivariantAction, fixed_cell_complex, product_with_action, sign_action, swap_action
    out = []

    def add(name, C, act):
        F, chi = fixed_cell_complex(C, act)
        out.append((name, C, act, F, chi))

    two = CochainComplex.build([2, 2], [[[2, 0], [0, 2]]])
    C, a = swap_action(two, 3)
    add("3-fold shift, d = 2I", C, a)
    mixed = CochainComplex.build([2, 2], [[[1, 1], [1, -1]]])
    C, a = swap_action(mixed, 3)
    add("3-fold shift, det d = -2", C, a)
    five = CochainComplex.build([1, 1], [[[2]]])
    C, a = swap_action(five, 5)
    add("5-fold shift, d = 2", C, a)
    three = CochainComplex.build([1, 1], [[[3]]])
    add("sign, d = 3", three, sign_action(three))
    odd = CochainComplex.build([1, 2, 1], [[[3], [0]], [[0, 5]]])
    add("sign, torsion 3 and 5", odd, sign_action(odd))
    C, a = swap_action(three, 2)
    add("swap, d = 3", C, a)
    base, act = swap_action(five, 3)
    ident = CochainComplex.build([1, 1], [[[2]]])
    T, ta = product_with_action(base, act, ident,
                                EquivariantAction(3, tuple(la.identity(r) for r in ident.ranks)))
    add("3-fold shift tensor trivially acted d = 2", T, ta)
    # the same data in skew unimodular bases: the isotypic lattices are no
    # longer orthogonal, so the non-torsion term is nonzero
    rng = random.Random(0x5EED)
    for name, C, act, F, chi in list(out[:2]) + [out[4]]:
        Us = [random_unimodular(rng, r, steps=3 * r) for r in C.ranks]
        out.append((name + ", skew basis", conjugate(C, Us), conjugate_action(act, Us), F, chi))
    return out


# ------------------------------------------------------------------ groups


def h1_product_bases():
    """Assorted G0 for the G0 x G0 swap models."""
    from . import groups as gr
    return [gr.symmetric_group(3), gr.quaternion_group(), gr.alternating_group(4),
            gr.dihedral_group(5), gr.sl2(3), gr.abelian_group((6,))]


_MODEL_CACHE: dict = {}


def twisted_model(name: str):
    """Named twisted group spaces with |G| <= 2000 used by the trace-formula corpus."""
    from . import basechange as bc
    from . import groups as gr
    if name in _MODEL_CACHE:
        return _MODEL_CACHE[name]
    builders = {
        "SL2(F3)^2 swap": lambda: bc.product_swap(gr.sl2(3)),
        "S3^2 swap": lambda: bc.product_swap(gr.symmetric_group(3)),
        "S3^3 shift": lambda: bc.product_swap(gr.symmetric_group(3), 3),
        "Q8^2 swap": lambda: bc.product_swap(gr.quaternion_group()),
        "A4^2 swap": lambda: bc.product_swap(gr.alternating_group(4)),
        "D5^2 swap": lambda: bc.product_swap(gr.dihedral_group(5)),
        "(Z/2)^5 shift": lambda: bc.product_swap(gr.abelian_group((2,)), 5),
        "SL2(F9) Frobenius": lambda: bc.sl2_frobenius(3),
        "SL2(F4) Frobenius": lambda: bc.sl2_frobenius(2),
        "S4 by transposition": lambda: bc.conjugation(gr.symmetric_group(4), (1, 0, 2, 3), 2),
        "S5 by 5-cycle": lambda: bc.conjugation(gr.symmetric_group(5), (1, 2, 3, 4, 0), 5),
        "A5 by 3-cycle": lambda: bc.conjugation(gr.alternating_group(5), (1, 2, 0, 3, 4), 3),
        "D6 by reflection": lambda: bc.conjugation(gr.dihedral_group(6), tuple((-i) % 6 for i in range(6)), 2),
        "Z/5 inversion": lambda: bc.linear_automorphism(gr.abelian_group((5,)), [[-1]], 2),
        "Z/3^2 swap": lambda: bc.linear_automorphism(gr.abelian_group((3, 3)), [[0, 1], [1, 0]], 2),
        "Z/7 times 2": lambda: bc.linear_automorphism(gr.abelian_group((7,)), [[2]], 3),
        "Z/11 times 3": lambda: bc.linear_automorphism(gr.abelian_group((11,)), [[3]], 5),
        "Z/4^2 swap": lambda: bc.linear_automorphism(gr.abelian_group((4, 4)), [[0, 1], [1, 0]], 2),
        "Z/6^2 order 3": lambda: bc.linear_automorphism(gr.abelian_group((6, 6)), [[0, -1], [1, -1]], 3),
        "Z/2 x Z/8 twist": lambda: bc.linear_automorphism(gr.abelian_group((2, 8)), [[1, 0], [4, 5]], 2),
        "D5^3 shift": lambda: bc.product_swap(gr.dihedral_group(5), 3),
        "Z/7^3 shift": lambda: bc.linear_automorphism(gr.abelian_group((7, 7, 7)),
                                                      [[0, 0, 1], [1, 0, 0], [0, 1, 0]], 3),
        "Z/41 times 10": lambda: bc.linear_automorphism(gr.abelian_group((41,)), [[10]], 5),
    }
    T = builders[name]()
    bc.validate_space(T)
    _MODEL_CACHE[name] = T
    return T


TTF_MODELS = ("SL2(F3)^2 swap", "S3^2 swap", "S3^3 shift", "Q8^2 swap", "A4^2 swap", "D5^2 swap",
              "(Z/2)^5 shift", "SL2(F9) Frobenius", "SL2(F4) Frobenius", "S4 by transposition",
              "S5 by 5-cycle", "A5 by 3-cycle", "D6 by reflection", "Z/5 inversion", "Z/3^2 swap",
              "Z/7 times 2", "Z/11 times 3", "Z/4^2 swap", "Z/6^2 order 3", "Z/2 x Z/8 twist",
              "D5^3 shift", "Z/7^3 shift", "Z/41 times 10")


def random_stable_subgroup(rng: random.Random, T) -> np.ndarray:
    G = T.group
    mode = rng.random()
    if mode < 0.15:
        return np.array([G.e], dtype=np.int64)
    if mode < 0.25:
        return np.arange(G.order, dtype=np.int64)
    gens = []
    for _ in range(rng.randint(1, 2)):
        g = rng.randrange(G.order)
        for _ in range(T.p):
            gens.append(g)
            g = int(T.sigma[g])
    return G.closure(gens)


def ttf_corpus(seed: int | None = None, count: int = 100):
    """(model name, twisted space, Gamma, f) instances with rational f."""
    from .ttf import TwistedTestFunction
    rng = random.Random(corpus_seed(seed) ^ 0x77F)
    out = []
    for k in range(count):
        name = TTF_MODELS[k % len(TTF_MODELS)]
        T = twisted_model(name)
        Gamma = random_stable_subgroup(rng, T)
        n = T.order
        size = rng.randint(1, min(n, 40))
        support = rng.sample(range(n), size)
        if rng.random() < 0.5 and T.group.e not in support:
            support.append(T.group.e)
        values = {g: Fraction(rng.randint(-6, 6), rng.randint(1, 6)) for g in support}
        out.append((name, T, Gamma, TwistedTestFunction.build(values)))
    return out
