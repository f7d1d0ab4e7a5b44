"""Simplicial complexes with vertex-permutation actions and flat local systems.

Simplices are sorted vertex tuples; the lexicographic vertex order orients
them.  A local system is given by parallel transports on edges: the matrix
stored for edge (u, v) with u < v maps the fiber at v to the fiber at u.  Edges
without an entry carry the identity, which is the spanning-tree normalization.
A cochain on a simplex takes values in the fiber at its least vertex.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import exactla as la
from .complexes import CochainComplex


class SimplicialError(ValueError):
    pass


class InvalidLocalSystem(SimplicialError):
    pass


class ActionNotRegular(SimplicialError):
    pass


@dataclass(frozen=True)
class SimplicialComplexData:
    vertex_count: int
    facets: tuple[tuple[int, ...], ...]

    @classmethod
    def build(cls, vertex_count: int, facets) -> "SimplicialComplexData":
        fs = sorted({tuple(sorted(set(int(v) for v in f))) for f in facets})
        if not fs or any(len(f) == 0 for f in fs):
            raise SimplicialError("facets must be nonempty")
        if any(v < 0 or v >= vertex_count for f in fs for v in f):
            raise SimplicialError("facet vertex out of range")
        # drop facets contained in others
        sets = [set(f) for f in fs]
        fs = [f for f, s in zip(fs, sets) if not any(s < t for t in sets)]
        return cls(int(vertex_count), tuple(fs))

    @property
    def dimension(self) -> int:
        return max(len(f) for f in self.facets) - 1

    def simplices(self) -> list[list[tuple[int, ...]]]:
        """All simplices grouped by dimension, each list lexicographically sorted."""
        found: set[tuple[int, ...]] = set()
        for f in self.facets:
            for k in range(1, len(f) + 1):
                found.update(itertools.combinations(f, k))
        out = [[] for _ in range(self.dimension + 1)]
        for s in found:
            out[len(s) - 1].append(s)
        return [sorted(level) for level in out]

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * len(level) for k, level in enumerate(self.simplices()))

    def edges(self) -> list[tuple[int, int]]:
        levels = self.simplices()
        return levels[1] if len(levels) > 1 else []


@dataclass(frozen=True)
class SimplicialAction:
    permutation: tuple[int, ...]
    order: int

    def image(self, s) -> tuple[int, ...]:
        return tuple(sorted(self.permutation[v] for v in s))

    def is_trivial(self) -> bool:
        return all(v == i for i, v in enumerate(self.permutation))


@dataclass(frozen=True)
class LocalSystemData:
    rank: int
    transport: dict = field(default_factory=dict)  # (u, v), u < v  ->  IntMatrix
    spanning_tree: tuple = ()

    def along(self, a: int, b: int) -> np.ndarray:
        """Transport from the fiber at b to the fiber at a."""
        if a == b:
            return la.identity(self.rank)
        if a < b:
            return self.transport.get((a, b), la.identity(self.rank))
        return la.unimodular_inverse(self.transport.get((b, a), la.identity(self.rank)))


def validate_action(sim: SimplicialComplexData, act: SimplicialAction) -> None:
    perm = act.permutation
    if sorted(perm) != list(range(sim.vertex_count)):
        raise SimplicialError("action is not a permutation of the vertices")
    power = list(range(sim.vertex_count))
    for _ in range(act.order):
        power = [perm[v] for v in power]
    if power != list(range(sim.vertex_count)):
        raise SimplicialError(f"permutation^{act.order} is not the identity")
    facets = set(sim.facets)
    if any(act.image(f) not in facets for f in sim.facets):
        raise SimplicialError("action does not map facets to facets")


def validate_local_system(sim: SimplicialComplexData, ls: LocalSystemData) -> None:
    edges = set(sim.edges())
    for e, T in ls.transport.items():
        if e not in edges:
            raise InvalidLocalSystem(f"transport on non-edge {e}")
        if T.shape != (ls.rank, ls.rank) or abs(la.det_q(T)) != 1:
            raise InvalidLocalSystem(f"transport on {e} is not unimodular of rank {ls.rank}")
    for e in ls.spanning_tree:
        if e in ls.transport and not np.array_equal(ls.transport[e], la.identity(ls.rank)):
            raise InvalidLocalSystem(f"spanning-tree edge {e} carries nontrivial monodromy")
    levels = sim.simplices()
    for a, b, c in (levels[2] if len(levels) > 2 else []):
        if not np.array_equal(ls.along(a, b) @ ls.along(b, c), ls.along(a, c)):
            raise InvalidLocalSystem(f"monodromy around triangle {(a, b, c)} is nontrivial")


def local_system_from_json(doc: dict) -> LocalSystemData:
    rank = int(doc["rank"])
    transport = {}
    for item in doc.get("transport", []):
        u, v = (int(x) for x in item["edge"])
        T = la.as_int_matrix(item["matrix"], rank, rank)
        if u > v:
            u, v, T = v, u, la.unimodular_inverse(T)
        transport[(u, v)] = T
    tree = tuple(tuple(sorted(int(x) for x in e)) for e in doc.get("spanning_tree", []))
    return LocalSystemData(rank, transport, tree)


def cochain_complex_of(sim: SimplicialComplexData, ls: LocalSystemData | None = None) -> CochainComplex:
    n = 1 if ls is None else ls.rank
    if ls is not None:
        validate_local_system(sim, ls)
    levels = sim.simplices()
    index = [{s: k for k, s in enumerate(level)} for level in levels]
    ranks = [n * len(level) for level in levels]
    diffs = []
    for k in range(len(levels) - 1):
        d = la.zeros(ranks[k + 1], ranks[k])
        for row, s in enumerate(levels[k + 1]):
            for j in range(len(s)):
                face = s[:j] + s[j + 1:]
                col = index[k][face]
                sign = (-1) ** j
                block = la.identity(n) if ls is None else ls.along(s[0], face[0])
                d[row * n:(row + 1) * n, col * n:(col + 1) * n] += sign * block
        diffs.append(d)
    return CochainComplex.build(ranks, diffs)


def _sort_sign(seq) -> int:
    inversions = sum(1 for a, b in itertools.combinations(seq, 2) if a > b)
    return -1 if inversions % 2 else 1


def cochain_action_matrices(sim: SimplicialComplexData, act: SimplicialAction,
                            ls: LocalSystemData | None = None) -> list[np.ndarray]:
    """Pushforward of cochains along the vertex permutation, one matrix per degree.

    With a local system the transports must be invariant under the action; the
    fiber identification is then the identity lift.
    """
    validate_action(sim, act)
    n = 1 if ls is None else ls.rank
    if ls is not None:
        for (u, v) in sim.edges():
            a, b = act.permutation[u], act.permutation[v]
            if not np.array_equal(ls.along(a, b), ls.along(u, v)):
                raise InvalidLocalSystem("local system is not invariant under the action")
    levels = sim.simplices()
    out = []
    for level in levels:
        idx = {s: k for k, s in enumerate(level)}
        S = la.zeros(n * len(level), n * len(level))
        for col, s in enumerate(level):
            raw = [act.permutation[v] for v in s]
            img = tuple(sorted(raw))
            row = idx[img]
            block = la.identity(n) if ls is None else ls.along(img[0], raw[0])
            S[row * n:(row + 1) * n, col * n:(col + 1) * n] = _sort_sign(raw) * block
        out.append(S)
    return out


def is_regular(sim: SimplicialComplexData, act: SimplicialAction) -> bool:
    """Every setwise-invariant simplex is fixed pointwise."""
    for level in sim.simplices():
        for s in level:
            if act.image(s) == s and any(act.permutation[v] != v for v in s):
                return False
    return True


def barycentric_subdivide(sim: SimplicialComplexData, act: SimplicialAction | None = None,
                          ls: LocalSystemData | None = None):
    """Barycentric subdivision with the action and local system carried along.

    New vertices are the old simplices, numbered by (dimension, lexicographic).
    Returns ``(sim', act', ls')`` with ``None`` where nothing was given.
    """
    old = [s for level in sim.simplices() for s in level]
    index = {s: k for k, s in enumerate(old)}
    facets = []
    for f in sim.facets:
        for order in itertools.permutations(f):
            chain = [tuple(sorted(order[:k])) for k in range(1, len(f) + 1)]
            facets.append([index[c] for c in chain])
    new_sim = SimplicialComplexData.build(len(old), facets)
    new_act = None
    if act is not None:
        new_act = SimplicialAction(tuple(index[act.image(s)] for s in old), act.order)
    new_ls = None
    if ls is not None:
        transport = {}
        for (a, b) in new_sim.edges():
            T = ls.along(old[a][0], old[b][0])
            if not np.array_equal(T, la.identity(ls.rank)):
                transport[(a, b)] = T
        new_ls = LocalSystemData(ls.rank, transport)
    return new_sim, new_act, new_ls


MAX_SUBDIVISIONS = 3


def regularize(sim, act, ls=None):
    """Subdivide until the action is regular; gives up after three rounds."""
    for _ in range(MAX_SUBDIVISIONS + 1):
        if is_regular(sim, act):
            return sim, act, ls
        sim, act, ls = barycentric_subdivide(sim, act, ls)
    if is_regular(sim, act):
        return sim, act, ls
    raise ActionNotRegular(f"still irregular after {MAX_SUBDIVISIONS} subdivisions")


@dataclass(frozen=True)
class FixedSubcomplex:
    complex: SimplicialComplexData | None  # None when the fixed set is empty
    vertices: tuple[int, ...]  # original labels of the fixed vertices
    euler_characteristic: int
    dimension: int  # -1 for the empty set

    @property
    def dimension_is_odd(self) -> bool:
        return self.dimension % 2 == 1


def fixed_subcomplex(sim: SimplicialComplexData, act: SimplicialAction) -> FixedSubcomplex:
    if not is_regular(sim, act):
        raise ActionNotRegular("fixed subcomplex needs a regular action")
    fixed = [v for v in range(sim.vertex_count) if act.permutation[v] == v]
    if not fixed:
        return FixedSubcomplex(None, (), 0, -1)
    relabel = {v: k for k, v in enumerate(fixed)}
    simplices = [s for level in sim.simplices() for s in level if all(v in relabel for v in s)]
    sub = SimplicialComplexData.build(len(fixed), [[relabel[v] for v in s] for s in simplices])
    return FixedSubcomplex(sub, tuple(fixed), sub.euler_characteristic(), sub.dimension)


def from_json(doc: dict):
    """Parse a simplicial file into ``(sim, act_or_None, ls_or_None)``."""
    sim = SimplicialComplexData.build(int(doc["vertices"]), doc["facets"])
    act = None
    if doc.get("action") is not None:
        act = SimplicialAction(tuple(int(v) for v in doc["action"]), int(doc.get("order", 2)))
        validate_action(sim, act)
    ls = local_system_from_json(doc["local_system"]) if doc.get("local_system") else None
    return sim, act, ls


# --------------------------------------------------------------- catalogue


def circle(n: int) -> SimplicialComplexData:
    return SimplicialComplexData.build(n, [[i, (i + 1) % n] for i in range(n)])


def rotation(n: int, step: int, order: int) -> SimplicialAction:
    return SimplicialAction(tuple((i + step) % n for i in range(n)), order)


def reflection(n: int) -> SimplicialAction:
    """Reflection of the n-gon fixing vertex 0 (and n/2 when n is even)."""
    return SimplicialAction(tuple((-i) % n for i in range(n)), 2)


def cone(sim: SimplicialComplexData) -> SimplicialComplexData:
    apex = sim.vertex_count
    return SimplicialComplexData.build(apex + 1, [list(f) + [apex] for f in sim.facets])


def extend_action(act: SimplicialAction, extra: int = 1) -> SimplicialAction:
    n = len(act.permutation)
    return SimplicialAction(act.permutation + tuple(range(n, n + extra)), act.order)


def sphere_boundary(n: int) -> SimplicialComplexData:
    """Boundary of the n-simplex (an (n-1)-sphere)."""
    return SimplicialComplexData.build(n + 1, list(itertools.combinations(range(n + 1), n)))


def disjoint_union(a: SimplicialComplexData, b: SimplicialComplexData) -> SimplicialComplexData:
    shift = a.vertex_count
    return SimplicialComplexData.build(
        a.vertex_count + b.vertex_count,
        list(a.facets) + [[v + shift for v in f] for f in b.facets])


def torus_grid(m: int, n: int) -> SimplicialComplexData:
    """Standard triangulated m x n torus (m, n >= 3)."""
    def v(i, j):
        return (i % m) * n + (j % n)
    facets = []
    for i in range(m):
        for j in range(n):
            facets.append([v(i, j), v(i + 1, j), v(i + 1, j + 1)])
            facets.append([v(i, j), v(i, j + 1), v(i + 1, j + 1)])
    return SimplicialComplexData.build(m * n, facets)


def rp2_six_vertex() -> SimplicialComplexData:
    facets = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1),
              (1, 2, 4), (2, 3, 5), (3, 4, 1), (4, 5, 2), (5, 1, 3)]
    return SimplicialComplexData.build(6, facets)
