"""Enumerated finite groups: matrices over F_q, permutations, cyclic products,
and p-fold direct powers with the cyclic shift.

Elements are numbered 0..N-1; products go through a cached multiplication
table when N is at most ``TABLE_LIMIT``.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field

import numpy as np
import sympy

ENUMERATION_BOUND = 10 ** 6
TABLE_LIMIT = 10 ** 4

# fixed monic irreducible quadratics x^2 + a x + b, stored as (b, a)
QUADRATIC_MODULUS = {2: (1, 1), 3: (2, 2), 5: (2, 4), 7: (3, 6), 11: (2, 7), 13: (2, 12)}


class EnumerationBoundExceeded(RuntimeError):
    pass


class GroupError(ValueError):
    pass


class FiniteField:
    """F_q with q = p^deg, deg <= 2; element a + b*x is coded as a + b*p."""

    def __init__(self, p: int, deg: int = 1):
        if not sympy.isprime(p):
            raise GroupError(f"{p} is not prime")
        if deg not in (1, 2):
            raise GroupError("only prime fields and quadratic extensions are supported")
        if deg == 2 and p not in QUADRATIC_MODULUS:
            raise GroupError(f"no modulus recorded for F_{p}^2")
        self.p, self.deg = p, deg
        self.q = q = p ** deg
        codes = np.arange(q)
        a, b = codes % p, codes // p
        self.add = ((a[:, None] + a[None, :]) % p + p * ((b[:, None] + b[None, :]) % p)).astype(np.int64)
        if deg == 1:
            self.mul = (codes[:, None] * codes[None, :]) % p
        else:
            c0, c1 = QUADRATIC_MODULUS[p]  # x^2 = -c1 x - c0
            aa, ab = a[:, None] * a[None, :], a[:, None] * b[None, :] + b[:, None] * a[None, :]
            bb = b[:, None] * b[None, :]
            lo = (aa - c0 * bb) % p
            hi = (ab - c1 * bb) % p
            self.mul = (lo + p * hi).astype(np.int64)
        self.mul = self.mul.astype(np.int64)
        self.neg = np.array([int(np.nonzero(self.add[x] == 0)[0][0]) for x in range(q)])
        self.inv = np.full(q, -1)
        for x in range(1, q):
            self.inv[x] = int(np.nonzero(self.mul[x] == 1)[0][0])
        self.frob = np.array([self.power(x, p) for x in range(q)])

    def code(self, a: int, b: int = 0) -> int:
        return a % self.p + self.p * (b % self.p)

    def power(self, x: int, k: int) -> int:
        out = 1
        for _ in range(k):
            out = int(self.mul[out, x])
        return out

    def primitive_element(self) -> int:
        for g in range(2, self.q) if self.q > 2 else [1]:
            seen, x = set(), 1
            for _ in range(self.q - 1):
                x = int(self.mul[x, g])
                seen.add(x)
            if len(seen) == self.q - 1:
                return g
        return 1

    def is_irreducible_modulus(self) -> bool:
        if self.deg == 1:
            return True
        c0, c1 = QUADRATIC_MODULUS[self.p]
        return all((t * t + c1 * t + c0) % self.p for t in range(self.p))


@dataclass(eq=False)
class FiniteGroup:
    """An enumerated group.  ``keys`` are the concrete elements, ``op`` multiplies keys."""

    name: str
    keys: list
    op: object
    kind: str
    data: dict = field(default_factory=dict)

    def __post_init__(self):
        self.index = {k: i for i, k in enumerate(self.keys)}
        self._table = None
        self._inv = None
        ident = self.data.get("identity")
        self.e = self.index[ident] if ident is not None else None

    @property
    def order(self) -> int:
        return len(self.keys)

    def __len__(self):
        return len(self.keys)

    @property
    def table(self):
        if self._table is None and self.order <= TABLE_LIMIT:
            self._table = _build_table(self)
        return self._table

    def mul(self, i: int, j: int) -> int:
        t = self.table
        if t is not None:
            return int(t[i, j])
        return self.index[self.op(self.keys[i], self.keys[j])]

    @property
    def inv(self) -> np.ndarray:
        if self._inv is None:
            t = self.table
            if t is not None:
                self._inv = np.argmax(t == self.e, axis=1)
            else:
                inv = np.empty(self.order, dtype=np.int64)
                for i in range(self.order):
                    x, prev = i, self.e
                    while x != self.e:
                        prev, x = x, self.mul(x, i)
                    inv[i] = prev
                self._inv = inv
        return self._inv

    def mul_many(self, a, b) -> np.ndarray:
        """Elementwise products of index arrays (broadcasting)."""
        t = self.table
        if t is not None:
            return t[a, b]
        a, b = np.broadcast_arrays(np.asarray(a), np.asarray(b))
        return np.array([self.mul(int(x), int(y)) for x, y in zip(a.flat, b.flat)]).reshape(a.shape)

    def closure(self, gens) -> np.ndarray:
        """Sorted indices of the subgroup generated by ``gens`` (indices)."""
        seen = {self.e}
        queue = deque([self.e])
        gens = [int(g) for g in gens]
        while queue:
            x = queue.popleft()
            for g in gens:
                y = self.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return np.array(sorted(seen), dtype=np.int64)

    def power(self, i: int, k: int) -> int:
        out = self.e
        for _ in range(k):
            out = self.mul(out, i)
        return out

    def is_abelian(self) -> bool:
        t = self.table
        if t is not None:
            return bool(np.array_equal(t, t.T))
        return all(self.mul(i, j) == self.mul(j, i) for i in range(self.order) for j in range(i))


def enumerate_group(gens, op, identity, bound: int = ENUMERATION_BOUND) -> list:
    """Breadth-first closure of the generators under ``op``."""
    seen = {identity}
    order = [identity]
    queue = deque([identity])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = op(x, g)
            if y not in seen:
                seen.add(y)
                order.append(y)
                queue.append(y)
                if len(order) > bound:
                    raise EnumerationBoundExceeded(f"group exceeds {bound} elements")
    return order


def _encode(arr: np.ndarray, base: int) -> np.ndarray:
    """Mixed-radix code of the last axis."""
    weights = base ** np.arange(arr.shape[-1], dtype=np.int64)
    return (arr * weights).sum(axis=-1)


def _lookup(codes: np.ndarray, element_codes: np.ndarray) -> np.ndarray:
    order = np.argsort(element_codes)
    pos = np.searchsorted(element_codes[order], codes)
    return order[pos]


def _build_table(G: FiniteGroup) -> np.ndarray:
    n = G.order
    if G.kind == "matrix":
        F: FiniteField = G.data["field"]
        d = G.data["dim"]
        E = np.array(G.keys, dtype=np.int64).reshape(n, d, d)
        out = np.zeros((n, n, d, d), dtype=np.int64)
        for r in range(d):
            for c in range(d):
                acc = np.zeros((n, n), dtype=np.int64)
                for k in range(d):
                    acc = F.add[acc, F.mul[E[:, None, r, k], E[None, :, k, c]]]
                out[:, :, r, c] = acc
        codes = _encode(out.reshape(n, n, d * d), F.q)
        own = _encode(E.reshape(n, d * d), F.q)
        return _lookup(codes, own)
    if G.kind == "perm":
        P = np.array(G.keys, dtype=np.int64)
        m = P.shape[1]
        own = _encode(P, m)
        out = np.empty((n, n), dtype=np.int64)
        for i in range(n):
            out[i] = _lookup(_encode(P[i][P], m), own)
        return out
    if G.kind == "abelian":
        mods = np.array(G.data["moduli"], dtype=np.int64)
        A = np.array(G.keys, dtype=np.int64).reshape(n, len(mods))
        S = (A[:, None, :] + A[None, :, :]) % mods
        weights = np.cumprod(np.concatenate([[1], mods[:-1]]))
        return _lookup((S * weights).sum(axis=-1), (A * weights).sum(axis=-1))
    if G.kind == "product":
        base: FiniteGroup = G.data["base"]
        comp = np.array(G.keys, dtype=np.int64)
        n0 = base.order
        out = np.zeros((n, n), dtype=np.int64)
        for k in range(comp.shape[1]):
            out += base.table[comp[:, None, k], comp[None, :, k]] * n0 ** k
        own = _encode(comp, n0)
        return _lookup(out, own)
    out = np.empty((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            out[i, j] = G.index[G.op(G.keys[i], G.keys[j])]
    return out


# ------------------------------------------------------------- constructors


def matrix_group(field_: FiniteField, gens, name: str = "matrix group") -> FiniteGroup:
    """Group generated by square matrices with entries given as field codes."""
    gens = [tuple(int(x) % field_.q for row in g for x in row) for g in gens]
    d = int(round(len(gens[0]) ** 0.5))
    if any(len(g) != d * d for g in gens):
        raise GroupError("generators must be square matrices of one size")
    add, mul = field_.add, field_.mul

    def op(a, b):
        out = []
        for r in range(d):
            for c in range(d):
                acc = 0
                for k in range(d):
                    acc = add[acc, mul[a[r * d + k], b[k * d + c]]]
                out.append(int(acc))
        return tuple(out)

    ident = tuple(1 if r == c else 0 for r in range(d) for c in range(d))
    keys = enumerate_group(gens, op, ident)
    return FiniteGroup(name, keys, op, "matrix", {"field": field_, "dim": d, "identity": ident})


def perm_group(gens, name: str = "permutation group") -> FiniteGroup:
    gens = [tuple(int(x) for x in g) for g in gens]
    m = len(gens[0])

    def op(a, b):  # (a*b)(x) = a(b(x))
        return tuple(a[b[x]] for x in range(m))

    ident = tuple(range(m))
    return FiniteGroup(name, enumerate_group(gens, op, ident), op, "perm", {"identity": ident})


def abelian_group(moduli, name: str | None = None) -> FiniteGroup:
    moduli = tuple(int(m) for m in moduli)
    keys = [tuple(reversed(k)) for k in itertools.product(*[range(m) for m in reversed(moduli)])]

    def op(a, b):
        return tuple((x + y) % m for x, y, m in zip(a, b, moduli))

    name = name or " x ".join(f"Z/{m}" for m in moduli)
    return FiniteGroup(name, keys, op, "abelian", {"moduli": moduli, "identity": tuple(0 for _ in moduli)})


def direct_power(base: FiniteGroup, p: int, name: str | None = None) -> FiniteGroup:
    """base^p with elements numbered by the mixed-radix code of their components."""
    n0 = base.order
    if n0 ** p > ENUMERATION_BOUND:
        raise EnumerationBoundExceeded(f"{base.name}^{p} exceeds {ENUMERATION_BOUND} elements")
    keys = [tuple(reversed(k)) for k in itertools.product(range(n0), repeat=p)]

    def op(a, b):
        return tuple(base.mul(x, y) for x, y in zip(a, b))

    return FiniteGroup(name or f"({base.name})^{p}", keys, op, "product",
                       {"base": base, "power": p, "identity": tuple(base.e for _ in range(p))})


def sl2(p: int, deg: int = 1) -> FiniteGroup:
    F = FiniteField(p, deg)
    w = F.primitive_element()
    gens = [((1, 1), (0, 1)), ((1, 0), (1, 1))]
    if deg > 1:
        gens += [((1, w), (0, 1)), ((1, 0), (w, 1))]
    G = matrix_group(F, gens, name=f"SL2(F_{F.q})")
    expect = F.q * (F.q ** 2 - 1)
    if G.order != expect:
        raise GroupError(f"SL2 enumeration gave {G.order}, expected {expect}")
    return G


def borel(G: FiniteGroup) -> np.ndarray:
    """Upper-triangular subgroup of an SL2 model, as sorted indices."""
    F: FiniteField = G.data["field"]
    w = F.primitive_element()
    gens = [(1, 1, 0, 1), (w, 0, 0, int(F.inv[w]))]
    if F.deg > 1:
        gens.append((1, w, 0, 1))
    return G.closure([G.index[g] for g in gens])


def symmetric_group(n: int) -> FiniteGroup:
    if n == 1:
        return perm_group([(0,)], "S1")
    gens = [tuple([1, 0] + list(range(2, n))), tuple(list(range(1, n)) + [0])]
    return perm_group(gens, f"S{n}")


def alternating_group(n: int) -> FiniteGroup:
    gens = [tuple([1, 2, 0] + list(range(3, n)))]
    for k in range(3, n):
        g = list(range(n))
        g[0], g[1], g[k] = 1, k, 0
        gens.append(tuple(g))
    return perm_group(gens, f"A{n}")


def dihedral_group(n: int) -> FiniteGroup:
    rot = tuple((i + 1) % n for i in range(n))
    ref = tuple((-i) % n for i in range(n))
    return perm_group([rot, ref], f"D{n}")


def quaternion_group() -> FiniteGroup:
    """Q8 inside SL2(F_3)."""
    F = FiniteField(3)
    return matrix_group(F, [((0, 2), (1, 0)), ((1, 1), (1, 2))], name="Q8")
