"""Twisted conjugacy in finite groups with an automorphism of prime order."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy

from .groups import (EnumerationBoundExceeded, FiniteField, FiniteGroup, GroupError,
                     abelian_group, borel, direct_power, matrix_group, perm_group, sl2)


class SubgroupNotSigmaStable(ValueError):
    pass


class MismatchBetweenFormulas(AssertionError):
    pass


class AutomorphismError(ValueError):
    pass


@dataclass(eq=False)
class TwistedGroupSpace:
    """G together with sigma (an index permutation) of prime order p."""

    group: FiniteGroup
    sigma: np.ndarray
    p: int
    label: str = ""

    def __post_init__(self):
        self.sigma = np.asarray(self.sigma, dtype=np.int64)

    @property
    def order(self) -> int:
        return self.group.order

    @property
    def sigma_inv(self) -> np.ndarray:
        out = np.empty_like(self.sigma)
        out[self.sigma] = np.arange(len(self.sigma))
        return out

    def sigma_power(self, k: int) -> np.ndarray:
        out = np.arange(self.order)
        for _ in range(k % self.p):
            out = self.sigma[out]
        return out


def validate_space(T: TwistedGroupSpace) -> None:
    G, s = T.group, T.sigma
    if not sympy.isprime(T.p):
        raise AutomorphismError(f"order {T.p} is not prime")
    if sorted(s.tolist()) != list(range(G.order)):
        raise AutomorphismError("sigma is not a bijection")
    power = np.arange(G.order)
    for _ in range(T.p):
        power = s[power]
    if not np.array_equal(power, np.arange(G.order)):
        raise AutomorphismError(f"sigma^{T.p} is not the identity")
    t = G.table
    if t is not None:
        ok = np.array_equal(s[t], t[s][:, s])
    else:
        gens = G.data.get("generator_indices", range(min(G.order, 50)))
        ok = all(s[G.mul(g, h)] == G.mul(s[g], s[h]) for g in gens for h in range(G.order))
    if not ok:
        raise AutomorphismError("sigma is not multiplicative")


# -------------------------------------------------------------- automorphisms


def frobenius(G: FiniteGroup) -> TwistedGroupSpace:
    """Entrywise x -> x^{p0} on a matrix group over F_{p0^2}."""
    F: FiniteField = G.data["field"]
    if F.deg != 2:
        raise AutomorphismError("Frobenius needs a quadratic extension field")
    sig = np.array([G.index[tuple(int(F.frob[x]) for x in k)] for k in G.keys])
    return TwistedGroupSpace(G, sig, 2, f"{G.name} with Frobenius")


def cyclic_shift(G: FiniteGroup) -> TwistedGroupSpace:
    """(g1, ..., gp) -> (g2, ..., gp, g1) on a direct power."""
    p = G.data["power"]
    sig = np.array([G.index[k[1:] + k[:1]] for k in G.keys])
    return TwistedGroupSpace(G, sig, p, f"{G.name} with cyclic shift")


def conjugation(G: FiniteGroup, c, p: int) -> TwistedGroupSpace:
    """x -> c x c^{-1} for a permutation c normalizing the permutation group G."""
    c = tuple(int(x) for x in c)
    cinv = [0] * len(c)
    for i, x in enumerate(c):
        cinv[x] = i
    cinv = tuple(cinv)
    try:
        sig = np.array([G.index[G.op(G.op(c, k), cinv)] for k in G.keys])
    except KeyError:
        raise AutomorphismError("conjugating permutation does not normalize the group") from None
    return TwistedGroupSpace(G, sig, p, f"{G.name} conjugated by {list(c)}")


def linear_automorphism(G: FiniteGroup, M, p: int) -> TwistedGroupSpace:
    """x -> M x on an abelian group Z/n1 x ... x Z/nk (integer matrix M)."""
    mods = G.data["moduli"]
    M = [[int(x) for x in row] for row in M]
    sig = np.array([G.index[tuple(sum(M[i][j] * k[j] for j in range(len(k))) % mods[i]
                                  for i in range(len(k)))] for k in G.keys])
    return TwistedGroupSpace(G, sig, p, f"{G.name} with linear automorphism")


def trivial_automorphism(G: FiniteGroup, p: int) -> TwistedGroupSpace:
    return TwistedGroupSpace(G, np.arange(G.order), p, f"{G.name} with trivial automorphism")


# ----------------------------------------------------------------- basics


def twisted_conjugate(T: TwistedGroupSpace, x: int, g: int) -> int:
    G = T.group
    return G.mul(G.mul(x, g), int(G.inv[T.sigma[x]]))


def _orbit(G: FiniteGroup, tau: np.ndarray, g: int, X: np.ndarray) -> np.ndarray:
    """{x g tau(x)^{-1} : x in X}."""
    return np.unique(G.mul_many(G.mul_many(X, g), G.inv[tau[X]]))


def _conj_orbit(G: FiniteGroup, g: int, X: np.ndarray) -> np.ndarray:
    return np.unique(G.mul_many(G.mul_many(X, g), G.inv[X]))


def _stabilizer(G, tau, g, X) -> np.ndarray:
    return X[G.mul_many(G.mul_many(X, g), G.inv[tau[X]]) == g]


def norm(T: TwistedGroupSpace, g: int) -> int:
    G, out, cur = T.group, g, g
    for _ in range(T.p - 1):
        cur = int(T.sigma[cur])
        out = G.mul(out, cur)
    return out


def _norm_map(G: FiniteGroup, tau: np.ndarray, p: int, X: np.ndarray) -> np.ndarray:
    out = cur = np.asarray(X)
    for _ in range(p - 1):
        cur = tau[cur]
        out = G.mul_many(out, cur)
    return out


def norm_all(T: TwistedGroupSpace) -> np.ndarray:
    return _norm_map(T.group, T.sigma, T.p, np.arange(T.order))


def _labels(orbit_fn, within: np.ndarray, size: int):
    label = np.full(size, -1, dtype=np.int64)
    reps, sizes = [], []
    for g in within:
        if label[g] < 0:
            orb = orbit_fn(int(g))
            label[orb] = len(reps)
            reps.append(int(g))
            sizes.append(len(orb))
    return label, reps, sizes


def conjugacy_labels(G: FiniteGroup):
    X = np.arange(G.order)
    return _labels(lambda g: _conj_orbit(G, g, X), X, G.order)


def _check_stable(T: TwistedGroupSpace, H: np.ndarray) -> None:
    if not set(T.sigma[H].tolist()) <= set(H.tolist()):
        raise SubgroupNotSigmaStable("subgroup is not sigma-stable")


def subgroup(T_or_G, gens) -> np.ndarray:
    G = T_or_G.group if isinstance(T_or_G, TwistedGroupSpace) else T_or_G
    return G.closure(gens)


@dataclass
class TwistedClass:
    representative: int
    size: int
    norm: int
    norm_class: int  # least index in the ordinary class of the norm


@dataclass
class TwistedClassReport:
    classes: list[TwistedClass]
    h1_size: int
    group_order: int

    @property
    def norm_classes(self) -> dict[int, int]:
        return {c.representative: c.norm_class for c in self.classes}


def twisted_classes(T: TwistedGroupSpace, within=None) -> TwistedClassReport:
    """Orbits of g -> x g sigma(x)^{-1}; with ``within`` (a sigma-stable subgroup)
    both g and x range over it."""
    G = T.group
    X = np.arange(G.order) if within is None else np.asarray(within, dtype=np.int64)
    if within is not None:
        _check_stable(T, X)
    _, reps, sizes = _labels(lambda g: _orbit(G, T.sigma, g, X), X, G.order)
    clabel, creps, _ = conjugacy_labels(G)
    norms = _norm_map(G, T.sigma, T.p, np.array(reps, dtype=np.int64))
    classes = [TwistedClass(r, s, int(n), creps[clabel[n]]) for r, s, n in zip(reps, sizes, norms)]
    h1 = sum(1 for c in classes if c.norm == G.e)
    return TwistedClassReport(classes, h1, len(X))


def _h1(G: FiniteGroup, tau: np.ndarray, p: int, within: np.ndarray) -> tuple[int, list[int]]:
    cocycles = within[_norm_map(G, tau, p, within) == G.e]
    _, reps, _ = _labels(lambda g: _orbit(G, tau, g, within), cocycles, G.order)
    return len(reps), reps


def h1(T: TwistedGroupSpace, within=None) -> int:
    """Number of twisted classes of {g : norm(g) = e} in the subgroup ``within``."""
    X = np.arange(T.order) if within is None else np.asarray(within, dtype=np.int64)
    if within is not None:
        _check_stable(T, X)
    return _h1(T.group, T.sigma, T.p, X)[0]


@dataclass
class CentralizerReport:
    elements: np.ndarray
    order: int
    norm: int
    norm_centralizer_order: int           # centralizer of norm(delta) in G
    rational_norm_centralizer_order: int | None  # in G^sigma, of a G^sigma conjugate of the norm


def twisted_centralizer(T: TwistedGroupSpace, delta: int) -> CentralizerReport:
    G = T.group
    X = np.arange(G.order)
    Z = _stabilizer(G, T.sigma, delta, X)
    n = norm(T, delta)
    zn = _stabilizer(G, X, n, X)
    fixed = X[T.sigma == X]
    cls = _conj_orbit(G, n, X)
    rational = np.intersect1d(cls, fixed)
    rat = None
    if len(rational):
        rat = len(_stabilizer(G, X, int(rational[0]), fixed))
    return CentralizerReport(Z, len(Z), n, len(zn), rat)


def fixed_subgroup(T: TwistedGroupSpace, within=None) -> np.ndarray:
    X = np.arange(T.order) if within is None else np.asarray(within, dtype=np.int64)
    return X[T.sigma[X] == X]


@dataclass
class NormFiber:
    norm_class: int
    twisted_class_count: int
    h1_of_centralizer: int


def norm_fibers(T: TwistedGroupSpace) -> list[NormFiber]:
    """For each ordinary class hit by the norm: the number of twisted classes over it
    and |H^1| of <Ad(delta) o sigma> acting on the centralizer of norm(delta)."""
    G = T.group
    rep = twisted_classes(T)
    X = np.arange(G.order)
    out = []
    seen = {}
    for c in rep.classes:
        seen.setdefault(c.norm_class, []).append(c)
    for ncls, members in sorted(seen.items()):
        delta = members[0].representative
        n = members[0].norm
        Z = _stabilizer(G, X, n, X)
        dinv = int(G.inv[delta])
        tau = G.mul_many(G.mul_many(delta, T.sigma), dinv)  # Ad(delta) o sigma on all of G
        out.append(NormFiber(ncls, len(members), _h1(G, tau, T.p, Z)[0]))
    return out


def norm_equivariance_holds(T: TwistedGroupSpace, sample=None) -> bool:
    """norm(x g sigma(x)^{-1}) = x norm(g) x^{-1}, over all pairs or ``sample`` pairs."""
    G = T.group
    N = norm_all(T)
    pairs = sample if sample is not None else [(x, g) for x in range(G.order) for g in range(G.order)]
    if sample is None and G.table is not None:
        X = np.arange(G.order)[:, None]
        Y = np.arange(G.order)[None, :]
        tw = G.mul_many(G.mul_many(X, Y), G.inv[T.sigma[X]])
        return bool(np.array_equal(N[tw], G.mul_many(G.mul_many(X, N[Y]), G.inv[X])))
    return all(N[twisted_conjugate(T, x, g)] == G.mul(G.mul(x, int(N[g])), int(G.inv[x]))
               for x, g in pairs)


# ------------------------------------------------------------ induced trace


def coset_labels(G: FiniteGroup, H: np.ndarray):
    """Labels of right cosets Hg and one representative per coset."""
    label = np.full(G.order, -1, dtype=np.int64)
    reps = []
    for g in range(G.order):
        if label[g] < 0:
            label[G.mul_many(H, g)] = len(reps)
            reps.append(g)
    return label, np.array(reps, dtype=np.int64)


@dataclass
class InducedTraceReport:
    value: int
    coset_count: int
    fixed_by_action: int
    by_class_formula: Fraction
    twisted_centralizer_order: int
    class_meets_subgroup: int


def induced_trace_report(T: TwistedGroupSpace, H, delta: int) -> InducedTraceReport:
    G = T.group
    H = np.asarray(H, dtype=np.int64)
    _check_stable(T, H)
    label, reps = coset_labels(G, H)
    # H gamma -> H sigma(gamma) delta^{-1}
    images = label[G.mul_many(T.sigma[reps], int(G.inv[delta]))]
    fixed = int(np.sum(images == np.arange(len(reps))))
    X = np.arange(G.order)
    z = len(_stabilizer(G, T.sigma, delta, X))
    meet = len(np.intersect1d(_orbit(G, T.sigma, delta, X), H))
    formula = Fraction(z * meet, len(H))
    if formula != fixed:
        raise MismatchBetweenFormulas(
            f"induced trace: coset action gives {fixed}, class formula gives {formula}")
    return InducedTraceReport(fixed, len(reps), fixed, formula, z, meet)


def induced_trace(T: TwistedGroupSpace, H, delta: int) -> int:
    return induced_trace_report(T, H, delta).value


def induced_trace_all(T: TwistedGroupSpace, H) -> np.ndarray:
    """Both computations for every delta, vectorized; returns the common values."""
    G = T.group
    H = np.asarray(H, dtype=np.int64)
    _check_stable(T, H)
    label, reps = coset_labels(G, H)
    k = len(reps)
    imgs = label[G.mul_many(T.sigma[reps][None, :], G.inv[:, None])]  # delta x coset
    fixed = (imgs == np.arange(k)[None, :]).sum(axis=1)
    X = np.arange(G.order)
    inH = np.zeros(G.order, dtype=bool)
    inH[H] = True
    tlabel, treps, tsizes = _labels(lambda g: _orbit(G, T.sigma, g, X), X, G.order)
    meet = np.bincount(tlabel[H], minlength=len(treps))
    for d in range(G.order):
        c = tlabel[d]
        z = G.order // tsizes[c]
        if Fraction(z * int(meet[c]), len(H)) != int(fixed[d]):
            raise MismatchBetweenFormulas(f"induced trace mismatch at element {d}")
    return fixed


# -------------------------------------------------------------- split sweep


@dataclass
class SweepRow:
    prime: int
    kind: str
    c_coset_pairs: int
    c_norm_fixed: int
    index: int
    ratio: Fraction


def _sl2_element(G: FiniteGroup, rows) -> int:
    F: FiniteField = G.data["field"]
    return G.index[tuple(int(x) % F.q for r in rows for x in r)]


def split_delta(G0: FiniteGroup, kind: str):
    """(a, b) in G0 x G0 with norm-type ``kind``: unipotent, trivial or semisimple."""
    F: FiniteField = G0.data["field"]
    p = F.p
    e = G0.e
    if kind == "unipotent":
        return _sl2_element(G0, ((1, 1), (0, 1))), e
    if kind == "trivial":
        a = _sl2_element(G0, ((1, 1), (0, 1)))
        return a, int(G0.inv[a])
    if kind == "semisimple":
        if p > 3:
            t = F.primitive_element()
            return _sl2_element(G0, ((t, 0), (0, int(F.inv[t])))), e
        # no split regular semisimple element in SL2(F_3); use an elliptic one
        return _sl2_element(G0, ((0, p - 1), (1, 0))), e
    raise ValueError(f"unknown norm type {kind!r}")


def split_induced_trace(G0: FiniteGroup, B: np.ndarray, a: int, b: int) -> tuple[int, int]:
    """c for G0 x G0 with swap, H = B x B, delta = (a, b), counted two ways:
    coset pairs (Bx1, Bx2) with x1 a x2^{-1}, x2 b x1^{-1} in B, and fixed points
    of ab on B\\G0."""
    label, reps = coset_labels(G0, B)
    inB = np.zeros(G0.order, dtype=bool)
    inB[B] = True
    inv = G0.inv
    x1 = reps[:, None]
    x2 = reps[None, :]
    first = inB[G0.mul_many(G0.mul_many(x1, a), inv[x2])]
    second = inB[G0.mul_many(G0.mul_many(x2, b), inv[x1])]
    pairs = int(np.sum(first & second))
    ab = G0.mul(a, b)
    fixed = int(np.sum(label[G0.mul_many(reps, ab)] == np.arange(len(reps))))
    return pairs, fixed


def c_ratio_sweep(primes=(3, 5, 7, 11, 13), kinds=("unipotent", "semisimple", "trivial")) -> list[SweepRow]:
    rows = []
    for p in primes:
        if p % 2 == 0 or p > 13 or not sympy.isprime(p):
            raise EnumerationBoundExceeded(f"sweep supports odd primes up to 13, got {p}")
        G0 = sl2(p)
        B = borel(G0)
        for kind in kinds:
            a, b = split_delta(G0, kind)
            pairs, fixed = split_induced_trace(G0, B, a, b)
            if pairs != fixed:
                raise MismatchBetweenFormulas(f"sweep p={p} {kind}: {pairs} != {fixed}")
            index = G0.order // len(B)
            rows.append(SweepRow(p, kind, pairs, fixed, index, Fraction(pairs, index)))
    return rows


def sweep_tsv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, delimiter="\t", lineterminator="\n")
    w.writerow(["prime", "norm_type", "c", "index", "ratio"])
    for r in rows:
        w.writerow([r.prime, r.kind, r.c_coset_pairs, r.index, str(r.ratio)])
    return buf.getvalue()


# ---------------------------------------------------------- tensor identity


def tensor_trace_identity_check(A1, A2) -> tuple[int, int]:
    """trace((A1 (x) A2) o swap on V (x) V) versus trace(A1 A2); returns both."""
    A1 = np.asarray(A1, dtype=object)
    A2 = np.asarray(A2, dtype=object)
    if A1.shape != A2.shape or A1.ndim != 2 or A1.shape[0] != A1.shape[1]:
        raise ValueError("need two square matrices of the same size")
    n = A1.shape[0]
    swap = np.zeros((n * n, n * n), dtype=object)
    for i in range(n):
        for j in range(n):
            swap[j * n + i, i * n + j] = 1
    lhs = int(np.trace(np.kron(A1, A2) @ swap))
    rhs = int(np.trace(A1 @ A2))
    if lhs != rhs:
        raise MismatchBetweenFormulas(f"tensor trace {lhs} != {rhs}")
    return lhs, rhs


# -------------------------------------------------------------------- JSON


def group_from_json(doc: dict) -> TwistedGroupSpace:
    kind = doc.get("kind")
    p = int(doc["order"]) if "order" in doc else None
    sigma = doc.get("sigma")
    if kind == "matrix":
        fd = doc.get("field", {})
        F = FiniteField(int(fd["p"]), int(fd.get("deg", 1)))
        G = matrix_group(F, doc["generators"], name=doc.get("name", "matrix group"))
        if sigma == "frobenius":
            T = frobenius(G)
        elif sigma in (None, "identity"):
            T = trivial_automorphism(G, p or 2)
        else:
            raise GroupError(f"unsupported sigma {sigma!r} for a matrix group")
    elif kind == "perm":
        G = perm_group(doc["generators"], name=doc.get("name", "permutation group"))
        if isinstance(sigma, dict) and "perm" in sigma:
            T = conjugation(G, sigma["perm"], p or 2)
        elif sigma in (None, "identity"):
            T = trivial_automorphism(G, p or 2)
        else:
            raise GroupError(f"unsupported sigma {sigma!r} for a permutation group")
    elif kind == "product_shift":
        base = group_from_json({**doc["base"], "sigma": "identity", "order": 2}).group
        G = direct_power(base, p or 2)
        T = cyclic_shift(G)
    elif kind == "abelian":
        G = abelian_group(doc["moduli"])
        if isinstance(sigma, dict) and "matrix" in sigma:
            T = linear_automorphism(G, sigma["matrix"], p or 2)
        elif sigma in (None, "identity"):
            T = trivial_automorphism(G, p or 2)
        else:
            raise GroupError(f"unsupported sigma {sigma!r} for an abelian group")
    else:
        raise GroupError(f"unknown group kind {kind!r}")
    if p is not None and T.p != p:
        raise AutomorphismError(f"sigma has order {T.p}, file says {p}")
    validate_space(T)
    return T


def element_from_json(T: TwistedGroupSpace, value) -> int:
    G = T.group
    if G.kind == "matrix":
        q = G.data["field"].q
        key = tuple(int(x) % q for row in value for x in row)
    elif G.kind == "product":
        base = G.data["base"]
        key = tuple(element_from_json(TwistedGroupSpace(base, np.arange(base.order), 2), v)
                    for v in value)
    else:
        key = tuple(int(x) for x in value)
    if key not in G.index:
        raise GroupError(f"{value!r} is not an element of {G.name}")
    return G.index[key]


def element_to_json(T: TwistedGroupSpace, i: int):
    G = T.group
    key = G.keys[i]
    if G.kind == "matrix":
        d = G.data["dim"]
        return [list(key[r * d:(r + 1) * d]) for r in range(d)]
    if G.kind == "product":
        base = G.data["base"]
        sub = TwistedGroupSpace(base, np.arange(base.order), 2)
        return [element_to_json(sub, k) for k in key]
    return list(key)


def subgroup_from_json(T: TwistedGroupSpace, doc) -> np.ndarray:
    """{"generators": [...]} (or a bare list of generators); checks sigma-stability."""
    gens = doc["generators"] if isinstance(doc, dict) else doc
    idx = [element_from_json(T, g) for g in gens]
    if any(int(T.sigma[g]) not in set(T.group.closure(idx).tolist()) for g in idx):
        raise SubgroupNotSigmaStable("sigma does not preserve the subgroup")
    return T.group.closure(idx)


# ---------------------------------------------------------------- catalogue


def product_swap(G0: FiniteGroup, p: int = 2) -> TwistedGroupSpace:
    return cyclic_shift(direct_power(G0, p))


def product_subgroup(T: TwistedGroupSpace, H0: np.ndarray) -> np.ndarray:
    """H0^p inside a direct power."""
    G = T.group
    base = G.data["base"]
    n0 = base.order
    p = G.data["power"]
    codes = np.zeros(1, dtype=np.int64)
    for k in range(p):
        codes = (codes[:, None] + np.asarray(H0)[None, :] * n0 ** k).ravel()
    return np.sort(codes)


def sl2_frobenius(p: int = 3) -> TwistedGroupSpace:
    return frobenius(sl2(p, 2))


def sl2_trace(G: FiniteGroup, i: int) -> int:
    F: FiniteField = G.data["field"]
    k = G.keys[i]
    return int(F.add[k[0], k[3]])


def inner_form_check(T: TwistedGroupSpace) -> tuple[int, list[int]]:
    """Compare |twisted centralizer| with the rational centralizer of the norm for
    every delta whose norm is regular semisimple in an SL2 model (trace != +-2)."""
    G = T.group
    F: FiniteField = G.data["field"]
    two = F.code(2)
    singular = {two, int(F.neg[two])}
    checked, failures = 0, []
    for d in range(G.order):
        if sl2_trace(G, norm(T, d)) in singular:
            continue
        r = twisted_centralizer(T, d)
        checked += 1
        if r.order != r.rational_norm_centralizer_order:
            failures.append(d)
    return checked, failures
