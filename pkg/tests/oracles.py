"""Slow, independent reference computations used to cross-check the library."""

from __future__ import annotations

import itertools
import math
from collections import Counter
from functools import lru_cache


# -- integer matrices ------------------------------------------------------


def _det(M):
    n = len(M)
    if n == 0:
        return 1
    total = 0
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i, j in itertools.combinations(range(n), 2) if perm[i] > perm[j])
        prod = 1
        for i in range(n):
            prod *= M[i][perm[i]]
        total += -prod if inv % 2 else prod
    return total


def determinantal_divisors(M):
    """``d_k`` = gcd of all ``k x k`` minors, for ``k = 1 .. min(m, n)``."""
    m, n = len(M), len(M[0]) if M else 0
    out = []
    for k in range(1, min(m, n) + 1):
        g = 0
        for rows in itertools.combinations(range(m), k):
            for cols in itertools.combinations(range(n), k):
                g = math.gcd(g, _det([[M[r][c] for c in cols] for r in rows]))
        out.append(g)
    return out


def invariant_factors_by_minors(M):
    """Diagonal of the Smith form, from determinantal divisors."""
    out, prev = [], 1
    for dk in determinantal_divisors(M):
        if dk == 0:
            out.append(0)
            prev = 0
            continue
        out.append(dk // prev)
        prev = dk
    return out


def quotient_order_profile(rank, torsion, relations, limit=50_000):
    """Element-order counts of ``(Z/torsion + Z^rank) / <relations>`` by coset enumeration.

    Returns ``None`` for an infinite quotient.  Element-order counts determine a
    finite abelian group up to isomorphism.
    """
    t = len(torsion)
    k = t + rank
    rows = [list(r) for r in relations]
    for i, d in enumerate(torsion):
        rows.append([d if j == i else 0 for j in range(k)])
    if k == 0:
        return Counter({1: 1})
    if len(rows) < k:
        return None
    D = determinantal_divisors(rows)[-1] if rows else 0
    if D == 0:
        return None
    if D**k > limit:
        raise OverflowError(f"coset enumeration over {D}^{k} cells")
    # D * Z^k lies in the relation lattice, so work in (Z/D)^k
    sub = {(0,) * k}
    frontier = list(sub)
    gens = [tuple(x % D for x in r) for r in rows]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = tuple((a + b) % D for a, b in zip(x, g))
                if y not in sub:
                    sub.add(y)
                    nxt.append(y)
        frontier = nxt
    orders = Counter()
    for x in itertools.product(range(D), repeat=k):
        m = 1
        while tuple(m * a % D for a in x) not in sub:
            m += 1
        orders[m] += 1
    return Counter({o: c // len(sub) for o, c in orders.items()})


def group_order_profile(G):
    return Counter(G.element_order(x) for x in G.elements())


# -- semigroups -------------------------------------------------------------


def multiplicative_table(n):
    return [[(a * b) % n for b in range(n)] for a in range(n)]


def squarefree(n):
    return all(n % (p * p) for p in range(2, int(math.isqrt(n)) + 1))


# -- groups given by explicit models -------------------------------------------


def _closure(gens, mul, identity):
    G = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = mul(x, g)
                if y not in G:
                    G.add(y)
                    nxt.append(y)
        frontier = nxt
    return G


def _perm_mul(p, q):  # apply p then q
    return tuple(q[i] for i in p)


def _perm_inv(p):
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def _quat_mul(x, y):
    a1, b1, c1, d1 = x
    a2, b2, c2, d2 = y
    return (
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    )


def _quat_inv(x):
    return (x[0], -x[1], -x[2], -x[3])


def group_model(name):
    """``(elements, mul, inv, identity)`` from permutations, quaternions or vectors."""
    if name == "S3":
        e = (0, 1, 2)
        G = _closure([(1, 0, 2), (1, 2, 0)], _perm_mul, e)
        return G, _perm_mul, _perm_inv, e
    if name == "D4":
        e = (0, 1, 2, 3)
        G = _closure([(1, 2, 3, 0), (0, 3, 2, 1)], _perm_mul, e)
        return G, _perm_mul, _perm_inv, e
    if name == "Q8":
        e = (1, 0, 0, 0)
        G = _closure([(0, 1, 0, 0), (0, 0, 1, 0)], _quat_mul, e)
        return G, _quat_mul, _quat_inv, e
    moduli = {"Z2": (2,), "Z3": (3,), "Z4": (4,), "Z6": (6,), "Z2xZ2": (2, 2)}[name]
    add = lambda x, y: tuple((a + b) % m for a, b, m in zip(x, y, moduli))
    neg = lambda x: tuple(-a % m for a, m in zip(x, moduli))
    return set(itertools.product(*(range(m) for m in moduli))), add, neg, (0,) * len(moduli)


def commutator_order(name):
    G, mul, inv, e = group_model(name)
    comms = {mul(mul(inv(g), inv(h)), mul(g, h)) for g in G for h in G}
    return len(_closure(list(comms), mul, e))


def product_one_by_permutations(G, S):
    """``1 in pi(S)`` by trying every ordering of the terms."""
    terms = [g for g, c in enumerate(S) for _ in range(c)]
    if not terms:
        return True
    for perm in set(itertools.permutations(terms)):
        acc = G.identity
        for g in perm:
            acc = G.mul(acc, g)
        if acc == G.identity:
            return True
    return False


# -- monoids inside F ------------------------------------------------------------


def remark313_member(exps):
    t, s = exps
    if s == 0:
        return t == 0
    if s == 1:
        return t == 1 or t % 2 == 0
    return True


def residual_classes(member, d, ymax, xmax):
    """Partition ``[0, ymax)^d`` by the residual sets ``{x in [0, xmax)^d : member(x + y)}``."""
    classes = {}
    for y in itertools.product(range(ymax), repeat=d):
        res = frozenset(x for x in itertools.product(range(xmax), repeat=d) if member(tuple(a + b for a, b in zip(x, y))))
        classes.setdefault(res, []).append(y)
    return list(classes.values())


def generated_closure(units, generators, M):
    """``(unit index, exps)`` of all products of generators with every exponent ``< M``."""
    start = (0, (0,) * len(generators[0].exps)) if generators else None
    gens = [(units.index(g.unit), g.exps) for g in generators]
    seen = {start} if start else set()
    frontier = list(seen)
    while frontier:
        nxt = []
        for u, e in frontier:
            for v, f in gens:
                s = tuple(a + b for a, b in zip(e, f))
                if any(x >= M for x in s):
                    continue
                w = units.index(units.add(units.element(u), units.element(v)))
                if (w, s) not in seen:
                    seen.add((w, s))
                    nxt.append((w, s))
        frontier = nxt
    return seen


class LengthOracle:
    """Atoms and sets of lengths straight from the definitions, using only ``H.member``."""

    def __init__(self, H):
        self.H = H
        self.U = H.units
        nu = self.U.order
        self.trace = [w for w in range(nu) if H.member(w, (0,) * H.d)]
        self._atom = lru_cache(maxsize=None)(self._is_atom)
        self._lengths = lru_cache(maxsize=None)(self._L)

    def _sub(self, u, v):
        U = self.U
        return U.index(U.add(U.element(u), U.neg(U.element(v))))

    def splittings(self, u, exps):
        """Pairs ``((v, b), (w, c))`` of non-units of H with product ``(u, exps)``."""
        for b in itertools.product(*(range(e + 1) for e in exps)):
            if not any(b) or b == tuple(exps):
                continue
            c = tuple(x - y for x, y in zip(exps, b))
            for v in range(self.U.order):
                w = self._sub(u, v)
                if self.H.member(v, b) and self.H.member(w, c):
                    yield (v, b), (w, c)

    def _is_atom(self, u, exps):
        if not any(exps) or not self.H.member(u, exps):
            return False
        return next(self.splittings(u, exps), None) is None

    def is_atom(self, u, exps):
        return self._atom(u, tuple(exps))

    def _L(self, u, exps):
        if not any(exps):
            return frozenset({0})
        out = set()
        if self._atom(u, exps):
            out.add(1)
        for (v, b), (w, c) in self.splittings(u, exps):
            if self._atom(v, b):
                out |= {1 + k for k in self._L(w, c)}
        return frozenset(out)

    def lengths(self, u, exps):
        return tuple(sorted(self._lengths(u, tuple(exps))))
