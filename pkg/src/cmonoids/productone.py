"""Product-one sequences over finite groups and the monoid ``B(G)``.

Sequences are multiplicity vectors indexed by the group elements.  ``B(G)``
lives in the free abelian monoid with one prime per group element and a
trivial unit group.  For abelian ``G`` membership is recognized through ``G``
itself (a sequence is product-one iff its sum is zero); for nonabelian ``G`` the
product sets are computed by a bitmask dynamic program over an exponent box.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .abelian import TRIVIAL, FiniteAbelianGroup
from .cmonoid import (
    DEFAULT_ALPHA_CAP,
    CMonoidPresentation,
    Recognizer,
    _is_periodic,
    certify,
    from_recognizer,
)
from .errors import EmptySequence, NoAlphaFound
from .factorial import Ambient
from .semigroup import validate


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    table: np.ndarray
    identity: int
    name: str = ""
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        T = np.asarray(self.table, dtype=np.int64)
        n = T.shape[0]
        if T.shape != (n, n) or T.min() < 0 or T.max() >= n:
            raise ValueError("invalid group table")
        rng = np.arange(n)
        if not (np.array_equal(T[self.identity], rng) and np.array_equal(T[:, self.identity], rng)):
            raise ValueError("identity element is not neutral")
        for a in range(n):
            if not np.array_equal(T[T[a]], T[a][T]):
                raise ValueError("group table is not associative")
        if not all((T[a] == self.identity).any() for a in range(n)):
            raise ValueError("some element has no inverse")
        T.setflags(write=False)
        object.__setattr__(self, "table", T)
        if self.labels is None:
            object.__setattr__(self, "labels", tuple(f"g{i}" for i in range(n)))

    @property
    def order(self) -> int:
        return self.table.shape[0]

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(np.flatnonzero(self.table[a] == self.identity)[0])

    def is_abelian(self) -> bool:
        return bool((self.table == self.table.T).all())

    def to_text(self) -> str:
        return "\n".join(" ".join(map(str, row)) for row in self.table.tolist()) + "\n"

    def __str__(self) -> str:
        return self.name or f"group of order {self.order}"


def _from_elements(elements, mul, identity, name, label=str) -> FiniteGroup:
    elements = list(elements)
    pos = {x: i for i, x in enumerate(elements)}
    table = [[pos[mul(a, b)] for b in elements] for a in elements]
    return FiniteGroup(np.array(table), pos[identity], name, tuple(label(x) for x in elements))


def cyclic(n: int) -> FiniteGroup:
    return _from_elements(range(n), lambda a, b: (a + b) % n, 0, f"Z{n}")


def from_abelian(A: FiniteAbelianGroup, name: str = "") -> FiniteGroup:
    label = lambda x: "".join(map(str, x)) or "0"
    return _from_elements(A.elements(), A.add, A.zero(), name or str(A), label)


def klein_four() -> FiniteGroup:
    G = direct_product(cyclic(2), cyclic(2))
    return FiniteGroup(G.table, G.identity, "Z2xZ2", G.labels)


def dihedral(n: int) -> FiniteGroup:
    """Symmetries of the regular ``n``-gon, of order ``2n``: pairs ``(k, f)`` meaning ``r^k s^f``."""

    def mul(x, y):
        (k1, f1), (k2, f2) = x, y
        return ((k1 + (-1) ** f1 * k2) % n, (f1 + f2) % 2)

    elems = [(k, f) for f in range(2) for k in range(n)]
    return _from_elements(elems, mul, (0, 0), f"D{n}", lambda x: f"r{x[0]}" + ("s" if x[1] else ""))


def symmetric(k: int) -> FiniteGroup:
    perms = list(itertools.permutations(range(k)))
    mul = lambda p, q: tuple(p[q[i]] for i in range(k))
    return _from_elements(perms, mul, tuple(range(k)), f"S{k}", lambda p: "".join(map(str, p)))


def quaternion8() -> FiniteGroup:
    # units 1, i, j, k as 0..3; element (s, u) = (-1)^s u
    prod = {
        (0, 0): (0, 0), (0, 1): (0, 1), (0, 2): (0, 2), (0, 3): (0, 3),
        (1, 0): (0, 1), (1, 1): (1, 0), (1, 2): (0, 3), (1, 3): (1, 2),
        (2, 0): (0, 2), (2, 1): (1, 3), (2, 2): (1, 0), (2, 3): (0, 1),
        (3, 0): (0, 3), (3, 1): (0, 2), (3, 2): (1, 1), (3, 3): (1, 0),
    }

    def mul(x, y):
        s, u = prod[(x[1], y[1])]
        return ((x[0] + y[0] + s) % 2, u)

    names = "1ijk"
    elems = [(s, u) for s in range(2) for u in range(4)]
    return _from_elements(elems, mul, (0, 0), "Q8", lambda x: ("-" if x[0] else "") + names[x[1]])


def direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    elems = [(a, b) for a in range(G.order) for b in range(H.order)]
    mul = lambda x, y: (G.mul(x[0], y[0]), H.mul(x[1], y[1]))
    return _from_elements(
        elems, mul, (G.identity, H.identity), f"{G.name}x{H.name}",
        lambda x: f"({G.labels[x[0]]},{H.labels[x[1]]})",
    )


def trivial_group() -> FiniteGroup:
    return FiniteGroup(np.zeros((1, 1), dtype=np.int64), 0, "1", ("e",))


NAMED_GROUPS = {
    "trivial": trivial_group,
    "klein_four": klein_four,
    "quaternion8": quaternion8,
}


def group_by_name(name: str, *args: int) -> FiniteGroup:
    """``cyclic n``, ``dihedral n``, ``symmetric k``, ``quaternion8``, ``klein_four``, ``trivial``."""
    makers = {"cyclic": cyclic, "dihedral": dihedral, "symmetric": symmetric, **NAMED_GROUPS}
    if name not in makers:
        raise KeyError(name)
    return makers[name](*args)


def commutator_subgroup(G: FiniteGroup) -> list[int]:
    comms = {G.mul(G.mul(G.inv(g), G.inv(h)), G.mul(g, h)) for g in range(G.order) for h in range(G.order)}
    sub = {G.identity} | comms
    frontier = list(sub)
    while frontier:
        nxt = []
        for x in frontier:
            for c in comms:
                y = G.mul(x, c)
                if y not in sub:
                    sub.add(y)
                    nxt.append(y)
        frontier = nxt
    return sorted(sub)


def _check_sequence(G: FiniteGroup, S: Sequence[int]) -> tuple[int, ...]:
    S = tuple(int(c) for c in S)
    if len(S) != G.order or any(c < 0 for c in S):
        raise ValueError("a sequence is a non-negative multiplicity vector over the group")
    return S


def product_set(G: FiniteGroup, S: Sequence[int]) -> frozenset[int]:
    """All products of the terms of ``S`` over all orderings."""
    S = _check_sequence(G, S)
    if not any(S):
        raise EmptySequence("the empty sequence has no ordered products")
    n = G.order
    # state: multiplicities consumed so far -> reachable products
    layer = {(0,) * n: {G.identity}}
    for _ in range(sum(S)):
        nxt: dict = {}
        for used, prods in layer.items():
            for g in range(n):
                if used[g] < S[g]:
                    key = used[:g] + (used[g] + 1,) + used[g + 1 :]
                    nxt.setdefault(key, set()).update(G.mul(x, g) for x in prods)
        layer = nxt
    (prods,) = layer.values()
    return frozenset(prods)


def is_product_one(G: FiniteGroup, S: Sequence[int]) -> bool:
    S = _check_sequence(G, S)
    if not any(S):
        return True
    return G.identity in product_set(G, S)


def _sub_multisets(S: tuple[int, ...]):
    return itertools.product(*(range(c + 1) for c in S))


def bg_atoms(G: FiniteGroup, length_cap: int | None = None) -> list[tuple[int, ...]]:
    """Atoms of ``B(G)`` of length at most ``length_cap`` (default ``|G|``)."""
    n = G.order
    cap = n if length_cap is None else length_cap
    # product sets of every multiset up to the cap, as bitmasks
    masks = {(0,) * n: 1 << G.identity}
    right = [[0] * n for _ in range(n)]  # right[g][x] = x*g
    for g in range(n):
        for x in range(n):
            right[g][x] = G.mul(x, g)

    def times(mask, g):
        out = 0
        for x in range(n):
            if mask >> x & 1:
                out |= 1 << right[g][x]
        return out

    layer = [(0,) * n]
    for _ in range(cap):
        nxt = {}
        for S in layer:
            for g in range(n):
                T = S[:g] + (S[g] + 1,) + S[g + 1 :]
                nxt[T] = nxt.get(T, 0) | times(masks[S], g)
        masks.update(nxt)
        layer = list(nxt)
    one = 1 << G.identity
    p1 = lambda S: bool(masks[S] & one)
    atoms = []
    for S in sorted(masks, key=lambda S: (sum(S), tuple(-c for c in S))):
        if not any(S) or not p1(S):
            continue
        split = False
        for T in _sub_multisets(S):
            if 0 < sum(T) < sum(S) and p1(T) and p1(tuple(a - b for a, b in zip(S, T))):
                split = True
                break
        if not split:
            atoms.append(S)
    return atoms


def bg_expected_flags(G: FiniteGroup) -> tuple[bool, bool]:
    """``(|G'| <= 2, G abelian)``."""
    return len(commutator_subgroup(G)) <= 2, G.is_abelian()


def _product_masks(G: FiniteGroup, axes: list[int], shape: tuple[int, ...]) -> np.ndarray:
    """Product-set bitmasks of all multiplicity vectors over ``axes`` in the given box."""
    n = G.order
    if n > 16:
        raise ValueError("bitmask product sets are limited to groups of order <= 16")
    dtype = np.uint8 if n <= 8 else np.uint16
    masks = np.arange(1 << n)
    luts = []
    for g in axes:
        lut = np.zeros(1 << n, dtype=dtype)
        for x in range(n):
            lut[(masks >> x & 1).astype(bool)] |= dtype(1 << G.mul(x, g))
        luts.append(lut)
    arr = np.zeros(shape, dtype=dtype)
    arr[(0,) * len(shape)] = 1 << G.identity
    changed = True
    while changed:
        changed = False
        for k, lut in enumerate(luts):
            for j in range(1, shape[k]):
                dst = [slice(None)] * len(shape)
                src = [slice(None)] * len(shape)
                dst[k], src[k] = j, j - 1
                dst, src = tuple(dst), tuple(src)
                new = arr[dst] | lut[arr[src]]
                if not changed and not np.array_equal(new, arr[dst]):
                    changed = True
                arr[dst] = new
    return arr


def bg_presentation(G: FiniteGroup, alpha_cap: int = DEFAULT_ALPHA_CAP, backend: str = "auto") -> CMonoidPresentation:
    """``B(G)`` inside ``F(G)`` (one prime per element, trivial units).

    Density is not required: for ``G = Z/2`` the valuation of the nontrivial
    element only takes even values.
    """
    n = G.order
    ambient = Ambient(TRIVIAL, tuple(G.labels))
    name = f"B({G.name})" if G.name else "B(G)"
    if backend == "auto":
        backend = "recognizer" if G.is_abelian() else "box"
    if backend == "recognizer":
        if not G.is_abelian():
            raise ValueError("recognizer form needs an abelian group")
        rec = Recognizer(validate(G.table), G.identity, (G.identity,), tuple(range(n)), frozenset({G.identity}))
        return from_recognizer(ambient, rec, name, require_dense=False)
    axes = [g for g in range(n) if g != G.identity]
    one = 1 << G.identity
    for alpha in range(1, alpha_cap + 1):
        base = None
        for k in range(len(axes)):
            shape = tuple(4 * alpha if j == k else 2 * alpha for j in range(len(axes)))
            big = (_product_masks(G, axes, shape) & one).astype(bool)[None]
            if not _is_periodic(big, alpha, axes=[k]):
                break
            if base is None:
                base = np.take(big, np.arange(2 * alpha), axis=k + 1)
        else:
            if base is None:  # trivial group
                base = np.ones((1,), dtype=bool)
            pattern = np.expand_dims(base, axis=G.identity + 1)
            pattern = np.repeat(pattern, 2 * alpha, axis=G.identity + 1)
            pres = CMonoidPresentation(ambient, alpha, pattern=np.ascontiguousarray(pattern), name=name)
            certify(pres, require_dense=False)
            return pres
    raise NoAlphaFound(alpha_cap, f"product-one pattern of {G} is not periodic")
