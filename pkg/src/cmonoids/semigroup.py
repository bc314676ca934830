"""Finite commutative semigroups given by Cayley tables.

Elements are the indices ``0..n-1``; labels are only used for reporting.  The
operation is written additively.  Besides the basic queries (idempotents,
Rees order, cyclic powers) this module computes constituent groups and the
union-of-groups (Clifford) decomposition.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .abelian import FiniteAbelianGroup, TableGroupStructure, group_from_table
from .errors import NotAssociative, NotCommutative, NotIdempotent

FULL_ASSOCIATIVITY_CAP = 512
SAMPLED_TRIPLES = 200_000


@dataclass(frozen=True, eq=False)
class FinCommSemigroup:
    table: np.ndarray
    labels: tuple[str, ...] | None = None
    associativity: str = "full"  # or "sampled" above the cap

    @property
    def n(self) -> int:
        return self.table.shape[0]

    def add(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def sum(self, items: Iterable[int], start: int | None = None) -> int:
        acc = start
        for x in items:
            acc = x if acc is None else int(self.table[acc, x])
        if acc is None:
            raise ValueError("empty sum without a start element")
        return acc

    def label(self, x: int) -> str:
        return self.labels[x] if self.labels else str(x)

    def identity(self) -> int | None:
        rng = np.arange(self.n)
        for e in range(self.n):
            if np.array_equal(self.table[e], rng):
                return e
        return None

    def to_text(self) -> str:
        return "\n".join(" ".join(str(int(v)) for v in row) for row in self.table) + "\n"

    def __repr__(self) -> str:
        return f"FinCommSemigroup(n={self.n})"


def validate(table, labels: Sequence[str] | None = None, *, cap: int = FULL_ASSOCIATIVITY_CAP, seed: int = 0) -> FinCommSemigroup:
    """Check a Cayley table and wrap it.

    Raises :class:`NotCommutative` or :class:`NotAssociative` with a witness.
    Associativity is checked on all triples up to ``cap`` elements and on
    random triples above it.
    """
    T = np.asarray(table, dtype=np.int64)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise ValueError("Cayley table must be square")
    n = T.shape[0]
    if n == 0:
        raise ValueError("empty semigroup")
    if T.min() < 0 or T.max() >= n:
        raise ValueError("table entries out of range")
    if labels is not None and len(labels) != n:
        raise ValueError("one label per element required")
    asym = np.argwhere(T != T.T)
    if len(asym):
        a, b = map(int, asym[0])
        raise NotCommutative(a, b)
    mode = "full"
    if n <= cap:
        for a in range(n):
            left = T[T[a]]  # (a+b)+c, indexed [b, c]
            right = T[a][T]  # a+(b+c)
            bad = np.argwhere(left != right)
            if len(bad):
                b, c = map(int, bad[0])
                raise NotAssociative(a, b, c)
    else:
        mode = "sampled"
        rng = np.random.default_rng(seed)
        a, b, c = rng.integers(0, n, size=(3, SAMPLED_TRIPLES))
        bad = np.flatnonzero(T[T[a, b], c] != T[a, T[b, c]])
        if len(bad):
            i = bad[0]
            raise NotAssociative(int(a[i]), int(b[i]), int(c[i]))
    T = T.copy()
    T.setflags(write=False)
    return FinCommSemigroup(T, tuple(labels) if labels is not None else None, mode)


def from_text(text: str) -> FinCommSemigroup:
    rows = [list(map(int, line.split())) for line in text.splitlines() if line.strip()]
    return validate(rows)


def idempotents(S: FinCommSemigroup) -> list[int]:
    d = S.table[np.arange(S.n), np.arange(S.n)]
    return [int(x) for x in np.flatnonzero(d == np.arange(S.n))]


def rees_leq(S: FinCommSemigroup, e: int, f: int) -> bool:
    """``e <= f`` in the Rees order on idempotents, i.e. ``e + f == e``."""
    return S.add(e, f) == e


def rees_smallest_idempotent(S: FinCommSemigroup) -> int:
    E = idempotents(S)
    e = S.sum(E)
    assert all(rees_leq(S, e, f) for f in E)
    return e


def power_to_idempotent(S: FinCommSemigroup, a: int) -> tuple[int, int]:
    """Minimal ``n >= 1`` with ``n*a`` idempotent, together with ``n*a``."""
    x, k = a, 1
    while S.add(x, x) != x:
        x = S.add(x, a)
        k += 1
        if k > S.n:
            raise AssertionError("cyclic subsemigroup longer than the semigroup")
    return k, x


def index_and_period(S: FinCommSemigroup, a: int) -> tuple[int, int]:
    """Index ``m`` and period ``r`` of ``a``: ``(m+r)a = ma`` with both minimal."""
    seen = {}
    x, k = a, 1
    while x not in seen:
        seen[x] = k
        x = S.add(x, a)
        k += 1
    return seen[x], k - seen[x]


@dataclass(frozen=True)
class ConstituentGroup:
    idempotent: int
    elements: tuple[int, ...]
    structure: TableGroupStructure

    @property
    def group(self) -> FiniteAbelianGroup:
        return self.structure.group

    def __contains__(self, x) -> bool:
        return x in self.structure.to_vec

    def __len__(self) -> int:
        return len(self.elements)


def constituent_elements(S: FinCommSemigroup, e: int) -> list[int]:
    T = S.table
    fixed = np.flatnonzero(T[:, e] == np.arange(S.n))
    return [int(x) for x in fixed if (T[x] == e).any()]


def constituent_group(S: FinCommSemigroup, e: int) -> ConstituentGroup:
    if S.add(e, e) != e:
        raise NotIdempotent(f"element {S.label(e)} is not idempotent")
    elems = constituent_elements(S, e)
    structure = group_from_table(elems, S.add, e)
    return ConstituentGroup(e, tuple(elems), structure)


@dataclass(frozen=True)
class CliffordDecomposition:
    idempotents: tuple[int, ...]
    constituents: Mapping[int, ConstituentGroup]
    is_union_of_groups: bool
    smallest_idempotent: int
    uncovered: tuple[int, ...] = field(default=())

    def constituent_of(self, x: int) -> int | None:
        for e, C in self.constituents.items():
            if x in C:
                return e
        return None


def clifford_decomposition(S: FinCommSemigroup) -> CliffordDecomposition:
    E = idempotents(S)
    cons = {e: constituent_group(S, e) for e in E}
    covered = set()
    for C in cons.values():
        overlap = covered.intersection(C.elements)
        assert not overlap, f"constituent groups intersect in {overlap}"
        covered.update(C.elements)
    uncovered = tuple(x for x in range(S.n) if x not in covered)
    return CliffordDecomposition(tuple(E), cons, not uncovered, rees_smallest_idempotent(S), uncovered)


def is_union_of_groups_direct(S: FinCommSemigroup) -> bool:
    """Quantified recheck: every x has an idempotent e with x+e=x and some y with x+y=e."""
    E = idempotents(S)
    T = S.table
    return all(any(T[x, e] == x and (T[x] == e).any() for e in E) for x in range(S.n))


def generated_subsemigroup(S: FinCommSemigroup, gens: Iterable[int]) -> set[int]:
    gens = list(dict.fromkeys(gens))
    out = set(gens)
    frontier = list(gens)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = S.add(x, g)
                if y not in out:
                    out.add(y)
                    nxt.append(y)
        frontier = nxt
    return out


def subsemigroup(S: FinCommSemigroup, subset: Iterable[int]) -> tuple[FinCommSemigroup, list[int]]:
    """Restrict to a closed subset; returns the new semigroup and the old indices."""
    old = sorted(set(subset))
    pos = {x: i for i, x in enumerate(old)}
    try:
        table = [[pos[S.add(a, b)] for b in old] for a in old]
    except KeyError as exc:
        raise ValueError("subset is not closed under the operation") from exc
    labels = [S.label(x) for x in old] if S.labels else None
    return validate(table, labels), old


def _signature(S: FinCommSemigroup, x: int) -> tuple:
    T = S.table
    return (
        index_and_period(S, x),
        int(T[x, x] == x),
        int((T[x] == x).sum()),
        len(set(T[x].tolist())),
        int(np.array_equal(T[x], np.arange(S.n))),
    )


def find_isomorphism(S: FinCommSemigroup, T: FinCommSemigroup) -> dict[int, int] | None:
    """An isomorphism ``S -> T`` as a dict, or ``None``.

    Backtracks over images of a greedy generating set, pruned by element
    invariants and extended homomorphically after every choice.
    """
    if S.n != T.n:
        return None
    sig_s = [_signature(S, x) for x in range(S.n)]
    sig_t = [_signature(T, y) for y in range(T.n)]
    if sorted(sig_s) != sorted(sig_t):
        return None
    # greedy generators, rarest signature first
    rarity = {s: sig_s.count(s) for s in sig_s}
    order = sorted(range(S.n), key=lambda x: (rarity[sig_s[x]], x))
    gens, span = [], set()
    for x in order:
        if x not in span:
            gens.append(x)
            span = generated_subsemigroup(S, gens)
    assert len(span) == S.n

    def extend(f: dict[int, int], used: set[int]):
        f, used = dict(f), set(used)
        frontier = list(f)
        while frontier:
            nxt = []
            keys = list(f)
            for a in frontier:
                for b in keys:
                    c = S.add(a, b)
                    img = T.add(f[a], f[b])
                    if c in f:
                        if f[c] != img:
                            return None
                    else:
                        if img in used or sig_t[img] != sig_s[c]:
                            return None
                        f[c] = img
                        used.add(img)
                        nxt.append(c)
                keys = list(f)
            frontier = nxt
        return f, used

    def search(i: int, f: dict[int, int], used: set[int]):
        if i == len(gens):
            return f
        g = gens[i]
        if g in f:
            return search(i + 1, f, used)
        for t in range(T.n):
            if t in used or sig_t[t] != sig_s[g]:
                continue
            res = extend({**f, g: t}, used | {t})
            if res is None:
                continue
            out = search(i + 1, *res)
            if out is not None:
                return out
        return None

    f = search(0, {}, set())
    if f is None:
        return None
    for a, b in itertools.product(range(S.n), repeat=2):
        assert f[S.add(a, b)] == T.add(f[a], f[b])
    return f


def is_isomorphic(S: FinCommSemigroup, T: FinCommSemigroup) -> bool:
    return find_isomorphism(S, T) is not None


def strong_semilattice_of_groups(
    semilattice: Sequence[Sequence[int]],
    groups: Sequence[FiniteAbelianGroup],
    bondings: Mapping[tuple[int, int], "object"],
) -> tuple[FinCommSemigroup, list[tuple[int, tuple[int, ...]]]]:
    """Clifford semigroup from a semilattice of abelian groups.

    ``semilattice`` is the meet table on component indices (``a ^ b``), with
    the convention that ``a >= b`` iff ``a ^ b == b``.  ``bondings[(a, b)]`` is
    a :class:`~cmonoids.abelian.GroupHom` ``groups[a] -> groups[b]`` for every
    ``a > b``; identities are implied on the diagonal.  Returns the semigroup
    and its element list as ``(component, group element)`` pairs.
    """
    k = len(groups)

    def bond(a, b, x):
        return x if a == b else bondings[(a, b)](x)

    elems = [(a, x) for a in range(k) for x in groups[a].elements()]
    pos = {el: i for i, el in enumerate(elems)}
    table = []
    for a, x in elems:
        row = []
        for b, y in elems:
            c = semilattice[a][b]
            row.append(pos[(c, groups[c].add(bond(a, c, x), bond(b, c, y)))])
        table.append(row)
    labels = [f"{a}:{''.join(map(str, x)) or '0'}" for a, x in elems]
    return validate(table, labels), elems
