"""Atoms, factorizations and sets of lengths inside a finite box.

The box of a presentation is the set of elements of total degree at most
``box_cap``.  It is closed under taking divisors, so atoms and factorizations
of box elements are decided exactly by looking only inside the box.  Lengths
are stored as bitmasks (bit ``k`` set iff ``k`` is a factorization length).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .cmonoid import CMonoidPresentation, membership
from .errors import NotInMonoid, PreconditionFailed
from .factorial import FactorialElement


def default_box_cap(H: CMonoidPresentation) -> int:
    top = max((max(g.exps, default=0) for g in H.generators), default=1)
    return 3 * H.alpha * max(top, 1)


def _bits(mask: int) -> tuple[int, ...]:
    return tuple(k for k in range(mask.bit_length()) if mask >> k & 1)


def delta_set(L: Iterable[int]) -> set[int]:
    L = sorted(set(L))
    return {b - a for a, b in zip(L, L[1:])}


@dataclass
class _Tables:
    """Lengths of all members of a divisor-closed family of cells."""

    H: CMonoidPresentation
    lengths: dict = field(default_factory=dict)  # (unit, exps) -> bitmask, members only
    atoms: dict = field(default_factory=dict)  # exps -> unit indices of atoms
    order: list = field(default_factory=list)  # members in processing order

    def __post_init__(self):
        U = self.H.units
        nu = U.order
        self.diff = [[U.index(U.add(U.element(a), U.neg(U.element(b)))) for b in range(nu)] for a in range(nu)]

    def add_cell(self, u: int, exps: tuple[int, ...], member: bool) -> None:
        if not member:
            return
        key = (u, exps)
        self.order.append(key)
        total = sum(exps)
        if total == 0:
            self.lengths[key] = 1
            return
        mask = 0
        nz = [i for i, e in enumerate(exps) if e]
        for part in itertools.product(*(range(exps[i] + 1) for i in nz)):
            deg = sum(part)
            if deg == 0 or deg == total:
                continue
            sub = list(exps)
            rest = [0] * len(exps)
            for i, k in zip(nz, part):
                sub[i] = k
                rest[i] = exps[i] - k
            heads = self.atoms.get(tuple(sub))
            if not heads:
                continue
            rest = tuple(rest)
            for v in heads:
                r = self.lengths.get((self.diff[u][v], rest))
                if r:
                    mask |= r << 1
        if not mask:
            self.atoms.setdefault(exps, []).append(u)
            mask = 2
        self.lengths[key] = mask

    def is_atom(self, u: int, exps: tuple[int, ...]) -> bool:
        return u in self.atoms.get(exps, ())


def _box_tables(H: CMonoidPresentation, box_cap: int) -> _Tables:
    key = ("lengths", box_cap)
    if key not in H._cache:
        t = _Tables(H)
        for u, exps, member in H.elements_by_degree(box_cap):
            t.add_cell(u, exps, member)
        H._cache[key] = t
    return H._cache[key]


def _divisor_tables(H: CMonoidPresentation, exps: Sequence[int]) -> _Tables:
    t = _Tables(H)
    cells = sorted(itertools.product(*(range(e + 1) for e in exps)), key=lambda c: (sum(c), c))
    for c in cells:
        for u in range(H.units.order):
            t.add_cell(u, c, H.member(u, c))
    return t


def atoms_in_box(H: CMonoidPresentation, box_cap: int | None = None) -> list[FactorialElement]:
    """All atoms of ``H`` of total degree at most ``box_cap``, by degree."""
    cap = default_box_cap(H) if box_cap is None else box_cap
    t = _box_tables(H, cap)
    return [H.element(u, e) for u, e in t.order if t.is_atom(u, e)]


@dataclass(frozen=True)
class LengthReport:
    element: FactorialElement
    factorizations: int  # distinct factorizations up to units of H
    lengths: tuple[int, ...]
    delta: frozenset

    def __str__(self) -> str:
        L = "{" + ", ".join(map(str, self.lengths)) + "}"
        D = "{" + ", ".join(map(str, sorted(self.delta))) + "}"
        return f"L({self.element}) = {L}, delta = {D}, factorizations = {self.factorizations}"


def _count_factorizations(t: _Tables, u: int, exps: tuple[int, ...]) -> int:
    H = t.H
    trace = [w for w in range(H.units.order) if (w, (0,) * H.d) in t.lengths]
    # one representative per atom class modulo units of H
    reps = []
    for e, us in t.atoms.items():
        seen = set()
        for v in sorted(us):
            if v in seen:
                continue
            seen.update(t.diff[v][t.diff[0][w]] for w in trace)
            reps.append((sum(e), e, v))
    reps.sort()
    memo: dict = {}

    def count(u, exps, bound):
        if not any(exps):
            return 1
        key = (u, exps, bound)
        if key not in memo:
            total = 0
            for k in range(bound + 1):
                _, e, v = reps[k]
                if all(a <= b for a, b in zip(e, exps)):
                    rest = tuple(b - a for a, b in zip(e, exps))
                    w = t.diff[u][v]
                    if (w, rest) in t.lengths:
                        total += count(w, rest, k)
            memo[key] = total
        return memo[key]

    return count(u, exps, len(reps) - 1)


def set_of_lengths(H: CMonoidPresentation, a: FactorialElement, box_cap: int | None = None) -> LengthReport:
    if box_cap is not None and a.degree > box_cap:
        raise ValueError(f"{a} has degree {a.degree}, outside the box of degree {box_cap}")
    if not membership(H, a):
        raise NotInMonoid(f"{a} is not in H")
    t = _divisor_tables(H, a.exps)
    u = H.units.index(a.unit)
    L = _bits(t.lengths[(u, a.exps)])
    return LengthReport(a, _count_factorizations(t, u, a.exps), L, frozenset(delta_set(L)))


@dataclass(frozen=True)
class BruteforceVerdict:
    half_factorial: bool  # relative to the box
    witness: FactorialElement | None
    witness_lengths: tuple[int, ...]
    box_cap: int
    delta: frozenset  # union of delta sets over the box

    @property
    def label(self) -> str:
        verdict = "half-factorial" if self.half_factorial else "not half-factorial"
        return f"{verdict} (within box of degree <= {self.box_cap})"


def half_factorial_bruteforce(H: CMonoidPresentation, box_cap: int | None = None) -> BruteforceVerdict:
    cap = default_box_cap(H) if box_cap is None else box_cap
    t = _box_tables(H, cap)
    witness, wl, delta = None, (), set()
    for key in t.order:
        L = _bits(t.lengths[key])
        if len(L) > 1:
            delta |= delta_set(L)
            if witness is None:
                witness, wl = H.element(*key), L
    return BruteforceVerdict(witness is None, witness, wl, cap, frozenset(delta))


def box_lengths(H: CMonoidPresentation, box_cap: int) -> dict[tuple[int, tuple[int, ...]], tuple[int, ...]]:
    """``(unit index, exps) -> L(a)`` for every element of ``H`` in the box."""
    t = _box_tables(H, box_cap)
    return {key: _bits(t.lengths[key]) for key in t.order}


@dataclass(frozen=True)
class WeightReport:
    G1: frozenset
    G2: frozenset
    G3: frozenset
    weights: tuple[tuple[FactorialElement, Fraction], ...]  # (atom, weight)
    checked: bool  # weights are only required to be 1 for a half-factorial verdict
    violations: tuple[FactorialElement, ...]

    @property
    def passed(self) -> bool:
        return not self.violations


def weight(H: CMonoidPresentation, ctx, a: FactorialElement) -> Fraction:
    """``l_1(a) + l_2(a)/2`` from the classes of the primes dividing ``a``."""
    total = Fraction(0)
    for p, e in enumerate(a.exps):
        if e:
            c = ctx.prime_classes[p]
            if c in ctx.G1:
                total += e
            elif c in ctx.G2:
                total += Fraction(e, 2)
    return total


def weight_check(H: CMonoidPresentation, ctx, atoms: Sequence[FactorialElement], half_factorial: bool = True) -> WeightReport:
    """Weights of the given atoms; with a half-factorial verdict each must be 1.

    ``ctx`` is a criterion context (see :mod:`cmonoids.criterion`).
    """
    if not ctx.hypothesis:
        raise PreconditionFailed("some class of C* contains no prime")
    ws = tuple((a, weight(H, ctx, a)) for a in atoms if not a.is_unit)
    bad = tuple(a for a, w in ws if w != 1) if half_factorial else ()
    return WeightReport(ctx.G1, ctx.G2, ctx.G3, ws, half_factorial, bad)
