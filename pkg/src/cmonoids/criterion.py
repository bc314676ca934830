"""Half-factoriality of seminormal C-monoids read off the class semigroup.

The reduced class semigroup of a seminormal C-monoid is a union of groups
``C_0*, ..., C_n*`` sitting over idempotents ``e_0 = [1] > ... > e_n``.  The
unit classes map into every constituent by ``phi_i([eps]) = [eps] + e_i`` and
``C_i' = C_i* / phi_i(C_units)``.  Properties P1 to P4 below are checked on
explicit tables; when every class of ``C*`` holds a prime they decide
half-factoriality.  The module also builds the divisor-closed submonoids
``H_k`` and the transfer homomorphisms ``H_k -> B(C_k')``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .abelian import (
    FiniteAbelianGroup,
    GroupHom,
    QuotientMap,
    TableGroupStructure,
    group_from_table,
    hom_kernel,
    quotient_map,
    subgroup_sum,
)
from .cmonoid import (
    ClassSemigroup,
    CMonoidPresentation,
    Recognizer,
    class_semigroup,
    from_pattern,
    from_recognizer,
    is_seminormal,
)
from .errors import NotSeminormal, PreconditionFailed
from .factorial import Ambient, FactorialElement
from .lengths import box_lengths
from .productone import bg_presentation, from_abelian
from .semigroup import (
    FinCommSemigroup,
    clifford_decomposition,
    constituent_elements,
    find_isomorphism,
    rees_leq,
    subsemigroup,
)


@dataclass(frozen=True)
class LabeledSemigroup:
    """A class semigroup as bare data: carrier plus the labelled subsets."""

    carrier: FinCommSemigroup
    C_H: frozenset
    C_units: frozenset
    C_star: frozenset
    prime_classes: tuple[int, ...]  # class of every prime
    identity: int = 0
    name: str = ""

    def label(self, x: int) -> str:
        return self.carrier.label(x)


def labeled(cs: ClassSemigroup) -> LabeledSemigroup:
    d = cs.presentation.d
    labels = tuple(cs.label(x) for x in range(cs.n))
    carrier = FinCommSemigroup(cs.carrier.table, labels, cs.carrier.associativity)
    return LabeledSemigroup(
        carrier, cs.C_H, cs.C_units, cs.C_star,
        tuple(cs.prime_class(p) for p in range(d)), cs.identity, cs.presentation.name,
    )


@dataclass
class CriterionContext:
    source: LabeledSemigroup
    idempotents: tuple[int, ...]  # e_0 = [1], ..., e_n smallest
    star: tuple[tuple[int, ...], ...]  # C_i* (constituents of C*)
    full: tuple[tuple[int, ...], ...]  # C_i (constituents of C; C_0 contains the unit classes)
    units: tuple[int, ...]
    units_group: TableGroupStructure
    phi: tuple[dict, ...]  # phi_i: unit class -> class
    groups: tuple[TableGroupStructure, ...]  # C_i as abstract groups
    quotients: tuple[QuotientMap, ...]  # C_i -> C_i'
    in_CH: tuple[bool, ...]
    hypothesis: bool
    classes_without_prime: tuple[int, ...]
    G1: frozenset = frozenset()
    G2: frozenset = frozenset()
    G3: frozenset = frozenset()

    @property
    def n(self) -> int:
        return len(self.idempotents) - 1

    @property
    def carrier(self) -> FinCommSemigroup:
        return self.source.carrier

    @property
    def prime_classes(self) -> tuple[int, ...]:
        return self.source.prime_classes

    def index_of(self, e: int) -> int:
        return self.idempotents.index(e)

    def quotient(self, i: int) -> FiniteAbelianGroup:
        return self.quotients[i].group

    def to_quotient(self, i: int, x: int) -> tuple[int, ...]:
        return self.quotients[i](self.groups[i].vec(x))

    def phi_ij(self, i: int, j: int, x: int) -> int:
        return self.carrier.add(x, self.idempotents[j])

    def phi_map(self, i: int) -> GroupHom:
        """``phi_i`` as a homomorphism of abstract groups ``C_units -> C_i``."""
        Ug = self.units_group
        imgs = [self.groups[i].vec(self.phi[i][Ug.elem(g)]) for g in Ug.group.generators()]
        return GroupHom(Ug.group, self.groups[i].group, tuple(imgs))


def _order_idempotents(C: FinCommSemigroup, E: Sequence[int]) -> list[int]:
    # [1] is above everything, the smallest idempotent below everything
    return sorted(E, key=lambda e: (sum(rees_leq(C, e, f) for f in E), e))


def context_from_labels(L: LabeledSemigroup) -> CriterionContext:
    C = L.carrier
    red, idx = subsemigroup(C, L.C_star)
    dec = clifford_decomposition(red)
    if not dec.is_union_of_groups:
        x = idx[dec.uncovered[0]]
        raise NotSeminormal(f"{L.label(x)} lies in no constituent group of C*")
    E = _order_idempotents(C, [idx[e] for e in dec.idempotents])
    if E[0] != L.identity:
        raise PreconditionFailed("the largest idempotent of C* is not [1]")
    star = tuple(tuple(sorted(idx[x] for x in dec.constituents[idx.index(e)].elements)) for e in E)
    full = tuple(tuple(constituent_elements(C, e)) for e in E)
    units = tuple(sorted(L.C_units))
    Ug = group_from_table(units, C.add, L.identity)
    phi = tuple({u: C.add(u, e) for u in units} for e in E)
    groups = tuple(group_from_table(full[i], C.add, e) for i, e in enumerate(E))
    quotients = []
    for i, G in enumerate(groups):
        rels = [G.vec(phi[i][u]) for u in units]
        quotients.append(quotient_map(0, G.group, rels))
    in_CH = tuple(e in L.C_H for e in E)
    with_prime = set(L.prime_classes)
    missing = tuple(x for x in sorted(L.C_star) if x not in with_prime)
    I = [i for i in range(len(E)) if in_CH[i]]
    G1 = frozenset(v for i in I for v in phi[i].values())
    inside = frozenset(x for i in I for x in star[i])
    G2 = inside - G1
    G3 = frozenset(L.C_star) - inside
    return CriterionContext(
        L, tuple(E), star, full, units, Ug, phi, groups, tuple(quotients), in_CH,
        not missing, missing, G1, G2, G3,
    )


def build_context(H: CMonoidPresentation, cs: ClassSemigroup | None = None) -> CriterionContext:
    cs = cs or class_semigroup(H)
    sn = is_seminormal(H, cs)
    if not sn.seminormal:
        raise NotSeminormal(f"{cs.label(sn.witness)} lies in no constituent group of C*")
    return context_from_labels(labeled(cs))


# -- P1 to P4 ------------------------------------------------------------


@dataclass(frozen=True)
class PropertyResult:
    name: str
    passed: bool
    witness: str | None = None
    detail: str = ""


def check_P1(ctx: CriterionContext) -> PropertyResult:
    Q = ctx.quotient(ctx.n)
    ok = Q.order <= 2
    return PropertyResult("P1", ok, None if ok else str(Q), f"C_n' = {Q}")


def check_P2(ctx: CriterionContext) -> PropertyResult:
    C = ctx.carrier
    n = ctx.n
    target = set(ctx.phi[n].values())
    for i in range(n + 1):
        pre = {g for g in ctx.full[i] if ctx.phi_ij(i, n, g) in target}
        expected = set(ctx.phi[i].values()) if ctx.in_CH[i] else set(ctx.full[i])
        if pre != expected:
            w = min(pre ^ expected)
            return PropertyResult("P2", False, C.label(w), f"preimage differs at i = {i}")
    return PropertyResult("P2", True, None, f"checked i = 0..{n}")


def check_P3(ctx: CriterionContext) -> PropertyResult:
    C = ctx.carrier
    Ug = ctx.units_group
    U = Ug.group
    kers = [set(hom_kernel(ctx.phi_map(i))) for i in range(ctx.n + 1)]
    pairs = 0
    for i, j in itertools.combinations(range(ctx.n + 1), 2):
        if not (ctx.in_CH[i] and ctx.in_CH[j]):
            continue
        pairs += 1
        k = ctx.index_of(C.add(ctx.idempotents[i], ctx.idempotents[j]))
        # phi_{i,j} o phi_i is eps -> [eps] + e_i + e_j, landing in C_k
        comp = {x for x in U.elements() if ctx.phi[k][Ug.elem(x)] == ctx.idempotents[k]}
        total = set(subgroup_sum(kers[i], kers[j], U))
        if comp != total:
            w = min(comp ^ total)
            return PropertyResult("P3", False, C.label(Ug.elem(w)), f"kernels differ for i = {i}, j = {j}")
    return PropertyResult("P3", True, None, f"{pairs} pairs")


def check_P4(ctx: CriterionContext) -> PropertyResult:
    C = ctx.carrier
    E = ctx.idempotents
    out = [e for e, h in zip(E, ctx.in_CH) if not h]
    for f1, f2 in itertools.combinations_with_replacement(out, 2):
        s = C.add(f1, f2)
        if s not in out:
            return PropertyResult("P4", False, f"{C.label(f1)} + {C.label(f2)}", "E(C*) minus C_H is not additively closed")
    ins = [i for i, h in enumerate(ctx.in_CH) if h]
    CH = {e for e, h in zip(E, ctx.in_CH) if h}
    for i1, i2 in itertools.combinations(ins, 2):
        for j in range(len(E)):
            if ctx.in_CH[j]:
                continue
            a, b, f = E[i1], E[i2], E[j]
            if C.add(C.add(a, b), f) in CH and C.add(a, f) not in CH and C.add(b, f) not in CH:
                return PropertyResult("P4", False, f"{C.label(a)}, {C.label(b)}, {C.label(f)}", "three-index condition fails")
    return PropertyResult("P4", True, None, f"{len(out)} idempotents outside C_H")


@dataclass(frozen=True)
class CriterionReport:
    half_factorial: bool | None  # None when the criterion does not apply
    properties: tuple[PropertyResult, ...]
    hypothesis: bool
    context: CriterionContext = field(repr=False)

    @property
    def applicable(self) -> bool:
        return self.half_factorial is not None


def evaluate(ctx: CriterionContext) -> CriterionReport:
    props = (check_P1(ctx), check_P2(ctx), check_P3(ctx), check_P4(ctx))
    verdict = all(p.passed for p in props) if ctx.hypothesis else None
    return CriterionReport(verdict, props, ctx.hypothesis, ctx)


def half_factorial_by_criterion(H: CMonoidPresentation, cs: ClassSemigroup | None = None) -> CriterionReport:
    return evaluate(build_context(H, cs))


# -- divisor-closed submonoids H_k ----------------------------------------


def primes_of(ctx: CriterionContext, k: int) -> list[int]:
    Ck = set(ctx.star[k])
    return [p for p, c in enumerate(ctx.prime_classes) if c in Ck]


def sub_cmonoid(H: CMonoidPresentation, ctx: CriterionContext, k: int) -> CMonoidPresentation:
    """``H_k = H cap F_k`` with ``F_k`` generated by the units and the primes whose class lies in ``C_k*``."""
    if not 0 <= k <= ctx.n:
        raise ValueError(f"k must lie in [0, {ctx.n}]")
    Pk = primes_of(ctx, k)
    amb = Ambient(H.units, tuple(H.ambient.primes[p] for p in Pk))
    name = f"{H.name or 'H'}_{k}"
    if H.pattern is not None:
        sl = (slice(None),) + tuple(slice(None) if p in Pk else 0 for p in range(H.d))
        return from_pattern(amb, H.alpha, np.ascontiguousarray(H.pattern[sl]), name=name, require_dense=False)
    r = H.recognizer
    rec = Recognizer(r.monoid, r.identity, r.unit_images, tuple(r.prime_images[p] for p in Pk), r.accept)
    return from_recognizer(amb, rec, name=name, require_dense=False)


def phi_injective(ctx: CriterionContext, k: int) -> bool:
    return len(set(ctx.phi[k].values())) == len(ctx.units)


@dataclass(frozen=True)
class HkFormulaReport:
    k: int
    injective: bool
    expected: FinCommSemigroup
    computed: FinCommSemigroup
    isomorphism: dict | None

    @property
    def matches(self) -> bool:
        return self.isomorphism is not None


def class_semigroup_Hk_formula(ctx: CriterionContext, k: int) -> FinCommSemigroup:
    """Expected ``C(H_k, F_k)``: ``C_k`` if ``phi_k`` is injective, else ``C_units cup C_k``."""
    if not ctx.in_CH[k]:
        raise PreconditionFailed(f"e_{k} is not in C_H")
    part = set(ctx.full[k])
    if not phi_injective(ctx, k):
        part |= set(ctx.units)
    S, _ = subsemigroup(ctx.carrier, part)
    return S


def check_Hk_formula(H: CMonoidPresentation, ctx: CriterionContext, k: int) -> HkFormulaReport:
    expected = class_semigroup_Hk_formula(ctx, k)
    Hk = sub_cmonoid(H, ctx, k)
    computed = class_semigroup(Hk).carrier
    return HkFormulaReport(k, phi_injective(ctx, k), expected, computed, find_isomorphism(expected, computed))


# -- transfer homomorphisms ----------------------------------------------


@dataclass(frozen=True)
class Transfer:
    k: int
    Hk: CMonoidPresentation
    group: FiniteAbelianGroup  # C_k'
    images: tuple[tuple[int, ...], ...]  # image of every prime of H_k in C_k'
    B: CMonoidPresentation  # B(C_k') in F(C_k')

    def sequence(self, exps: Sequence[int]) -> tuple[int, ...]:
        """Multiplicity vector of ``theta(eps * prod p^v)`` over the elements of ``C_k'``."""
        out = [0] * self.group.order
        for img, v in zip(self.images, exps):
            out[self.group.index(img)] += v
        return tuple(out)

    def __call__(self, a: FactorialElement) -> FactorialElement:
        return self.B.element(0, self.sequence(a.exps))


def build_transfer(H: CMonoidPresentation, ctx: CriterionContext, k: int) -> Transfer:
    if not ctx.in_CH[k]:
        raise PreconditionFailed(f"e_{k} is not in C_H")
    Hk = sub_cmonoid(H, ctx, k)
    Q = ctx.quotient(k)
    imgs = tuple(ctx.to_quotient(k, ctx.prime_classes[p]) for p in primes_of(ctx, k))
    G = from_abelian(Q)
    B = bg_presentation(G)
    return Transfer(k, Hk, Q, imgs, B)


@dataclass(frozen=True)
class TransferReport:
    k: int
    box_cap: int
    checked: int
    t1_surjective: bool
    t1_units: bool
    t2: bool
    lengths: bool
    counterexamples: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return self.t1_surjective and self.t1_units and self.t2 and self.lengths


def verify_transfer_axioms(theta: Transfer, box_cap: int = 6, samples: int | None = None, seed: int = 0) -> TransferReport:
    """(T1), (T2) and preservation of lengths on the box of total degree ``box_cap``.

    With ``samples`` only that many elements of ``H_k`` (drawn with ``seed``) are
    used for (T2) and lengths; (T1) always runs over the whole box.
    """
    Hk, B = theta.Hk, theta.B
    LH = box_lengths(Hk, box_cap)
    LB = box_lengths(B, box_cap)
    bad: list[str] = []
    image = {theta.sequence(e) for _, e in LH}
    missing = [s for _, s in LB if s not in image]
    t1s = not missing
    if missing:
        bad.append(f"T1: {B.element(0, missing[0])} has no preimage")
    t1u = all(any(e) == any(theta.sequence(e)) for _, e in LH)
    if not t1u:
        bad.append("T1: a non-unit maps to the empty sequence")
    keys = sorted(LH, key=lambda c: (sum(c[1]), c))
    if samples is not None and samples < len(keys):
        keys = sorted(random.Random(seed).sample(keys, samples), key=lambda c: (sum(c[1]), c))
    nu = Hk.units.order
    U = Hk.units
    t2 = lengths_ok = True
    for u, e in keys:
        seq = theta.sequence(e)
        a = Hk.element(u, e)
        if LH[(u, e)] != LB[(0, seq)]:
            lengths_ok = False
            bad.append(f"lengths differ at {a}")
        # every splitting theta(a) = b c into elements of B must lift
        lifts = set()
        for part in itertools.product(*(range(x + 1) for x in e)):
            rest = tuple(x - y for x, y in zip(e, part))
            for v in range(nu):
                w = U.index(U.add(U.element(u), U.neg(U.element(v))))
                if (v, part) in LH and (w, rest) in LH:
                    lifts.add(theta.sequence(part))
        for b in itertools.product(*(range(x + 1) for x in seq)):
            c = tuple(x - y for x, y in zip(seq, b))
            if (0, b) in LB and (0, c) in LB and b not in lifts:
                t2 = False
                bad.append(f"T2: splitting of theta({a}) does not lift")
                break
    return TransferReport(theta.k, box_cap, len(keys), t1s, t1u, t2, lengths_ok, tuple(bad))
