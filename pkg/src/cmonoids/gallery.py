"""Worked instances: a non-seminormal two-prime monoid, the Clifford-chain
family ``B = {eps S : iota(eps) + sigma(S) idempotent}`` and hand-built
labelled class semigroups that break one criterion property each.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .abelian import TRIVIAL, FiniteAbelianGroup, GroupHom, hom_image
from .cmonoid import ClassSemigroup, CMonoidPresentation, Recognizer, class_semigroup, from_predicate, from_recognizer
from .criterion import LabeledSemigroup
from .errors import InvalidChain, NonSurjectiveBonding
from .factorial import Ambient
from .semigroup import FinCommSemigroup, find_isomorphism, idempotents, strong_semilattice_of_groups, validate


def build_remark313() -> CMonoidPresentation:
    """``{1, p1 p2} cup {p1^(2k) p2} cup {p1^t p2^s : s >= 2}`` in ``F(p1, p2)``."""

    def member(unit, exps):
        t, s = exps
        return (t, s) in ((0, 0), (1, 1)) or (s == 1 and t % 2 == 0) or s >= 2

    return from_predicate(Ambient.free(2), member, alpha=2, name="remark313")


# -- Clifford chains --------------------------------------------------------


def default_bonding(G: FiniteAbelianGroup, K: FiniteAbelianGroup) -> GroupHom:
    """Reduce the last invariant factors of ``G`` onto those of ``K`` and drop the rest."""
    r, s = G.rank, K.rank
    if s > r or any(G.invariant_factors[r - s + j] % K.invariant_factors[j] for j in range(s)):
        raise InvalidChain(f"no default bonding {G} -> {K}; pass one explicitly")
    imgs = []
    for i in range(r):
        j = i - (r - s)
        imgs.append(tuple(int(q == j) for q in range(s)))
    return GroupHom(G, K, tuple(imgs))


@dataclass
class Example43Spec:
    groups: Sequence[FiniteAbelianGroup]  # G_0 > G_1 > ... > G_n = 1
    bondings: Mapping[tuple[int, int], GroupHom] = field(default_factory=dict)  # (i, i+1) -> G_i -> G_{i+1}
    twist: GroupHom | None = None  # iota(eps) = (eps, twist(eps)), twist: G_0 -> Z/2
    modulus: int = 2  # the extra cyclic summand; 2 gives the half-factorial family

    @property
    def n(self) -> int:
        return len(self.groups) - 1


@dataclass(frozen=True)
class CliffordChain:
    semigroup: FinCommSemigroup
    elements: tuple[tuple[int, tuple[int, ...], int], ...]  # (component, g, z)
    bond: Mapping[tuple[int, int], GroupHom]  # psi_{i,j} for i < j

    def index(self, i: int, g, z: int) -> int:
        return self.elements.index((i, tuple(g), z))


def _validated_bondings(spec: Example43Spec) -> dict:
    G = list(spec.groups)
    n = len(G) - 1
    if n < 1:
        raise InvalidChain("need at least two groups in the chain")
    if G[-1].order != 1:
        raise InvalidChain("the last group of the chain must be trivial")
    for i in range(n):
        if G[i].order <= G[i + 1].order:
            raise InvalidChain(f"G_{i} = {G[i]} is not strictly larger than G_{i + 1} = {G[i + 1]}")
    step = {}
    for i in range(n):
        f = spec.bondings.get((i, i + 1)) or default_bonding(G[i], G[i + 1])
        if f.domain != G[i] or f.codomain != G[i + 1]:
            raise InvalidChain(f"bonding ({i}, {i + 1}) has the wrong domain or codomain")
        if len(hom_image(f)) != G[i + 1].order:
            raise NonSurjectiveBonding(f"bonding G_{i} -> G_{i + 1} is not surjective")
        step[(i, i + 1)] = f
    bond = dict(step)
    for i in range(n):
        for j in range(i + 2, n + 1):
            bond[(i, j)] = step[(j - 1, j)].compose(bond[(i, j - 1)])
    for key, f in spec.bondings.items():
        i, j = key
        if j != i + 1:
            if not (0 <= i < j <= n):
                raise InvalidChain(f"bonding key {key} out of range")
            if any(f(x) != bond[key](x) for x in G[i].generators()):
                raise InvalidChain(f"bonding {key} is not the composite of the consecutive ones")
    return bond


def clifford_chain(spec: Example43Spec) -> CliffordChain:
    """``C = C_0 cup ... cup C_n`` with ``C_i = G_i + Z/m`` and ``C_i + e_j = C_j`` for ``i < j``."""
    G = list(spec.groups)
    m = spec.modulus
    bond = _validated_bondings(spec)
    elems = [(i, g, z) for i in range(len(G)) for g in G[i].elements() for z in range(m)]
    pos = {x: k for k, x in enumerate(elems)}

    def move(i, j, g):
        return g if i == j else bond[(i, j)](g)

    table = []
    for i, g, z in elems:
        row = []
        for j, h, w in elems:
            k = max(i, j)
            row.append(pos[(k, G[k].add(move(i, k, g), move(j, k, h)), (z + w) % m)])
        table.append(row)
    labels = [f"c{i}[{''.join(map(str, g)) or 'e'}|{z}]" for i, g, z in elems]
    return CliffordChain(validate(table, labels), tuple(elems), bond)


@dataclass(frozen=True)
class Example43:
    spec: Example43Spec
    presentation: CMonoidPresentation
    chain: CliffordChain
    iota: tuple[int, ...]  # chain index of iota(eps) for every unit index

    @property
    def C(self) -> FinCommSemigroup:
        return self.chain.semigroup

    def lam(self, uidx: int, exps: Sequence[int]) -> int:
        """``lambda(eps S) = iota(eps) + sigma(S)`` as a chain index."""
        return self.presentation.image(uidx, exps)

    def expected(self) -> LabeledSemigroup:
        """The class semigroup predicted for ``B``: ``C`` itself with ``C_B = E(C)``."""
        C = self.C
        return LabeledSemigroup(
            C, frozenset(idempotents(C)), frozenset(self.iota), frozenset(range(C.n)),
            tuple(range(C.n)), self.iota[0], "example43",
        )


def build_example43(spec: Example43Spec) -> Example43:
    if spec.modulus != 2:
        raise InvalidChain("the monoid construction uses the summand Z/2")
    chain = clifford_chain(spec)
    C = chain.semigroup
    G0 = spec.groups[0]
    twist = spec.twist
    if twist is not None and (twist.domain != G0 or twist.codomain != FiniteAbelianGroup((2,))):
        raise InvalidChain("twist must be a homomorphism G_0 -> Z/2")
    iota = tuple(chain.index(0, g, twist(g)[0] if twist else 0) for g in G0.elements())
    amb = Ambient(G0, C.labels)
    rec = Recognizer(C, iota[0], iota, tuple(range(C.n)), frozenset(idempotents(C)))
    name = "example43(" + " > ".join(str(g) for g in spec.groups) + ")"
    H = from_recognizer(amb, rec, name=name)
    return Example43(spec, H, chain, iota)


@dataclass(frozen=True)
class Example43Checks:
    lambda_determines_class: bool
    psi_isomorphism: bool
    units_iso: bool
    reduced_is_full: bool
    CH_is_idempotents: bool

    @property
    def passed(self) -> bool:
        return all((self.lambda_determines_class, self.psi_isomorphism, self.units_iso, self.reduced_is_full, self.CH_is_idempotents))


def check_example43(ex: Example43, cs: ClassSemigroup | None = None, degree: int = 2) -> Example43Checks:
    """The four structural assertions, on all elements up to ``degree``."""
    H = ex.presentation
    cs = cs or class_semigroup(H)
    C = ex.C
    cls_to_lam: dict = {}
    lam_to_cls: dict = {}
    ok1 = True
    for u, exps, _ in H.elements_by_degree(degree):
        c, l = cs.class_of_cell(u, exps), ex.lam(u, exps)
        if cls_to_lam.setdefault(c, l) != l or lam_to_cls.setdefault(l, c) != c:
            ok1 = False
    psi = {c: ex.lam(H.units.index(r.unit), r.exps) for c, r in enumerate(cs.representatives)}
    star = sorted(cs.C_star)
    ok2 = (
        sorted(psi[c] for c in star) == list(range(C.n))
        and all(psi[cs.carrier.add(a, b)] == C.add(psi[a], psi[b]) for a in star for b in star)
    )
    ok3 = len(cs.C_units) == H.units.order and {psi[c] for c in cs.C_units} == set(ex.iota)
    ok4 = set(cs.C_star) == set(range(cs.n))
    E = {c for c in star if cs.carrier.add(c, c) == c}
    ok5 = set(cs.C_H) == E
    return Example43Checks(ok1, ok2, ok3, ok4, ok5)


def example43_instances() -> list[Example43Spec]:
    Z = lambda *f: FiniteAbelianGroup(f)
    return [
        Example43Spec([Z(2), TRIVIAL]),
        Example43Spec([Z(4), TRIVIAL]),
        Example43Spec([Z(2, 2), TRIVIAL]),
        Example43Spec([Z(4), Z(2), TRIVIAL]),
        Example43Spec([Z(2, 2), Z(2), TRIVIAL]),
    ]


# -- labelled fixtures ------------------------------------------------------


@dataclass(frozen=True)
class Fixture:
    name: str
    semigroup: LabeledSemigroup
    violates: str | None  # "P1".."P4", or None when every property holds


def _all_labels(S: FinCommSemigroup, C_H, units, name) -> LabeledSemigroup:
    ident = S.identity()
    return LabeledSemigroup(S, frozenset(C_H), frozenset(units), frozenset(range(S.n)), tuple(range(S.n)), ident, name)


def _chain_fixture(spec: Example43Spec, name: str) -> LabeledSemigroup:
    ch = clifford_chain(spec)
    S = ch.semigroup
    units = [ch.index(0, g, 0) for g in spec.groups[0].elements()]
    return _all_labels(S, idempotents(S), units, name)


def fixture_semigroups() -> list[Fixture]:
    Z2 = FiniteAbelianGroup((2,))
    V = FiniteAbelianGroup((2, 2))
    out = [Fixture("chain Z/2 > 1 with Z/2 summand", _chain_fixture(Example43Spec([Z2, TRIVIAL]), "pass"), None)]
    # C_n' = Z/3
    out.append(Fixture("chain Z/2 > 1 with Z/3 summand", _chain_fixture(Example43Spec([Z2, TRIVIAL], modulus=3), "P1"), "P1"))
    # C_0 = V (units (a, 0)), C_1 = Z/2 via (a, z) -> a + z: phi_1 is onto, so the preimage is all of C_0
    elems = [(0, (a,), z) for a in range(2) for z in range(2)] + [(1, (), z) for z in range(2)]
    pos = {x: k for k, x in enumerate(elems)}

    def add(x, y):
        (i, g, z), (j, h, w) = x, y
        if max(i, j) == 0:
            return (0, ((g[0] + h[0]) % 2,), (z + w) % 2)
        sg = (g[0] + z) if i == 0 else z
        sh = (h[0] + w) if j == 0 else w
        return (1, (), (sg + sh) % 2)

    table = [[pos[add(x, y)] for y in elems] for x in elems]
    labels = [f"c{i}[{''.join(map(str, g)) or 'e'}|{z}]" for i, g, z in elems]
    S = validate(table, labels)
    out.append(Fixture("chain with a twisted bonding", _all_labels(S, idempotents(S), [pos[(0, (a,), 0)] for a in range(2)], "P2"), "P2"))
    # diamond [1] > e1, e2 > e3 with C_0 = V, C_1 = C_2 = V/<(1,1)>, C_3 = 1
    sum_map = GroupHom(V, Z2, ((1,), (1,)))
    meet = [[0, 1, 2, 3], [1, 1, 3, 3], [2, 3, 2, 3], [3, 3, 3, 3]]
    to_triv = GroupHom(Z2, TRIVIAL, ((),))
    bonds = {
        (0, 1): sum_map, (0, 2): sum_map, (0, 3): GroupHom(V, TRIVIAL, ((), ())),
        (1, 3): to_triv, (2, 3): to_triv,
    }
    S, el = strong_semilattice_of_groups(meet, [V, Z2, Z2, TRIVIAL], bonds)
    units = [k for k, (a, _) in enumerate(el) if a == 0]
    out.append(Fixture("diamond with equal kernels", _all_labels(S, idempotents(S), units, "P3"), "P3"))
    # diamond of trivial groups with only the top and bottom in C_H
    S, el = strong_semilattice_of_groups(meet, [TRIVIAL] * 4, {k: GroupHom(TRIVIAL, TRIVIAL, ()) for k in bonds})
    E = [k for k, (a, _) in enumerate(el) if a in (0, 3)]
    out.append(Fixture("diamond of idempotents", _all_labels(S, E, [0], "P4"), "P4"))
    return out


def expected_matches(ex: Example43, cs: ClassSemigroup | None = None) -> bool:
    """``C(B, F)`` is isomorphic to the chain ``C``."""
    cs = cs or class_semigroup(ex.presentation)
    return find_isomorphism(cs.carrier, ex.C) is not None
