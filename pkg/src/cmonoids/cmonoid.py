"""Finitely presented C-monoids inside ``F = F^x * F(P)`` and their class semigroups.

A presentation stores membership in one of two exact forms:

* a *box pattern*: a boolean array indexed by ``(unit index, v_1, ..., v_d)``
  with every ``v_i`` in ``[0, 2*alpha)``; membership of an arbitrary element is
  the pattern at its ``alpha``-reduced exponent vector;
* a *recognizer*: a finite commutative monoid ``M`` with images of the units
  and primes and an accepting subset ``X``; ``a`` lies in ``H`` iff its image
  lies in ``X``.  This form scales to many primes because nothing is
  enumerated over the exponent box.

Class semigroups are computed as syntactic (Myhill-Nerode) classes: two
elements are H-equivalent iff their residuals ``{x : xy in H}`` coincide, and
residuals are explored breadth first from ``[1]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .abelian import (
    FiniteAbelianGroup,
    are_isomorphic,
    group_from_table,
    quotient_by_relations,
)
from .errors import (
    AmbientMismatch,
    InfiniteQuotient,
    InvalidPresentation,
    NoAlphaFound,
    NotACongruence,
    NotDense,
    PreconditionNotSeminormal,
)
from .factorial import Ambient, FactorialElement, alpha_reduce, reduce_exponent
from .semigroup import (
    CliffordDecomposition,
    FinCommSemigroup,
    clifford_decomposition,
    constituent_group,
    subsemigroup,
    validate,
)

DEFAULT_ALPHA_CAP = 8
PATTERN_CELL_LIMIT = 1 << 23
MULTIPLICATIVITY_PAIRS = 200_000
FORMAT_HEADER = "cmonoid-presentation 1"


def _unit_perm(U: FiniteAbelianGroup, g) -> np.ndarray:
    """``perm[u] = index(u + g)``"""
    return np.array([U.index(U.add(U.element(u), g)) for u in range(U.order)], dtype=np.int64)


def _next_index(alpha: int) -> np.ndarray:
    """Exponent successor inside the reduced window: ``k -> reduce(k + 1)``."""
    return np.array([reduce_exponent(k + 1, alpha) for k in range(2 * alpha)], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class Recognizer:
    """Membership through a finite commutative monoid ``M``: ``a in H`` iff ``mu(a) in accept``."""

    monoid: FinCommSemigroup
    identity: int
    unit_images: tuple[int, ...]
    prime_images: tuple[int, ...]
    accept: frozenset

    def powers(self, m: int, count: int) -> list[int]:
        out = [self.identity]
        for _ in range(count - 1):
            out.append(self.monoid.add(out[-1], m))
        return out

    def reachable(self, prime_mask: Sequence[bool] | None = None) -> list[int]:
        """Submonoid of ``M`` generated by the unit images and (selected) prime images."""
        gens = list(self.unit_images)
        gens += [m for i, m in enumerate(self.prime_images) if prime_mask is None or prime_mask[i]]
        gens = list(dict.fromkeys(gens))
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.monoid.add(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return sorted(seen)

    def period_alpha(self) -> int:
        """Smallest ``alpha`` with ``(e + alpha) mu(p) = e mu(p)`` for all ``e >= alpha`` and all ``p``."""
        index, period = 1, 1
        for m in set(self.prime_images):
            seen = {}
            x, k = m, 1
            while x not in seen:
                seen[x] = k
                x = self.monoid.add(x, m)
                k += 1
            index = max(index, seen[x])
            period = math.lcm(period, k - seen[x])
        return period * -(-index // period)


@dataclass(frozen=True, eq=False)
class CMonoidPresentation:
    ambient: Ambient
    alpha: int
    pattern: np.ndarray | None = None
    recognizer: Recognizer | None = None
    generators: tuple[FactorialElement, ...] = ()
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if (self.pattern is None) == (self.recognizer is None):
            raise InvalidPresentation("exactly one of pattern / recognizer must be given")
        if self.alpha < 1:
            raise InvalidPresentation("alpha must be positive")
        if self.pattern is not None:
            shape = (self.ambient.units.order,) + (2 * self.alpha,) * self.ambient.d
            if self.pattern.shape != shape:
                raise InvalidPresentation(f"pattern has shape {self.pattern.shape}, expected {shape}")
            self.pattern.setflags(write=False)
        else:
            r = self.recognizer
            if len(r.unit_images) != self.ambient.units.order or len(r.prime_images) != self.ambient.d:
                raise InvalidPresentation("recognizer images do not match the ambient monoid")

    # -- basic access ------------------------------------------------------

    @property
    def units(self) -> FiniteAbelianGroup:
        return self.ambient.units

    @property
    def d(self) -> int:
        return self.ambient.d

    @property
    def backend(self) -> str:
        return "box" if self.pattern is not None else "recognizer"

    def _power_tables(self) -> list[list[int]]:
        if "powers" not in self._cache:
            r = self.recognizer
            self._cache["powers"] = [r.powers(m, 2 * self.alpha) for m in r.prime_images]
        return self._cache["powers"]

    def image(self, uidx: int, exps: Sequence[int]) -> int:
        """Recognizer image ``mu`` of an element."""
        r = self.recognizer
        T = r.monoid.table
        pw = self._power_tables()
        acc = r.unit_images[uidx]
        for i, e in enumerate(exps):
            if e:
                acc = int(T[acc, pw[i][reduce_exponent(e, self.alpha)]])
        return acc

    def member(self, uidx: int, exps: Sequence[int]) -> bool:
        if self.pattern is not None:
            return bool(self.pattern[(uidx,) + tuple(reduce_exponent(e, self.alpha) for e in exps)])
        return self.image(uidx, exps) in self.recognizer.accept

    def squeezed(self):
        """``(Q, active, inert)``: the box pattern with constant prime axes fixed at 0."""
        if "squeezed" not in self._cache:
            P = self.pattern
            inert = [k for k in range(self.d) if (np.take(P, [0], axis=k + 1) == P).all()]
            active = [k for k in range(self.d) if k not in inert]
            Q = P[(slice(None),) + tuple(0 if k in inert else slice(None) for k in range(self.d))]
            self._cache["squeezed"] = (Q, active, inert)
        return self._cache["squeezed"]

    def box_pattern(self, limit: int = PATTERN_CELL_LIMIT) -> np.ndarray:
        """The membership pattern on the reduced box (materialized for recognizers)."""
        if self.pattern is not None:
            return self.pattern
        size = self.units.order * (2 * self.alpha) ** self.d
        if size > limit:
            raise ValueError(f"reduced box has {size} cells, above the limit {limit}")
        if "pattern" not in self._cache:
            r = self.recognizer
            T = r.monoid.table
            arr = np.array(r.unit_images, dtype=np.int64)
            for pw in self._power_tables():
                arr = T[arr[..., None], np.array(pw)]
            acc = np.zeros(r.monoid.n, dtype=bool)
            acc[list(r.accept)] = True
            pat = acc[arr]
            pat.setflags(write=False)
            self._cache["pattern"] = pat
        return self._cache["pattern"]

    def elements_by_degree(self, cap: int) -> Iterator[tuple[int, tuple[int, ...], bool]]:
        """All ``(unit index, exps, member)`` with total degree ``<= cap``, degree by degree."""
        d = self.d
        nu = self.units.order
        if self.recognizer is not None:
            r = self.recognizer
            T = r.monoid.table
            pw = self._power_tables()
            one = [pw[i][1] for i in range(d)]
            layer = [((0,) * d, r.identity, -1)]  # exps, image of the prime part, last prime used
            for deg in range(cap + 1):
                for exps, m, _ in layer:
                    for u in range(nu):
                        x = int(T[r.unit_images[u], m])
                        yield u, exps, x in r.accept
                if deg == cap:
                    break
                nxt = []
                for exps, m, last in layer:
                    for i in range(max(last, 0), d):
                        e = list(exps)
                        e[i] += 1
                        nxt.append((tuple(e), int(T[m, one[i]]), i))
                layer = nxt
        else:
            layer = [(0,) * d]
            for deg in range(cap + 1):
                for exps in layer:
                    red = tuple(reduce_exponent(e, self.alpha) for e in exps)
                    for u in range(nu):
                        yield u, exps, bool(self.pattern[(u,) + red])
                if deg == cap:
                    break
                nxt = []
                for exps in layer:
                    last = max((i for i, e in enumerate(exps) if e), default=0)
                    for i in range(last, d):
                        e = list(exps)
                        e[i] += 1
                        nxt.append(tuple(e))
                layer = nxt

    def element(self, uidx: int, exps: Sequence[int]) -> FactorialElement:
        return FactorialElement(self.ambient, self.units.element(uidx), tuple(exps))

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"CMonoidPresentation{label}(units={self.units}, primes={self.d}, alpha={self.alpha}, {self.backend})"


# -- construction ----------------------------------------------------------


def _closure_box(ambient: Ambient, generators: Sequence[FactorialElement], L: int) -> np.ndarray:
    """Exact membership of the truncated monoid generated by ``generators`` on ``[0, L)^P``."""
    U = ambient.units
    d = ambient.d
    box = np.zeros((U.order,) + (L,) * d, dtype=bool)
    box[(0,) + (0,) * d] = True
    moves = []
    for g in generators:
        if g.ambient != ambient:
            raise AmbientMismatch("generator from a different ambient monoid")
        if any(e >= L for e in g.exps):
            continue
        moves.append((_unit_perm(U, g.unit), g.exps))
    while True:
        new = box.copy()
        for perm, exps in moves:
            src = tuple(slice(0, L - e) for e in exps)
            dst = tuple(slice(e, L) for e in exps)
            moved = np.zeros_like(box)
            moved[perm] = box
            new[(slice(None),) + dst] |= moved[(slice(None),) + src]
        if np.array_equal(new, box):
            return box
        box = new


def _is_periodic(big: np.ndarray, alpha: int, axes: Iterable[int] | None = None) -> bool:
    """Slices ``j`` and ``j + alpha`` agree for ``j`` in ``[alpha, 3*alpha)`` along each axis."""
    d = big.ndim - 1
    for k in range(d) if axes is None else axes:
        a = np.take(big, np.arange(alpha, 3 * alpha), axis=k + 1)
        b = np.take(big, np.arange(2 * alpha, 4 * alpha), axis=k + 1)
        if not np.array_equal(a, b):
            return False
    return True


def _truncate(big: np.ndarray, alpha: int) -> np.ndarray:
    d = big.ndim - 1
    return np.ascontiguousarray(big[(slice(None),) + (slice(0, 2 * alpha),) * d])


def from_generators(
    ambient: Ambient,
    generators: Sequence[FactorialElement],
    alpha_hint: int | None = None,
    alpha_cap: int = DEFAULT_ALPHA_CAP,
    name: str = "",
    require_dense: bool = True,
) -> CMonoidPresentation:
    """Presentation of ``[generators]`` with the smallest certified ``alpha``."""
    generators = tuple(generators)
    candidates = [alpha_hint] if alpha_hint else range(1, alpha_cap + 1)
    for alpha in candidates:
        big = _closure_box(ambient, generators, 4 * alpha)
        if _is_periodic(big, alpha):
            pres = CMonoidPresentation(ambient, alpha, pattern=_truncate(big, alpha), generators=generators, name=name)
            certify(pres, require_dense=require_dense)
            return pres
    raise NoAlphaFound(alpha_hint or alpha_cap, "membership is not periodic on the verification box")


def from_predicate(
    ambient: Ambient,
    predicate: Callable[[tuple[int, ...], tuple[int, ...]], bool],
    alpha: int | None = None,
    alpha_cap: int = DEFAULT_ALPHA_CAP,
    name: str = "",
    require_dense: bool = True,
) -> CMonoidPresentation:
    """Presentation of ``{a : predicate(unit, exps)}``; the predicate must be defined on all of ``F``."""
    U = ambient.units
    candidates = [alpha] if alpha else range(1, alpha_cap + 1)
    for a in candidates:
        L = 4 * a
        big = np.zeros((U.order,) + (L,) * ambient.d, dtype=bool)
        for idx in np.ndindex(*big.shape):
            big[idx] = bool(predicate(U.element(idx[0]), idx[1:]))
        if _is_periodic(big, a):
            pres = CMonoidPresentation(ambient, a, pattern=_truncate(big, a), name=name)
            certify(pres, require_dense=require_dense)
            return pres
    raise NoAlphaFound(alpha or alpha_cap, "predicate is not periodic on the verification box")


def from_pattern(ambient: Ambient, alpha: int, pattern, name: str = "", generators=(), require_dense: bool = True) -> CMonoidPresentation:
    pres = CMonoidPresentation(ambient, alpha, pattern=np.array(pattern, dtype=bool), generators=tuple(generators), name=name)
    certify(pres, require_dense=require_dense)
    return pres


def from_recognizer(ambient: Ambient, recognizer: Recognizer, name: str = "", require_dense: bool = True) -> CMonoidPresentation:
    pres = CMonoidPresentation(ambient, recognizer.period_alpha(), recognizer=recognizer, name=name)
    certify(pres, require_dense=require_dense)
    return pres


def certify(pres: CMonoidPresentation, seed: int = 0, require_dense: bool = True) -> None:
    """Check ``1 in H``, the unit trace, multiplicativity and (optionally) density."""
    U = pres.units
    d = pres.d
    zero = (0,) * d
    if not pres.member(0, zero):
        raise InvalidPresentation("1 is not in H")
    trace = {u for u in range(U.order) if pres.member(u, zero)}
    for u in trace:
        for w in trace:
            if U.index(U.add(U.element(u), U.element(w))) not in trace:
                raise InvalidPresentation("H intersected with the units is not a subgroup")
    a2 = 2 * pres.alpha
    if pres.pattern is not None:
        Q, active, _ = pres.squeezed()
        cells = np.argwhere(Q)
        add_u = np.array([[U.index(U.add(U.element(x), U.element(y))) for y in range(U.order)] for x in range(U.order)])
        red = np.array([reduce_exponent(k, pres.alpha) for k in range(2 * a2)])
        n = len(cells)
        if n * n <= MULTIPLICATIVITY_PAIRS:
            i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
            i, j = i.ravel(), j.ravel()
        else:
            rng = np.random.default_rng(seed)
            i = rng.integers(0, n, MULTIPLICATIVITY_PAIRS)
            j = rng.integers(0, n, MULTIPLICATIVITY_PAIRS)
        a, b = cells[i], cells[j]
        prod = np.concatenate([add_u[a[:, 0], b[:, 0]][:, None], red[a[:, 1:] + b[:, 1:]]], axis=1)
        ok = Q[tuple(prod.T)]
        if not ok.all():
            k = int(np.flatnonzero(~ok)[0])
            raise InvalidPresentation(f"H is not closed under multiplication: cells {a[k].tolist()} * {b[k].tolist()}")
    else:
        r = pres.recognizer
        T = r.monoid.table
        reach = r.reachable()
        X = [m for m in reach if m in r.accept]
        for x in X:
            for y in X:
                if int(T[x, y]) not in r.accept:
                    raise InvalidPresentation("accepting set is not closed under the monoid operation")
    if require_dense:
        for p, seen in enumerate(observed_valuations(pres)):
            if not _cofinite(pres.alpha, seen):
                raise NotDense(f"v_{pres.ambient.primes[p]}(H) is not cofinite (observed {seen})")


def observed_valuations(pres: CMonoidPresentation) -> list[list[int]]:
    """For each prime, the values ``v_p(a)`` in ``[0, 2*alpha)`` taken by elements ``a`` of ``H``."""
    a2 = 2 * pres.alpha
    out = []
    if pres.pattern is not None:
        Q, active, _ = pres.squeezed()
        for p in range(pres.d):
            if p not in active:
                out.append(list(range(a2)))
                continue
            pos = active.index(p)
            other = tuple(q + 1 for q in range(len(active)) if q != pos)
            out.append([int(e) for e in np.flatnonzero(Q.any(axis=(0,) + other))])
        return out
    r = pres.recognizer
    T = r.monoid.table
    pw = pres._power_tables()
    for p in range(pres.d):
        rest = r.reachable([q != p for q in range(pres.d)])
        out.append([e for e in range(a2) if any(int(T[pw[p][e], m]) in r.accept for m in rest)])
    return out


def _cofinite(alpha: int, seen: list[int]) -> bool:
    # values >= alpha recur with period alpha, so v_p(H) is generated by seen and alpha
    return any(e >= alpha for e in seen) and math.gcd(*seen, alpha) == 1


def is_dense(pres: CMonoidPresentation) -> bool:
    return all(_cofinite(pres.alpha, seen) for seen in observed_valuations(pres))


# -- membership and H-equivalence ----------------------------------------


def _check_ambient(H: CMonoidPresentation, a: FactorialElement) -> None:
    if a.ambient != H.ambient:
        raise AmbientMismatch("element does not live in the ambient monoid of H")


def membership(H: CMonoidPresentation, a: FactorialElement) -> bool:
    _check_ambient(H, a)
    return H.member(H.units.index(a.unit), a.exps)


def _residual_box(H: CMonoidPresentation, y: FactorialElement) -> np.ndarray:
    """``x -> membership(x y)`` on the reduced box, by index arithmetic."""
    P = H.box_pattern()
    U = H.units
    uperm = _unit_perm(U, y.unit)
    idx = [uperm] + [np.array([reduce_exponent(k + e, H.alpha) for k in range(2 * H.alpha)]) for e in y.exps]
    return P[np.ix_(*idx)]


def h_equivalent(H: CMonoidPresentation, y: FactorialElement, y2: FactorialElement) -> bool:
    """Exact test of ``y^-1 H = y2^-1 H`` over all test elements of the reduced box."""
    _check_ambient(H, y)
    _check_ambient(H, y2)
    if H.pattern is not None:
        return bool(np.array_equal(_residual_box(H, y), _residual_box(H, y2)))
    r = H.recognizer
    T = r.monoid.table
    m1 = H.image(H.units.index(y.unit), y.exps)
    m2 = H.image(H.units.index(y2.unit), y2.exps)
    return all((int(T[m1, x]) in r.accept) == (int(T[m2, x]) in r.accept) for x in r.reachable())


# -- class semigroups ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ClassSemigroup:
    presentation: CMonoidPresentation
    carrier: FinCommSemigroup
    representatives: tuple[FactorialElement, ...]
    C_H: frozenset
    C_units: frozenset
    C_star: frozenset
    _lookup: Callable = field(repr=False)

    identity: int = 0  # [1] always has the smallest representative

    @property
    def n(self) -> int:
        return self.carrier.n

    def class_of(self, a: FactorialElement) -> int:
        _check_ambient(self.presentation, a)
        return self._lookup(self.presentation.units.index(a.unit), a.exps)

    def class_of_cell(self, uidx: int, exps: Sequence[int]) -> int:
        return self._lookup(uidx, exps)

    def prime_class(self, p: int) -> int:
        return self.class_of(self.presentation.ambient.prime(p))

    def unit_class(self, eps) -> int:
        return self.class_of(self.presentation.ambient.unit(eps))

    def label(self, x: int) -> str:
        return f"[{self.representatives[x]}]"

    def reduced(self) -> tuple[FinCommSemigroup, list[int]]:
        """``C*(H,F)`` as a semigroup, with the carrier indices of its elements."""
        return subsemigroup(self.carrier, self.C_star)


def _box_classes(H: CMonoidPresentation):
    P = H.pattern
    U = H.units
    d = H.d
    a2 = 2 * H.alpha
    nxt = _next_index(H.alpha)
    Q, active, inert = H.squeezed()

    gens = []  # (kind, data)
    for g in U.generators():
        gens.append(("unit", _unit_perm(U, g)))
    for pos, k in enumerate(active):
        gens.append(("prime", pos))

    def move(R, gen):
        kind, data = gen
        if kind == "unit":
            return R[data]
        return np.take(R, nxt, axis=data + 1)

    key = lambda R: np.packbits(R).tobytes()
    residuals = [Q]
    index = {key(Q): 0}
    trans = [[] for _ in gens]
    i = 0
    while i < len(residuals):
        R = residuals[i]
        for gi, gen in enumerate(gens):
            S = move(R, gen)
            k = key(S)
            if k not in index:
                index[k] = len(residuals)
                residuals.append(S)
            trans[gi].append(index[k])
        i += 1
    nclass = len(residuals)
    trans = [np.array(t, dtype=np.int64) for t in trans]
    accept = np.array([bool(R[(0,) * R.ndim]) for R in residuals])

    # class of every cell of the squeezed box
    cls_u = np.full(U.order, -1, dtype=np.int64)
    cls_u[0] = 0
    frontier = [0]
    unit_gens = [(gi, data) for gi, (kind, data) in enumerate(gens) if kind == "unit"]
    while frontier:
        new = []
        for u in frontier:
            for gi, perm in unit_gens:
                w = int(perm[u])
                if cls_u[w] < 0:
                    cls_u[w] = trans[gi][cls_u[u]]
                    new.append(w)
        frontier = new
    cls = cls_u
    for pos in range(len(active)):
        t = trans[len(unit_gens) + pos]
        layers = [cls]
        for _ in range(a2 - 1):
            layers.append(t[layers[-1]])
        cls = np.stack(layers, axis=-1)

    # consistency: the partition is a congruence matching the pattern
    for gi, (kind, data) in enumerate(gens):
        if kind == "unit":
            moved = cls[data]
        else:
            moved = np.take(cls, nxt, axis=data + 1)
        if not np.array_equal(trans[gi][cls], moved):
            raise NotACongruence("class transitions disagree with reduced multiplication")
    if not np.array_equal(accept[cls], Q):
        raise NotACongruence("class partition does not refine membership")
    return cls, nclass, gens, trans, inert, active


def _class_semigroup_box(H: CMonoidPresentation) -> ClassSemigroup:
    cls, nclass, gens, trans, inert, active = _box_classes(H)
    U = H.units
    d = H.d
    flat = cls.ravel()
    _, first = np.unique(flat, return_index=True)
    order = np.argsort(first)  # old class ids sorted by first occurrence (lex order of cells)
    relabel = np.empty(nclass, dtype=np.int64)
    relabel[order] = np.arange(nclass)
    cls = relabel[cls]
    reps = []
    for pos in np.sort(first):
        cell = np.unravel_index(int(pos), cls.shape)
        exps = [0] * d
        for j, k in enumerate(active):
            exps[k] = int(cell[j + 1])
        reps.append(H.element(int(cell[0]), exps))

    def lookup(uidx, exps):
        red = tuple(reduce_exponent(int(exps[k]), H.alpha) for k in active)
        return int(cls[(uidx,) + red])

    table = np.empty((nclass, nclass), dtype=np.int64)
    for x, rx in enumerate(reps):
        for y, ry in enumerate(reps):
            prod = rx * ry
            table[x, y] = lookup(U.index(prod.unit), prod.exps)
    carrier = validate(table, [f"[{r}]" for r in reps])
    C_H = frozenset(np.unique(cls[H.squeezed()[0]]).tolist())
    C_units = frozenset(np.unique(cls[(slice(None),) + (0,) * len(active)]).tolist())
    nonunit = np.ones(cls.shape, dtype=bool)
    nonunit[(slice(None),) + (0,) * len(active)] = False
    star = set(np.unique(cls[nonunit]).tolist()) | {0}
    if inert:
        star |= C_units  # epsilon * (inert prime) is a non-unit in the class of epsilon
    return ClassSemigroup(H, carrier, tuple(reps), C_H, C_units, frozenset(star), lookup)


def lexmin_cell(H: CMonoidPresentation, target: Callable[[int], bool]) -> tuple[int, tuple[int, ...]] | None:
    """Lexicographically smallest reduced-box ``(unit index, exps)`` whose recognizer image satisfies ``target``."""
    r = H.recognizer
    T = r.monoid.table
    pw = H._power_tables()
    d = H.d
    reach = [None] * (d + 1)
    reach[d] = {r.identity}
    for j in range(d - 1, -1, -1):
        reach[j] = {int(T[m, x]) for m in set(pw[j]) for x in reach[j + 1]}
    ok = lambda cur, j: any(target(int(T[cur, x])) for x in reach[j])
    for u in range(H.units.order):
        cur = r.unit_images[u]
        if not ok(cur, 0):
            continue
        exps = []
        for j in range(d):
            for v in range(2 * H.alpha):
                c = int(T[cur, pw[j][v]])
                if ok(c, j + 1):
                    exps.append(v)
                    cur = c
                    break
        assert target(cur)
        return u, tuple(exps)
    return None


def _class_semigroup_recognizer(H: CMonoidPresentation) -> ClassSemigroup:
    r = H.recognizer
    T = r.monoid.table
    reach = r.reachable()
    acc = np.zeros(r.monoid.n, dtype=bool)
    acc[list(r.accept)] = True
    ridx = np.array(reach)
    groups: dict[bytes, list[int]] = {}
    for m in reach:
        groups.setdefault(acc[T[m, ridx]].tobytes(), []).append(m)
    blocks = list(groups.values())
    block_of = {m: b for b, ms in enumerate(blocks) for m in ms}
    # congruence: equivalent images stay equivalent after any generator
    gens = list(dict.fromkeys(list(r.unit_images) + list(r.prime_images)))
    for ms in blocks:
        for g in gens:
            if len({block_of[int(T[m, g])] for m in ms}) != 1:
                raise NotACongruence("recognizer classes are not stable under multiplication")
    reps_cells = []
    for ms in blocks:
        members = set(ms)
        cell = lexmin_cell(H, members.__contains__)
        reps_cells.append(cell)
    order = sorted(range(len(blocks)), key=lambda b: reps_cells[b])
    new_of = {b: i for i, b in enumerate(order)}
    mclass = {m: new_of[block_of[m]] for m in reach}
    reps = [H.element(*reps_cells[b]) for b in order]

    def lookup(uidx, exps):
        return mclass[H.image(uidx, exps)]

    n = len(reps)
    rep_img = [H.image(H.units.index(x.unit), x.exps) for x in reps]
    table = [[mclass[int(T[rep_img[x], rep_img[y]])] for y in range(n)] for x in range(n)]
    carrier = validate(table, [f"[{x}]" for x in reps])
    C_H = frozenset(mclass[m] for m in reach if m in r.accept)
    C_units = frozenset(mclass[m] for m in r.unit_images)
    nonunit = {int(T[m, p]) for m in reach for p in r.prime_images}
    C_star = frozenset({0} | {mclass[m] for m in nonunit})
    return ClassSemigroup(H, carrier, tuple(reps), C_H, C_units, C_star, lookup)


def class_semigroup(H: CMonoidPresentation) -> ClassSemigroup:
    """``C(H,F)`` with its labelled subsets; cached on the presentation."""
    if "classes" not in H._cache:
        if H.pattern is not None:
            H._cache["classes"] = _class_semigroup_box(H)
        else:
            H._cache["classes"] = _class_semigroup_recognizer(H)
    return H._cache["classes"]


# -- seminormality -------------------------------------------------------


@dataclass(frozen=True)
class SeminormalReport:
    seminormal: bool
    decomposition: CliffordDecomposition  # of C*(H,F), in its own indices
    reduced: FinCommSemigroup
    star_index: tuple[int, ...]  # carrier index of every element of C*
    witness: int | None  # carrier index of a class outside every constituent group

    def carrier_index(self, x: int) -> int:
        return self.star_index[x]


def is_seminormal(H: CMonoidPresentation, cs: ClassSemigroup | None = None) -> SeminormalReport:
    """Decide seminormality through the union-of-groups property of ``C*(H,F)``."""
    cs = cs or class_semigroup(H)
    red, idx = cs.reduced()
    dec = clifford_decomposition(red)
    full = clifford_decomposition(cs.carrier)
    if full.is_union_of_groups != dec.is_union_of_groups:
        raise AssertionError("C(H,F) and C*(H,F) disagree on being unions of groups")
    witness = idx[dec.uncovered[0]] if dec.uncovered else None
    return SeminormalReport(dec.is_union_of_groups, dec, red, tuple(idx), witness)


def _residue_subgroup(H: CMonoidPresentation):
    """Image of ``q(H)`` in ``U + (Z/alpha)^active`` as a mask, with lifts of the generators used."""
    Q, active, _ = H.squeezed()
    U = H.units
    a = H.alpha
    shape = U.invariant_factors + (a,) * len(active)
    mask = np.zeros(shape, dtype=bool)
    mask[(0,) * len(shape)] = True
    used = []
    axes = tuple(range(len(shape)))
    for cell in np.argwhere(Q):
        u = U.element(int(cell[0]))
        res = tuple(u) + tuple(int(e) % a for e in cell[1:])
        if mask[res]:
            continue
        used.append(tuple(u) + tuple(int(e) for e in cell[1:]))
        while True:
            grown = mask | np.roll(mask, res, axis=axes)
            if np.array_equal(grown, mask):
                break
            mask = grown
    return mask, used


def seminormal_bruteforce(H: CMonoidPresentation) -> FactorialElement | None:
    """A certified ``x in (q(H) cap F) minus H`` with ``x^n in H`` for all large ``n``, or ``None``.

    ``x^n`` is eventually periodic in ``n`` with period dividing
    ``lcm(alpha, ord(unit))`` once every exponent has passed ``alpha``, so one
    full period starting at ``n = alpha`` decides the tail exactly.
    """
    U = H.units
    a = H.alpha
    if H.pattern is None:
        r = H.recognizer
        T = r.monoid.table
        reach = r.reachable()
        X = [m for m in reach if m in r.accept]

        def bad(m):
            if m in r.accept or not any(int(T[m, h]) in r.accept for h in X):
                return False
            seen = {}
            x, k = m, 1
            while x not in seen:
                seen[x] = k
                x = r.monoid.add(x, m)
                k += 1
            start = seen[x]
            return all(y in r.accept for y, j in seen.items() if j >= start)

        cell = lexmin_cell(H, bad)
        return None if cell is None else H.element(*cell)
    # inert primes lie in H, so both H and q(H) ignore their exponents
    Q, active, _ = H.squeezed()
    mask, _ = _residue_subgroup(H)
    period = math.lcm(a, U.exponent)
    red = np.array([reduce_exponent(k, a) for k in range(2 * a * (a + period))])
    k = len(active)
    lead = 1 if k else 0
    inner = Q.shape[1 + lead :]
    grid = np.indices(inner).reshape(len(inner), -1).T if inner else np.zeros((1, 0), dtype=np.int64)
    for u in range(U.order):
        ures = U.element(u)
        for v1 in range(Q.shape[1]) if lead else [None]:
            cells = grid if v1 is None else np.concatenate([np.full((len(grid), 1), v1), grid], axis=1)
            member = Q[u][tuple(cells.T)] if k else np.array([bool(Q[u])])
            res = tuple(np.full(len(cells), c) for c in ures) + tuple(cells.T % a)
            ok = ~member & mask[res]
            for n in range(a, a + period):
                if not ok.any():
                    break
                un = U.index(U.scale(n, ures))
                ok &= Q[un][tuple(red[n * cells].T)] if k else bool(Q[un])
            hits = np.flatnonzero(ok)
            if len(hits):
                exps = [0] * H.d
                for pos, p in enumerate(active):
                    exps[p] = int(cells[hits[0]][pos])
                return H.element(u, exps)
    return None


def class_group_of_completion(H: CMonoidPresentation) -> FiniteAbelianGroup:
    """``q(F)/q(H)`` in invariant-factor form."""
    U = H.units
    for p, seen in enumerate(observed_valuations(H)):
        if not any(seen):
            raise InfiniteQuotient(f"{H.ambient.primes[p]} divides no element of H")
    if H.pattern is not None:
        d = H.d
        _, active, inert = H.squeezed()
        _, used = _residue_subgroup(H)
        rels = []
        for v in used:
            row = list(v[: U.rank]) + [0] * d
            for pos, p in enumerate(active):
                row[U.rank + p] = v[U.rank + pos]
            rels.append(row)
        for p in range(d):
            mult = H.alpha if p in active else 1  # inert primes are elements of H
            rels.append([0] * U.rank + [mult if q == p else 0 for q in range(d)])
        return quotient_by_relations(d, U, rels)
    # recognizer: F -> q(F)/q(H) factors through mu; x ~ y iff mu(x) + (N-1) mu(y) in Q
    r = H.recognizer
    T = r.monoid.table
    reach = r.reachable()
    X = [m for m in reach if m in r.accept]
    Q = {m for m in reach if any(int(T[m, h]) in r.accept for h in X)}
    N = math.lcm(H.alpha, U.exponent)

    def mult(m, k):
        out = r.identity
        for _ in range(k):
            out = int(T[out, m])
        return out

    inv = {m: mult(m, N - 1) for m in reach}
    blocks: list[list[int]] = []
    for m in reach:
        for b in blocks:
            if int(T[m, inv[b[0]]]) in Q:
                b.append(m)
                break
        else:
            blocks.append([m])
    block_of = {m: i for i, b in enumerate(blocks) for m in b}
    zero = block_of[r.identity]
    add = lambda i, j: block_of[int(T[blocks[i][0], blocks[j][0]])]
    return group_from_table(list(range(len(blocks))), add, zero).group


@dataclass(frozen=True)
class Theorem11Report:
    classes_idempotent: bool
    non_idempotent_class: int | None
    smallest_idempotent: int
    constituent: FiniteAbelianGroup
    completion: FiniteAbelianGroup
    isomorphic: bool

    @property
    def passed(self) -> bool:
        return self.classes_idempotent and self.isomorphic


def verify_theorem11(H: CMonoidPresentation, cs: ClassSemigroup | None = None) -> Theorem11Report:
    """Classes of elements of ``H`` are idempotent and the bottom constituent group is ``q(F)/q(H)``."""
    cs = cs or class_semigroup(H)
    sn = is_seminormal(H, cs)
    if not sn.seminormal:
        raise PreconditionNotSeminormal(f"{cs.label(sn.witness)} lies in no constituent group")
    C = cs.carrier
    bad = next((x for x in sorted(cs.C_H) if C.add(x, x) != x), None)
    e = sn.decomposition.smallest_idempotent
    grp = sn.decomposition.constituents[e].group
    comp = class_group_of_completion(H)
    return Theorem11Report(bad is None, bad, sn.carrier_index(e), grp, comp, are_isomorphic(grp, comp))


def units_quotient(H: CMonoidPresentation) -> FiniteAbelianGroup:
    """``F^x / H^x``."""
    U = H.units
    trace = [U.element(u) for u in range(U.order) if H.member(u, (0,) * H.d)]
    return quotient_by_relations(0, U, [list(t) for t in trace])


def units_class_group(cs: ClassSemigroup) -> FiniteAbelianGroup:
    """The group ``{[eps]}`` with the induced operation."""
    elems = sorted(cs.C_units)
    return group_from_table(elems, cs.carrier.add, cs.identity).group


# -- serialization ---------------------------------------------------------


def to_text(H: CMonoidPresentation) -> str:
    lines = [FORMAT_HEADER]
    if H.name:
        lines.append(f"name {H.name}")
    lines.append("units " + " ".join(map(str, H.units.invariant_factors)))
    lines.append("primes " + " ".join(H.ambient.primes))
    lines.append(f"alpha {H.alpha}")
    for g in H.generators:
        lines.append(f"generator {H.units.index(g.unit)} " + " ".join(map(str, g.exps)))
    if H.pattern is not None:
        lines.append("pattern")
        for u in range(H.units.order):
            lines.append("".join("1" if b else "0" for b in H.pattern[u].ravel()))
    else:
        r = H.recognizer
        lines.append(f"recognizer {r.monoid.n} {r.identity}")
        lines += [" ".join(map(str, row)) for row in r.monoid.table.tolist()]
        lines.append("unit_images " + " ".join(map(str, r.unit_images)))
        lines.append("prime_images " + " ".join(map(str, r.prime_images)))
        lines.append("accept " + " ".join(map(str, sorted(r.accept))))
    return "\n".join(lines) + "\n"


def from_text(text: str) -> CMonoidPresentation:
    lines = text.splitlines()
    if not lines or lines[0].strip() != FORMAT_HEADER:
        raise InvalidPresentation("missing presentation header")
    name, units, primes, alpha, gens = "", (), (), None, []
    i = 1
    pattern = recognizer = None
    while i < len(lines):
        head, _, rest = lines[i].partition(" ")
        vals = rest.split()
        if head == "name":
            name = rest
        elif head == "units":
            units = tuple(map(int, vals))
        elif head == "primes":
            primes = tuple(vals)
        elif head == "alpha":
            alpha = int(rest)
        elif head == "generator":
            gens.append((int(vals[0]), tuple(map(int, vals[1:]))))
        elif head == "pattern":
            rows = lines[i + 1 : i + 1 + math.prod(units)]
            i += len(rows)
            bits = np.array([[c == "1" for c in row.strip()] for row in rows], dtype=bool)
            pattern = bits.reshape((math.prod(units),) + (2 * alpha,) * len(primes))
        elif head == "recognizer":
            n, ident = map(int, vals)
            table = [list(map(int, lines[i + 1 + k].split())) for k in range(n)]
            i += n
            ui = tuple(map(int, lines[i + 1].split()[1:]))
            pi = tuple(map(int, lines[i + 2].split()[1:]))
            ac = frozenset(map(int, lines[i + 3].split()[1:]))
            i += 3
            recognizer = Recognizer(validate(table), ident, ui, pi, ac)
        elif lines[i].strip():
            raise InvalidPresentation(f"unknown line {lines[i]!r}")
        i += 1
    if alpha is None:
        raise InvalidPresentation("alpha missing")
    ambient = Ambient(FiniteAbelianGroup(units), primes)
    generators = tuple(FactorialElement(ambient, ambient.units.element(u), e) for u, e in gens)
    return CMonoidPresentation(ambient, alpha, pattern=pattern, recognizer=recognizer, generators=generators, name=name)
