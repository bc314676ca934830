"""Finite(ly generated) abelian groups in invariant-factor form.

Everything here is exact integer arithmetic.  A finite abelian group is stored
as its invariant factors ``d_1 | d_2 | ... | d_r`` (all ``>= 2``); an element is
a tuple of residues, one per factor.  Finitely generated groups only appear as
presentations ``torsion (+) Z^rank`` modulo a list of relations, and are
collapsed to a finite group by :func:`quotient_by_relations`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Sequence

from .errors import InfiniteQuotient

Matrix = list[list[int]]

DEFAULT_ORDER_CAP = 4096


def _identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _swap_rows(A: Matrix, i: int, j: int) -> None:
    A[i], A[j] = A[j], A[i]


def _swap_cols(A: Matrix, i: int, j: int) -> None:
    for row in A:
        row[i], row[j] = row[j], row[i]


def _add_row(A: Matrix, src: int, dst: int, q: int) -> None:
    """row[dst] += q * row[src]"""
    if q:
        rs, rd = A[src], A[dst]
        for k in range(len(rd)):
            rd[k] += q * rs[k]


def _add_col(A: Matrix, src: int, dst: int, q: int) -> None:
    if q:
        for row in A:
            row[dst] += q * row[src]


def smith_normal_form(M: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Return ``(U, S, V)`` with ``S = U M V`` diagonal and ``s_1 | s_2 | ...``.

    ``U`` and ``V`` are unimodular.  Pivots are chosen as the entry of smallest
    nonzero absolute value, ties broken by row-major position, so the output is
    deterministic.  Diagonal entries are non-negative.
    """
    A = [list(map(int, row)) for row in M]
    m = len(A)
    n = len(A[0]) if m else 0
    U = _identity(m)
    V = _identity(n)

    def pivot_into(t: int, cells: Iterable[tuple[int, int]]) -> bool:
        best = None
        for i, j in cells:
            v = A[i][j]
            if v and (best is None or abs(v) < best[0]):
                best = (abs(v), i, j)
        if best is None:
            return False
        _, i, j = best
        if i != t:
            _swap_rows(A, i, t)
            _swap_rows(U, i, t)
        if j != t:
            _swap_cols(A, j, t)
            _swap_cols(V, j, t)
        return True

    for t in range(min(m, n)):
        if not pivot_into(t, ((i, j) for i in range(t, m) for j in range(t, n))):
            break
        while True:
            p = A[t][t]
            clean = True
            for i in range(t + 1, m):
                if A[i][t]:
                    q = -(A[i][t] // p)
                    _add_row(A, t, i, q)
                    _add_row(U, t, i, q)
                    clean = clean and A[i][t] == 0
            for j in range(t + 1, n):
                if A[t][j]:
                    q = -(A[t][j] // p)
                    _add_col(A, t, j, q)
                    _add_col(V, t, j, q)
                    clean = clean and A[t][j] == 0
            if not clean:
                cells = [(t, t)] + [(i, t) for i in range(t + 1, m)] + [(t, j) for j in range(t + 1, n)]
                pivot_into(t, cells)
                continue
            bad = next(
                ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p),
                None,
            )
            if bad is None:
                break
            _add_row(A, bad[0], t, 1)
            _add_row(U, bad[0], t, 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
    return U, A, V


def mat_mul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> Matrix:
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    return [[sum(A[i][k] * B[k][j] for k in range(inner)) for j in range(cols)] for i in range(len(A))]


def determinant(A: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant by fraction-free (Bareiss) elimination."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(row) for row in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k]), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


@dataclass(frozen=True)
class FiniteAbelianGroup:
    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        f = tuple(int(d) for d in self.invariant_factors)
        object.__setattr__(self, "invariant_factors", f)
        for i, d in enumerate(f):
            if d < 2:
                raise ValueError(f"invariant factor {d} < 2")
            if i + 1 < len(f) and f[i + 1] % d:
                raise ValueError(f"invariant factors {f} are not a divisor chain")

    @classmethod
    def from_cyclic_factors(cls, orders: Iterable[int]) -> "FiniteAbelianGroup":
        """Normalize an arbitrary direct sum of cyclic groups."""
        orders = [o for o in orders if o != 1]
        if any(o <= 0 for o in orders):
            raise ValueError("cyclic factor orders must be positive")
        if not orders:
            return cls(())
        _, S, _ = smith_normal_form([[o if i == j else 0 for j in range(len(orders))] for i, o in enumerate(orders)])
        return cls(tuple(S[i][i] for i in range(len(orders)) if S[i][i] > 1))

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    @property
    def order(self) -> int:
        return math.prod(self.invariant_factors)

    @property
    def exponent(self) -> int:
        return self.invariant_factors[-1] if self.invariant_factors else 1

    def zero(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def add(self, x, y) -> tuple[int, ...]:
        return tuple((a + b) % d for a, b, d in zip(x, y, self.invariant_factors))

    def neg(self, x) -> tuple[int, ...]:
        return tuple(-a % d for a, d in zip(x, self.invariant_factors))

    def scale(self, k: int, x) -> tuple[int, ...]:
        return tuple(k * a % d for a, d in zip(x, self.invariant_factors))

    def reduce(self, x) -> tuple[int, ...]:
        return tuple(int(a) % d for a, d in zip(x, self.invariant_factors))

    def generators(self) -> list[tuple[int, ...]]:
        return [tuple(int(i == j) for j in range(self.rank)) for i in range(self.rank)]

    def elements(self) -> list[tuple[int, ...]]:
        return list(itertools.product(*(range(d) for d in self.invariant_factors)))

    def index(self, x) -> int:
        i = 0
        for a, d in zip(x, self.invariant_factors):
            i = i * d + a % d
        return i

    def element(self, i: int) -> tuple[int, ...]:
        out = []
        for d in reversed(self.invariant_factors):
            i, r = divmod(i, d)
            out.append(r)
        return tuple(reversed(out))

    def element_order(self, x) -> int:
        o = 1
        for a, d in zip(x, self.invariant_factors):
            o = math.lcm(o, d // math.gcd(a, d))
        return o

    def subgroup(self, gens: Iterable[Sequence[int]]) -> list[tuple[int, ...]]:
        """Sorted element list of the subgroup generated by ``gens``."""
        sub = {self.zero()}
        for g in gens:
            g = self.reduce(g)
            if g in sub:
                continue
            frontier = list(sub)
            while frontier:
                nxt = []
                for x in frontier:
                    y = self.add(x, g)
                    if y not in sub:
                        sub.add(y)
                        nxt.append(y)
                frontier = nxt
        return sorted(sub)

    def __str__(self) -> str:
        if not self.invariant_factors:
            return "trivial"
        return " + ".join(f"Z/{d}" for d in self.invariant_factors)


TRIVIAL = FiniteAbelianGroup(())


def are_isomorphic(G1: FiniteAbelianGroup, G2: FiniteAbelianGroup) -> bool:
    return G1.invariant_factors == G2.invariant_factors


@dataclass(frozen=True)
class GroupHom:
    """Homomorphism given by the images of the domain's canonical generators."""

    domain: FiniteAbelianGroup
    codomain: FiniteAbelianGroup
    images: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        imgs = tuple(self.codomain.reduce(v) for v in self.images)
        object.__setattr__(self, "images", imgs)
        if len(imgs) != self.domain.rank:
            raise ValueError("need one image per domain generator")
        for d, v in zip(self.domain.invariant_factors, imgs):
            if any(c for c in self.codomain.scale(d, v)):
                raise ValueError(f"image {v} has order not dividing {d}")

    def __call__(self, x) -> tuple[int, ...]:
        out = self.codomain.zero()
        for c, v in zip(x, self.images):
            out = self.codomain.add(out, self.codomain.scale(c, v))
        return out

    def compose(self, other: "GroupHom") -> "GroupHom":
        """``self o other``"""
        if other.codomain != self.domain:
            raise ValueError("composition of incompatible homomorphisms")
        return GroupHom(other.domain, self.codomain, tuple(self(v) for v in other.images))


def hom_kernel(f: GroupHom) -> list[tuple[int, ...]]:
    zero = f.codomain.zero()
    return [x for x in f.domain.elements() if f(x) == zero]


def hom_image(f: GroupHom) -> list[tuple[int, ...]]:
    return f.codomain.subgroup(f.images)


def subgroup_sum(A: Iterable[Sequence[int]], B: Iterable[Sequence[int]], G: FiniteAbelianGroup) -> list[tuple[int, ...]]:
    B = list(B)
    return sorted({G.add(a, b) for a in A for b in B})


@dataclass(frozen=True)
class QuotientMap:
    """Projection ``torsion (+) Z^rank  ->  group`` produced by a quotient."""

    group: FiniteAbelianGroup
    columns: tuple[tuple[int, ...], ...]  # one column of V per surviving factor
    ngens: int

    def __call__(self, vec: Sequence[int]) -> tuple[int, ...]:
        if len(vec) != self.ngens:
            raise ValueError(f"expected a vector of length {self.ngens}")
        return tuple(
            sum(a * c for a, c in zip(vec, col)) % d
            for col, d in zip(self.columns, self.group.invariant_factors)
        )


def quotient_map(rank: int, torsion: FiniteAbelianGroup, relations: Iterable[Sequence[int]]) -> QuotientMap:
    """Quotient of ``torsion (+) Z^rank`` by ``relations``, with its projection.

    Coordinates are ordered torsion first, then the free part.
    """
    n = torsion.rank + rank
    rows = [list(map(int, r)) for r in relations]
    for r in rows:
        if len(r) != n:
            raise ValueError(f"relation {r} does not have length {n}")
    for i, d in enumerate(torsion.invariant_factors):
        rows.append([d if j == i else 0 for j in range(n)])
    if n == 0:
        return QuotientMap(TRIVIAL, (), 0)
    if not rows:
        raise InfiniteQuotient(f"free rank {n} with no relations")
    _, S, V = smith_normal_form(rows)
    diag = [S[j][j] if j < len(S) else 0 for j in range(n)]
    if any(s == 0 for s in diag):
        raise InfiniteQuotient(f"quotient has free rank {sum(s == 0 for s in diag)}")
    keep = [j for j in range(n) if diag[j] > 1]
    group = FiniteAbelianGroup(tuple(diag[j] for j in keep))
    cols = tuple(tuple(V[i][j] for i in range(n)) for j in keep)
    return QuotientMap(group, cols, n)


def quotient_by_relations(rank: int, torsion: FiniteAbelianGroup, relations: Iterable[Sequence[int]]) -> FiniteAbelianGroup:
    return quotient_map(rank, torsion, relations).group


def integer_kernel(A: Sequence[Sequence[int]], moduli: Sequence[int]) -> list[list[int]]:
    """Basis of ``{x in Z^m : x A = 0 mod moduli}`` for an ``m x r`` matrix ``A``."""
    m = len(A)
    r = len(moduli)
    if r == 0:
        return _identity(m)
    rows = [list(map(int, row)) for row in A] + [[d if i == j else 0 for j in range(r)] for i, d in enumerate(moduli)]
    U, S, _ = smith_normal_form(rows)
    rank = sum(1 for i in range(min(len(S), r)) if S[i][i])
    basis = [U[i][:m] for i in range(rank, len(rows))]
    return [b for b in basis if any(b)]


@dataclass(frozen=True)
class TableGroupStructure:
    """An abstract finite abelian group given by a table, with explicit coordinates."""

    group: FiniteAbelianGroup
    elements: tuple[Hashable, ...]
    to_vec: dict
    from_vec: dict

    def vec(self, x) -> tuple[int, ...]:
        return self.to_vec[x]

    def elem(self, v) -> Hashable:
        return self.from_vec[self.group.reduce(v)]


def group_from_table(elements: Sequence[Hashable], add: Callable, zero: Hashable) -> TableGroupStructure:
    """Invariant factors and an explicit isomorphism for a finite abelian group.

    ``add`` must be the group law on ``elements`` with identity ``zero``.
    """
    elements = list(elements)
    # greedy generating set; coordinates recorded along a BFS over the subgroup
    gens: list = []
    coords: dict = {zero: ()}
    relations: list[list[int]] = []
    for x in elements:
        if x in coords:
            continue
        k = len(gens)
        gens.append(x)
        coords = {y: c + (0,) for y, c in coords.items()}
        # smallest m with m*x in the previous subgroup
        m, y = 1, x
        while y not in coords:
            y = add(y, x)
            m += 1
        prev = coords[y]
        relations.append([-c for c in prev[:k]] + [m])
        layer = dict(coords)
        old = list(coords.items())
        y = zero
        for j in range(1, m):
            y = add(y, x)
            for z, c in old:
                w = add(z, y)
                layer[w] = c[:k] + (c[k] + j,)
        coords = layer
    k = len(gens)
    if k == 0:
        return TableGroupStructure(TRIVIAL, tuple(elements), {zero: ()}, {(): zero})
    R = [row + [0] * (k - len(row)) for row in relations]
    _, S, V = smith_normal_form(R)
    keep = [j for j in range(k) if S[j][j] > 1]
    group = FiniteAbelianGroup(tuple(S[j][j] for j in keep))
    to_vec = {}
    for x, c in coords.items():
        to_vec[x] = tuple(sum(c[i] * V[i][j] for i in range(k)) % S[j][j] for j in keep)
    from_vec = {v: x for x, v in to_vec.items()}
    if len(from_vec) != len(elements) or group.order != len(elements):
        raise ValueError("table does not define a group on the given elements")
    return TableGroupStructure(group, tuple(elements), to_vec, from_vec)
