import itertools

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from cmonoids.abelian import (
    TRIVIAL,
    FiniteAbelianGroup,
    GroupHom,
    are_isomorphic,
    determinant,
    group_from_table,
    hom_image,
    hom_kernel,
    mat_mul,
    quotient_by_relations,
    quotient_map,
    smith_normal_form,
    subgroup_sum,
)
from cmonoids.errors import InfiniteQuotient
from oracles import group_order_profile, invariant_factors_by_minors, quotient_order_profile

Z = lambda *f: FiniteAbelianGroup(f)


def diag(S):
    return [S[i][i] for i in range(min(len(S), len(S[0]) if S else 0))]


def test_snf_identity():
    _, S, _ = smith_normal_form([[1, 0], [0, 1]])
    assert S == [[1, 0], [0, 1]]


def test_snf_one_by_one():
    _, S, _ = smith_normal_form([[2]])
    assert S == [[2]]


def test_snf_unimodular_example():
    U, S, V = smith_normal_form([[1, 1], [2, 1]])
    assert S == [[1, 0], [0, 1]]
    assert diag(S) == invariant_factors_by_minors([[1, 1], [2, 1]])
    assert mat_mul(mat_mul(U, [[1, 1], [2, 1]]), V) == S


def test_snf_empty():
    U, S, V = smith_normal_form([])
    assert S == [] and U == []


def test_snf_deterministic():
    M = [[4, 6, 2], [6, 9, 3], [2, 3, 8]]
    assert smith_normal_form(M) == smith_normal_form(M)


matrices = st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=m, max_size=m)
    )
)


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_snf_properties(M):
    U, S, V = smith_normal_form(M)
    assert mat_mul(mat_mul(U, M), V) == S
    assert abs(determinant(U)) == 1 and abs(determinant(V)) == 1
    for i, row in enumerate(S):
        for j, x in enumerate(row):
            if i != j:
                assert x == 0
    d = diag(S)
    assert all(x >= 0 for x in d)
    for a, b in zip(d, d[1:]):
        assert (b == 0) if a == 0 else (b % a == 0)
    assert d == invariant_factors_by_minors(M)


def test_group_invariants():
    assert TRIVIAL.order == 1
    assert Z(2, 4).order == 8
    with pytest.raises(ValueError):
        Z(4, 2)
    with pytest.raises(ValueError):
        Z(1)
    assert FiniteAbelianGroup.from_cyclic_factors([2, 3]) == Z(6)
    assert FiniteAbelianGroup.from_cyclic_factors([4, 6]) == Z(2, 12)


def test_quotient_examples():
    assert quotient_by_relations(2, TRIVIAL, [(1, 1), (2, 1)]) == TRIVIAL
    assert quotient_by_relations(1, TRIVIAL, [(3,)]) == Z(3)
    assert quotient_by_relations(0, Z(2), []) == Z(2)


def test_quotient_infinite():
    with pytest.raises(InfiniteQuotient):
        quotient_by_relations(2, TRIVIAL, [(1, 1)])
    with pytest.raises(InfiniteQuotient):
        quotient_by_relations(1, Z(2), [])


def test_quotient_map_is_a_projection():
    q = quotient_map(2, Z(2), [(1, 2, 0), (0, 0, 4)])
    G = q.group
    assert group_order_profile(G) == quotient_order_profile(2, (2,), [(1, 2, 0), (0, 0, 4)])
    for rel in [(1, 2, 0), (0, 0, 4), (2, 0, 0)]:
        assert q(rel) == G.zero()
    images = {q(v) for v in itertools.product(range(2), range(8), range(4))}
    assert len(images) == G.order


@settings(max_examples=80, deadline=None)
@given(
    st.integers(0, 2).flatmap(
        lambda r: st.tuples(
            st.just(r),
            st.lists(st.sampled_from([2, 3, 4]), max_size=2),
            st.lists(st.lists(st.integers(-4, 4), min_size=5, max_size=5), min_size=0, max_size=4),
        )
    )
)
def test_quotient_agrees_with_coset_enumeration(args):
    rank, cyc, raw = args
    torsion = FiniteAbelianGroup.from_cyclic_factors(cyc)
    # work with the normalized torsion coordinates
    k = torsion.rank + rank
    rels = [r[:k] for r in raw]
    try:
        expected = quotient_order_profile(rank, torsion.invariant_factors, rels)
    except OverflowError:
        assume(False)
    if expected is None:
        with pytest.raises(InfiniteQuotient):
            quotient_by_relations(rank, torsion, rels)
        return
    assert group_order_profile(quotient_by_relations(rank, torsion, rels)) == expected


def test_hom_kernel_examples():
    Z4, Z2 = Z(4), Z(2)
    assert hom_kernel(GroupHom(Z4, Z4, [(1,)])) == [(0,)]
    assert hom_kernel(GroupHom(Z4, Z4, [(2,)])) == [(0,), (2,)]
    assert hom_kernel(GroupHom(Z2, Z2, [(0,)])) == [(0,), (1,)]


def test_hom_well_definedness():
    with pytest.raises(ValueError):
        GroupHom(Z(2), Z(4), [(1,)])
    GroupHom(Z(2), Z(4), [(2,)])


def test_subgroup_sum_examples():
    G = Z(4)
    assert subgroup_sum([(0,)], [(0,)], G) == [(0,)]
    assert subgroup_sum([(0,), (2,)], [(0,), (2,)], G) == [(0,), (2,)]
    assert subgroup_sum([(0,), (2,)], G.elements(), G) == G.elements()


def test_are_isomorphic_examples():
    assert are_isomorphic(Z(2), Z(2))
    assert not are_isomorphic(Z(4), Z(2, 2))
    assert are_isomorphic(quotient_by_relations(2, TRIVIAL, [(1, 1), (2, 1)]), TRIVIAL)


small_groups = st.lists(st.sampled_from([2, 3, 4, 6]), max_size=2).map(FiniteAbelianGroup.from_cyclic_factors)


@settings(max_examples=60, deadline=None)
@given(small_groups, small_groups, st.data())
def test_hom_kernel_and_image(A, B, data):
    imgs = []
    for d in A.invariant_factors:
        cands = [y for y in B.elements() if not any(B.scale(d, y))]
        imgs.append(data.draw(st.sampled_from(cands)))
    f = GroupHom(A, B, imgs)
    K = set(hom_kernel(f))
    assert A.zero() in K
    assert all(A.add(x, y) in K for x in K for y in K)
    assert K == {x for x in A.elements() if f(x) == B.zero()}
    # first isomorphism theorem
    assert len(K) * len(hom_image(f)) == A.order
    for x, y in itertools.product(A.elements(), repeat=2):
        assert f(A.add(x, y)) == B.add(f(x), f(y))


def test_group_from_table():
    els = list(range(12))
    st_ = group_from_table(els, lambda a, b: (a + b) % 12, 0)
    assert st_.group == Z(12)
    for a, b in itertools.product(els, repeat=2):
        assert st_.group.add(st_.vec(a), st_.vec(b)) == st_.vec((a + b) % 12)
    V = [(a, b) for a in range(2) for b in range(4)]
    st2 = group_from_table(V, lambda x, y: ((x[0] + y[0]) % 2, (x[1] + y[1]) % 4), (0, 0))
    assert st2.group == Z(2, 4)
    assert {st2.elem(st2.vec(x)) for x in V} == set(V)
