import itertools

import pytest

from cmonoids.abelian import TRIVIAL, FiniteAbelianGroup, GroupHom, are_isomorphic
from cmonoids.cmonoid import (
    class_group_of_completion,
    class_semigroup,
    h_equivalent,
    is_seminormal,
    membership,
    units_class_group,
)
from cmonoids.criterion import half_factorial_by_criterion
from cmonoids.lengths import half_factorial_bruteforce, set_of_lengths
from cmonoids.errors import InvalidChain, NonSurjectiveBonding
from cmonoids.gallery import (
    Example43Spec,
    build_example43,
    build_remark313,
    check_example43,
    clifford_chain,
    default_bonding,
    example43_instances,
    expected_matches,
    fixture_semigroups,
)
from cmonoids.semigroup import clifford_decomposition, idempotents, rees_smallest_idempotent

Z = lambda *f: FiniteAbelianGroup(f)


def test_remark313():
    H = build_remark313()
    assert H.alpha == 2
    assert membership(H, H.ambient.element((1, 1)))
    cs = class_semigroup(H)
    assert cs.n == 9
    assert not is_seminormal(H, cs).seminormal


def test_clifford_chain_structure():
    ch = clifford_chain(Example43Spec([Z(2), TRIVIAL]))
    S = ch.semigroup
    assert S.n == 6
    dec = clifford_decomposition(S)
    assert dec.is_union_of_groups and len(dec.idempotents) == 2
    e1 = ch.index(1, (), 0)
    assert rees_smallest_idempotent(S) == e1
    assert dec.constituents[e1].group == Z(2)
    # C_0 + e_1 = C_1
    C0 = [ch.index(0, g, z) for g in Z(2).elements() for z in range(2)]
    assert {S.add(x, e1) for x in C0} == {ch.index(1, (), z) for z in range(2)}


@pytest.mark.parametrize("spec", example43_instances(), ids=str)
def test_example43_instances(spec):
    ex = build_example43(spec)
    H = ex.presentation
    cs = class_semigroup(H)
    assert cs.n == ex.C.n == sum(g.order for g in spec.groups) * 2
    assert expected_matches(ex, cs)
    checks = check_example43(ex, cs)
    assert checks.passed, checks
    assert are_isomorphic(units_class_group(cs), spec.groups[0])
    assert class_group_of_completion(H) == Z(2)
    dec = clifford_decomposition(cs.carrier)
    assert dec.is_union_of_groups and len(dec.idempotents) == spec.n + 1


def test_example43_n1_sizes():
    ex = build_example43(Example43Spec([Z(2), TRIVIAL]))
    assert ex.C.n == 6 and ex.presentation.d == 6
    assert ex.presentation.units == Z(2)


def test_example43_two_step_with_explicit_projections():
    V, Z2 = Z(2, 2), Z(2)
    proj = GroupHom(V, Z2, ((1,), (0,)))
    spec = Example43Spec([V, Z2, TRIVIAL], bondings={(0, 1): proj})
    ex = build_example43(spec)
    assert check_example43(ex).passed
    assert half_factorial_by_criterion(ex.presentation).half_factorial


def test_example43_lambda_classes_agree_with_h_equivalence():
    ex = build_example43(Example43Spec([Z(2), TRIVIAL]))
    H = ex.presentation
    cells = [(u, e) for u, e, _ in H.elements_by_degree(2)]
    for (u, e), (v, f) in itertools.combinations(cells[:40], 2):
        same = ex.lam(u, e) == ex.lam(v, f)
        assert h_equivalent(H, H.element(u, e), H.element(v, f)) == same


def test_example43_membership_is_idempotent_lambda():
    ex = build_example43(Example43Spec([Z(4), TRIVIAL]))
    H = ex.presentation
    E = set(idempotents(ex.C))
    for u, e, m in H.elements_by_degree(3):
        assert m == (ex.lam(u, e) in E)


def test_twisted_iota():
    # iota(eps) = (eps, 1) is still a monomorphism and the structure survives,
    # but half-factoriality does not: P2 fails and a length set {2, 3} appears
    Z2 = Z(2)
    ex = build_example43(Example43Spec([Z2, TRIVIAL], twist=GroupHom(Z2, Z2, ((1,),))))
    H = ex.presentation
    assert expected_matches(ex) and check_example43(ex).passed
    rep = half_factorial_by_criterion(H)
    assert rep.half_factorial is False
    assert [p.name for p in rep.properties if not p.passed] == ["P2"]
    v = half_factorial_bruteforce(H, 6)
    assert not v.half_factorial and v.witness_lengths == (2, 3)
    primes = H.ambient.primes
    a = H.element(0, [2 * (p == "c0[0|1]") + 2 * (p == "c1[e|0]") for p in primes])
    assert set_of_lengths(H, a).lengths == (2, 3)


def test_default_bonding():
    f = default_bonding(Z(2, 4), Z(4))
    assert f((1, 3)) == (3,) and f((1, 0)) == (0,)
    with pytest.raises(InvalidChain):
        default_bonding(Z(4), Z(3))


@pytest.mark.parametrize(
    "groups",
    [[Z(2)], [Z(2), Z(2)], [Z(2), Z(2), TRIVIAL], [Z(4), Z(2)]],
    ids=["single", "not-trivial-end", "not-strict", "no-trivial-end"],
)
def test_invalid_chains(groups):
    with pytest.raises(InvalidChain):
        clifford_chain(Example43Spec(groups))


def test_non_surjective_bonding():
    zero = GroupHom(Z(4), Z(2), ((0,),))
    with pytest.raises(NonSurjectiveBonding):
        clifford_chain(Example43Spec([Z(4), Z(2), TRIVIAL], bondings={(0, 1): zero}))


def test_incompatible_bondings():
    G = [Z(8), Z(4), Z(2), TRIVIAL]
    ok = Example43Spec(G, bondings={(0, 2): GroupHom(Z(8), Z(2), ((1,),))})
    assert clifford_chain(ok).semigroup.n == 2 * (8 + 4 + 2 + 1)
    # the composite Z/8 -> Z/4 -> Z/2 sends 1 to 1, not to 0
    bad = Example43Spec(G, bondings={(0, 2): GroupHom(Z(8), Z(2), ((0,),))})
    with pytest.raises(InvalidChain, match="composite"):
        clifford_chain(bad)
    with pytest.raises(InvalidChain, match="out of range"):
        clifford_chain(Example43Spec(G, bondings={(0, 5): GroupHom(Z(8), TRIVIAL, ((),))}))


def test_modulus_restricted_for_monoid():
    with pytest.raises(InvalidChain):
        build_example43(Example43Spec([Z(2), TRIVIAL], modulus=3))


def test_fixture_catalogue():
    fx = fixture_semigroups()
    assert sorted(str(f.violates) for f in fx) == ["None", "P1", "P2", "P3", "P4"]
    for f in fx:
        assert f.semigroup.identity == f.semigroup.carrier.identity()
