import dataclasses
import itertools
from fractions import Fraction

import pytest

from cmonoids.cmonoid import from_generators
from cmonoids.criterion import build_context, half_factorial_by_criterion
from cmonoids.errors import NotInMonoid, PreconditionFailed
from cmonoids.factorial import Ambient
from cmonoids.gallery import Example43Spec, build_example43, build_remark313
from cmonoids.lengths import (
    atoms_in_box,
    box_lengths,
    default_box_cap,
    delta_set,
    half_factorial_bruteforce,
    set_of_lengths,
    weight,
    weight_check,
)
from cmonoids.abelian import TRIVIAL, FiniteAbelianGroup
from cmonoids.productone import bg_presentation, cyclic, klein_four
from oracles import LengthOracle


def numerical(*gens):
    amb = Ambient.free(1)
    return from_generators(amb, [amb.element((g,)) for g in gens])


@pytest.fixture(scope="module")
def ex43():
    return build_example43(Example43Spec([FiniteAbelianGroup((2,)), TRIVIAL]))


def monoids():
    return {
        "free": from_generators(Ambient.free(2), [Ambient.free(2).prime(0), Ambient.free(2).prime(1)]),
        "remark313": build_remark313(),
        "<2,3>": numerical(2, 3),
        "<3,5,7>": numerical(3, 5, 7),
        "B(Z2)": bg_presentation(cyclic(2)),
        "B(Z3)": bg_presentation(cyclic(3)),
        "B(Z4)": bg_presentation(cyclic(4)),
        "B(Z2xZ2)": bg_presentation(klein_four()),
    }


MONOIDS = monoids()
CAPS = {"free": 6, "remark313": 8, "<2,3>": 12, "<3,5,7>": 14, "B(Z2)": 8, "B(Z3)": 7, "B(Z4)": 6, "B(Z2xZ2)": 6}


def test_delta_set_examples():
    assert delta_set([2, 3]) == {1}
    assert delta_set([5]) == set()
    assert delta_set([2, 4, 7]) == {2, 3}


def test_atoms_of_free_monoid():
    amb = Ambient.free(1)
    H = from_generators(amb, [amb.prime(0)])
    assert atoms_in_box(H, 5) == [amb.prime(0)]


def test_atoms_remark313():
    H = MONOIDS["remark313"]
    amb = H.ambient
    atoms = atoms_in_box(H, 4)
    for e in [(0, 1), (1, 1), (2, 1)]:
        assert amb.element(e) in atoms
    assert amb.element((0, 2)) not in atoms


@pytest.mark.parametrize("name", sorted(MONOIDS))
def test_atoms_and_lengths_match_oracle(name):
    H, cap = MONOIDS[name], CAPS[name]
    oracle = LengthOracle(H)
    atoms = {(H.units.index(a.unit), a.exps) for a in atoms_in_box(H, cap)}
    L = box_lengths(H, cap)
    expected_atoms = set()
    for u, e, m in H.elements_by_degree(cap):
        if m:
            assert L[(u, e)] == oracle.lengths(u, e), (u, e)
            if oracle.is_atom(u, e):
                expected_atoms.add((u, e))
        else:
            assert (u, e) not in L
    assert atoms == expected_atoms


def test_atoms_example43_match_oracle(ex43):
    H = ex43.presentation
    oracle = LengthOracle(H)
    atoms = {(H.units.index(a.unit), a.exps) for a in atoms_in_box(H, 4)}
    expected = {(u, e) for u, e, m in H.elements_by_degree(4) if m and oracle.is_atom(u, e)}
    assert atoms == expected
    # lambda of an atom is idempotent in C
    C = ex43.C
    for u, e in atoms:
        x = ex43.lam(u, e)
        assert C.add(x, x) == x


def test_set_of_lengths_examples():
    H = MONOIDS["B(Z3)"]
    amb = H.ambient
    rep = set_of_lengths(H, amb.one())
    assert rep.lengths == (0,)
    a = amb.element((0, 3, 3))
    rep = set_of_lengths(H, a)
    assert rep.lengths == (2, 3) and rep.delta == {1} and rep.factorizations == 2
    assert set_of_lengths(H, amb.element((0, 1, 1))).lengths == (1,)
    with pytest.raises(NotInMonoid):
        set_of_lengths(H, amb.element((0, 1, 0)))
    with pytest.raises(ValueError):
        set_of_lengths(H, a, box_cap=4)


def test_set_of_lengths_agrees_with_box():
    for name in ["remark313", "<2,3>", "B(Z4)"]:
        H, cap = MONOIDS[name], CAPS[name]
        for (u, e), L in box_lengths(H, cap).items():
            assert set_of_lengths(H, H.element(u, e)).lengths == L


def test_factorization_count_numerical():
    # p^12 in <2,3>: 2x+3y = 12 has the solutions (6,0), (3,2), (0,4)
    H = MONOIDS["<2,3>"]
    rep = set_of_lengths(H, H.ambient.element((12,)))
    assert rep.factorizations == 3 and rep.lengths == (4, 5, 6)


def test_bruteforce_verdicts():
    v = half_factorial_bruteforce(MONOIDS["B(Z3)"], 6)
    assert not v.half_factorial
    assert len(v.witness_lengths) >= 2 and v.delta == {1}
    v = half_factorial_bruteforce(MONOIDS["B(Z2)"], 8)
    assert v.half_factorial and v.box_cap == 8 and "within box" in v.label
    assert not half_factorial_bruteforce(MONOIDS["<2,3>"]).half_factorial


def test_default_box_cap():
    H = MONOIDS["<2,3>"]
    assert default_box_cap(H) == 3 * H.alpha * 3


@pytest.mark.parametrize("name", sorted(MONOIDS))
def test_min_max_additivity(name):
    H, cap = MONOIDS[name], CAPS[name]
    U = H.units
    L = box_lengths(H, cap)
    for (u, a), (w, b) in itertools.combinations_with_replacement(L, 2):
        if sum(a) + sum(b) > cap:
            continue
        s = U.index(U.add(U.element(u), U.element(w)))
        Lab = L[(s, tuple(x + y for x, y in zip(a, b)))]
        assert min(Lab) <= min(L[(u, a)]) + min(L[(w, b)])
        assert max(Lab) >= max(L[(u, a)]) + max(L[(w, b)])


@pytest.mark.parametrize("name", sorted(MONOIDS))
def test_half_factorial_iff_empty_delta(name):
    H, cap = MONOIDS[name], CAPS[name]
    v = half_factorial_bruteforce(H, cap)
    deltas = set().union(*(delta_set(L) for L in box_lengths(H, cap).values()))
    assert v.half_factorial == (not deltas) == (not v.delta)
    assert v.delta == deltas


def test_units_have_length_zero(ex43):
    H = ex43.presentation
    L = box_lengths(H, 3)
    zero = (0,) * H.d
    trace = [u for u in range(H.units.order) if H.member(u, zero)]
    assert all(L[(u, zero)] == (0,) for u in trace)
    assert all(L[k] != (0,) for k in L if any(k[1]))


def test_weights_example43(ex43):
    H = ex43.presentation
    ctx = build_context(H)
    assert half_factorial_by_criterion(H).half_factorial
    rep = weight_check(H, ctx, atoms_in_box(H, 6))
    assert rep.passed and rep.weights
    assert all(w == 1 for _, w in rep.weights)
    # elements of weight 2 split into two atoms
    oracle = LengthOracle(H)
    for u, e, m in H.elements_by_degree(4):
        a = H.element(u, e)
        if m and weight(H, ctx, a) == 2:
            assert not oracle.is_atom(u, e)
            assert oracle.lengths(u, e) == (2,)
    assert weight(H, ctx, H.element(0, (0,) * H.d)) == Fraction(0)


def test_weight_check_requires_hypothesis(ex43):
    H = ex43.presentation
    ctx = dataclasses.replace(build_context(H), hypothesis=False)
    with pytest.raises(PreconditionFailed):
        weight_check(H, ctx, atoms_in_box(H, 4))
