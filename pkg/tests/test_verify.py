import pytest
from hypothesis import given, settings, strategies as st

from oracles import all_words, stack_reduce
from upgconj.ct import ct_power
from upgconj.freeauto import Automorphism, conjugation
from upgconj.invariants import all_strong_axes
from upgconj.verify import (
    X_ITEMS,
    BadCorrespondence,
    OuterAuto,
    inner_conjugator,
    outer_equal,
    recognition_check,
    verify_conjugator,
    x_membership,
)
from upgconj.words import Word

MOVES2 = ["x1 -> ab", "x2 -> ba", "x1 -> B; x2 -> a", "x1 -> abb", "x2 -> Ab", "x1 -> Ba", "x2 -> aB"]
WORDS2 = ["a", "B", "ab", "bA", "aab", "AbA", "abAB"]


def brute_inner(auto, max_len=5):
    """Search every g with |g| <= max_len for auto(x) = g x g^-1 on all generators."""
    n = auto.rank
    for g in all_words(n, max_len):
        gi = tuple(-x for x in reversed(g))
        if all(stack_reduce(g + (i,) + gi) == auto.images[i - 1].letters for i in range(1, n + 1)):
            return g
    return None


def compose_moves(moves, rank=2):
    out = Automorphism.identity(rank)
    for m in moves:
        out = Automorphism.parse(m, rank) * out
    return out


def test_phi_conjugates_its_own_powers(running):
    phi = OuterAuto(running.automorphism)
    for k in (0, 1, 2):
        assert verify_conjugator(phi, phi, phi.power(k))


def test_phi_conjugates_to_its_square_only_trivially(running):
    phi = OuterAuto(running.automorphism)
    assert not verify_conjugator(phi, phi.power(2), OuterAuto.identity(running.rank))


def test_theta_and_its_inverse(running, fixed_edge):
    phi = OuterAuto(running.automorphism)
    theta = OuterAuto.parse("x1 -> b; x2 -> a", running.rank)
    psi = theta * phi * theta.inverse()
    assert verify_conjugator(phi, psi, theta)
    assert verify_conjugator(psi, phi, theta.inverse())
    assert not verify_conjugator(phi, psi, OuterAuto.identity(running.rank))


def test_ct_automorphism_matches_its_square(running):
    sq = ct_power(running, 2)
    assert outer_equal(sq.automorphism, running.automorphism * running.automorphism)


def test_outer_equal_examples():
    a = Word.parse("a", 2)
    assert outer_equal(conjugation(a), Automorphism.identity(2))
    assert not outer_equal(Automorphism.parse("x1 -> b; x2 -> a", 2), Automorphism.identity(2))
    assert inner_conjugator(Automorphism.identity(3)) == Word((), 3)
    with pytest.raises(ValueError):
        outer_equal(Automorphism.identity(2), Automorphism.identity(3))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from(MOVES2), max_size=3), st.sampled_from(WORDS2 + [""]))
def test_inner_conjugator_matches_search(moves, g):
    base = compose_moves(moves)
    inner = conjugation(Word.parse(g, 2)) if g else Automorphism.identity(2)
    candidate = inner * base
    got = inner_conjugator(candidate * base.inverse())
    assert got is not None
    assert brute_inner(candidate * base.inverse()) is not None
    found = inner_conjugator(candidate)
    oracle = brute_inner(candidate, 4)
    if oracle is not None:
        assert found is not None
    if found is not None:
        assert conjugation(found) == candidate


@settings(max_examples=40, deadline=None)
@given(*[st.lists(st.sampled_from(MOVES2), max_size=2)] * 3)
def test_outer_equal_is_an_equivalence(x, y, z):
    a, b, c = compose_moves(x), compose_moves(y), compose_moves(z)
    assert outer_equal(a, a)
    assert outer_equal(a, b) == outer_equal(b, a)
    if outer_equal(a, b) and outer_equal(b, c):
        assert outer_equal(a, c)


@settings(max_examples=40, deadline=None)
@given(*[st.lists(st.sampled_from(MOVES2), max_size=2)] * 3)
def test_conjugator_symmetry(p, q, t):
    phi, theta = OuterAuto(compose_moves(p)), OuterAuto(compose_moves(t))
    psi = OuterAuto(compose_moves(q))
    assert verify_conjugator(phi, psi, theta) == verify_conjugator(psi, phi, theta.inverse())


def test_outer_auto_rejects_non_automorphisms():
    with pytest.raises(ValueError):
        OuterAuto.parse("x1 -> aa", 2)


def test_recognition_check(running):
    axes = all_strong_axes(running)
    assert recognition_check(running, running, {x: x for x in axes})
    by_site = {x.site: x for x in axes if str(x.axis) == "[a]"}
    swap = {x: x for x in axes}
    swap[by_site["b"]], swap[by_site["p"]] = by_site["p"], by_site["b"]
    assert not recognition_check(running, running, swap)
    short = dict(list({x: x for x in axes}.items())[1:])
    with pytest.raises(BadCorrespondence):
        recognition_check(running, running, short)


def test_x_membership_of_phi_and_identity(running, fixed_edge):
    for c in (running, fixed_edge):
        assert list(x_membership(c)) == list(X_ITEMS)
        assert all(x_membership(c).values())
        phi = OuterAuto(c.automorphism)
        for k in (1, 2, -1):
            assert all(x_membership(c, theta=phi.power(k)).values())


def test_x_membership_rejects_basis_swaps(running):
    swap_ab = x_membership(running, theta=OuterAuto.parse("x1 -> b; x2 -> a", 5))
    assert list(swap_ab.values()) == [True, True] + [False] * 5
    swap_ac = x_membership(running, theta=OuterAuto.parse("x1 -> c; x3 -> a", 5))
    assert not any(swap_ac.values())


def test_x_membership_is_closed_under_products(running):
    phi = OuterAuto(running.automorphism)
    members = [OuterAuto.identity(5), phi, OuterAuto.parse("x2 -> ba", 5), phi.power(2)]
    for s in members:
        for t in members:
            assert all(x_membership(running, theta=s * t).values())


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from(MOVES2), max_size=5))
def test_inverse_undoes_the_automorphism(moves):
    a = compose_moves(moves)
    assert a * a.inverse() == Automorphism.identity(2) == a.inverse() * a


def test_inverse_of_ct_automorphisms(running, fixed_edge):
    for c in (running, fixed_edge):
        a = c.automorphism
        assert a * a.inverse() == Automorphism.identity(c.rank)
