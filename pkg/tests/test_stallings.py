import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import act, all_words, bounded_closure, fixing_actions, inverse, stack_reduce, subgroup_elements
from upgconj.stallings import (
    NotGoodPair,
    conj_class,
    conj_class_equal,
    conjugate_subgroup,
    conjugator,
    fold,
    is_good_pair,
    membership,
    normalizer_quotient,
    pairs_equal,
    split_conj_class,
)
from upgconj.words import Word


def H(*gens, rank=2):
    return fold([Word.parse(g, rank) for g in gens], rank)


def same_subgroup(h1, h2):
    return all(membership(h2, w) for w in h1.generators()) and all(membership(h1, w) for w in h2.generators())


def random_word(rng, rank, lo, hi):
    while True:
        raw = [rng.choice([1, -1]) * rng.randint(1, rank) for _ in range(rng.randint(lo, hi))]
        w = stack_reduce(raw)
        if w:
            return w


def test_fold_shapes():
    loop = H("a")
    assert (loop.n_vertices, len(loop.edges), loop.free_rank) == (1, 1, 1)
    two = H("aa", "b")
    assert (two.n_vertices, len(two.edges), two.free_rank) == (2, 3, 2)
    labels = sorted(lab for _, _, lab in two.edges)
    assert labels == [1, 1, 2]
    rose = H("a", "ab")
    assert (rose.n_vertices, len(rose.edges), rose.free_rank) == (1, 2, 2)


def test_folded_graph_is_an_immersion():
    h = H("aab", "abA", "bab", rank=2)
    out = {(s, lab) for s, _, lab in h.edges}
    into = {(t, lab) for _, t, lab in h.edges}
    assert len(out) == len(h.edges) == len(into)


def test_membership_examples():
    h = H("aa", "b")
    assert membership(h, Word.parse("aab", 2))
    assert not membership(h, Word.parse("a", 2))
    w = Word.parse("baaB", 2)
    assert membership(h, w)
    assert w.letters in subgroup_elements([(1, 1), (2,)], 3)


def membership_disagreements(n_subgroups, seed=20240611):
    """Words of length <= 4 on which Stallings membership and brute force disagree.

    For each random subgroup of F_3 (one to three generators of length <= 4):
    every product of at most four generators must be accepted; every accepted
    word must turn up in a length-bounded closure of the generators; every
    rejected word must move the base point of some permutation action in which
    all generators fix it.
    """
    rng = random.Random(seed)
    certificate_rng = random.Random(seed + 1)
    short = [w for w in all_words(3, 4) if w]
    bad = []
    for _ in range(n_subgroups):
        gens = [random_word(rng, 3, 1, 4) for _ in range(rng.randint(1, 3))]
        h = fold([Word(g, 3) for g in gens], 3)
        for w in subgroup_elements(gens, 4):
            if not membership(h, Word(w, 3)):
                bad.append((gens, w))
        closure = bounded_closure(gens, 7)
        actions = fixing_actions(gens, 3, certificate_rng)
        for w in short:
            if membership(h, Word(w, 3)):
                ok = w in closure
            else:
                ok = any(act(a, w, 0) != 0 for a in actions)
            if not ok:
                bad.append((gens, w))
    return bad


def test_membership_against_brute_force():
    assert membership_disagreements(8) == []


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(st.sampled_from([1, -1, 2, -2]), min_size=1, max_size=5), min_size=1, max_size=3),
       st.lists(st.integers(0, 5), max_size=4))
def test_fold_keeps_products(gens, picks):
    gens = [stack_reduce(g) for g in gens if stack_reduce(g)]
    if not gens:
        return
    h = fold([Word(g, 2) for g in gens], 2)
    w = ()
    for k in picks:
        g = gens[k % len(gens)]
        w = stack_reduce(w + (g if k % 2 else inverse(g)))
    assert membership(h, Word(w, 2))


def test_conjugacy_class_examples():
    g = conjugator(H("a"), H("baB"))
    assert g is not None
    assert same_subgroup(conjugate_subgroup(H("a"), g), H("baB"))
    assert conj_class_equal(H("a"), H("baB"))
    assert not conj_class_equal(H("a"), H("aa"))
    # <aa, b> and <aa, abA>: conjugation by a carries the generators across
    a = Word.parse("a", 2)
    assert same_subgroup(conjugate_subgroup(H("aa", "b"), a), H("aa", "abA"))
    assert conj_class_equal(H("aa", "b"), H("aa", "abA"))


SMALL = ["a", "b", "aa", "ab", "abA", "baB", "bb", "aB"]


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(SMALL), st.sampled_from(SMALL), st.sampled_from(SMALL))
def test_conj_class_equal_is_an_equivalence(x, y, z):
    a, b, c = H(x), H(y), H(z)
    assert conj_class_equal(a, a)
    assert conj_class_equal(a, b) == conj_class_equal(b, a)
    if conj_class_equal(a, b) and conj_class_equal(b, c):
        assert conj_class_equal(a, c)


def test_normalizer_quotients():
    assert normalizer_quotient(H("a")).order == 1
    q = normalizer_quotient(H("aa"))
    assert q.order == 2
    assert Word.parse("a", 2) in q.representatives
    assert normalizer_quotient(H("a", "b")).order == 1


def test_split_conj_class_examples():
    assert len(split_conj_class(H("a"), H("a", "b"))) == 1
    assert len(split_conj_class(H("a"), H("a", "baB"))) == 2
    assert split_conj_class(H("b"), H("a")) == []


@pytest.mark.parametrize("g", ["a", "baB", "abaB"])
def test_split_count_invariant_under_conjugation_in_h(g):
    big = H("a", "baB")
    k = conjugate_subgroup(H("a"), Word.parse(g, 2))
    assert len(split_conj_class(k, big)) == 2


def test_good_pairs():
    assert is_good_pair(H("a"), H("b"))
    assert not is_good_pair(H("a"), H("a"))
    assert is_good_pair(H("a"), H("baB"))
    for x in SMALL:
        for y in SMALL:
            assert is_good_pair(H(x), H(y)) == is_good_pair(H(y), H(x))


def test_pairs_equal_examples():
    F3 = lambda *g: H(*g, rank=3)
    assert pairs_equal((F3("a"), F3("b")), (F3("caC"), F3("cbC")))
    assert not pairs_equal((H("a"), H("b")), (H("b"), H("a")))
    assert pairs_equal((H("a"), H("b")), (H("a"), H("abA")))
    with pytest.raises(NotGoodPair):
        pairs_equal((H("a"), H("a")), (H("a"), H("b")))


def test_class_code_is_conjugation_invariant():
    h = H("aab", "bA")
    for g in ["b", "ab", "BBa"]:
        assert conj_class(conjugate_subgroup(h, Word.parse(g, 2))) == conj_class(h)
