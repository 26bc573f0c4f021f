"""Acceptance checks, one test per criterion.

Each test records a PASS or FAIL line; the lines are printed as they happen
and again in the terminal summary (see conftest.py).  Run this file directly
with ``python3 tests/test_acceptance.py`` to get just the ten lines.
"""

import random
import time
from fractions import Fraction
from itertools import permutations

import pytest

from oracles import count_automorphisms, cyclic_words, trees_isomorphic, whitehead_closure
from test_graphmap import SUBDIVIDED, random_walk
from test_stallings import membership_disagreements
from upgconj.ct import classify_edges, parse_ct
from upgconj.graphmap import Circuit, free_cancel, inv, iterate_length, map_path, tighten
from upgconj.invariants import (
    acc_np,
    added_lines,
    all_limit_lines,
    extension_type,
    is_invariant,
    is_special_ffs,
    limit_lines,
    ray_partial_order,
    special_chain,
    strong_axes,
    twist_coordinate,
)
from upgconj.iterset import IteratedSet, automorphisms, equivalent, label, whitehead_orbit
from upgconj.staples import global_staple_pairs, m_of_phi, staples
from upgconj.verify import OuterAuto, verify_conjugator, x_membership
from upgconj.words import CyclicWord, Word, conjugacy_class

RESULTS = {}


def record(number, title, check):
    try:
        check()
    except Exception:
        RESULTS[number] = f"FAIL  {number:>2}. {title}"
        print(RESULTS[number])
        raise
    RESULTS[number] = f"PASS  {number:>2}. {title}"
    print(RESULTS[number])


def texts(lines):
    return {str(x) for x in lines}


def occurs_in(small, big):
    n = len(small)
    return any(big[i : i + n] == small for i in range(len(big) - n + 1))


def test_criterion_01_growth_polynomial(running):
    def check():
        start = time.perf_counter()
        for k in range(31):
            assert Fraction(iterate_length(running.fmap, "q", k)) == Fraction(k**3 + 5 * k + 6, 6)
        assert time.perf_counter() - start < 1.0

    record(1, "growth of q is (k^3+5k+6)/6 for k <= 30", check)


def test_criterion_02_classification(running):
    def check():
        fixed, lin, higher = classify_edges(running)
        assert set(fixed) == {"a"}
        assert set(lin) == {"b", "p"}
        assert set(higher) == {"c", "d", "e", "q"}

    record(2, "edge classification", check)


def test_criterion_03_limit_lines(running):
    def check():
        assert texts(limit_lines(running, "q")) == {"a^inf R_c", "a^inf b a^inf", "a^inf"}
        assert len(acc_np(running, "q")) == 2

    record(3, "limit lines of R_q", check)


def test_criterion_04_partial_order(running):
    record(4, "partial order on eigenrays", lambda: _assert_equal(ray_partial_order(running), {("c", "q")}))


def _assert_equal(x, y):
    assert x == y


def test_criterion_05_strong_axes(running):
    def check():
        sa = strong_axes(running, conjugacy_class(Word.parse("a", 5)))
        assert len(sa) == 3
        assert sorted(s.degree for s in sa) == [0, 1, 2]
        by_site = {s.site: s for s in sa}
        assert twist_coordinate(by_site["b"], by_site["base"]) == 1

    record(5, "strong axes on [a] and the twist coordinate", check)


def test_criterion_06_special_chain(running):
    def check():
        chain = special_chain(running, ["c", "d", "e", "q"])
        assert len(chain) == 4
        assert chain.profiles == [(2,), (3,), (4,), (5,)]
        assert "d" not in chain.added

    record(6, "special chain for the order c,d,e,q", check)


def test_criterion_07_extensions(running):
    def check():
        chain = special_chain(running, ["c", "d", "e", "q"])
        types = [(t.shape, t.size) for t in (extension_type(running, chain, k) for k in (1, 2, 3))]
        assert types == [("H", "large"), ("HH", "contractible"), ("LH", "infinite-cyclic")]
        assert texts(added_lines(running, chain, 3).lines) == {"a^inf P R_q", "A^inf P R_q"}
        assert texts(added_lines(running, chain, 2).lines) == {"R_d^-1 R_e", "R_e^-1 R_d"}

    record(7, "extension types and added lines", check)


def test_criterion_08_staples(running):
    def check():
        assert texts(staples(running)) == {"a^inf R_c", "a^inf b a^inf"}
        pairs = global_staple_pairs(running)
        assert set(pairs) == {("a^inf b a^inf", "a^inf R_c"), ("a^inf b a^inf", "a^inf b a^inf")}
        assert {m_of_phi(running, b) for b in pairs[("a^inf b a^inf", "a^inf b a^inf")]} == {1}

    record(8, "staples, staple pairs and m = 1", check)


def test_criterion_09_negative_special(fixed_edge):
    def check():
        rest = [n for n in fixed_edge.edges if n != "e"]
        assert not is_special_ffs(fixed_edge, rest)

    record(9, "complement of the fixed edge is not special", check)


# ---------------------------------------------------------------- criterion 10


def _membership():
    assert membership_disagreements(50) == []


def _path_properties(running):
    sub = parse_ct(SUBDIVIDED)
    rng = random.Random(7)
    for _ in range(300):
        p = random_walk(sub.graph, rng, rng.randint(0, 12))
        raw = []
        for e in p:
            raw.append(e)
            if rng.random() < 0.3:
                raw += [inv(e), e]
        once = tighten(sub.graph, raw)
        assert tighten(sub.graph, once) == once == free_cancel(p)
    g, f = running.graph, running.fmap
    for _ in range(300):
        p = random_walk(g, rng, rng.randint(1, 8))
        q = random_walk(g, rng, rng.randint(1, 8), start=g.dst(p[-1]))
        assert map_path(f, p + q) == tighten(g, map_path(f, p) + map_path(f, q))


def _line_invariance(running, fixed_edge):
    for c in (running, fixed_edge):
        for line in all_limit_lines(c):
            assert is_invariant(c, line, depth=50)
            if line.is_periodic:
                assert c.fmap.map_circuit(Circuit.of(line.loop)) == Circuit.of(line.loop)
            else:
                assert occurs_in(line.window(c, 20), c.map_path(line.window(c, 50)))


def whitehead_disagreements(max_len=4, depth=3):
    keys = cyclic_words(2, max_len)
    bad = []
    for u in keys:
        orbit = whitehead_closure(u, 2, depth)
        for v in keys:
            if whitehead_orbit([CyclicWord(u, 2)], [CyclicWord(v, 2)])[0] != (v in orbit):
                bad.append((u, v))
    return bad


def _random_tree(rng, leaves):
    if leaves == 1:
        return rng.choice("xy")
    n_kids = rng.randint(1, min(3, leaves))
    cuts = sorted(rng.sample(range(1, leaves), n_kids - 1)) if n_kids > 1 else []
    sizes = [b - a for a, b in zip([0] + cuts, cuts + [leaves])]
    return (rng.choice("ou"), [_random_tree(rng, s) for s in sizes])


def _build(t):
    if isinstance(t, str):
        return label(t)
    kind, kids = t
    return IteratedSet(tuple(_build(k) for k in kids), ordered=kind == "o")


def _shuffled(rng, t):
    """An isomorphic copy: children of unordered nodes reshuffled."""
    if isinstance(t, str):
        return t
    kind, kids = t
    kids = [_shuffled(rng, k) for k in kids]
    if kind == "u":
        rng.shuffle(kids)
    return (kind, kids)


def _iterset(n_trees=150):
    rng = random.Random(11)
    for _ in range(n_trees):
        s = _random_tree(rng, rng.randint(2, 8))
        t = _random_tree(rng, rng.randint(2, 8)) if rng.random() < 0.5 else _shuffled(rng, s)
        if isinstance(s, str) or isinstance(t, str):
            continue
        assert equivalent(_build(s), _build(t))[0] == trees_isomorphic(s, t)
        assert automorphisms(_build(s)).order == count_automorphisms(s)


def _verify(running, fixed_edge):
    for c in (running, fixed_edge):
        phi = OuterAuto(c.automorphism)
        for k in (0, 1, 2):
            assert verify_conjugator(phi, phi, phi.power(k))
        assert all(x_membership(c, theta=phi).values())


def test_criterion_10_property_suites(running, fixed_edge):
    def check():
        _membership()
        _path_properties(running)
        _line_invariance(running, fixed_edge)
        assert whitehead_disagreements() == []
        _iterset()
        _verify(running, fixed_edge)

    record(10, "property suites against brute-force oracles", check)


if __name__ == "__main__":
    import sys

    from upgconj import example_path
    from upgconj.ct import load_ct

    run, fe = load_ct(example_path("running")), load_ct(example_path("fixed_edge"))
    fixtures = {"running": run, "fixed_edge": fe}
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            args = [fixtures[p] for p in fn.__code__.co_varnames[: fn.__code__.co_argcount]]
            try:
                fn(*args)
            except Exception:
                pass
    sys.exit(0 if all(v.startswith("PASS") for v in RESULTS.values()) else 1)
