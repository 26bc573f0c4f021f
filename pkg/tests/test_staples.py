import pytest

from upgconj.ct import ct_power
from upgconj.invariants import limit_lines
from upgconj.staples import (
    LINEAR_LEFT,
    equivalence_classes,
    forward_index,
    global_staple_pairs,
    m_of_phi,
    orbit_bound,
    staple_pairs,
    staple_pairs_by_ray,
    staples,
    translation_number,
    visible_lines,
    visible_staple_pairs,
    _window,
)

STAPLE_TEXTS = {"a^inf R_c", "a^inf b a^inf"}
PAIR_KEYS = {("a^inf b a^inf", "a^inf R_c"), ("a^inf b a^inf", "a^inf b a^inf")}


def occurs_in(small, big):
    n = len(small)
    return any(big[i : i + n] == small for i in range(len(big) - n + 1))


def test_staples_of_running_example(running):
    assert {str(x) for x in staples(running)} == STAPLE_TEXTS


def test_staple_pairs_of_running_example(running):
    assert set(global_staple_pairs(running)) == PAIR_KEYS
    for pairs in global_staple_pairs(running).values():
        for b in pairs:
            assert m_of_phi(running, b) == 1
            assert str(b.axis) == "[a]"


def test_staple_pairs_form_one_class(running):
    classes = equivalence_classes(staple_pairs_by_ray(running))
    assert classes == [frozenset(PAIR_KEYS)]


def test_orbit_representatives(running):
    counts = {n: len(staple_pairs(running, n)) for n in running.higher_edges}
    assert counts == {"c": 1, "d": 2, "e": 3, "q": 4}
    assert [b.index for b in staple_pairs(running, "q")] == [3, 5, 8, 12]
    assert {n: orbit_bound(running, n) for n in running.higher_edges} == {"c": 5, "d": 10, "e": 15, "q": 15}
    assert all(b.kind == LINEAR_LEFT for n in running.higher_edges for b in staple_pairs(running, n))


def test_representatives_lie_in_distinct_orbits(running):
    for n in running.higher_edges:
        w = _window(running, n)
        reps = staple_pairs(running, n)
        for a in reps:
            for b in reps:
                if a.index >= b.index:
                    continue
                x, y = a.line_indices
                while x < b.line_indices[0]:
                    x, y = w.forward_index(x), w.forward_index(y)
                assert (x, y) != b.line_indices


def test_every_visible_pair_is_represented(running):
    for n in running.higher_edges:
        reps = {b.key for b in staple_pairs(running, n)}
        assert {b.key for b in visible_staple_pairs(running, n, 30)} <= reps


def test_translation_numbers(running):
    assert {n: translation_number(running, n) for n in running.higher_edges} == {"c": 1, "d": 2, "e": 3, "q": 1}


def test_forward_index_is_increasing(running, fixed_edge):
    for c in (running, fixed_edge):
        for n in c.higher_edges:
            js = [forward_index(c, n, i) for i in range(1, 15)]
            assert all(j > i for i, j in enumerate(js, start=1))
            assert js == sorted(set(js))
    with pytest.raises(IndexError):
        forward_index(running, "q", 0)


def test_forward_index_carries_rho_into_rho(running, fixed_edge):
    for c in (running, fixed_edge):
        for n in c.higher_edges:
            w = _window(c, n)
            for i in range(1, 15):
                j = w.forward_index(i)
                assert occurs_in(c.map_path(w.rho(i)), w.rho(j))


def test_visible_lines_are_limit_lines(running, fixed_edge):
    for c in (running, fixed_edge):
        for n in c.higher_edges:
            omega = {str(x) for x in limit_lines(c, n)}
            assert {str(v.line) for v in visible_lines(c, n, 14)} <= omega


def test_no_visible_lines_requested(running):
    assert visible_lines(running, "q", 0) == []
    assert visible_staple_pairs(running, "q", 0) == []


def test_square_doubles_slide_and_translation(running):
    sq = ct_power(running, 2)
    for n in running.higher_edges:
        assert translation_number(sq, n) == 2 * translation_number(running, n)
        assert all(m_of_phi(sq, b) == 2 for b in staple_pairs(sq, n))
    assert set(global_staple_pairs(sq)) == PAIR_KEYS


def test_staples_are_limit_lines_with_a_periodic_end(running, fixed_edge):
    for c in (running, fixed_edge):
        omega = {str(x): x for n in c.higher_edges for x in limit_lines(c, n)}
        for x in staples(c):
            assert str(x) in omega
            assert not x.is_periodic
            assert any(r.is_periodic_end for r in x.ends())
