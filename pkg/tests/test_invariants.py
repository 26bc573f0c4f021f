from itertools import permutations

import pytest

from upgconj.ct import parse_ct
from upgconj.graphmap import Circuit, format_path, parse_path
from upgconj.invariants import (
    InvalidTotalOrder,
    NotAnAxis,
    Ray,
    acc_np,
    added_lines,
    algebraic_line,
    all_limit_lines,
    assemble_Ic,
    axes,
    eigengraph,
    eigenray,
    extension_type,
    f_infinity,
    is_invariant,
    is_special_ffs,
    limit_lines,
    line_lifts,
    linear_ffs,
    ray_order_from_lines,
    ray_partial_order,
    special_chain,
    strong_axes,
    twist_coordinate,
)
from upgconj.iterset import equivalent
from upgconj.stallings import is_good_pair
from upgconj.words import Word, conjugacy_class

from test_ct import ROSE_IDENTITY

ONE_HIGHER = """
rank 2
vertices v0
edge a v0 v0 class=fixed image=a
edge b v0 v0 class=higher image=baa
marking tree= words: a=a b=b
"""


def texts(lines):
    return {str(x) for x in lines}


def cls(text, rank=5):
    return conjugacy_class(Word.parse(text, rank))


def occurs_in(small, big):
    n = len(small)
    return any(big[i : i + n] == small for i in range(len(big) - n + 1))


def test_eigenray_prefixes(running):
    assert format_path(eigenray(running, "q").prefix(running, 8)) == "qccbcbba"
    assert format_path(eigenray(running, "c").prefix(running, 11)) == "cbbabaabaaa"
    r = eigenray(running, "e")
    assert r.prefix(running, 10)[:5] == r.prefix(running, 5)


def test_f_infinity_examples(running):
    assert f_infinity(running, parse_path("b")) == ((), Ray.lintail("b", parse_path("a")))
    assert f_infinity(running, parse_path("B")) == ((), Ray.periodic(parse_path("A")))
    assert f_infinity(running, parse_path("C")) == ((), Ray.periodic(parse_path("A")))


def test_limit_lines_of_rq(running):
    assert texts(limit_lines(running, "q")) == {"a^inf R_c", "a^inf b a^inf", "a^inf"}
    assert texts(acc_np(running, "q")) == {"a^inf R_c", "a^inf b a^inf"}


def test_limit_lines_of_rc(running):
    assert {"a^inf", "a^inf b a^inf"} <= texts(limit_lines(running, "c"))


def test_limit_lines_occur_in_their_ray(running, fixed_edge):
    """Every window of a limit line shows up in a long prefix of the ray."""
    for c in (running, fixed_edge):
        for name in c.higher_edges:
            ray = eigenray(c, name).prefix(c, 600)
            for line in limit_lines(c, name):
                w = line.window(c, 6)
                assert occurs_in(w, ray) or occurs_in(tuple((e[0], -e[1]) for e in reversed(w)), ray)


def test_limit_lines_are_invariant(running, fixed_edge):
    for c in (running, fixed_edge):
        for line in all_limit_lines(c):
            assert is_invariant(c, line, depth=50)
            if line.is_periodic:
                assert c.fmap.map_circuit(Circuit.of(line.loop)) == Circuit.of(line.loop)
            else:
                # the image of a window contains the same window: an independent reading of f(L) = L
                assert occurs_in(line.window(c, 20), c.map_path(line.window(c, 50)))


def test_acc_np_is_never_empty(running, fixed_edge):
    for c in (running, fixed_edge):
        for name in c.higher_edges:
            assert acc_np(c, name)


def test_limit_lines_lift_to_eigengraph(running):
    for line in all_limit_lines(running):
        assert line_lifts(running, line)


def test_eigengraph_components(running):
    eg = eigengraph(running)
    summary = sorted((k.flag, k.rays, k.lollipops) for k in eg.components)
    assert summary == [
        ("contractible", ("d", "e"), ()),
        ("infinite-cyclic", ("q",), ("p",)),
        ("large", ("c",), ("b",)),
    ]


def test_eigengraph_of_identity_rose():
    eg = eigengraph(parse_ct(ROSE_IDENTITY))
    assert len(eg.components) == 1
    assert eg.components[0].rank == 2


def test_eigengraph_fixed_edge_joins_vertices(fixed_edge):
    eg = eigengraph(fixed_edge)
    joined = [k for k in eg.components if "e" in k.fixed_edges]
    assert len(joined) == 1
    assert {"v1", "v2"} <= set(joined[0].g_vertices)


def test_axes(running, fixed_edge):
    assert axes(running) == [cls("a")]
    assert axes(fixed_edge) == [cls("a")]
    assert axes(parse_ct(ONE_HIGHER)) == []


def test_strong_axes(running):
    sa = strong_axes(running, cls("a"))
    assert len(sa) == 3
    assert sorted(s.degree for s in sa) == [0, 1, 2]
    back = strong_axes(running, cls("A"))
    assert sorted(s.degree for s in back) == [-2, -1, 0]
    with pytest.raises(NotAnAxis):
        strong_axes(running, cls("b"))


def test_strong_axis_count(running, fixed_edge):
    for c in (running, fixed_edge):
        total = sum(len(strong_axes(c, a)) for a in axes(c))
        assert total == len(c.linear_edges) + len(c.twist_circuits)


def test_twist_coordinates(running):
    base, b_site, p_site = strong_axes(running, cls("a"))
    assert (base.site, b_site.site, p_site.site) == ("base", "b", "p")
    assert twist_coordinate(b_site, base) == 1
    for x in (base, b_site, p_site):
        assert twist_coordinate(x, x) == 0
        for y in (base, b_site, p_site):
            assert twist_coordinate(x, y) == -twist_coordinate(y, x)


def test_partial_order(running, fixed_edge):
    assert ray_partial_order(running) == {("c", "q")}
    assert ray_partial_order(fixed_edge) == frozenset()
    assert ray_partial_order(parse_ct(ONE_HIGHER)) == frozenset()


def test_order_read_from_lines_agrees(running, fixed_edge):
    for c in (running, fixed_edge):
        assert ray_order_from_lines(c) == ray_partial_order(c)


def test_special_chain(running):
    chain = special_chain(running, ["c", "d", "e", "q"])
    assert len(chain) == 4
    assert chain.profiles == [(2,), (3,), (4,), (5,)]
    assert chain.added == (None, "c", "e", "q")


def test_chain_order_must_extend_partial_order(running):
    with pytest.raises(InvalidTotalOrder):
        special_chain(running, ["q", "c", "d", "e"])


def test_chains_share_ends(running, fixed_edge):
    for c in (running, fixed_edge):
        order = ray_partial_order(c)
        firsts, lasts = set(), set()
        for perm in permutations(c.higher_edges):
            if any(perm.index(x) > perm.index(y) for x, y in order):
                continue
            chain = special_chain(c, perm)
            firsts.add(chain.elements[0])
            lasts.add(chain.elements[-1])
        assert len(firsts) == len(lasts) == 1


def test_single_loop_closing_edge_gives_two_step_chain():
    chain = special_chain(parse_ct(ONE_HIGHER))
    assert len(chain) == 2


def test_linear_ffs(running, fixed_edge):
    for c in (running, fixed_edge):
        f0 = linear_ffs(c)
        assert f0.ranks == (2,)
        assert f0.edges == {"a", "b"}
    assert linear_ffs(parse_ct(ROSE_IDENTITY)).ranks == (2,)


def test_special_ffs_queries(running, fixed_edge):
    assert is_special_ffs(running, ["a", "b", "p"])
    assert is_special_ffs(running, ["a", "b", "p", "c"])
    rest = [n for n in fixed_edge.edges if n != "e"]
    assert not is_special_ffs(fixed_edge, rest)
    assert is_special_ffs(fixed_edge, fixed_edge.edges)


def test_extension_types(running):
    chain = special_chain(running, ["c", "d", "e", "q"])
    got = [(t.shape, t.size) for t in (extension_type(running, chain, k) for k in (1, 2, 3))]
    assert got == [("H", "large"), ("HH", "contractible"), ("LH", "infinite-cyclic")]
    eg = {k: comp for comp in eigengraph(running).components for k in comp.rays}
    for k, ray in ((1, "c"), (3, "q")):
        assert extension_type(running, chain, k).size == eg[ray].flag


def test_added_lines(running):
    chain = special_chain(running, ["c", "d", "e", "q"])
    first = added_lines(running, chain, 1)
    assert first.pair is not None and first.pair.kind == "FIX-NP"
    assert texts(added_lines(running, chain, 2).lines) == {"R_d^-1 R_e", "R_e^-1 R_d"}
    # a^{-inf} p^-1 R_q and a^{inf} p^-1 R_q, written with A^inf for the left a^{-inf} end
    assert texts(added_lines(running, chain, 3).lines) == {"A^inf P R_q", "a^inf P R_q"}


def test_algebraic_lines(running):
    chain = special_chain(running)
    by_text = {str(x): x for x in all_limit_lines(running)}
    pp = algebraic_line(running, by_text["a^inf b a^inf"], chain)
    assert pp.kind == "P-P"
    pnp = algebraic_line(running, by_text["a^inf R_c"], chain)
    assert pnp.kind == "P-NP"
    assert pnp.second.free_rank == 2
    de = added_lines(running, chain, 2).lines[0]
    npnp = algebraic_line(running, de, chain)
    assert npnp.kind == "NP-NP"
    assert is_good_pair(npnp.first, npnp.second)


def test_invariant_tree(running, fixed_edge):
    ic = assemble_Ic(running)
    assert ic.ordered and len(ic.children) == 6
    assert [x.name for x in ic.children] == ["chain", "fix", "added-lines", "limit-lines", "axes", "strong-axes"]
    assert assemble_Ic(running).render() == ic.render()
    assert equivalent(ic, assemble_Ic(running))[0]
    assert not equivalent(ic, assemble_Ic(fixed_edge))[0]
