"""Visible lines along an eigenray, translation numbers and staple pairs.

Everything is computed downstairs on R_E with positions indexed by the terms
of its complete splitting.  The splitting of R_E = E . u . f_#(u) . ... is
assembled block by block, so the f_# image of every term is a known interval
of later terms; this is what makes forward_index exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .ct import LINEAR, CTData, Term, _tail_splitting, single_term, stabilization_constant, term_image
from .graphmap import EdgePath
from .invariants import Line, acc_np, adjacency_line, all_acc_np, covering_pairs, ray_partial_order
from .words import CyclicWord

QUASI_EXCEPTIONAL = "quasi-exceptional"
EXCEPTIONAL = "exceptional"
LINEAR_LEFT = "linear-left"  # sigma_i is a linear edge crossed forwards
LINEAR_RIGHT = "linear-right"  # sigma_i is a linear edge crossed backwards


class EigenrayWindow:
    """A growing prefix of the complete splitting of R_E, with term images tracked."""

    def __init__(self, c: CTData, name: str):
        self.c = c
        self.name = name
        self.terms: list[Term] = [single_term(c, (name, 1))]
        self.images: list[tuple[int, int]] = []
        self.sigmas: list[int] = [0]  # sigmas[i] is the term index of sigma_i (index 0 is E itself)
        self._block = list(_tail_splitting(c, name))
        self._block_start = 1
        self.images.append((0, 1 + len(self._block)))
        self._append(self._block)
        self.p = len(self.sigmas) - 1

    def _append(self, block: list[Term]) -> None:
        for t in block:
            if t.growing:
                self.sigmas.append(len(self.terms))
            self.terms.append(t)

    def _grow(self) -> None:
        nxt: list[Term] = []
        start = self._block_start + len(self._block)
        for t in self._block:
            img = term_image(self.c, t)
            self.images.append((start + len(nxt), start + len(nxt) + len(img)))
            nxt.extend(img)
        self._block_start = start
        self._block = nxt
        self._append(nxt)

    def ensure_sigma(self, i: int) -> None:
        while len(self.sigmas) <= i:
            self._grow()

    def ensure_image(self, term_index: int) -> None:
        while len(self.images) <= term_index:
            self._grow()

    def sigma(self, i: int) -> Term:
        self.ensure_sigma(i)
        return self.terms[self.sigmas[i]]

    def rho(self, i: int) -> EdgePath:
        self.ensure_sigma(i + 1)
        lo, hi = self.sigmas[i], self.sigmas[i + 1]
        return tuple(e for t in self.terms[lo + 1 : hi] for e in t.path)

    def line(self, i: int) -> Line:
        if i < 1:
            raise IndexError("visible lines are indexed from 1")
        return adjacency_line(self.c, self.sigma(i), self.rho(i), self.sigma(i + 1))

    def forward_index(self, i: int) -> int:
        """j with f_#(rho_i) inside rho_j: sigma_j is the last growing term of f_#(sigma_i)."""
        self.ensure_sigma(i)
        t = self.sigmas[i]
        self.ensure_image(t)
        lo, hi = self.images[t]
        while len(self.terms) < hi:
            self._grow()
        last = max(k for k in range(lo, hi) if self.terms[k].growing)
        return self.sigmas.index(last)


def _window(c: CTData, name: str) -> EigenrayWindow:
    cache = c.__dict__.setdefault("_staple_windows", {})
    if name not in cache:
        cache[name] = EigenrayWindow(c, name)
    return cache[name]


@dataclass(frozen=True)
class VisibleLine:
    ray: str
    index: int
    left: Term
    rho: EdgePath
    right: Term
    line: Line


def visible_lines(c: CTData, name: str, count: int) -> list[VisibleLine]:
    w = _window(c, name)
    out = []
    for i in range(1, count + 1):
        out.append(VisibleLine(name, i, w.sigma(i), w.rho(i), w.sigma(i + 1), w.line(i)))
    return out


def forward_index(c: CTData, name: str, i: int) -> int:
    if i < 1:
        raise IndexError("visible lines are indexed from 1")
    return _window(c, name).forward_index(i)


def is_topmost(c: CTData, name: str, line: Line) -> bool:
    order = ray_partial_order(c)
    if not any(hi == name for _, hi in order):
        return True
    cover = covering_pairs(order)
    return any(ray.kind == "eigen" and (ray.edge, name) in cover for ray in line.ends())


def translation_number(c: CTData, name: str) -> int:
    """Number of topmost non-periodic lines among the visible lines 1..p."""
    w = _window(c, name)
    total = 0
    for i in range(1, w.p + 1):
        line = w.line(i)
        if not line.is_periodic and is_topmost(c, name, line):
            total += 1
    return total


def orbit_bound(c: CTData, name: str) -> int:
    """B(r): the index of the image of line p under 2M applications of f_#."""
    w = _window(c, name)
    j = w.p
    for _ in range(2 * stabilization_constant(c)):
        j = w.forward_index(j)
    return j


@dataclass(frozen=True)
class StaplePair:
    ray: str
    index: int
    kind: str
    line_indices: tuple[int, int]
    lines: tuple[Line, Line]
    axis: CyclicWord
    slide: int  # m_b(phi)

    @property
    def key(self) -> tuple[str, str]:
        return str(self.lines[0]), str(self.lines[1])

    def __str__(self) -> str:
        return f"({self.lines[0]}, {self.lines[1]})"


def _edge_of(t: Term) -> tuple[str, int] | None:
    return t.edge if t.kind == LINEAR else None


def _pair_at(c: CTData, w: EigenrayWindow, i: int) -> StaplePair | None:
    s_i, s_next = w.sigma(i), w.sigma(i + 1)
    deg = c.degrees
    e_i, e_next = _edge_of(s_i), _edge_of(s_next)
    if (
        e_i is not None
        and e_next is not None
        and e_i[1] > 0
        and e_next[1] < 0
        and c.twist_circuit(e_i[0]) == c.twist_circuit(e_next[0])
        and deg[e_i[0]] * deg[e_next[0]] < 0
        and c.is_nielsen(w.rho(i))
        and i >= 2
    ):
        lines = (w.line(i - 1), w.line(i + 1))
        return StaplePair(w.name, i, QUASI_EXCEPTIONAL, (i - 1, i + 1), lines,
                          c.circuit_word(c.twist_circuit(e_i[0])), deg[e_i[0]] - deg[e_next[0]])
    if i < 2:
        return None
    if s_i.kind == "exceptional":
        assert s_i.edge is not None and s_i.edge2 is not None
        a, b = s_i.edge[0], s_i.edge2
        lines = (w.line(i - 1), w.line(i))
        return StaplePair(w.name, i, EXCEPTIONAL, (i - 1, i), lines,
                          c.circuit_word(c.twist_circuit(a)), deg[a] - deg[b])
    if e_i is not None:
        prev, cur = w.line(i - 1), w.line(i)
        name = e_i[0]
        axis = c.circuit_word(c.twist_circuit(name))
        if e_i[1] > 0 and not cur.is_periodic:
            return StaplePair(w.name, i, LINEAR_LEFT, (i - 1, i), (prev, cur), axis, deg[name])
        if e_i[1] < 0 and not prev.is_periodic:
            return StaplePair(w.name, i, LINEAR_RIGHT, (i - 1, i), (prev, cur), axis, -deg[name])
    return None


def visible_staple_pairs(c: CTData, name: str, bound: int) -> list[StaplePair]:
    w = _window(c, name)
    out = []
    for i in range(2, bound + 2):
        b = _pair_at(c, w, i)
        if b is not None:
            out.append(b)
    return out


def staple_pairs(c: CTData, name: str) -> list[StaplePair]:
    """Orbit representatives of the visible staple pairs with index at most B(r)."""
    w = _window(c, name)
    found = visible_staple_pairs(c, name, orbit_bound(c, name))
    reps: list[StaplePair] = []
    for b in found:
        duplicate = False
        for r in reps:
            x, y = r.line_indices
            while x < b.line_indices[0]:
                x, y = w.forward_index(x), w.forward_index(y)
            if (x, y) == b.line_indices:
                duplicate = True
                break
        if not duplicate:
            reps.append(b)
    return reps


def m_of_phi(c: CTData, b: StaplePair) -> int:
    """How far the second staple slides along the common axis under the lift fixing the first."""
    return b.slide


def staples(c: CTData) -> list[Line]:
    """Non-periodic limit lines with at least one periodic end."""
    return [x for x in all_acc_np(c) if any(r.is_periodic_end for r in x.ends())]


def global_staple_pairs(c: CTData) -> dict[tuple[str, str], list[StaplePair]]:
    out: dict[tuple[str, str], list[StaplePair]] = {}
    for name in c.higher_edges:
        for b in staple_pairs(c, name):
            out.setdefault(b.key, []).append(b)
    return dict(sorted(out.items()))


def staple_pairs_by_ray(c: CTData) -> dict[str, set[tuple[str, str]]]:
    return {name: {b.key for b in staple_pairs(c, name)} for name in c.higher_edges}


def equivalence_classes(pairs_by_ray: Mapping[str, Iterable]) -> list[frozenset]:
    """Classes of the relation generated by co-occurrence in one ray."""
    parent: dict = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for items in pairs_by_ray.values():
        items = list(items)
        for x in items:
            find(x)
        for x, y in zip(items, items[1:]):
            parent[find(x)] = find(y)
    groups: dict = {}
    for x in parent:
        groups.setdefault(find(x), set()).add(x)
    return sorted((frozenset(g) for g in groups.values()), key=lambda g: sorted(map(str, g)))
