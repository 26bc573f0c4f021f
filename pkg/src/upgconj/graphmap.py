"""Marked graphs, edge paths and graph maps.

An oriented edge is a pair ``(name, sign)`` with sign ``+1`` for the edge and
``-1`` for its reversal.  Paths are tuples of oriented edges.  In text, an
edge name is a lowercase letter optionally followed by primes and digits
(``c``, ``c'``, ``e2``); uppercase spells the reversal.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .freeauto import Automorphism
from .words import CyclicWord, EmptyWord, Word, reduce

DirEdge = tuple[str, int]
EdgePath = tuple[DirEdge, ...]

_TOKEN = re.compile(r"[A-Za-z]'*[0-9]*")


class BrokenPath(ValueError):
    pass


def inv(e: DirEdge) -> DirEdge:
    return (e[0], -e[1])


def reverse(p: Sequence[DirEdge]) -> EdgePath:
    return tuple(inv(e) for e in reversed(p))


def parse_path(text: str) -> EdgePath:
    text = text.strip()
    if text in ("", "1", "-"):
        return ()
    out = []
    pos = 0
    for m in _TOKEN.finditer(text):
        if text[pos:m.start()].strip(" .*"):
            raise ValueError(f"bad edge path {text!r}")
        tok = m.group(0)
        name = tok[0].lower() + tok[1:]
        out.append((name, 1 if tok[0].islower() else -1))
        pos = m.end()
    if text[pos:].strip(" .*"):
        raise ValueError(f"bad edge path {text!r}")
    return tuple(out)


def format_edge(e: DirEdge) -> str:
    name, s = e
    return name if s > 0 else name[0].upper() + name[1:]


def format_path(p: Sequence[DirEdge]) -> str:
    return "".join(format_edge(e) for e in p) if p else "1"


def free_cancel(p: Iterable[DirEdge]) -> EdgePath:
    stack: list[DirEdge] = []
    for e in p:
        if stack and stack[-1] == inv(e):
            stack.pop()
        else:
            stack.append(e)
    return tuple(stack)


@dataclass(frozen=True)
class MarkedGraph:
    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str, str], ...]  # (name, source, target)
    tree: frozenset[str]
    marking: Mapping[str, Word] = field(hash=False, compare=False)
    rank: int = 0

    @cached_property
    def ends(self) -> dict[str, tuple[str, str]]:
        return {name: (s, t) for name, s, t in self.edges}

    @property
    def edge_names(self) -> tuple[str, ...]:
        return tuple(name for name, _, _ in self.edges)

    @property
    def base(self) -> str:
        return self.vertices[0]

    def src(self, e: DirEdge) -> str:
        s, t = self.ends[e[0]]
        return s if e[1] > 0 else t

    def dst(self, e: DirEdge) -> str:
        s, t = self.ends[e[0]]
        return t if e[1] > 0 else s

    def check_composable(self, p: Sequence[DirEdge]) -> None:
        for e in p:
            if e[0] not in self.ends:
                raise BrokenPath(f"unknown edge {e[0]!r}")
        for x, y in zip(p, p[1:]):
            if self.dst(x) != self.src(y):
                raise BrokenPath(f"{format_edge(x)} does not meet {format_edge(y)}")

    def tighten(self, p: Sequence[DirEdge]) -> EdgePath:
        self.check_composable(p)
        return free_cancel(p)

    @cached_property
    def tree_paths(self) -> dict[str, EdgePath]:
        """Path in the spanning tree from the base vertex to each vertex."""
        paths = {self.base: ()}
        queue = deque([self.base])
        while queue:
            v = queue.popleft()
            for name, s, t in self.edges:
                if name not in self.tree:
                    continue
                for a, b, sign in ((s, t, 1), (t, s, -1)):
                    if a == v and b not in paths:
                        paths[b] = paths[v] + ((name, sign),)
                        queue.append(b)
        return paths

    def loop_of(self, name: str) -> EdgePath:
        s, t = self.ends[name]
        return free_cancel(self.tree_paths[s] + ((name, 1),) + reverse(self.tree_paths[t]))

    def non_tree_edges(self) -> tuple[str, ...]:
        return tuple(n for n in self.edge_names if n not in self.tree)

    def path_word(self, p: Sequence[DirEdge]) -> Word:
        """The element of F_n read by closing p up through the tree and applying the marking."""
        letters: list[int] = []
        for name, s in p:
            if name in self.tree:
                continue
            w = self.marking[name]
            letters.extend(w.letters if s > 0 else w.inverse().letters)
        return reduce(letters, self.rank)

    @cached_property
    def marking_auto(self) -> Automorphism:
        """Sends x_j to the marking word of the j-th non-tree edge."""
        return Automorphism(tuple(self.marking[n] for n in self.non_tree_edges()))

    @cached_property
    def marking_inverse(self) -> Automorphism:
        return self.marking_auto.inverse()

    def word_path(self, w: Word) -> EdgePath:
        """The tight loop at the base vertex whose marking word is w."""
        coords = self.marking_inverse.apply(w)
        names = self.non_tree_edges()
        raw: list[DirEdge] = []
        for g in coords.letters:
            loop = self.loop_of(names[abs(g) - 1])
            raw.extend(loop if g > 0 else reverse(loop))
        return free_cancel(raw)


def cyclic_tighten(p: Sequence[DirEdge]) -> EdgePath:
    p = free_cancel(p)
    while len(p) >= 2 and p[0] == inv(p[-1]):
        p = p[1:-1]
    return p


def _edge_key(e: DirEdge) -> tuple[str, int]:
    return (e[0], -e[1])


def canonical_rotation(p: Sequence[DirEdge]) -> EdgePath:
    p = tuple(p)
    if not p:
        return p
    rots = [p[i:] + p[:i] for i in range(len(p))]
    return min(rots, key=lambda r: [_edge_key(e) for e in r])


@dataclass(frozen=True)
class Circuit:
    edges: EdgePath

    @classmethod
    def of(cls, p: Sequence[DirEdge]) -> "Circuit":
        return cls(canonical_rotation(cyclic_tighten(p)))

    def reversed(self) -> "Circuit":
        return Circuit.of(reverse(self.edges))

    def __len__(self) -> int:
        return len(self.edges)

    def __str__(self) -> str:
        return format_path(self.edges)


def circuit_of(cls: CyclicWord, g: MarkedGraph) -> Circuit:
    if not cls.letters:
        raise EmptyWord("trivial class")
    return Circuit.of(g.word_path(cls.as_word()))


@dataclass(frozen=True)
class GraphMap:
    """A map between marked graphs sending each edge to a tight edge path."""

    source: MarkedGraph
    target: MarkedGraph
    images: Mapping[str, EdgePath] = field(hash=False, compare=False)

    def image(self, e: DirEdge) -> EdgePath:
        img = self.images[e[0]]
        return img if e[1] > 0 else reverse(img)

    def map_path(self, p: Sequence[DirEdge]) -> EdgePath:
        raw: list[DirEdge] = []
        for e in p:
            raw.extend(self.image(e))
        return free_cancel(raw)

    def map_circuit(self, c: Circuit) -> Circuit:
        return Circuit.of(self.map_path(c.edges))

    def iterate_path(self, p: Sequence[DirEdge], k: int) -> EdgePath:
        p = tuple(p)
        for _ in range(k):
            p = self.map_path(p)
        return p

    def vertex_image(self, v: str) -> str:
        for name, s, t in self.source.edges:
            img = self.images[name]
            if s == v and img:
                return self.target.src(img[0])
            if t == v and img:
                return self.target.dst(img[-1])
        return v


def map_path(f: GraphMap, p: Sequence[DirEdge]) -> EdgePath:
    return f.map_path(p)


def tighten(g: MarkedGraph, p: Sequence[DirEdge]) -> EdgePath:
    return g.tighten(p)


def iterate_length(f: GraphMap, e: str | DirEdge, k: int) -> int:
    """Length of f_#^k(E), grown one tail at a time when f(E) = E u."""
    if k < 0:
        raise ValueError("k must be non-negative")
    edge = (e, 1) if isinstance(e, str) else e
    img = f.image(edge)
    if not img or img[0] != edge:
        return len(f.iterate_path((edge,), k))
    tail = img[1:]
    path: list[DirEdge] = [edge]
    for _ in range(k):
        path = list(free_cancel(path + list(tail)))
        tail = f.map_path(tail)
    return len(path)


def bcc(h: GraphMap) -> int:
    """A bounded cancellation constant for h: Lipschitz constant times the number of edges."""
    lip = max((len(p) for p in h.images.values()), default=0)
    return lip * len(h.source.edges)


def induced_automorphism(f: GraphMap) -> Automorphism:
    """The automorphism of F_n induced by a self-map fixing the base vertex, via the marking."""
    g = f.source
    if f.vertex_image(g.base) != g.base:
        raise ValueError("self-map must fix the base vertex")
    names = g.non_tree_edges()
    edge_basis = Automorphism(
        tuple(_edge_coords(g, f.map_path(g.loop_of(n)), names) for n in names)
    )
    return g.marking_auto * edge_basis * g.marking_inverse


def _edge_coords(g: MarkedGraph, p: EdgePath, names: Sequence[str]) -> Word:
    index = {n: i + 1 for i, n in enumerate(names)}
    return reduce([index[n] * s for n, s in p if n in index], g.rank)
