"""Stallings graphs of finitely generated subgroups of a free group.

A based folded graph with edges labelled by positive generator indices
represents a subgroup: its elements are the labels of reduced loops at the
base vertex.  Everything here (membership, conjugacy, normalizers, pairs)
is read off such graphs.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .words import Word, reduce


class TrivialSubgroup(ValueError):
    pass


class NotGoodPair(ValueError):
    pass


Edge = tuple[int, int, int]  # (source, target, label > 0)


@dataclass(frozen=True)
class SubgroupGraph:
    n_vertices: int
    edges: tuple[Edge, ...]
    base: int
    rank: int
    folded: bool = True

    @cached_property
    def adj(self) -> list[dict[int, int]]:
        """Signed-label adjacency: adj[v][+l] follows an l-edge, adj[v][-l] goes backwards."""
        out: list[dict[int, int]] = [dict() for _ in range(self.n_vertices)]
        for s, t, l in self.edges:
            out[s][l] = t
            out[t][-l] = s
        return out

    def read(self, letters: Sequence[int], start: int | None = None) -> int | None:
        v = self.base if start is None else start
        for g in letters:
            v = self.adj[v].get(g)
            if v is None:
                return None
        return v

    @property
    def free_rank(self) -> int:
        return len(self.edges) - self.n_vertices + 1

    def is_trivial(self) -> bool:
        return not self.edges

    def generators(self) -> list[Word]:
        """A free basis read off a BFS spanning tree."""
        path = self._tree_paths(self.base)
        tree = set()
        for v, (parent, label) in self._parents(self.base).items():
            tree.add((parent, v, label) if label > 0 else (v, parent, -label))
        gens = []
        for e in self.edges:
            if e in tree:
                continue
            s, t, l = e
            gens.append(reduce(path[s] + (l,) + tuple(-g for g in reversed(path[t])), self.rank))
        return gens

    def _parents(self, root: int) -> dict[int, tuple[int, int]]:
        parents: dict[int, tuple[int, int]] = {}
        seen = {root}
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for g in sorted(self.adj[v], key=_label_key):
                w = self.adj[v][g]
                if w not in seen:
                    seen.add(w)
                    parents[w] = (v, g)
                    queue.append(w)
        return parents

    def _tree_paths(self, root: int) -> dict[int, tuple[int, ...]]:
        """Label of a tree path from root to each vertex (BFS order)."""
        paths = {root: ()}
        seen = {root}
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for g in sorted(self.adj[v], key=_label_key):
                w = self.adj[v][g]
                if w not in seen:
                    seen.add(w)
                    paths[w] = paths[v] + (g,)
                    queue.append(w)
        return paths

    def path_word(self, u: int, v: int) -> Word:
        return reduce(self._tree_paths(u)[v], self.rank)


def _label_key(g: int) -> tuple[int, int]:
    return (abs(g), 0 if g > 0 else 1)


def _find(parent: list[int], x: int) -> int:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def fold_graph(n_vertices: int, edges: Iterable[Edge], base: int, rank: int) -> SubgroupGraph:
    """Fold an arbitrary labelled graph, then trim hanging trees away from the base."""
    edges = list(edges)
    parent = list(range(n_vertices))
    changed = True
    while changed:
        changed = False
        seen: dict[tuple[int, int], int] = {}
        for s, t, l in edges:
            s, t = _find(parent, s), _find(parent, t)
            for key, other in (((s, l), t), ((t, -l), s)):
                if key in seen:
                    a, b = _find(parent, seen[key]), _find(parent, other)
                    if a != b:
                        parent[max(a, b)] = min(a, b)
                        changed = True
                else:
                    seen[key] = other
        edges = list({(_find(parent, s), _find(parent, t), l) for s, t, l in edges})
    root = _find(parent, base)
    return _trim(_renumber(edges, root, rank))


def _renumber(edges: list[Edge], root: int, rank: int) -> SubgroupGraph:
    adj: dict[int, dict[int, int]] = {root: {}}
    for s, t, l in edges:
        adj.setdefault(s, {})[l] = t
        adj.setdefault(t, {})[-l] = s
    order = {root: 0}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for g in sorted(adj[v], key=_label_key):
            w = adj[v][g]
            if w not in order:
                order[w] = len(order)
                queue.append(w)
    new_edges = tuple(sorted((order[s], order[t], l) for s, t, l in edges if s in order))
    return SubgroupGraph(len(order), new_edges, 0, rank)


def _trim(g: SubgroupGraph) -> SubgroupGraph:
    """Remove valence-one vertices other than the base, repeatedly."""
    edges = set(g.edges)
    while True:
        valence: dict[int, int] = {}
        for s, t, _ in edges:
            valence[s] = valence.get(s, 0) + 1
            valence[t] = valence.get(t, 0) + 1
        leaves = {v for v, k in valence.items() if k == 1 and v != g.base}
        if not leaves:
            break
        edges = {e for e in edges if e[0] not in leaves and e[1] not in leaves}
    if len(edges) == len(g.edges):
        return g
    return _renumber(list(edges), g.base, g.rank)


def fold(generators: Sequence[Word], rank: int | None = None) -> SubgroupGraph:
    if rank is None:
        if not generators:
            raise ValueError("rank is required when there are no generators")
        rank = generators[0].rank
    edges: list[Edge] = []
    n = 1
    for w in generators:
        letters = w.letters
        if not letters:
            continue
        prev = 0
        for i, g in enumerate(letters):
            if i == len(letters) - 1:
                nxt = 0
            else:
                nxt = n
                n += 1
            edges.append((prev, nxt, g) if g > 0 else (nxt, prev, -g))
            prev = nxt
    return fold_graph(n, edges, 0, rank)


def membership(g: SubgroupGraph, w: Word) -> bool:
    return g.read(w.letters) == g.base


def subgroup_join(*graphs: SubgroupGraph) -> SubgroupGraph:
    gens = [w for h in graphs for w in h.generators()]
    return fold(gens, graphs[0].rank)


def conjugate_subgroup(h: SubgroupGraph, g: Word) -> SubgroupGraph:
    """The subgroup g H g^-1."""
    return fold([w.conjugate(g) for w in h.generators()], h.rank)


# ---------------------------------------------------------------- cores

@dataclass(frozen=True)
class Core:
    """Core of a based graph together with the hair word from the base to core vertex 0."""

    graph: SubgroupGraph  # base field = 0 = the hair's endpoint
    hair: Word


def core_of(h: SubgroupGraph) -> Core:
    if h.is_trivial():
        return Core(SubgroupGraph(0, (), 0, h.rank), Word.identity(h.rank))
    edges = set(h.edges)
    while True:
        valence: dict[int, int] = {}
        for s, t, _ in edges:
            valence[s] = valence.get(s, 0) + 1
            valence[t] = valence.get(t, 0) + 1
        leaves = {v for v, k in valence.items() if k == 1}
        if not leaves:
            break
        edges = {e for e in edges if e[0] not in leaves and e[1] not in leaves}
    core_vertices = {v for e in edges for v in e[:2]}
    paths = h._tree_paths(h.base)
    start = min(core_vertices, key=lambda v: (len(paths[v]), v))
    hair = reduce(paths[start], h.rank)
    return Core(_renumber(list(edges), start, h.rank), hair)


def _bfs_code(g: SubgroupGraph, start: int) -> tuple[tuple[int, ...], list[int]]:
    """Relabel vertices in BFS order from start; return the sorted edge code and the order."""
    order = {start: 0}
    queue = deque([start])
    seq = [start]
    while queue:
        v = queue.popleft()
        for lab in sorted(g.adj[v], key=_label_key):
            w = g.adj[v][lab]
            if w not in order:
                order[w] = len(order)
                seq.append(w)
                queue.append(w)
    code = tuple(sorted((order[s], order[t], l) for s, t, l in g.edges))
    return tuple(x for e in code for x in e), seq


@dataclass(frozen=True, order=True)
class SubgroupConjClass:
    n_vertices: int
    code: tuple[int, ...]
    rank: int

    @property
    def free_rank(self) -> int:
        return len(self.code) // 3 - self.n_vertices + 1 if self.n_vertices else 0


def conj_class(h: SubgroupGraph) -> SubgroupConjClass:
    c = core_of(h).graph
    if c.n_vertices == 0:
        return SubgroupConjClass(0, (), h.rank)
    best = min(_bfs_code(c, v)[0] for v in range(c.n_vertices))
    return SubgroupConjClass(c.n_vertices, best, h.rank)


def conj_class_equal(a: SubgroupGraph | SubgroupConjClass, b: SubgroupGraph | SubgroupConjClass) -> bool:
    if isinstance(a, SubgroupGraph):
        a = conj_class(a)
    if isinstance(b, SubgroupGraph):
        b = conj_class(b)
    return a == b


def _based_isomorphisms(c1: SubgroupGraph, c2: SubgroupGraph, v1: int) -> list[int]:
    """Vertices v2 of c2 such that a label-preserving isomorphism c1 -> c2 sends v1 to v2."""
    if c1.n_vertices != c2.n_vertices or len(c1.edges) != len(c2.edges):
        return []
    code1, _ = _bfs_code(c1, v1)
    return [v for v in range(c2.n_vertices) if _bfs_code(c2, v)[0] == code1]


def conjugator(h1: SubgroupGraph, h2: SubgroupGraph) -> Word | None:
    """Some g with g H1 g^-1 = H2, or None if the subgroups are not conjugate."""
    k1, k2 = core_of(h1), core_of(h2)
    if k1.graph.n_vertices == 0 or k2.graph.n_vertices == 0:
        return Word.identity(h1.rank) if k1.graph.n_vertices == k2.graph.n_vertices else None
    targets = _based_isomorphisms(k1.graph, k2.graph, 0)
    if not targets:
        return None
    p = k2.graph.path_word(0, targets[0])
    return k2.hair * p * k1.hair.inverse()


# ------------------------------------------------------- normalizer quotient

@dataclass(frozen=True)
class QuotientGroup:
    """A finite group given by coset representatives and a multiplication table (index 0 = identity)."""

    representatives: tuple[Word, ...]
    table: tuple[tuple[int, ...], ...]

    @property
    def order(self) -> int:
        return len(self.representatives)


def normalizer_quotient(h: SubgroupGraph) -> QuotientGroup:
    """N(H)/H read from the label-preserving automorphisms of the core of H.

    An element g normalizes a subgroup carried at core vertex c exactly when
    g reads a path from c to a vertex in the orbit of c under core
    automorphisms.  The deck group of the minimal normal cover through H
    restricted to the core is this automorphism group.
    """
    if h.is_trivial():
        raise TrivialSubgroup("N(H)/H is infinite for the trivial subgroup")
    k = core_of(h)
    c = k.graph
    orbit = _based_isomorphisms(c, c, 0)
    # automorphism sigma_v sends 0 to v; as a vertex map via aligned BFS orders
    _, seq0 = _bfs_code(c, 0)
    maps = []
    for v in orbit:
        _, seqv = _bfs_code(c, v)
        maps.append({a: b for a, b in zip(seq0, seqv)})
    index = {v: i for i, v in enumerate(orbit)}
    table = tuple(tuple(index[maps[i][orbit[j]]] for j in range(len(orbit))) for i in range(len(orbit)))
    reps = tuple(k.hair * c.path_word(0, v) * k.hair.inverse() for v in orbit)
    return QuotientGroup(reps, table)


# ---------------------------------------------------------- class splitting

def _immersions(src: SubgroupGraph, dst: SubgroupGraph) -> list[tuple[int, ...]]:
    out = []
    for target in range(dst.n_vertices):
        vmap = {0: target}
        queue = deque([0])
        ok = True
        while queue and ok:
            v = queue.popleft()
            for lab, w in src.adj[v].items():
                img = dst.adj[vmap[v]].get(lab)
                if img is None:
                    ok = False
                    break
                if w in vmap:
                    if vmap[w] != img:
                        ok = False
                        break
                else:
                    vmap[w] = img
                    queue.append(w)
        if ok:
            out.append(tuple(vmap[v] for v in range(src.n_vertices)))
    return out


def split_conj_class(k: SubgroupGraph, h: SubgroupGraph) -> list[SubgroupGraph]:
    """Representatives L <= H, one per H-conjugacy class, of subgroups F_n-conjugate to K."""
    kk, kh = core_of(k), core_of(h)
    if kk.graph.n_vertices == 0:
        return [fold([], k.rank)]
    if kh.graph.n_vertices == 0:
        return []
    ck, ch = kk.graph, kh.graph
    auts = []
    _, seq0 = _bfs_code(ck, 0)
    for v in _based_isomorphisms(ck, ck, 0):
        _, seqv = _bfs_code(ck, v)
        auts.append(dict(zip(seq0, seqv)))
    seen: set[tuple[int, ...]] = set()
    result = []
    kgens = ck.generators()
    for imm in _immersions(ck, ch):
        if imm in seen:
            continue
        for a in auts:
            seen.add(tuple(imm[a[v]] for v in range(ck.n_vertices)))
        t = kh.hair * ch.path_word(0, imm[0])
        result.append(fold([w.conjugate(t) for w in kgens], k.rank))
    return result


def conjugate_within(m1: SubgroupGraph, m2: SubgroupGraph, ambient: SubgroupGraph) -> bool:
    """Are M1, M2 <= L conjugate by an element of L?"""
    g0 = conjugator(m1, m2)
    if g0 is None:
        return False
    if m1.is_trivial():
        return True
    for r in normalizer_quotient(m1).representatives:
        if membership(ambient, g0 * r):
            return True
    return False


# ------------------------------------------------------------------ pairs

def is_good_pair(h1: SubgroupGraph, h2: SubgroupGraph) -> bool:
    if h1.is_trivial() or h2.is_trivial():
        raise TrivialSubgroup("good pairs need non-trivial subgroups")
    return subgroup_join(h1, h2).free_rank == h1.free_rank + h2.free_rank


def pairs_equal(p: tuple[SubgroupGraph, SubgroupGraph], q: tuple[SubgroupGraph, SubgroupGraph]) -> bool:
    for pair in (p, q):
        if not is_good_pair(*pair):
            raise NotGoodPair("pair is not a free product")
    K = subgroup_join(*p)
    L = subgroup_join(*q)
    g = conjugator(K, L)
    if g is None:
        return False
    k1, k2 = (conjugate_subgroup(x, g) for x in p)
    l1, l2 = q
    for n in normalizer_quotient(L).representatives:
        m1, m2 = conjugate_subgroup(k1, n), conjugate_subgroup(k2, n)
        if conjugate_within(m1, l1, L) and conjugate_within(m2, l2, L):
            return True
    return False
