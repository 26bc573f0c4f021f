"""Dynamical and algebraic invariants read off a CT.

Rays and lines are finitely described: an eigenray R_E, a linear tail
E w^(+-inf), or a periodic ray w^(+-inf).  A line is (R-)^-1 rho R+ with rho a
Nielsen path, or a periodic line.  Lines are stored in a normal form so that
equal lines compare equal.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from .ct import (
    FIXED,
    HIGHER,
    LINEAR,
    CTData,
    SplitPath,
    Term,
    coarsen,
    complete_splitting,
    reverse_term,
    split_image,
    stabilization_constant,
)
from .graphmap import (
    Circuit,
    DirEdge,
    EdgePath,
    canonical_rotation,
    format_edge,
    format_path,
    free_cancel,
    inv,
    reverse,
)
from .stallings import SubgroupConjClass, SubgroupGraph, conj_class, fold
from .words import CyclicWord, Word, conjugacy_class


class NotHigherOrder(ValueError):
    pass


class NotGrowing(ValueError):
    pass


class NotAnAxis(ValueError):
    pass


class AxisMismatch(ValueError):
    pass


class InvalidTotalOrder(ValueError):
    pass


class Untyped(ValueError):
    pass


def _cache(c: CTData, key: str) -> dict:
    return c.__dict__.setdefault("_inv_cache_" + key, {})


# ----------------------------------------------------------------- rays

_KIND_RANK = {"eigen": 0, "lintail": 1, "periodic": 2}


def _loop_text(loop: EdgePath) -> str:
    s = format_path(loop)
    return s if len(loop) == 1 else f"({s})"


@dataclass(frozen=True, order=True)
class Ray:
    kind: str
    edge: str = ""
    loop: EdgePath = ()

    @staticmethod
    def eigen(name: str) -> "Ray":
        return Ray("eigen", name)

    @staticmethod
    def lintail(name: str, loop: EdgePath) -> "Ray":
        return Ray("lintail", name, tuple(loop))

    @staticmethod
    def periodic(loop: EdgePath) -> "Ray":
        return Ray("periodic", "", tuple(loop))

    @property
    def is_periodic_end(self) -> bool:
        return self.kind != "eigen"

    def prefix(self, c: CTData, d: int) -> EdgePath:
        out: list[DirEdge] = []
        if self.kind == "periodic":
            while len(out) < d:
                out.extend(self.loop)
        elif self.kind == "lintail":
            out.append((self.edge, 1))
            while len(out) < d:
                out.extend(self.loop)
        else:
            out.append((self.edge, 1))
            k = 0
            while len(out) < d:
                t = c.tail_iterate(self.edge, k)
                if not t:
                    raise NotHigherOrder(self.edge)
                out.extend(t)
                k += 1
        return tuple(out[:d])

    def right_text(self) -> str:
        if self.kind == "eigen":
            return f"R_{self.edge}"
        if self.kind == "lintail":
            return f"{self.edge} {_loop_text(self.loop)}^inf"
        return f"{_loop_text(self.loop)}^inf"

    def left_text(self) -> str:
        if self.kind == "eigen":
            return f"R_{self.edge}^-1"
        back = _loop_text(reverse(self.loop))
        if self.kind == "lintail":
            return f"{back}^inf {format_edge((self.edge, -1))}"
        return f"{back}^inf"


def _primitive(loop: EdgePath) -> EdgePath:
    n = len(loop)
    for k in range(1, n + 1):
        if n % k == 0 and loop[:k] * (n // k) == loop:
            return loop[:k]
    return loop


@dataclass(frozen=True, order=True)
class Line:
    kind: str  # "general" or "periodic"
    minus: Ray | None = None
    rho: EdgePath = ()
    plus: Ray | None = None
    loop: EdgePath = ()

    @staticmethod
    def make(minus: Ray, rho: Sequence[DirEdge], plus: Ray) -> "Line":
        return _normalize(minus, free_cancel(rho), plus)

    @staticmethod
    def periodic(loop: Sequence[DirEdge]) -> "Line":
        return Line("periodic", loop=canonical_rotation(_primitive(tuple(loop))))

    def inverse(self) -> "Line":
        if self.kind == "periodic":
            return Line.periodic(reverse(self.loop))
        assert self.minus is not None and self.plus is not None
        return Line.make(self.plus, reverse(self.rho), self.minus)

    @property
    def is_periodic(self) -> bool:
        return self.kind == "periodic"

    def ends(self) -> tuple[Ray, Ray]:
        if self.kind == "periodic":
            return Ray.periodic(reverse(self.loop)), Ray.periodic(self.loop)
        assert self.minus is not None and self.plus is not None
        return self.minus, self.plus

    def _pref(self) -> tuple:
        if self.kind == "periodic":
            return (3, 3, [(e[0], -e[1]) for e in self.loop])
        assert self.minus is not None and self.plus is not None
        return (_KIND_RANK[self.plus.kind], _KIND_RANK[self.minus.kind], str(self))

    def unoriented(self) -> "Line":
        other = self.inverse()
        return min(self, other, key=lambda x: x._pref())

    def window(self, c: CTData, d: int) -> EdgePath:
        if self.kind == "periodic":
            return tuple((self.loop * (2 * d // max(1, len(self.loop)) + 2))[: 2 * d])
        assert self.minus is not None and self.plus is not None
        return reverse(self.minus.prefix(c, d)) + self.rho + self.plus.prefix(c, d)

    def __str__(self) -> str:
        if self.kind == "periodic":
            return f"{_loop_text(self.loop)}^inf"
        assert self.minus is not None and self.plus is not None
        parts = [self.minus.left_text()]
        if self.rho:
            parts.append(format_path(self.rho))
        parts.append(self.plus.right_text())
        return " ".join(parts)


def _absorb_plus(rho: EdgePath, plus: Ray) -> tuple[EdgePath, Ray]:
    if plus.kind != "periodic":
        return rho, plus
    loop = plus.loop
    while rho and rho[-1] == loop[-1]:
        rho = rho[:-1]
        loop = loop[-1:] + loop[:-1]
    return rho, Ray.periodic(loop)


def _normalize(minus: Ray, rho: EdgePath, plus: Ray) -> Line:
    rho, plus = _absorb_plus(rho, plus)
    rrho, minus = _absorb_plus(reverse(rho), minus)
    rho = reverse(rrho)
    if not rho and minus.kind == "periodic" and plus.kind == "periodic":
        left = reverse(minus.loop)
        if left == plus.loop:
            return Line.periodic(plus.loop)
    return Line("general", minus, rho, plus)


def line_text(lines: Iterable[Line]) -> list[str]:
    return sorted(str(x) for x in lines)


# ------------------------------------------------------------ eigenrays

def eigenray(c: CTData, name: str) -> Ray:
    if c.kind(name) != HIGHER:
        raise NotHigherOrder(f"{name} is not a higher order edge")
    return Ray.eigen(name)


def tail_loop(c: CTData, name: str) -> EdgePath:
    """The loop repeated by f_#^k(E) for a linear edge E (w or its reverse, by the sign of d)."""
    w = c.based_twist[name]
    return w if c.degrees[name] > 0 else reverse(w)


def _as_split(c: CTData, sigma: SplitPath | Sequence[DirEdge]) -> SplitPath:
    if isinstance(sigma, SplitPath):
        return sigma
    return complete_splitting(c, tuple(sigma))


def f_infinity(c: CTData, sigma: SplitPath | Sequence[DirEdge]) -> tuple[EdgePath, Ray]:
    """The limit rho R of f_#^k(sigma): rho the Nielsen prefix, R a finitely described ray."""
    sp = _as_split(c, sigma)
    if not sp.growing_terms():
        raise NotGrowing("path is Nielsen")
    limit = stabilization_constant(c) + len(c.edges) + 1
    for _ in range(limit + 1):
        prefix: list[DirEdge] = []
        first = None
        for t in sp.terms:
            if t.growing:
                first = t
                break
            prefix.extend(t.path)
        assert first is not None
        if first.kind == "exceptional":
            assert first.edge is not None and first.edge2 is not None
            ei, ej = first.edge[0], first.edge2
            w = c.based_twist[ei]
            sign = 1 if c.degrees[ei] > c.degrees[ej] else -1
            return tuple(prefix), Ray.lintail(ei, w if sign > 0 else reverse(w))
        assert first.edge is not None
        name, s = first.edge
        if c.kind(name) == LINEAR:
            if s > 0:
                return tuple(prefix), Ray.lintail(name, tail_loop(c, name))
            return tuple(prefix), Ray.periodic(reverse(tail_loop(c, name)))
        if s > 0:
            return tuple(prefix), Ray.eigen(name)
        sp = split_image(c, sp)
    raise RuntimeError("first growing term did not stabilize")  # pragma: no cover


# ---------------------------------------------------------- limit lines

def _periodic_line_of(c: CTData, name: str) -> Line:
    return Line.periodic(c.based_twist[name]).unoriented()


def adjacency_line(c: CTData, left: Term, rho: EdgePath, right: Term) -> Line:
    mu_minus, r_minus = f_infinity(c, SplitPath((reverse_term(left),)))
    mu_plus, r_plus = f_infinity(c, SplitPath((right,)))
    return Line.make(r_minus, reverse(mu_minus) + tuple(rho) + mu_plus, r_plus)


def _acc_term(c: CTData, t: Term) -> set[Line]:
    if t.kind == "exceptional":
        assert t.edge is not None
        return {_periodic_line_of(c, t.edge[0])}
    assert t.edge is not None
    if t.kind == LINEAR:
        return {_periodic_line_of(c, t.edge[0])}
    return set(limit_lines(c, t.edge[0]))


def accumulated_lines(c: CTData, sp: SplitPath) -> set[Line]:
    """Acc of a completely split path: recursive limits of its growing terms plus adjacency lines."""
    coarse = coarsen(sp)
    out: set[Line] = set()
    prev: Term | None = None
    rho: EdgePath = ()
    for t in coarse:
        if not t.growing:
            rho = t.path
            continue
        out |= _acc_term(c, t)
        if prev is not None:
            out.add(adjacency_line(c, prev, rho, t).unoriented())
        prev = t
        rho = ()
    return out


def _u_fu(c: CTData, name: str) -> SplitPath:
    u = complete_splitting(c, c.tail(name))
    return SplitPath(u.terms + split_image(c, u).terms)


def limit_lines(c: CTData, name: str) -> frozenset[Line]:
    """Omega(r_E) as unoriented lines."""
    if c.kind(name) != HIGHER:
        raise NotHigherOrder(name)
    cache = _cache(c, "omega")
    if name not in cache:
        cache[name] = frozenset(accumulated_lines(c, _u_fu(c, name)))
    return cache[name]


def acc_np(c: CTData, name: str) -> frozenset[Line]:
    return frozenset(x for x in limit_lines(c, name) if not x.is_periodic)


def all_acc_np(c: CTData) -> list[Line]:
    out: set[Line] = set()
    for name in c.higher_edges:
        out |= acc_np(c, name)
    return sorted(out, key=str)


def all_limit_lines(c: CTData) -> list[Line]:
    out: set[Line] = set()
    for name in c.higher_edges:
        out |= limit_lines(c, name)
    return sorted(out, key=str)


def is_invariant(c: CTData, line: Line, depth: int = 50) -> bool:
    """Check f_#(L) = L on a window: each end ray maps onto an extension of itself and rho is Nielsen."""
    if line.is_periodic:
        return c.is_nielsen(line.loop)
    for ray in line.ends():
        pre = ray.prefix(c, depth)
        img = c.map_path(pre)
        if img[: len(pre)] != pre:
            return False
    if not c.is_nielsen(line.rho):
        return False
    w = line.window(c, depth)
    return free_cancel(w) == w


# ------------------------------------------------------------ eigengraph

@dataclass
class LGraph:
    """A finite graph whose edges are labelled by oriented edges of G."""

    vertices: list
    edges: list[tuple[object, object, DirEdge]]

    @cached_property
    def adj(self) -> dict[object, list[tuple[object, DirEdge]]]:
        out: dict[object, list[tuple[object, DirEdge]]] = {v: [] for v in self.vertices}
        for s, t, lab in self.edges:
            out[s].append((t, lab))
            out[t].append((s, inv(lab)))
        return out

    def components(self) -> list[list]:
        seen: set = set()
        comps = []
        for v in self.vertices:
            if v in seen:
                continue
            comp = []
            queue = deque([v])
            seen.add(v)
            while queue:
                x = queue.popleft()
                comp.append(x)
                for y, _ in self.adj[x]:
                    if y not in seen:
                        seen.add(y)
                        queue.append(y)
            comps.append(comp)
        return comps

    def tree_paths(self, root) -> dict[object, EdgePath]:
        paths = {root: ()}
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y, lab in self.adj[x]:
                if y not in paths:
                    paths[y] = paths[x] + (lab,)
                    queue.append(y)
        return paths

    def loops_at(self, root) -> list[EdgePath]:
        """Label paths of a free basis of pi_1 at root."""
        comp = set(self.tree_paths(root))
        used_tree: set[int] = set()
        parent: dict[object, tuple[object, int]] = {}
        seen = {root}
        queue = deque([root])
        order_edges = [(i, e) for i, e in enumerate(self.edges) if e[0] in comp]
        while queue:
            x = queue.popleft()
            for i, (s, t, lab) in order_edges:
                for a, b in ((s, t), (t, s)):
                    if a == x and b not in seen:
                        seen.add(b)
                        parent[b] = (a, i)
                        used_tree.add(i)
                        queue.append(b)
        tp: dict[object, EdgePath] = {root: ()}

        def path_to(v) -> EdgePath:
            if v in tp:
                return tp[v]
            a, i = parent[v]
            s, t, lab = self.edges[i]
            step = (lab,) if (s, t) == (a, v) else (inv(lab),)
            tp[v] = path_to(a) + step
            return tp[v]

        loops = []
        for i, (s, t, lab) in order_edges:
            if i in used_tree:
                continue
            loops.append(free_cancel(path_to(s) + (lab,) + reverse(path_to(t))))
        return loops

    def rank_of(self, comp: Iterable) -> int:
        comp = set(comp)
        e = sum(1 for s, _, _ in self.edges if s in comp)
        return e - len(comp) + 1

    def core_edges(self, comp: Iterable) -> list[int]:
        comp = set(comp)
        idx = [i for i, (s, _, _) in enumerate(self.edges) if s in comp]
        while True:
            val: dict = {}
            for i in idx:
                s, t, _ = self.edges[i]
                val[s] = val.get(s, 0) + 1
                val[t] = val.get(t, 0) + 1
            leaves = {v for v, k in val.items() if k == 1}
            if not leaves:
                return idx
            idx = [i for i in idx if self.edges[i][0] not in leaves and self.edges[i][1] not in leaves]

    def path_between(self, u, v) -> EdgePath:
        return self.tree_paths(u)[v]


def _flag(rank: int) -> str:
    return "contractible" if rank == 0 else ("infinite-cyclic" if rank == 1 else "large")


@dataclass(frozen=True)
class EGComponent:
    vertices: tuple
    g_vertices: tuple[str, ...]
    rank: int
    rays: tuple[str, ...]
    lollipops: tuple[str, ...]
    fixed_edges: tuple[str, ...]

    @property
    def flag(self) -> str:
        return _flag(self.rank)


@dataclass
class Eigengraph:
    graph: LGraph
    lollipops: dict[str, Circuit]
    rays: dict[str, str]  # higher edge -> attaching G-vertex
    components: list[EGComponent] = field(default_factory=list)

    def component_of(self, vertex) -> EGComponent:
        for comp in self.components:
            if vertex in comp.vertices:
                return comp
        raise KeyError(vertex)


def eigengraph(c: CTData, edges: Iterable[str] | None = None) -> Eigengraph:
    allowed = set(c.edges if edges is None else edges)
    g = c.graph
    if edges is None:
        gverts = list(g.vertices)
    else:
        touched = {x for n in allowed for x in g.ends[n]}
        gverts = [v for v in g.vertices if v in touched]
    verts: list = list(gverts)
    ledges: list[tuple[object, object, DirEdge]] = []
    lollipops: dict[str, Circuit] = {}
    rays: dict[str, str] = {}
    for name in c.order:
        if name not in allowed:
            continue
        s, t = g.ends[name]
        kind = c.kind(name)
        if kind == FIXED:
            ledges.append((s, t, (name, 1)))
        elif kind == LINEAR:
            loop = tail_loop(c, name)
            knob = ("lollipop", name, 0)
            ring = [("lollipop", name, i) for i in range(len(loop))]
            verts.extend(ring)
            ledges.append((s, knob, (name, 1)))
            for i, lab in enumerate(loop):
                ledges.append((ring[i], ring[(i + 1) % len(ring)], lab))
            lollipops[name] = Circuit.of(c.based_twist[name])
        else:
            rays[name] = s
    lg = LGraph(verts, ledges)
    comps = []
    for comp in lg.components():
        cset = set(comp)
        gv = tuple(v for v in gverts if v in cset)
        comps.append(
            EGComponent(
                vertices=tuple(comp),
                g_vertices=gv,
                rank=lg.rank_of(comp),
                rays=tuple(n for n in c.order if n in rays and rays[n] in cset),
                lollipops=tuple(n for n in c.order if n in lollipops and g.ends[n][0] in cset),
                fixed_edges=tuple(n for n in c.order if n in allowed and c.kind(n) == FIXED and g.ends[n][0] in cset),
            )
        )
    comps.sort(key=lambda x: [gverts.index(v) for v in x.g_vertices])
    return Eigengraph(lg, lollipops, rays, comps)


def reads_in_eigengraph(c: CTData, path: EdgePath, depth: int) -> bool:
    """Whether the path can be read along the eigengraph with its rays expanded to the given depth."""
    eg = eigengraph(c)
    verts = list(eg.graph.vertices)
    ledges = list(eg.graph.edges)
    for name, s in eg.rays.items():
        pre = Ray.eigen(name).prefix(c, depth)
        prev: object = s
        for i, lab in enumerate(pre):
            nxt = ("ray", name, i)
            verts.append(nxt)
            ledges.append((prev, nxt, lab))
            prev = nxt
    adj: dict[object, dict[DirEdge, object]] = {v: {} for v in verts}
    for s, t, lab in ledges:
        adj[s][lab] = t
        adj[t][inv(lab)] = s
    for start in verts:
        v = start
        ok = True
        for lab in path:
            nxt = adj[v].get(lab)
            if nxt is None:
                ok = False
                break
            v = nxt
        if ok:
            return True
    return False


def line_lifts(c: CTData, line: Line, depth: int = 20) -> bool:
    return reads_in_eigengraph(c, line.window(c, depth), depth + len(line.rho) + 2)


# ---------------------------------------------------------- axes and SA

def axes(c: CTData) -> list[CyclicWord]:
    """Unoriented axes, one per twist circuit."""
    out = {c.circuit_word(w).unoriented() for w in c.twist_circuits}
    return sorted(out)


def oriented_axes(c: CTData) -> list[CyclicWord]:
    out = set()
    for w in c.twist_circuits:
        a = c.circuit_word(w)
        out |= {a, a.inverse()}
    return sorted(out)


@dataclass(frozen=True, order=True)
class StrongAxis:
    axis: CyclicWord
    site: str  # "base" or a linear edge name
    degree: int

    def __str__(self) -> str:
        return f"{self.axis}@{self.site}(d={self.degree})"


def _axis_circuit(c: CTData, a: CyclicWord) -> tuple[Circuit, int]:
    for w in c.twist_circuits:
        cw = c.circuit_word(w)
        if cw == a:
            return w, 1
        if cw.inverse() == a:
            return w, -1
    raise NotAnAxis(str(a))


def strong_axes(c: CTData, a: CyclicWord) -> list[StrongAxis]:
    w, sign = _axis_circuit(c, a)
    out = [StrongAxis(a, "base", 0)]
    for name in c.linear_edges:
        if c.twist_circuit(name) == w:
            out.append(StrongAxis(a, name, sign * c.degrees[name]))
    return out


def all_strong_axes(c: CTData) -> list[StrongAxis]:
    return [s for a in oriented_axes(c) for s in strong_axes(c, a)]


def twist_coordinate(alpha1: StrongAxis, alpha2: StrongAxis) -> int:
    if alpha1.axis != alpha2.axis:
        raise AxisMismatch(f"{alpha1.axis} != {alpha2.axis}")
    return alpha1.degree - alpha2.degree


# ------------------------------------------------------- partial order

def lower_edges(c: CTData, name: str) -> frozenset[str]:
    """Higher edges E' with E' < E: E' or its reverse is a term of some f_#^k(E)."""
    cache = _cache(c, "lower")
    if name in cache:
        return cache[name]
    out: set[str] = set()
    for t in complete_splitting(c, c.tail(name)).terms:
        if t.kind == HIGHER and t.edge is not None:
            out.add(t.edge[0])
            out |= lower_edges(c, t.edge[0])
    cache[name] = frozenset(out)
    return cache[name]


def ray_partial_order(c: CTData) -> frozenset[tuple[str, str]]:
    return frozenset((lo, hi) for hi in c.higher_edges for lo in lower_edges(c, hi))


def covering_pairs(order: frozenset[tuple[str, str]]) -> frozenset[tuple[str, str]]:
    out = set()
    for lo, hi in order:
        if not any((lo, mid) in order and (mid, hi) in order for _, mid in order):
            out.add((lo, hi))
    return frozenset(out)


def ray_order_from_lines(c: CTData) -> frozenset[tuple[str, str]]:
    """r1 < r2 when r1 is an end of an element of acc_NP(r2)."""
    out = set()
    for hi in c.higher_edges:
        for line in acc_np(c, hi):
            for ray in line.ends():
                if ray.kind == "eigen":
                    out.add((ray.edge, hi))
    return frozenset(out)


# ------------------------------------------------------- free factor systems

@dataclass(frozen=True)
class FFS:
    """Free factor system of a subgraph: the non-contractible components of its core."""

    components: tuple[frozenset[str], ...]
    ranks: tuple[int, ...]

    @property
    def profile(self) -> tuple[int, ...]:
        return tuple(sorted(self.ranks, reverse=True))

    @property
    def edges(self) -> frozenset[str]:
        return frozenset().union(*self.components) if self.components else frozenset()

    def __str__(self) -> str:
        return "{" + ", ".join("[" + "".join(sorted(comp)) + f"]r{r}" for comp, r in zip(self.components, self.ranks)) + "}"


def core_edges(c: CTData, edges: Iterable[str]) -> frozenset[str]:
    g = c.graph
    es = set(edges)
    while True:
        val: dict[str, int] = {}
        for n in es:
            s, t = g.ends[n]
            val[s] = val.get(s, 0) + 1
            val[t] = val.get(t, 0) + 1
        leaves = {v for v, k in val.items() if k == 1}
        if not leaves:
            return frozenset(es)
        es = {n for n in es if g.ends[n][0] not in leaves and g.ends[n][1] not in leaves}


def ffs_of(c: CTData, edges: Iterable[str]) -> FFS:
    core = core_edges(c, edges)
    g = c.graph
    parent = {v: v for v in g.vertices}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for n in core:
        s, t = g.ends[n]
        a, b = find(s), find(t)
        if a != b:
            parent[a] = b
    groups: dict[str, set[str]] = {}
    for n in core:
        groups.setdefault(find(g.ends[n][0]), set()).add(n)
    comps = []
    for es in groups.values():
        vs = {x for n in es for x in g.ends[n]}
        comps.append((frozenset(es), len(es) - len(vs) + 1))
    comps.sort(key=lambda x: sorted(c.order.index(n) for n in x[0]))
    return FFS(tuple(x[0] for x in comps), tuple(x[1] for x in comps))


def subgraph_lgraph(c: CTData, edges: Iterable[str]) -> LGraph:
    g = c.graph
    es = [n for n in c.order if n in set(edges)]
    verts = sorted({x for n in es for x in g.ends[n]}, key=g.vertices.index)
    return LGraph(verts, [(g.ends[n][0], g.ends[n][1], (n, 1)) for n in es])


def anchored_subgroup(c: CTData, anchor: EdgePath, loops: Iterable[EdgePath]) -> SubgroupGraph:
    """The subgroup of F_n generated by anchor . loop . anchor^-1 (anchor starts at the base vertex)."""
    words = [c.graph.path_word(free_cancel(tuple(anchor) + tuple(l) + reverse(anchor))) for l in loops]
    return fold(words, c.rank)


def component_subgroup(c: CTData, comp_edges: Iterable[str], vertex: str, anchor: EdgePath | None = None) -> SubgroupGraph:
    lg = subgraph_lgraph(c, comp_edges)
    if anchor is None:
        anchor = c.graph.tree_paths[vertex]
    return anchored_subgroup(c, anchor, lg.loops_at(vertex))


def ffs_subgroups(c: CTData, ffs: FFS) -> list[SubgroupGraph]:
    out = []
    for comp in ffs.components:
        v = min((x for n in comp for x in c.graph.ends[n]), key=c.graph.vertices.index)
        out.append(component_subgroup(c, comp, v))
    return out


def ffs_classes(c: CTData, ffs: FFS) -> list[SubgroupConjClass]:
    return sorted(conj_class(h) for h in ffs_subgroups(c, ffs))


def linear_ffs(c: CTData) -> FFS:
    return ffs_of(c, c.fixed_edges + c.linear_edges)


@dataclass(frozen=True)
class SpecialChain:
    order: tuple[str, ...]
    sets: tuple[frozenset[str], ...]  # admissible S for each element
    elements: tuple[FFS, ...]
    added: tuple[str | None, ...]  # the edge D_k whose addition produced element k

    @property
    def profiles(self) -> list[tuple[int, ...]]:
        return [e.profile for e in self.elements]

    def __len__(self) -> int:
        return len(self.elements)


def check_total_order(c: CTData, total_order: Sequence[str]) -> None:
    if sorted(total_order) != sorted(c.higher_edges):
        raise InvalidTotalOrder("order must list each higher order edge once")
    pos = {n: i for i, n in enumerate(total_order)}
    for lo, hi in ray_partial_order(c):
        if pos[lo] > pos[hi]:
            raise InvalidTotalOrder(f"{lo} < {hi} in the partial order but not in the given order")


def default_total_order(c: CTData) -> tuple[str, ...]:
    """Filtration order restricted to higher edges (always extends the partial order)."""
    return c.higher_edges


def special_chain(c: CTData, total_order: Sequence[str] | None = None) -> SpecialChain:
    total_order = tuple(default_total_order(c) if total_order is None else total_order)
    check_total_order(c, total_order)
    k0 = set(c.fixed_edges + c.linear_edges)
    elems = [ffs_of(c, k0)]
    sets = [frozenset()]
    added: list[str | None] = [None]
    current: set[str] = set()
    for name in total_order:
        current.add(name)
        f = ffs_of(c, k0 | current)
        if f.edges != elems[-1].edges:
            elems.append(f)
            sets.append(frozenset(current))
            added.append(name)
    return SpecialChain(total_order, tuple(sets), tuple(elems), tuple(added))


special_chains = special_chain


def admissible_sets(c: CTData) -> list[frozenset[str]]:
    order = ray_partial_order(c)
    higher = c.higher_edges
    out = []
    for k in range(len(higher) + 1):
        for combo in combinations(higher, k):
            s = set(combo)
            if all(lo in s for lo, hi in order if hi in s):
                out.append(frozenset(combo))
    return out


def special_ffs_list(c: CTData) -> list[FFS]:
    k0 = set(c.fixed_edges + c.linear_edges)
    seen: dict[frozenset[str], FFS] = {}
    for s in admissible_sets(c):
        f = ffs_of(c, k0 | s)
        seen.setdefault(f.edges, f)
    return list(seen.values())


def is_special_ffs(c: CTData, edges: Iterable[str]) -> bool:
    target = ffs_classes(c, ffs_of(c, edges))
    return any(ffs_classes(c, f) == target for f in special_ffs_list(c))


# ----------------------------------------------------------- extensions

@dataclass(frozen=True)
class ExtensionType:
    shape: str  # H, HH, LH
    size: str  # contractible, infinite-cyclic, large

    def __str__(self) -> str:
        return f"({self.shape}, {self.size})"


def _step_data(c: CTData, chain: SpecialChain, k: int) -> tuple[str, frozenset[str], frozenset[str]]:
    if not 1 <= k < len(chain):
        raise IndexError("extension index out of range")
    d = chain.added[k]
    assert d is not None
    return d, chain.elements[k - 1].edges, chain.elements[k].edges


def new_rays(c: CTData, chain: SpecialChain, k: int) -> list[str]:
    _, lo, hi = _step_data(c, chain, k)
    return [n for n in c.order if n in hi - lo and c.kind(n) == HIGHER]


def extension_type(c: CTData, chain: SpecialChain, k: int) -> ExtensionType:
    d, lo, hi = _step_data(c, chain, k)
    arc = [n for n in c.order if n in hi - lo and c.kind(n) != FIXED]
    others = [n for n in arc if n != d]
    if not others:
        shape = "H"
    elif c.kind(others[0]) == HIGHER:
        shape = "HH"
    else:
        shape = "LH"
    eg = eigengraph(c, hi)
    comp = eg.component_of(c.graph.ends[d][0])
    return ExtensionType(shape, comp.flag)


@dataclass(frozen=True)
class AlgebraicPair:
    """A conjugacy pair of subgroups, with the oriented generator recorded for cyclic entries."""

    kind: str
    first: SubgroupGraph
    second: SubgroupGraph
    first_elem: Word | None = None
    second_elem: Word | None = None

    def describe(self) -> str:
        def side(h: SubgroupGraph, e: Word | None) -> str:
            if e is not None:
                return str(e)
            return "<" + ",".join(str(w) for w in h.generators()) + ">"

        return f"{self.kind}[{side(self.first, self.first_elem)}, {side(self.second, self.second_elem)}]"


@dataclass(frozen=True)
class AddedLines:
    lines: tuple[Line, ...] = ()
    pair: AlgebraicPair | None = None

    @property
    def finite(self) -> bool:
        return self.pair is None


def _anchor(c: CTData, vertex: str) -> EdgePath:
    return c.graph.tree_paths[vertex]


def fix_subgroup(c: CTData, eg: Eigengraph, vertex: str, anchor: EdgePath | None = None) -> SubgroupGraph:
    """Fixed subgroup of the principal lift attached to the eigengraph component of vertex."""
    if anchor is None:
        anchor = _anchor(c, vertex)
    return anchored_subgroup(c, anchor, eg.graph.loops_at(vertex))


def factor_carrying(c: CTData, chain: SpecialChain, name: str) -> frozenset[str]:
    """Edges of the component of the least chain element whose core contains u_E."""
    u = {e[0] for e in c.tail(name)}
    for elem in chain.elements:
        for comp in elem.components:
            if u <= comp:
                return comp
    raise ValueError(f"no chain element carries r_{name}")


def ray_factor(c: CTData, chain: SpecialChain, name: str, anchor: EdgePath) -> SubgroupGraph:
    """F_c of the lift of r_E whose eigenray starts at the end of anchor."""
    comp = factor_carrying(c, chain, name)
    lg = subgraph_lgraph(c, comp)
    through = tuple(anchor) + ((name, 1),)
    return anchored_subgroup(c, through, lg.loops_at(c.graph.ends[name][1]))


def added_lines(c: CTData, chain: SpecialChain, k: int) -> AddedLines:
    d, lo, hi = _step_data(c, chain, k)
    eg = eigengraph(c, hi)
    src = c.graph.ends[d][0]
    comp = eg.component_of(src)
    fresh = set(new_rays(c, chain, k))
    lg = eg.graph
    if comp.rank == 0:
        lines = []
        for n in comp.rays:
            if n not in fresh:
                continue
            for x in comp.rays:
                if x == n:
                    continue
                rho = lg.path_between(eg.rays[x], eg.rays[n])
                lines.append(Line.make(Ray.eigen(x), rho, Ray.eigen(n)))
        return AddedLines(tuple(sorted(set(lines), key=str)))
    if comp.rank == 1:
        core = lg.core_edges(comp.vertices)
        cyc = [lg.edges[i] for i in core]
        start = cyc[0][0]
        # walk the cycle once from start
        loop: list[DirEdge] = []
        v = start
        used: set[int] = set()
        while True:
            for i in core:
                if i in used:
                    continue
                s, t, lab = lg.edges[i]
                if s == v:
                    loop.append(lab)
                    used.add(i)
                    v = t
                    break
                if t == v:
                    loop.append(inv(lab))
                    used.add(i)
                    v = s
                    break
            if v == start and len(used) == len(core):
                break
        lines = []
        for n in comp.rays:
            if n not in fresh:
                continue
            rho = lg.path_between(start, eg.rays[n])
            for lp in (tuple(loop), reverse(loop)):
                lines.append(Line.make(Ray.periodic(lp), rho, Ray.eigen(n)))
        return AddedLines(tuple(sorted(set(lines), key=str)))
    anchor = _anchor(c, src)
    fix = fix_subgroup(c, eg, src, anchor)
    factor = ray_factor(c, chain, d, anchor)
    return AddedLines(pair=AlgebraicPair("FIX-NP", fix, factor))


# ----------------------------------------------------- algebraic lines

def _ray_carrier(c: CTData, chain: SpecialChain, ray: Ray, anchor: EdgePath) -> tuple[SubgroupGraph, Word | None]:
    if ray.kind == "eigen":
        return ray_factor(c, chain, ray.edge, anchor), None
    lead: EdgePath = ((ray.edge, 1),) if ray.kind == "lintail" else ()
    loop = free_cancel(tuple(anchor) + lead + ray.loop + reverse(lead) + reverse(anchor))
    w = c.graph.path_word(loop)
    return fold([w], c.rank), w


def algebraic_line(c: CTData, line: Line, chain: SpecialChain) -> AlgebraicPair:
    if line.is_periodic:
        raise Untyped("periodic lines have no algebraic type")
    assert line.minus is not None and line.plus is not None
    g = c.graph
    if line.rho:
        junction = g.src(line.rho[0])
    elif line.plus.kind == "periodic":
        junction = g.src(line.plus.loop[0])
    else:
        junction = g.ends[line.plus.edge][0]
    base_anchor = _anchor(c, junction)
    h_minus, e_minus = _ray_carrier(c, chain, line.minus, base_anchor)
    h_plus, e_plus = _ray_carrier(c, chain, line.plus, free_cancel(base_anchor + line.rho))
    if e_minus is not None:
        e_minus = e_minus.inverse()
    kind = ("P" if line.minus.is_periodic_end else "NP") + "-" + ("P" if line.plus.is_periodic_end else "NP")
    if kind == "P-P" and e_minus is not None and e_plus is not None:
        if conjugacy_class(e_minus) == conjugacy_class(e_plus) and _same_cyclic(h_minus, h_plus):
            raise Untyped("both ends lie on one axis")
    return AlgebraicPair(kind, h_minus, h_plus, e_minus, e_plus)


def _same_cyclic(h1: SubgroupGraph, h2: SubgroupGraph) -> bool:
    return h1.n_vertices == h2.n_vertices and h1.edges == h2.edges


def fixed_subgroups(c: CTData) -> list[SubgroupGraph]:
    eg = eigengraph(c)
    out = []
    for comp in eg.components:
        if comp.rank >= 1:
            v = comp.g_vertices[0]
            out.append(fix_subgroup(c, eg, v))
    return out


@dataclass(frozen=True)
class AlgebraicStrongAxis:
    axis: StrongAxis
    fix: SubgroupGraph
    element: Word


def algebraic_strong_axes(c: CTData) -> list[AlgebraicStrongAxis]:
    """[Fix(Phi), a] for strong axes whose principal lift has a large fixed subgroup."""
    eg = eigengraph(c)
    out = []
    for sa in all_strong_axes(c):
        w, sign = _axis_circuit(c, sa.axis)
        if sa.site == "base":
            family = [n for n in c.linear_edges if c.twist_circuit(n) == w]
            v = c.graph.ends[family[0]][1]
            anchor = _anchor(c, v)
            loop = c.based_twist[family[0]]
            elem_path = anchor + loop + reverse(anchor)
        else:
            v = c.graph.ends[sa.site][0]
            anchor = _anchor(c, v)
            lead = ((sa.site, 1),)
            elem_path = anchor + lead + c.based_twist[sa.site] + reverse(lead) + reverse(anchor)
        comp = eg.component_of(v)
        if comp.rank < 2:
            continue
        elem = c.graph.path_word(free_cancel(elem_path))
        if sign < 0:
            elem = elem.inverse()
        out.append(AlgebraicStrongAxis(sa, fix_subgroup(c, eg, v, anchor), elem))
    return out


# ------------------------------------------------------------- I_c

@dataclass
class AlgebraicData:
    """The algebraic ingredients of I_c, kept as subgroups and elements of F_n."""

    chain: SpecialChain
    chain_factors: list[list[SubgroupGraph]]
    fix: list[SubgroupGraph]
    extensions: list[list[AlgebraicPair]]
    limit_pairs: list[tuple[Line, AlgebraicPair]]
    axes: list[CyclicWord]
    oriented_axes: list[CyclicWord]
    strong: list[AlgebraicStrongAxis]


def algebraic_data(c: CTData, chain: SpecialChain | None = None) -> AlgebraicData:
    chain = special_chain(c) if chain is None else chain
    extensions = []
    for k in range(1, len(chain)):
        added = added_lines(c, chain, k)
        if added.pair is not None:
            extensions.append([added.pair])
        else:
            extensions.append([algebraic_line(c, x, chain) for x in added.lines])
    return AlgebraicData(
        chain=chain,
        chain_factors=[ffs_subgroups(c, f) for f in chain.elements],
        fix=fixed_subgroups(c),
        extensions=extensions,
        limit_pairs=[(x, algebraic_line(c, x, chain)) for x in all_acc_np(c)],
        axes=axes(c),
        oriented_axes=oriented_axes(c),
        strong=algebraic_strong_axes(c),
    )


def _gens_text(h: SubgroupGraph) -> str:
    return "<" + ",".join(str(w) for w in h.generators()) + ">"


def assemble_Ic(c: CTData, chain: SpecialChain | None = None):
    """The ordered six-part iterated set: chain, Fix, added lines, limit lines, axes, strong axes."""
    from .iterset import IteratedSet, class_atom, cyclic_atom, pair_atom, subgroup_element_atom

    data = algebraic_data(c, chain)

    def pair(p: AlgebraicPair):
        return pair_atom(p.kind, p.first, p.second, p.first_elem, p.second_elem, p.describe())

    parts = [
        IteratedSet(
            tuple(IteratedSet(tuple(class_atom(h) for h in hs)) for hs in data.chain_factors),
            ordered=True,
            name="chain",
        ),
        IteratedSet(tuple(class_atom(h) for h in data.fix), name="fix"),
        IteratedSet(
            tuple(IteratedSet(tuple(pair(p) for p in ps)) for ps in data.extensions),
            ordered=True,
            name="added-lines",
        ),
        IteratedSet(tuple(pair(p) for _, p in data.limit_pairs), name="limit-lines"),
        IteratedSet(tuple(cyclic_atom(a) for a in data.axes), name="axes"),
        IteratedSet(
            tuple(
                subgroup_element_atom(s.fix, s.element, f"[{_gens_text(s.fix)}, {s.element}]")
                for s in data.strong
            ),
            name="strong-axes",
        ),
    ]
    return IteratedSet(tuple(parts), ordered=True, name="I_c")
