"""Completely split train track data for UPG maps: parsing, validation,
edge classes, complete splittings and growth polynomials.

Every edge E satisfies f(E) = E u with u a closed path in lower strata.
Edges are fixed (u trivial), linear (u = w^d for a Nielsen twist loop w)
or higher order (everything else).
"""

from __future__ import annotations

import re
import shlex
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Mapping, Sequence

from .freeauto import Automorphism
from .graphmap import (
    Circuit,
    DirEdge,
    EdgePath,
    GraphMap,
    MarkedGraph,
    format_edge,
    format_path,
    free_cancel,
    induced_automorphism,
    inv,
    iterate_length,
    parse_path,
    reverse,
)
from .stallings import fold
from .words import CyclicWord, Word

FIXED, LINEAR, HIGHER = "fixed", "linear", "higher"


class ClassificationError(ValueError):
    pass


class NotSplit(ValueError):
    pass


class NotPolynomial(ValueError):
    pass


class CTFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


# ------------------------------------------------------------------ terms

@dataclass(frozen=True)
class Term:
    """One term of a splitting.

    kinds: ``fixed``, ``linear`` and ``higher`` are single edges; ``inp`` is
    E w^p E-bar; ``exceptional`` is E_i w^p E_j-bar; ``nielsen`` is a
    concatenation of Nielsen terms produced by coarsening.
    """

    kind: str
    path: EdgePath
    edge: DirEdge | None = None
    exponent: int = 0
    edge2: str | None = None

    @property
    def growing(self) -> bool:
        return self.kind in (LINEAR, HIGHER, "exceptional")

    def __str__(self) -> str:
        return format_path(self.path)


@dataclass(frozen=True)
class SplitPath:
    terms: tuple[Term, ...]

    @property
    def path(self) -> EdgePath:
        return tuple(e for t in self.terms for e in t.path)

    def __str__(self) -> str:
        return "·".join(str(t) for t in self.terms)

    def growing_terms(self) -> list[Term]:
        return [t for t in self.terms if t.growing]


# ----------------------------------------------------------------- CT data

@dataclass(frozen=True, eq=False)
class CTData:
    graph: MarkedGraph
    fmap: GraphMap
    order: tuple[str, ...]
    declared: Mapping[str, str]
    twists: Mapping[str, EdgePath] = field(default_factory=dict)
    degrees: Mapping[str, int] = field(default_factory=dict)
    name: str = ""

    @property
    def rank(self) -> int:
        return self.graph.rank

    @property
    def edges(self) -> tuple[str, ...]:
        return self.graph.edge_names

    def height(self, name: str) -> int:
        return self.order.index(name)

    def image(self, e: DirEdge) -> EdgePath:
        return self.fmap.image(e)

    def tail(self, name: str) -> EdgePath:
        img = self.fmap.images[name]
        return img[1:] if img and img[0] == (name, 1) else img

    def kind(self, name: str) -> str:
        return self.declared[name]

    def edges_of(self, kind: str) -> tuple[str, ...]:
        return tuple(n for n in self.order if self.declared[n] == kind)

    @property
    def fixed_edges(self) -> tuple[str, ...]:
        return self.edges_of(FIXED)

    @property
    def linear_edges(self) -> tuple[str, ...]:
        return self.edges_of(LINEAR)

    @property
    def higher_edges(self) -> tuple[str, ...]:
        return self.edges_of(HIGHER)

    def map_path(self, p: Sequence[DirEdge]) -> EdgePath:
        return self.fmap.map_path(p)

    def iterate(self, p: Sequence[DirEdge], k: int) -> EdgePath:
        return self.fmap.iterate_path(p, k)

    def is_nielsen(self, p: Sequence[DirEdge]) -> bool:
        return self.map_path(p) == tuple(p)

    @cached_property
    def based_twist(self) -> dict[str, EdgePath]:
        """For each linear edge E, the loop w at the end of E with f(E) = E w^d."""
        out = {}
        for name in self.linear_edges:
            d = self.degrees[name]
            u = self.tail(name)
            root = u[: len(u) // abs(d)] if abs(d) and len(u) % abs(d) == 0 else u
            out[name] = root if d > 0 else reverse(root)
        return out

    def twist_circuit(self, name: str) -> Circuit:
        return Circuit.of(self.twists[name])

    @cached_property
    def twist_circuits(self) -> list[Circuit]:
        """Distinct oriented twist circuits, in filtration order of first use."""
        out: list[Circuit] = []
        for name in self.linear_edges:
            c = self.twist_circuit(name)
            if c not in out:
                out.append(c)
        return out

    def family(self, name: str) -> tuple[str, ...]:
        c = self.twist_circuit(name)
        return tuple(n for n in self.linear_edges if self.twist_circuit(n) == c)

    @cached_property
    def automorphism(self) -> Automorphism:
        return induced_automorphism(self.fmap)

    def circuit_word(self, c: Circuit) -> CyclicWord:
        from .words import conjugacy_class

        s = self.graph.src(c.edges[0])
        loop = self.graph.tree_paths[s] + c.edges + reverse(self.graph.tree_paths[s])
        return conjugacy_class(self.graph.path_word(free_cancel(loop)))

    # cached iterates of edge tails, used by legality checks
    @cached_property
    def _tail_iterates(self) -> dict[str, list[EdgePath]]:
        return {n: [self.tail(n)] for n in self.edges}

    def tail_iterate(self, name: str, k: int) -> EdgePath:
        its = self._tail_iterates[name]
        while len(its) <= k:
            its.append(self.map_path(its[-1]))
        return its[k]

    def last_edge_iterate(self, e: DirEdge, k: int) -> DirEdge:
        """Last edge of f_#^k(e) for k >= 0."""
        name, s = e
        if s < 0:
            return inv(self.first_edge_iterate((name, 1), k))
        if k == 0 or not self.tail(name):
            return e
        t = self.tail_iterate(name, k - 1)
        return t[-1] if t else e

    def first_edge_iterate(self, e: DirEdge, k: int) -> DirEdge:
        name, s = e
        if s < 0:
            return inv(self.last_edge_iterate((name, 1), k))
        return e


# --------------------------------------------------------------- parsing

_KV = re.compile(r"(\w+)=(\S*)")


def parse_ct(text: str, name: str = "") -> CTData:
    rank = None
    vertices: list[str] = []
    edges: list[tuple[str, str, str]] = []
    declared: dict[str, str] = {}
    images: dict[str, EdgePath] = {}
    twists: dict[str, EdgePath] = {}
    degrees: dict[str, int] = {}
    order: list[str] = []
    tree: list[str] = []
    marking_text: dict[str, str] = {}
    saw_marking = False
    edge_line: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = shlex.split(line, posix=False)
        head = parts[0]
        try:
            if head == "rank":
                rank = int(parts[1])
            elif head == "vertices":
                vertices = parts[1:]
            elif head == "edge":
                ename, src, dst = parts[1:4]
                if not re.fullmatch(r"[a-z]'*[0-9]*", ename):
                    raise CTFormatError(f"bad edge name {ename!r}", lineno)
                kv = dict(_KV.fullmatch(p).groups() for p in parts[4:])  # type: ignore[union-attr]
                edges.append((ename, src, dst))
                edge_line[ename] = lineno
                cls = kv.get("class")
                if cls not in (FIXED, LINEAR, HIGHER):
                    raise CTFormatError(f"edge {ename}: class must be fixed, linear or higher", lineno)
                declared[ename] = cls
                if "image" not in kv:
                    raise CTFormatError(f"edge {ename}: missing image", lineno)
                images[ename] = parse_path(kv["image"])
                if cls == LINEAR:
                    if "twist" not in kv or "degree" not in kv:
                        raise CTFormatError(f"edge {ename}: linear edge needs twist= and degree=", lineno)
                    twists[ename] = parse_path(kv["twist"])
                    degrees[ename] = int(kv["degree"])
            elif head == "order":
                order = parts[1:]
            elif head == "marking":
                saw_marking = True
                rest = line[len("marking"):].strip()
                m = re.match(r"tree=(\S*)\s*(?:words:)?(.*)", rest)
                if not m:
                    raise CTFormatError("marking line must start with tree=", lineno)
                tree = [t for t in m.group(1).split(",") if t]
                for item in m.group(2).split():
                    k, _, v = item.partition("=")
                    marking_text[k] = v
            else:
                raise CTFormatError(f"unknown directive {head!r}", lineno)
        except CTFormatError:
            raise
        except (ValueError, IndexError, AttributeError) as exc:
            raise CTFormatError(f"cannot parse: {raw.strip()!r} ({exc})", lineno) from None
    if rank is None:
        raise CTFormatError("missing rank")
    if not saw_marking:
        raise CTFormatError("missing marking")
    if not order:
        order = [e[0] for e in edges]
    marking = {k: Word.parse(v, rank) for k, v in marking_text.items()}
    g = MarkedGraph(tuple(vertices), tuple(edges), frozenset(tree), marking, rank)
    for ename, img in images.items():
        for e in img:
            if e[0] not in g.ends:
                raise CTFormatError(f"edge {ename}: image uses unknown edge {e[0]!r}", edge_line[ename])
    f = GraphMap(g, g, images)
    return CTData(g, f, tuple(order), declared, twists, degrees, name)


def load_ct(path: str | Path) -> CTData:
    p = Path(path)
    return parse_ct(p.read_text(), name=p.stem)


def format_ct(c: CTData) -> str:
    lines = [f"rank {c.rank}", "vertices " + " ".join(c.graph.vertices)]
    for name, s, t in c.graph.edges:
        extra = ""
        if c.declared[name] == LINEAR:
            extra = f" twist={format_path(c.twists[name])} degree={c.degrees[name]}"
        lines.append(
            f"edge {name} {s} {t} class={c.declared[name]} image={format_path(c.fmap.images[name])}{extra}"
        )
    lines.append("order " + " ".join(c.order))
    words = " ".join(f"{n}={c.graph.marking[n]}" for n in c.graph.non_tree_edges())
    lines.append(f"marking tree={','.join(sorted(c.graph.tree))} words: {words}")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------ validation

def intrinsic_class(c: CTData, name: str) -> str:
    u = c.tail(name)
    if not u:
        return FIXED
    if c.map_path(u) == u:
        return LINEAR
    return HIGHER


def _root_period(p: EdgePath) -> int:
    n = len(p)
    for k in range(1, n + 1):
        if n % k == 0 and p[:k] * (n // k) == p:
            return k
    return n


def validate_ct(c: CTData) -> list[str]:
    v: list[str] = []
    g = c.graph
    names = set(g.edge_names)
    if len(names) != len(g.edge_names):
        v.append("duplicate edge names")
    if sorted(c.order) != sorted(g.edge_names):
        v.append("filtration order is not a permutation of the edges")
        return v
    for name, s, t in g.edges:
        if s not in g.vertices or t not in g.vertices:
            v.append(f"edge {name}: unknown endpoint")
    if v:
        return v
    valence = {x: 0 for x in g.vertices}
    for _, s, t in g.edges:
        valence[s] += 1
        valence[t] += 1
    for x, k in valence.items():
        if k <= 1:
            v.append(f"vertex {x} has valence {k}")
    if len(g.edges) - len(g.vertices) + 1 != c.rank:
        v.append("rank does not equal #edges - #vertices + 1")
    # marking
    if len(g.tree) != len(g.vertices) - 1 or not g.tree <= names:
        v.append("marking tree is not a spanning tree")
    elif set(g.tree_paths) != set(g.vertices):
        v.append("marking tree is not a spanning tree")
    else:
        missing = [n for n in g.non_tree_edges() if n not in g.marking]
        if missing:
            v.append("marking words missing for " + ",".join(missing))
        elif len(g.non_tree_edges()) != c.rank or not g.marking_auto.is_automorphism():
            v.append("marking words do not form a basis")
    # images
    for name in c.order:
        img = c.fmap.images[name]
        try:
            g.check_composable(img)
        except ValueError as exc:
            v.append(f"edge {name}: image is not a path ({exc})")
            continue
        if free_cancel(img) != img:
            v.append(f"edge {name}: image is not tight")
        if not img or img[0] != (name, 1):
            v.append(f"edge {name}: image does not begin with the edge itself")
            continue
        u = img[1:]
        if u and g.src(u[0]) != g.dst((name, 1)) or u and g.dst(u[-1]) != g.dst((name, 1)):
            v.append(f"edge {name}: u_i is not a closed path at the terminal vertex")
        lower = set(c.order[: c.height(name)])
        if any(e[0] not in lower for e in u):
            v.append(f"edge {name}: u_i not in G_(i-1)")
    if v:
        return v
    # classification and linear data
    for name in c.order:
        kind = intrinsic_class(c, name)
        if kind != c.declared[name]:
            v.append(f"edge {name}: declared {c.declared[name]} but behaves as {kind}")
    if v:
        return v
    families: dict[Circuit, list[str]] = {}
    for name in c.linear_edges:
        d = c.degrees[name]
        if d == 0:
            v.append(f"edge {name}: linear degree must be non-zero")
            continue
        w = c.twists[name]
        try:
            g.check_composable(w + w[:1])
        except ValueError:
            v.append(f"edge {name}: twist path is not a closed path")
            continue
        if _root_period(Circuit.of(w).edges) != len(Circuit.of(w).edges) or Circuit.of(w).edges != tuple(
            Circuit.of(w).edges
        ) or len(Circuit.of(w)) != len(w):
            v.append(f"edge {name}: twist path is not a root-free tight circuit")
            continue
        u = c.tail(name)
        based = c.based_twist[name]
        if len(u) != abs(d) * len(w) or Circuit.of(based) != Circuit.of(w):
            v.append(f"edge {name}: f(E) is not E w^d for the declared twist path and degree")
            continue
        if c.map_path(based) != based:
            v.append(f"edge {name}: twist path is not a Nielsen circuit")
        families.setdefault(Circuit.of(w), []).append(name)
    seen_unoriented: dict[Circuit, Circuit] = {}
    for circ in families:
        key = min(circ, circ.reversed(), key=lambda x: [(e[0], -e[1]) for e in x.edges])
        if key in seen_unoriented and seen_unoriented[key] != circ:
            v.append(f"twist paths {circ} and {seen_unoriented[key]} are the same unoriented circuit")
        seen_unoriented[key] = circ
    for circ, members in families.items():
        degs = [c.degrees[m] for m in members]
        if len(set(degs)) != len(degs):
            v.append(f"linear family of {circ} has repeated degrees")
    if v:
        return v
    # induced map is a homotopy equivalence
    try:
        auto = c.automorphism
        h = fold(list(auto.images), c.rank)
        if not (h.n_vertices == 1 and len(h.edges) == c.rank):
            v.append("induced map is not a homotopy equivalence")
    except ValueError as exc:
        v.append(f"induced map is not a homotopy equivalence ({exc})")
    if v:
        return v
    for name in c.order:
        try:
            growth_polynomial(c, name)
        except NotPolynomial:
            v.append(f"edge {name}: image lengths are not eventually polynomial")
    return v


def classify_edges(c: CTData) -> tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...]]:
    out: dict[str, list[str]] = {FIXED: [], LINEAR: [], HIGHER: []}
    for name in c.order:
        kind = intrinsic_class(c, name)
        if kind != c.declared[name]:
            raise ClassificationError(f"edge {name}: declared {c.declared[name]}, computed {kind}")
        out[kind].append(name)
    return tuple(out[FIXED]), tuple(out[LINEAR]), tuple(out[HIGHER])


# ------------------------------------------------------- complete splitting

def single_term(c: CTData, e: DirEdge) -> Term:
    return Term(c.kind(e[0]), (e,), edge=e)


def reverse_term(t: Term) -> Term:
    p = reverse(t.path)
    if t.kind == "inp":
        return Term("inp", p, edge=t.edge, exponent=-t.exponent)
    if t.kind == "exceptional":
        assert t.edge is not None and t.edge2 is not None
        return Term("exceptional", p, edge=(t.edge2, 1), exponent=-t.exponent, edge2=t.edge[0])
    if t.kind == "nielsen":
        return Term("nielsen", p)
    assert t.edge is not None
    return Term(t.kind, p, edge=inv(t.edge))


def _power(w: EdgePath, k: int) -> EdgePath:
    return w * k if k >= 0 else reverse(w) * (-k)


def linear_path_term(c: CTData, ei: str, p: int, ej: str) -> Term:
    w = c.based_twist[ei]
    path = ((ei, 1),) + _power(w, p) + ((ej, -1),)
    if ei == ej:
        return Term("inp", path, edge=(ei, 1), exponent=p)
    return Term("exceptional", path, edge=(ei, 1), exponent=p, edge2=ej)


def _candidates(c: CTData, p: EdgePath, i: int) -> list[Term]:
    e = p[i]
    out = [single_term(c, e)]
    name, s = e
    if s < 0 or c.kind(name) != LINEAR:
        return out
    w = c.based_twist[name]
    L = len(w)
    partners = [m for m in c.linear_edges if c.based_twist[m] == w and c.graph.dst((m, 1)) == c.graph.dst(e)]
    for direction in (1, -1):
        piece = w if direction > 0 else reverse(w)
        k = 0
        while True:
            j = i + 1 + k * L
            if j < len(p):
                nxt = p[j]
                if nxt[1] < 0 and nxt[0] in partners:
                    other = nxt[0]
                    expo = direction * k
                    if other == name and expo != 0:
                        out.append(linear_path_term(c, name, expo, other))
                    elif other != name and (c.degrees[name] > 0) == (c.degrees[other] > 0):
                        if not (expo == 0 and direction < 0):
                            out.append(linear_path_term(c, name, expo, other))
            if p[j:j + L] == piece and j + L <= len(p):
                k += 1
            else:
                break
    out.sort(key=lambda t: -len(t.path))
    return out


def _ends_iterate(c: CTData, t: Term, k: int) -> tuple[DirEdge, DirEdge]:
    if t.kind in ("inp", "nielsen"):
        return t.path[0], t.path[-1]
    if t.kind == "exceptional":
        assert t.edge is not None and t.edge2 is not None
        return t.edge, (t.edge2, -1)
    assert t.edge is not None
    return c.first_edge_iterate(t.edge, k), c.last_edge_iterate(t.edge, k)


def _legal_junction(c: CTData, a: Term, b: Term, depth: int) -> bool:
    for k in range(1, depth + 1):
        if _ends_iterate(c, a, k)[1] == inv(_ends_iterate(c, b, k)[0]):
            return False
    return True


def complete_splitting(c: CTData, p: Sequence[DirEdge], depth: int | None = None) -> SplitPath:
    p = tuple(p)
    if free_cancel(p) != p:
        raise NotSplit("path is not tight")
    depth = 2 * len(c.edges) if depth is None else depth
    terms: list[Term] = []
    i = 0
    while i < len(p):
        cands = _candidates(c, p, i)
        chosen = None
        for t in cands:
            if terms and not _legal_junction(c, terms[-1], t, depth):
                continue
            chosen = t
            break
        if chosen is None:
            break
        terms.append(chosen)
        i += len(chosen.path)
    if i == len(p):
        return SplitPath(tuple(terms))
    if len(p) <= 32:
        found = _exhaustive_split(c, p, depth)
        if found is not None:
            return found
    raise NotSplit(f"{format_path(p)} is not completely split")


def _exhaustive_split(c: CTData, p: EdgePath, depth: int) -> SplitPath | None:
    def search(i: int, prev: Term | None) -> list[Term] | None:
        if i == len(p):
            return []
        for t in _candidates(c, p, i):
            if prev is not None and not _legal_junction(c, prev, t, depth):
                continue
            rest = search(i + len(t.path), t)
            if rest is not None:
                return [t] + rest
        return None

    found = search(0, None)
    return SplitPath(tuple(found)) if found is not None else None


def _tail_splitting(c: CTData, name: str) -> tuple[Term, ...]:
    cache = c.__dict__.setdefault("_tail_split_cache", {})
    if name not in cache:
        cache[name] = complete_splitting(c, c.tail(name)).terms
    return cache[name]


def term_image(c: CTData, t: Term) -> list[Term]:
    """The complete splitting of f_#(t), assembled term by term."""
    if t.kind in ("inp", "nielsen", FIXED):
        return [t]
    if t.kind == "exceptional":
        assert t.edge is not None and t.edge2 is not None
        ei, ej = t.edge[0], t.edge2
        return [linear_path_term(c, ei, t.exponent + c.degrees[ei] - c.degrees[ej], ej)]
    assert t.edge is not None
    name, s = t.edge
    fwd = [single_term(c, (name, 1))] + list(_tail_splitting(c, name))
    if s > 0:
        return fwd
    return [reverse_term(x) for x in reversed(fwd)]


def split_image(c: CTData, sp: SplitPath, k: int = 1) -> SplitPath:
    terms = list(sp.terms)
    for _ in range(k):
        terms = [x for t in terms for x in term_image(c, t)]
    return SplitPath(tuple(terms))


def coarsen(sp: SplitPath) -> list[Term]:
    """Merge maximal runs of Nielsen terms into single ``nielsen`` terms."""
    out: list[Term] = []
    run: list[DirEdge] = []
    for t in sp.terms:
        if t.growing:
            if run:
                out.append(Term("nielsen", tuple(run)))
                run = []
            out.append(t)
        else:
            run.extend(t.path)
    if run:
        out.append(Term("nielsen", tuple(run)))
    return out


# ------------------------------------------------------------------ growth

@dataclass(frozen=True)
class Polynomial:
    coefficients: tuple[Fraction, ...]  # constant term first

    def __call__(self, k: int) -> Fraction:
        return sum((a * k**i for i, a in enumerate(self.coefficients)), Fraction(0))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __str__(self) -> str:
        parts = []
        for i in range(len(self.coefficients) - 1, -1, -1):
            a = self.coefficients[i]
            if a == 0:
                continue
            mono = "" if i == 0 else ("k" if i == 1 else f"k^{i}")
            coef = str(a)
            if "/" in coef:
                coef = f"({coef})"
            parts.append(coef if not mono else (mono if a == 1 else f"{coef}*{mono}"))
        return " + ".join(parts) if parts else "0"


def _interpolate(points: Sequence[tuple[int, int]]) -> Polynomial:
    n = len(points)
    coeffs = [Fraction(0)] * n
    for i, (xi, yi) in enumerate(points):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, (xj, _) in enumerate(points):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for m in range(len(basis) - 1):
                basis[m] -= xj * basis[m + 1]
            denom *= xi - xj
        for m in range(n):
            coeffs[m] += yi * basis[m] / denom
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return Polynomial(tuple(coeffs))


def length_sequence(c: CTData, target: str | CyclicWord | Circuit, count: int, cap: int = 10**6) -> list[int]:
    if isinstance(target, str):
        lengths = []
        edge = (target, 1)
        path: list[DirEdge] = [edge]
        tail = c.tail(target)
        lengths.append(1)
        for _ in range(count - 1):
            path = list(free_cancel(path + list(tail)))
            tail = c.map_path(tail)
            lengths.append(len(path))
            if len(path) > cap:
                raise NotPolynomial("lengths exceed the growth cap")
        return lengths
    from .graphmap import circuit_of

    circ = circuit_of(target, c.graph) if isinstance(target, CyclicWord) else target
    lengths = []
    for _ in range(count):
        lengths.append(len(circ))
        if len(circ) > cap:
            raise NotPolynomial("lengths exceed the growth cap")
        circ = c.fmap.map_circuit(circ)
    return lengths


def growth_polynomial(c: CTData, target: str | CyclicWord | Circuit) -> tuple[Polynomial, int]:
    """Exact polynomial P and threshold k0 with |f_#^k(target)| = P(k) for k >= k0."""
    n = c.rank
    confirm = 2 * (n + 2)
    max_k0 = 2 * len(c.edges)
    seq = length_sequence(c, target, max_k0 + n + 1 + confirm)
    for k0 in range(max_k0 + 1):
        pts = [(k, seq[k]) for k in range(k0, k0 + n + 1)]
        poly = _interpolate(pts)
        if poly.degree <= n and all(poly(k) == seq[k] for k in range(k0, k0 + n + 1 + confirm)):
            return poly, k0
    raise NotPolynomial("no polynomial fits the image lengths")


def stabilization_constant(c: CTData, horizon: int | None = None) -> int:
    """Least M >= 1 such that, for every m >= M, f_#^m of a growing higher-order
    term starts with a growing term outside E_f^-1 and ends with one outside E_f."""
    horizon = len(c.edges) + 2 if horizon is None else horizon
    cache = c.__dict__.setdefault("_stabilization", {})
    if horizon not in cache:
        cache[horizon] = _stabilization(c, horizon)
    return cache[horizon]


def _stabilization(c: CTData, horizon: int) -> int:
    higher = set(c.higher_edges)

    def bad(sp: SplitPath) -> bool:
        grow = sp.growing_terms()
        if not grow:
            return False
        first, last = grow[0], grow[-1]
        first_bad = first.kind == HIGHER and first.edge is not None and first.edge[1] < 0 and first.edge[0] in higher
        last_bad = last.kind == HIGHER and last.edge is not None and last.edge[1] > 0 and last.edge[0] in higher
        return first_bad or last_bad

    M = 1
    for name in c.higher_edges:
        for s in (1, -1):
            sp = SplitPath((single_term(c, (name, s)),))
            for m in range(1, horizon + 1):
                sp = split_image(c, sp)
                if bad(sp):
                    M = max(M, m + 1)
    return M


def ct_power(c: CTData, k: int) -> CTData:
    """The CT for f^k: same graph, filtration and twist paths; images iterated, degrees scaled."""
    if k < 1:
        raise ValueError("power must be positive")
    images = {n: c.iterate(((n, 1),), k) for n in c.edges}
    f = GraphMap(c.graph, c.graph, images)
    degrees = {n: d * k for n, d in c.degrees.items()}
    return CTData(c.graph, f, c.order, c.declared, c.twists, degrees, f"{c.name}^{k}" if c.name else "")
