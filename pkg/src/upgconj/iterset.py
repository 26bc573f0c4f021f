"""Iterated sets: rooted trees with ordered or unordered vertices and atom leaves.

Equivalences are label-preserving, order-preserving tree isomorphisms.  The
search is a backtracking matcher that first compares cheap shape signatures
and only then asks the (possibly expensive) atom equality oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence, Union

from .freeauto import Automorphism, whitehead_moves
from .stallings import (
    SubgroupConjClass,
    SubgroupGraph,
    conj_class,
    conjugate_subgroup,
    conjugate_within,
    conjugator,
    fold,
    is_good_pair,
    normalizer_quotient,
    pairs_equal,
)
from .words import CyclicWord, Word, conjugacy_class

# ------------------------------------------------------------------ atoms

LABEL = "label"
CLASS = "class"
CYCLIC = "cyclic"
PAIR = "pair"
SUBGROUP_ELEMENT = "subgroup-element"


@dataclass(frozen=True, eq=False)
class Atom:
    kind: str
    payload: object = field(repr=False)
    text: str = ""

    def signature(self) -> tuple:
        """A cheap invariant: equal atoms have equal signatures."""
        p = self.payload
        if self.kind in (LABEL, CYCLIC, CLASS):
            return (self.kind, repr(p) if self.kind == LABEL else p)
        if self.kind == PAIR:
            tag, h1, h2, e1, e2 = p  # type: ignore[misc]
            c1 = conjugacy_class(e1) if e1 is not None else conj_class(h1)
            c2 = conjugacy_class(e2) if e2 is not None else conj_class(h2)
            return (self.kind, tag, c1, c2)
        if self.kind == SUBGROUP_ELEMENT:
            h, a = p  # type: ignore[misc]
            return (self.kind, conj_class(h), conjugacy_class(a))
        return (self.kind,)

    def __str__(self) -> str:
        return self.text or str(self.payload)


def label(x: str) -> Atom:
    return Atom(LABEL, x, x)


def class_atom(h: SubgroupGraph | SubgroupConjClass, text: str = "") -> Atom:
    cls = h if isinstance(h, SubgroupConjClass) else conj_class(h)
    if not text and isinstance(h, SubgroupGraph):
        text = "[<" + ",".join(str(w) for w in h.generators()) + ">]"
    return Atom(CLASS, cls, text)


def cyclic_atom(w: CyclicWord) -> Atom:
    return Atom(CYCLIC, w, str(w))


def pair_atom(tag: str, h1: SubgroupGraph, h2: SubgroupGraph, e1: Word | None = None, e2: Word | None = None, text: str = "") -> Atom:
    return Atom(PAIR, (tag, h1, h2, e1, e2), text)


def subgroup_element_atom(h: SubgroupGraph, a: Word, text: str = "") -> Atom:
    return Atom(SUBGROUP_ELEMENT, (h, a), text)


def _subgroup_element_equal(p: tuple, q: tuple) -> bool:
    (h, a), (h2, a2) = p, q
    if conjugacy_class(a) != conjugacy_class(a2):
        return False
    g0 = conjugator(h, h2)
    if g0 is None:
        return False
    for n in normalizer_quotient(h2).representatives:
        g = n * g0
        moved = a.conjugate(g)
        if conjugate_within(fold([moved], h2.rank), fold([a2], h2.rank), h2):
            return True
    return False


def _pair_equal(p: tuple, q: tuple) -> bool:
    tag, h1, h2, e1, e2 = p
    tag_, k1, k2, f1, f2 = q
    if tag != tag_:
        return False
    for x, y in ((e1, f1), (e2, f2)):
        if (x is None) != (y is None):
            return False
        if x is not None and conjugacy_class(x) != conjugacy_class(y):
            return False
    if is_good_pair(h1, h2) and is_good_pair(k1, k2):
        return pairs_equal((h1, h2), (k1, k2))
    # pairs that are not free products need one conjugator for both entries
    g0 = conjugator(h1, k1)
    if g0 is None:
        return False
    return any(
        conjugate_within(conjugate_subgroup(h2, n * g0), k2, k1)
        for n in normalizer_quotient(k1).representatives
    )


def atoms_equal(a: Atom, b: Atom) -> bool:
    if a.kind != b.kind:
        return False
    if a.signature() != b.signature():
        return False
    if a.kind in (LABEL, CYCLIC, CLASS):
        return True
    if a.kind == PAIR:
        return _pair_equal(a.payload, b.payload)  # type: ignore[arg-type]
    if a.kind == SUBGROUP_ELEMENT:
        return _subgroup_element_equal(a.payload, b.payload)  # type: ignore[arg-type]
    return a.payload == b.payload


# -------------------------------------------------------------- iterated sets

@dataclass(frozen=True, eq=False)
class IteratedSet:
    children: tuple["Node", ...]
    ordered: bool = False
    name: str = ""

    def leaves(self) -> list[tuple[tuple[int, ...], Atom]]:
        out = []
        for i, ch in enumerate(self.children):
            if isinstance(ch, Atom):
                out.append(((i,), ch))
            else:
                out.extend(((i,) + p, a) for p, a in ch.leaves())
        return out

    def render(self, indent: int = 0) -> str:
        pad = "  " * indent
        head = f"{pad}{'ordered' if self.ordered else 'set'}{' ' + self.name if self.name else ''}"
        lines = [head]
        for ch in self.children:
            if isinstance(ch, Atom):
                lines.append(f"{pad}  {ch.kind}: {ch}")
            else:
                lines.append(ch.render(indent + 1))
        return "\n".join(lines)


Node = Union[IteratedSet, Atom]
LeafMap = dict[tuple[int, ...], tuple[int, ...]]


def _shape(x: Node, leaf_key: Callable[[Atom], object]) -> tuple:
    if isinstance(x, Atom):
        return ("leaf", leaf_key(x))
    kids = [_shape(ch, leaf_key) for ch in x.children]
    if not x.ordered:
        kids.sort(key=repr)
    return ("O" if x.ordered else "U", tuple(kids))


def _isos(x: Node, y: Node, leaf_ok: Callable[[Atom, Atom], bool], key: Callable[[Atom], object]) -> Iterator[LeafMap]:
    if isinstance(x, Atom) or isinstance(y, Atom):
        if isinstance(x, Atom) and isinstance(y, Atom) and leaf_ok(x, y):
            yield {(): ()}
        return
    if x.ordered != y.ordered or len(x.children) != len(y.children):
        return
    if _shape(x, key) != _shape(y, key):
        return
    n = len(x.children)
    if x.ordered:
        yield from _product(x, y, [(i, i) for i in range(n)], 0, {}, leaf_ok, key)
        return
    shapes_y = [_shape(ch, key) for ch in y.children]
    shapes_x = [_shape(ch, key) for ch in x.children]

    def assign(i: int, used: frozenset, pairs: list) -> Iterator[list]:
        if i == n:
            yield list(pairs)
            return
        for j in range(n):
            if j in used or shapes_x[i] != shapes_y[j]:
                continue
            pairs.append((i, j))
            yield from assign(i + 1, used | {j}, pairs)
            pairs.pop()

    for pairs in assign(0, frozenset(), []):
        yield from _product(x, y, pairs, 0, {}, leaf_ok, key)


def _product(x: IteratedSet, y: IteratedSet, pairs: list, k: int, acc: LeafMap, leaf_ok, key) -> Iterator[LeafMap]:
    if k == len(pairs):
        yield dict(acc)
        return
    i, j = pairs[k]
    for sub in _isos(x.children[i], y.children[j], leaf_ok, key):
        added = {(i,) + p: (j,) + q for p, q in sub.items()}
        acc.update(added)
        yield from _product(x, y, pairs, k + 1, acc, leaf_ok, key)
        for p in added:
            del acc[p]


def _leaf_at(x: IteratedSet, path: tuple[int, ...]) -> Atom:
    node: Node = x
    for i in path:
        assert isinstance(node, IteratedSet)
        node = node.children[i]
    assert isinstance(node, Atom)
    return node


def _memo_equal() -> Callable[[Atom, Atom], bool]:
    memo: dict[tuple[int, int], bool] = {}

    def eq(a: Atom, b: Atom) -> bool:
        k = (id(a), id(b))
        if k not in memo:
            memo[k] = atoms_equal(a, b)
        return memo[k]

    return eq


def equivalences(x: IteratedSet, y: IteratedSet) -> Iterator[LeafMap]:
    return _isos(x, y, _memo_equal(), Atom.signature)


def equivalent(x: IteratedSet, y: IteratedSet) -> tuple[bool, LeafMap | None]:
    for f in equivalences(x, y):
        return True, f
    return False, None


@dataclass(frozen=True)
class AutGroup:
    elements: tuple[tuple[tuple[tuple[int, ...], tuple[int, ...]], ...], ...]
    table: tuple[tuple[int, ...], ...]

    @property
    def order(self) -> int:
        return len(self.elements)


def automorphisms(x: IteratedSet) -> AutGroup:
    """Self-equivalences as leaf permutations, with their multiplication table (i*j = i after j)."""
    maps = [tuple(sorted(f.items())) for f in equivalences(x, x)]
    maps.sort(key=lambda m: (any(p != q for p, q in m), m))
    index = {m: k for k, m in enumerate(maps)}
    table = []
    for a in maps:
        da = dict(a)
        row = []
        for b in maps:
            comp = tuple(sorted((p, da[q]) for p, q in b))
            row.append(index[comp])
        table.append(tuple(row))
    return AutGroup(tuple(maps), tuple(table))


def label_twist_candidates(x: IteratedSet, y: IteratedSet) -> list[LeafMap]:
    """Tree isomorphisms that preserve type and order and are consistent on labels."""
    out = []
    xl = x.leaves()
    eq = _memo_equal()
    for f in _isos(x, y, lambda a, b: a.kind == b.kind, lambda a: a.kind):
        ok = True
        for (p1, a1), (p2, a2) in ((u, v) for k, u in enumerate(xl) for v in xl[k + 1 :]):
            if eq(a1, a2) and not eq(_leaf_at(y, f[p1]), _leaf_at(y, f[p2])):
                ok = False
                break
        if ok:
            out.append(f)
    return out


# ------------------------------------------------------------ Whitehead

def _apply_cyclic(theta: Automorphism, t: Sequence[CyclicWord]) -> tuple[CyclicWord, ...]:
    return tuple(conjugacy_class(theta(w.as_word())) for w in t)


def _total(t: Sequence[CyclicWord]) -> int:
    return sum(len(w) for w in t)


def whitehead_reduce(t: Sequence[CyclicWord]) -> tuple[tuple[CyclicWord, ...], Automorphism]:
    """Reduce total cyclic length by Whitehead moves; returns the minimal tuple and the automorphism used."""
    rank = t[0].rank
    cur = tuple(t)
    acc = Automorphism.identity(rank)
    moves = whitehead_moves(rank, include_permutations=False)
    improved = True
    while improved:
        improved = False
        for m in moves:
            nxt = _apply_cyclic(m, cur)
            if _total(nxt) < _total(cur):
                cur, acc, improved = nxt, m * acc, True
                break
    return cur, acc


def whitehead_orbit(t1: Sequence[CyclicWord], t2: Sequence[CyclicWord]) -> tuple[bool, Automorphism | None]:
    """Decide whether some automorphism carries t1 to t2 coordinatewise, with a witness."""
    if len(t1) != len(t2):
        return False, None
    if not t1:
        return True, None
    rank = t1[0].rank
    if any(w.rank != rank for w in list(t1) + list(t2)):
        raise ValueError("rank mismatch")
    m1, a1 = whitehead_reduce(t1)
    m2, a2 = whitehead_reduce(t2)
    if _total(m1) != _total(m2):
        return False, None
    moves = whitehead_moves(rank, include_permutations=True)
    seen: dict[tuple[CyclicWord, ...], Automorphism] = {m1: Automorphism.identity(rank)}
    frontier = [m1]
    while frontier:
        nxt_frontier = []
        for cur in frontier:
            if cur == m2:
                theta = a2.inverse() * seen[cur] * a1
                return True, theta
            for m in moves:
                nxt = _apply_cyclic(m, cur)
                if _total(nxt) == _total(cur) and nxt not in seen:
                    seen[nxt] = m * seen[cur]
                    nxt_frontier.append(nxt)
        frontier = nxt_frontier
    return False, None


def minimal_length(w: CyclicWord) -> int:
    return _total(whitehead_reduce([w])[0])
