"""Automorphisms of F_n given by images of the basis, and Whitehead automorphisms."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations, product
from typing import Sequence

from .stallings import fold
from .words import Word, reduce


class NotAutomorphism(ValueError):
    pass


@dataclass(frozen=True)
class Automorphism:
    images: tuple[Word, ...]

    @property
    def rank(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, rank: int) -> "Automorphism":
        return cls(tuple(Word.gen(i, rank) for i in range(1, rank + 1)))

    @classmethod
    def parse(cls, text: str, rank: int | None = None) -> "Automorphism":
        """Parse ``"x1 -> ab; x2 -> B"``; generators not mentioned are fixed."""
        pairs = [chunk.strip() for chunk in re.split(r"[;\n]", text) if chunk.strip()]
        table = {}
        for n, chunk in enumerate(pairs, 1):
            m = re.fullmatch(r"x(\d+)\s*->\s*([A-Za-z1]*)", chunk)
            if not m:
                raise ValueError(f"clause {n}: cannot parse {chunk!r}")
            i = int(m.group(1))
            if i in table:
                raise ValueError(f"clause {n}: x{i} given twice")
            table[i] = m.group(2)
        if not table:
            raise ValueError("empty automorphism")
        if rank is None:
            rank = max(table)
        for n, i in enumerate(table, 1):
            if i < 1 or i > rank:
                raise ValueError(f"clause {n}: generator x{i} out of range for rank {rank}")
        imgs = []
        for i in range(1, rank + 1):
            if i not in table:
                imgs.append(Word.gen(i, rank))
                continue
            try:
                imgs.append(Word.parse(table[i], rank))
            except ValueError as exc:
                raise ValueError(f"clause {list(table).index(i) + 1}: {exc}") from None
        imgs = tuple(imgs)
        return cls(imgs)

    def __str__(self) -> str:
        return "; ".join(f"x{i + 1} -> {w}" for i, w in enumerate(self.images))

    def apply(self, w: Word) -> Word:
        out: list[int] = []
        for g in w.letters:
            img = self.images[abs(g) - 1]
            out.extend(img.letters if g > 0 else img.inverse().letters)
        return reduce(out, w.rank)

    def __call__(self, w: Word) -> Word:
        return self.apply(w)

    def compose(self, other: "Automorphism") -> "Automorphism":
        """self after other."""
        return Automorphism(tuple(self.apply(w) for w in other.images))

    def __mul__(self, other: "Automorphism") -> "Automorphism":
        return self.compose(other)

    def power(self, k: int) -> "Automorphism":
        base = self if k >= 0 else self.inverse()
        out = Automorphism.identity(self.rank)
        for _ in range(abs(k)):
            out = base * out
        return out

    def total_length(self) -> int:
        return sum(len(w) for w in self.images)

    def is_automorphism(self) -> bool:
        g = fold(list(self.images), self.rank)
        return g.n_vertices == 1 and len(g.edges) == self.rank

    def inverse(self) -> "Automorphism":
        """Invert by peak reduction: left-compose Whitehead moves until a signed permutation remains."""
        if not self.is_automorphism():
            raise NotAutomorphism(str(self))
        n = self.rank
        cur = tuple(w.letters for w in self.images)
        acc = tuple((i,) for i in range(1, n + 1))
        moves = _raw_moves(n)
        size = sum(map(len, cur))
        while size > n:
            for table in moves:
                cand = tuple(_apply_raw(table, w) for w in cur)
                new_size = sum(map(len, cand))
                if new_size < size:
                    break
            else:
                raise NotAutomorphism("length reduction got stuck; not a basis")
            acc = tuple(_apply_raw(table, w) for w in acc)
            cur, size = cand, new_size
        # cur is a signed permutation: cur(x_i) = x_{s(i)}^{e_i}
        undo: list[tuple[int, ...]] = [()] * n
        for i, (g,) in enumerate(cur):
            undo[abs(g) - 1] = (i + 1,) if g > 0 else (-(i + 1),)
        return Automorphism(tuple(Word(_apply_raw(undo, w), n) for w in acc))


def _apply_raw(table: Sequence[tuple[int, ...]], letters: Sequence[int]) -> tuple[int, ...]:
    out: list[int] = []
    for g in letters:
        for h in (table[g - 1] if g > 0 else [-x for x in reversed(table[-g - 1])]):
            if out and out[-1] == -h:
                out.pop()
            else:
                out.append(h)
    return tuple(out)


@lru_cache(maxsize=None)
def _raw_moves(n: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    return tuple(tuple(w.letters for w in m.images) for m in whitehead_moves(n, include_permutations=False))


def conjugation(g: Word) -> Automorphism:
    """The inner automorphism x -> g x g^-1."""
    n = g.rank
    return Automorphism(tuple(Word.gen(i, n).conjugate(g) for i in range(1, n + 1)))


@lru_cache(maxsize=None)
def _whitehead_moves(n: int, include_permutations: bool) -> tuple[Automorphism, ...]:
    out: list[Automorphism] = []
    seen = set()
    letters = [g for i in range(1, n + 1) for g in (i, -i)]
    for a in letters:
        others = [g for g in letters if abs(g) != abs(a)]
        for mask in product((False, True), repeat=len(others)):
            chosen = {g for g, m in zip(others, mask) if m}
            if not chosen:
                continue
            imgs = []
            for i in range(1, n + 1):
                if i == abs(a):
                    imgs.append(Word.gen(i, n))
                    continue
                left = -i in chosen  # x^-1 in A: prefix a^-1
                right = i in chosen  # x in A: suffix a
                raw = ([-a] if left else []) + [i] + ([a] if right else [])
                imgs.append(reduce(raw, n))
            auto = Automorphism(tuple(imgs))
            if auto.images not in seen:
                seen.add(auto.images)
                out.append(auto)
    if include_permutations:
        for perm in permutations(range(1, n + 1)):
            for signs in product((1, -1), repeat=n):
                auto = Automorphism(tuple(Word((s * p,), n) for p, s in zip(perm, signs)))
                if auto.images not in seen:
                    seen.add(auto.images)
                    out.append(auto)
    return tuple(out)


def whitehead_moves(n: int, include_permutations: bool = True) -> Sequence[Automorphism]:
    """All Whitehead automorphisms of F_n (the second kind, plus signed permutations if asked)."""
    return _whitehead_moves(n, include_permutations)
