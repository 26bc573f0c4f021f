"""Reduced words and conjugacy classes in a free group of fixed rank.

Generators are signed integers: ``k`` stands for ``x_k`` and ``-k`` for its
inverse.  The textual syntax uses ``a``..``z`` for ``x_1``..``x_26`` with
uppercase letters denoting inverses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


class InvalidGenerator(ValueError):
    pass


class EmptyWord(ValueError):
    pass


def _check(raw: Iterable[int], rank: int) -> list[int]:
    out = []
    for g in raw:
        if g == 0 or abs(g) > rank:
            raise InvalidGenerator(f"generator index {g} not valid in rank {rank}")
        out.append(int(g))
    return out


def _free_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    stack: list[int] = []
    for g in letters:
        if stack and stack[-1] == -g:
            stack.pop()
        else:
            stack.append(g)
    return tuple(stack)


@dataclass(frozen=True, order=True)
class Word:
    letters: tuple[int, ...]
    rank: int

    def __post_init__(self):
        _check(self.letters, self.rank)
        for x, y in zip(self.letters, self.letters[1:]):
            if x == -y:
                raise ValueError("word is not freely reduced")

    @classmethod
    def identity(cls, rank: int) -> "Word":
        return cls((), rank)

    @classmethod
    def gen(cls, i: int, rank: int) -> "Word":
        return cls((i,), rank)

    @classmethod
    def parse(cls, text: str, rank: int) -> "Word":
        return reduce(parse_letters(text), rank)

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return reduce(self.letters + other.letters, self.rank)

    def inverse(self) -> "Word":
        return Word(tuple(-g for g in reversed(self.letters)), self.rank)

    def __pow__(self, k: int) -> "Word":
        base = self if k >= 0 else self.inverse()
        out = Word.identity(self.rank)
        for _ in range(abs(k)):
            out = out * base
        return out

    def conjugate(self, g: "Word") -> "Word":
        """Return g * self * g^-1."""
        return g * self * g.inverse()

    def is_identity(self) -> bool:
        return not self.letters

    def __str__(self) -> str:
        return format_letters(self.letters) if self.letters else "1"


def parse_letters(text: str) -> list[int]:
    out = []
    for ch in text.strip():
        if ch in " .*":
            continue
        if ch == "1":
            continue
        if not ch.isalpha() or not ch.isascii():
            raise InvalidGenerator(f"bad letter {ch!r}")
        idx = ord(ch.lower()) - ord("a") + 1
        out.append(idx if ch.islower() else -idx)
    return out


def format_letters(letters: Sequence[int]) -> str:
    return "".join(
        chr(ord("a") + g - 1) if g > 0 else chr(ord("A") - g - 1) for g in letters
    )


def reduce(raw: Sequence[int], rank: int) -> Word:
    return Word(_free_reduce(_check(raw, rank)), rank)


def cyclic_core(w: Word) -> tuple[Word, Word]:
    """Split w as t * core * t^-1 with core cyclically reduced; returns (t, core)."""
    s = w.letters
    i = 0
    while 2 * i + 1 < len(s) and s[i] == -s[len(s) - 1 - i]:
        i += 1
    return Word(s[:i], w.rank), Word(s[i:len(s) - i], w.rank)


def least_rotation(seq: Sequence[int]) -> tuple[int, ...]:
    seq = tuple(seq)
    if not seq:
        return seq
    return min(seq[i:] + seq[:i] for i in range(len(seq)))


@dataclass(frozen=True, order=True)
class CyclicWord:
    letters: tuple[int, ...]
    rank: int

    def __post_init__(self):
        if not self.letters:
            raise EmptyWord("the trivial class has no cyclic word")
        if least_rotation(self.letters) != self.letters:
            raise ValueError("cyclic word not in canonical rotation")

    def inverse(self) -> "CyclicWord":
        return conjugacy_class(Word(tuple(-g for g in reversed(self.letters)), self.rank))

    def as_word(self) -> Word:
        return Word(self.letters, self.rank)

    def unoriented(self) -> "CyclicWord":
        """Canonical representative of the class up to inversion."""
        return min(self, self.inverse(), key=lambda w: tuple((abs(x), x < 0) for x in w.letters))

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return "[" + format_letters(self.letters) + "]"


def conjugacy_class(w: Word) -> CyclicWord:
    _, core = cyclic_core(w)
    if core.is_identity():
        raise EmptyWord("the trivial class has no cyclic word")
    return CyclicWord(least_rotation(core.letters), w.rank)


def _period(seq: tuple[int, ...]) -> int:
    n = len(seq)
    for p in range(1, n + 1):
        if n % p == 0 and seq[:p] * (n // p) == seq:
            return p
    return n


def root_decomposition(w: Word) -> tuple[Word, int]:
    if w.is_identity():
        raise EmptyWord("the identity has no root")
    t, core = cyclic_core(w)
    p = _period(core.letters)
    root_core = Word(core.letters[:p], w.rank)
    return root_core.conjugate(t), len(core) // p
