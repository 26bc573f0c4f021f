"""Certificate checks for a proposed conjugator and for membership in X_c(phi)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .ct import CTData
from .freeauto import Automorphism, NotAutomorphism
from .invariants import AlgebraicData, StrongAxis, algebraic_data, all_strong_axes, special_chain, twist_coordinate
from .iterset import atoms_equal, pair_atom, subgroup_element_atom
from .stallings import SubgroupGraph, conj_class, fold
from .words import Word, conjugacy_class, cyclic_core


class BadCorrespondence(ValueError):
    pass


@dataclass(frozen=True)
class OuterAuto:
    """An outer automorphism, stored through a representative automorphism."""

    auto: Automorphism

    def __post_init__(self):
        if not self.auto.is_automorphism():
            raise NotAutomorphism(str(self.auto))

    @classmethod
    def parse(cls, text: str, rank: int | None = None) -> "OuterAuto":
        return cls(Automorphism.parse(text, rank))

    @classmethod
    def identity(cls, rank: int) -> "OuterAuto":
        return cls(Automorphism.identity(rank))

    @property
    def rank(self) -> int:
        return self.auto.rank

    def __mul__(self, other: "OuterAuto") -> "OuterAuto":
        return OuterAuto(self.auto * other.auto)

    def inverse(self) -> "OuterAuto":
        return OuterAuto(self.auto.inverse())

    def power(self, k: int) -> "OuterAuto":
        return OuterAuto(self.auto.power(k))

    def __str__(self) -> str:
        return str(self.auto)


def _as_auto(x: OuterAuto | Automorphism) -> Automorphism:
    a = x.auto if isinstance(x, OuterAuto) else x
    if not a.is_automorphism():
        raise NotAutomorphism(str(a))
    return a


def inner_conjugator(w: Automorphism) -> Word | None:
    """g with w(x) = g x g^-1 for every x, or None if w is not inner."""
    n = w.rank
    gens = [Word.gen(i, n) for i in range(1, n + 1)]
    if n == 1:
        return gens[0] ** 0 if w.images[0] == gens[0] else None
    t, core = cyclic_core(w.images[0])
    if core != gens[0]:
        return None
    y = w.images[1].conjugate(t.inverse())
    k = 0
    lead = y.letters[0] if y.letters else 0
    if abs(lead) == 1:
        while k < len(y.letters) and y.letters[k] == lead:
            k += 1
        k = k if lead > 0 else -k
    g = t * gens[0] ** k
    if all(w.images[i] == gens[i].conjugate(g) for i in range(n)):
        return g
    return None


def outer_equal(u: OuterAuto | Automorphism, v: OuterAuto | Automorphism) -> bool:
    a, b = _as_auto(u), _as_auto(v)
    if a.rank != b.rank:
        raise ValueError("rank mismatch")
    return inner_conjugator(a * b.inverse()) is not None


def verify_conjugator(phi: OuterAuto, psi: OuterAuto, theta: OuterAuto) -> bool:
    """Does theta conjugate phi to psi in Out(F_n), i.e. theta phi theta^-1 = psi?"""
    return outer_equal(_as_auto(theta) * _as_auto(phi), _as_auto(psi) * _as_auto(theta))


def recognition_check(c1: CTData, c2: CTData, correspondence: Mapping[StrongAxis, StrongAxis]) -> bool:
    """Twist coordinates are preserved by a bijection between strong axes."""
    sa1, sa2 = all_strong_axes(c1), all_strong_axes(c2)
    if set(correspondence) != set(sa1) or sorted(correspondence.values()) != sorted(sa2):
        raise BadCorrespondence("correspondence must be a bijection between strong axes")
    for x in sa1:
        for y in sa1:
            if x.axis != y.axis:
                continue
            bx, by = correspondence[x], correspondence[y]
            if bx.axis != by.axis:
                return False
            if twist_coordinate(x, y) != twist_coordinate(bx, by):
                return False
    return True


# ------------------------------------------------------------ X_c(phi)

X_ITEMS = (
    "chain preserved",
    "factors fixed",
    "fixed subgroups fixed",
    "added-line pairs fixed",
    "limit-line pairs fixed",
    "oriented axes fixed",
    "large strong axes fixed",
)


def image_subgroup(theta: Automorphism, h: SubgroupGraph) -> SubgroupGraph:
    return fold([theta(w) for w in h.generators()], h.rank)


def _class_fixed(theta: Automorphism, h: SubgroupGraph) -> bool:
    return conj_class(image_subgroup(theta, h)) == conj_class(h)


def _pair_fixed(theta: Automorphism, p) -> bool:
    atom = pair_atom(p.kind, p.first, p.second, p.first_elem, p.second_elem)
    moved = pair_atom(
        p.kind,
        image_subgroup(theta, p.first),
        image_subgroup(theta, p.second),
        theta(p.first_elem) if p.first_elem is not None else None,
        theta(p.second_elem) if p.second_elem is not None else None,
    )
    return atoms_equal(moved, atom)


def x_membership(c: CTData, chain=None, theta: OuterAuto | Automorphism | None = None,
                 data: AlgebraicData | None = None) -> dict[str, bool]:
    """Checklist of the seven conditions defining X_c(phi) for an explicit theta."""
    if theta is None:
        theta = Automorphism.identity(c.rank)
    t = _as_auto(theta)
    if data is None:
        data = algebraic_data(c, special_chain(c) if chain is None else chain)
    out = {}
    out[X_ITEMS[0]] = all(
        sorted(conj_class(image_subgroup(t, h)) for h in hs) == sorted(conj_class(h) for h in hs)
        for hs in data.chain_factors
    )
    out[X_ITEMS[1]] = all(_class_fixed(t, h) for hs in data.chain_factors for h in hs)
    out[X_ITEMS[2]] = all(_class_fixed(t, h) for h in data.fix)
    out[X_ITEMS[3]] = all(_pair_fixed(t, p) for ps in data.extensions for p in ps)
    out[X_ITEMS[4]] = all(_pair_fixed(t, p) for _, p in data.limit_pairs)
    out[X_ITEMS[5]] = all(conjugacy_class(t(a.as_word())) == a for a in data.oriented_axes)
    out[X_ITEMS[6]] = all(
        atoms_equal(subgroup_element_atom(image_subgroup(t, s.fix), t(s.element)), subgroup_element_atom(s.fix, s.element))
        for s in data.strong
    )
    return out
