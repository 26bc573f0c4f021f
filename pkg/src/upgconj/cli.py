"""Command-line front end: ``upgconj validate | invariants | compare | verify``.

Exit codes: 0 for success or YES, 1 for invalid input or NO, 2 for usage errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass, field
from itertools import permutations

from .ct import CTData, CTFormatError, classify_edges, growth_polynomial, load_ct, stabilization_constant, validate_ct
from .graphmap import format_path
from .invariants import (
    InvalidTotalOrder,
    algebraic_data,
    acc_np,
    added_lines,
    all_strong_axes,
    assemble_Ic,
    covering_pairs,
    eigengraph,
    eigenray,
    extension_type,
    is_special_ffs,
    limit_lines,
    oriented_axes,
    ray_partial_order,
    special_chain,
    twist_coordinate,
)
from .iterset import IteratedSet, equivalent, label, whitehead_orbit
from .staples import equivalence_classes, global_staple_pairs, orbit_bound, staple_pairs, staple_pairs_by_ray, staples
from .verify import OuterAuto, verify_conjugator, x_membership

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class Report:
    """Ordered named sections of text lines; serializes the same way every run."""

    sections: list[tuple[str, list[str]]] = field(default_factory=list)

    def add(self, name: str, lines: list[str]) -> None:
        self.sections.append((name, list(lines)))

    def section(self, name: str) -> list[str]:
        for key, lines in self.sections:
            if key == name:
                return lines
        raise KeyError(name)

    def to_text(self) -> str:
        out = []
        for name, lines in self.sections:
            out.append(f"== {name} ==")
            out.extend(lines)
            out.append("")
        return "\n".join(out)

    def to_json(self) -> str:
        return json.dumps({name: lines for name, lines in self.sections}, indent=2) + "\n"


def _edges_arg(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _load(path: str) -> CTData:
    c = load_ct(path)
    problems = validate_ct(c)
    if problems:
        raise CTFormatError("; ".join(problems))
    return c


def ic_digest(ic: IteratedSet) -> str:
    return hashlib.sha256(ic.render().encode()).hexdigest()


# ------------------------------------------------------------ invariants

def build_report(c: CTData, order: list[str] | None = None, depth: int = 12,
                 special: list[list[str]] = (), special_without: list[list[str]] = ()) -> Report:
    rep = Report()
    fixed, lin, higher = classify_edges(c)
    rep.add("classification", [
        f"fixed: {' '.join(fixed)}",
        f"linear: {' '.join(lin)}",
        f"higher: {' '.join(higher)}",
    ])
    rep.add("stabilization", [f"M = {stabilization_constant(c)}"])

    growth = []
    for name in c.order:
        if name in fixed:
            continue
        poly, k0 = growth_polynomial(c, name)
        growth.append(f"{name}: {poly} (k >= {k0})")
    rep.add("growth polynomials", growth)

    rep.add("ray prefixes", [f"R_{n}: {format_path(eigenray(c, n).prefix(c, depth))}" for n in higher])

    lines = []
    for n in higher:
        omega = sorted(str(x) for x in limit_lines(c, n))
        np_lines = sorted(str(x) for x in acc_np(c, n))
        lines.append(f"Omega(R_{n}) = {{{', '.join(omega)}}}")
        lines.append(f"acc_NP(R_{n}) = {{{', '.join(np_lines)}}}")
    rep.add("limit lines", lines)

    eg = eigengraph(c)
    comps = sorted(eg.components, key=lambda k: (min(k.g_vertices) if k.g_vertices else "", k.rays))
    rep.add("eigengraph", [
        f"{','.join(k.g_vertices)}: {k.flag} (rank {k.rank}) rays={','.join(k.rays) or '-'} "
        f"lollipops={','.join(k.lollipops) or '-'} fixed={','.join(k.fixed_edges) or '-'}"
        for k in comps
    ])

    sa = all_strong_axes(c)
    tau = [f"axes: {', '.join(str(a) for a in oriented_axes(c))}"]
    tau += [f"strong axis {s}" for s in sa]
    for i, x in enumerate(sa):
        for y in sa[i + 1:]:
            if x.axis == y.axis:
                tau.append(f"tau({y.site}, {x.site}) on {x.axis} = {twist_coordinate(y, x)}")
    rep.add("axes", tau)

    order_pairs = sorted(covering_pairs(ray_partial_order(c)))
    rep.add("partial order", [f"R_{a} < R_{b}" for a, b in order_pairs] or ["(none)"])

    chain = special_chain(c, order)
    rep.add("special chain", [f"order: {','.join(chain.order)}"] + [
        f"{k}: {el} profile={el.profile} added={chain.added[k] or '-'}"
        for k, el in enumerate(chain.elements)
    ])

    ext = []
    for k in range(1, len(chain)):
        added = added_lines(c, chain, k)
        body = added.pair.describe() if added.pair is not None else ", ".join(str(x) for x in added.lines)
        ext.append(f"step {k} ({chain.added[k]}): {extension_type(c, chain, k)} lines: {body}")
    rep.add("extensions", ext)

    data = algebraic_data(c, chain)
    rep.add("algebraic lines", sorted(f"{line}: {p.describe()}" for line, p in data.limit_pairs))

    st = [f"staples: {{{', '.join(sorted(str(x) for x in staples(c)))}}}"]
    for n in higher:
        st.append(f"R_{n}: B = {orbit_bound(c, n)}")
        for b in staple_pairs(c, n):
            st.append(f"  [{b.index}] {b.kind} {b} axis {b.axis} m = {b.slide}")
    for key, bs in global_staple_pairs(c).items():
        st.append(f"S2 ({key[0]}, {key[1]}) m = {sorted({b.slide for b in bs})}")
    for k, cls in enumerate(equivalence_classes(staple_pairs_by_ray(c))):
        st.append(f"class {k}: " + "; ".join(f"({x}, {y})" for x, y in sorted(cls)))
    rep.add("staples", st)

    queries = []
    for edges in special:
        queries.append(f"{{{','.join(edges)}}}: {_special_word(c, edges)}")
    for edges in special_without:
        rest = [n for n in c.order if n not in edges]
        queries.append(f"complement of {{{','.join(edges)}}}: {_special_word(c, rest)}")
    if queries:
        rep.add("special queries", queries)

    ic = assemble_Ic(c, chain)
    rep.add("I_c", ic.render().splitlines())
    rep.add("digest", [f"sha256 {ic_digest(ic)}"])
    return rep


def _special_word(c: CTData, edges: list[str]) -> str:
    return "special" if is_special_ffs(c, edges) else "not special"


# --------------------------------------------------------------- compare

def _type_key(atom) -> str:
    """What survives a change of basis: the kind of atom and the ranks involved."""
    p = atom.payload
    if atom.kind == "class":
        return f"class/{p.free_rank}"
    if atom.kind == "pair":
        tag, h1, h2, _, _ = p
        return f"pair/{tag}/{h1.free_rank}/{h2.free_rank}"
    if atom.kind == "subgroup-element":
        return f"subgroup-element/{p[0].free_rank}"
    return atom.kind


def _typed(x: IteratedSet) -> IteratedSet:
    kids = tuple(_typed(ch) if isinstance(ch, IteratedSet) else label(_type_key(ch)) for ch in x.children)
    return IteratedSet(kids, x.ordered, x.name)


def _axes_orbit_equal(a: IteratedSet, b: IteratedSet) -> bool:
    wa = [leaf.payload for _, leaf in a.leaves()]
    wb = [leaf.payload for _, leaf in b.leaves()]
    if len(wa) != len(wb):
        return False
    if not wa:
        return True
    return any(whitehead_orbit(wa, list(p))[0] for p in permutations(wb))


def compare(c1: CTData, c2: CTData, order1=None, order2=None) -> list[tuple[str, bool, bool]]:
    """Per I_c component: (name, literally equivalent, equivalent after forgetting the basis)."""
    if c1.rank != c2.rank:
        return [("rank", False, False)]
    i1 = assemble_Ic(c1, special_chain(c1, order1))
    i2 = assemble_Ic(c2, special_chain(c2, order2))
    out = []
    for x, y in zip(i1.children, i2.children):
        literal = equivalent(x, y)[0]
        if literal:
            structural = True
        elif x.name == "axes":
            structural = _axes_orbit_equal(x, y)
        else:
            structural = equivalent(_typed(x), _typed(y))[0]
        out.append((x.name, literal, structural))
    return out


# ------------------------------------------------------------------ commands

def cmd_validate(args) -> int:
    try:
        c = load_ct(args.path)
    except CTFormatError as exc:
        print(f"{args.path}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    problems = validate_ct(c)
    for p in problems:
        print(f"{args.path}: {p}", file=sys.stderr)
    if problems:
        return EXIT_FAIL
    print(f"{args.path}: valid CT, rank {c.rank}, {len(c.edges)} edges")
    return EXIT_OK


def cmd_invariants(args) -> int:
    c = _load(args.path)
    rep = build_report(
        c,
        _edges_arg(args.chain) if args.chain else None,
        args.depth,
        [_edges_arg(s) for s in args.special],
        [_edges_arg(s) for s in args.special_without],
    )
    sys.stdout.write(rep.to_json() if args.json else rep.to_text())
    return EXIT_OK


def cmd_compare(args) -> int:
    c1, c2 = _load(args.a), _load(args.b)
    rows = compare(
        c1, c2,
        _edges_arg(args.chainA) if args.chainA else None,
        _edges_arg(args.chainB) if args.chainB else None,
    )
    for name, literal, structural in rows:
        print(f"{name}: literal={'same' if literal else 'differs'} structural={'same' if structural else 'differs'}")
    first = next((name for name, literal, _ in rows if not literal), None)
    obstruction = next((name for name, _, structural in rows if not structural), None)
    if first is None:
        print("indistinguishable")
    else:
        print(f"distinguished at {first}")
        print(f"first basis-free obstruction: {obstruction or 'none'}")
    return EXIT_OK


def cmd_verify(args) -> int:
    c1, c2 = _load(args.phi), _load(args.psi)
    try:
        theta = OuterAuto.parse(args.theta, c1.rank)
    except ValueError as exc:
        print(f"--theta: {exc}", file=sys.stderr)
        return EXIT_USAGE
    phi, psi = OuterAuto(c1.automorphism), OuterAuto(c2.automorphism)
    ok = verify_conjugator(phi, psi, theta)
    print("YES" if ok else "NO")
    for item, value in x_membership(c1, theta=theta).items():
        print(f"  [{'x' if value else ' '}] {item}")
    return EXIT_OK if ok else EXIT_FAIL


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="upgconj", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check a CT file")
    v.add_argument("path")
    v.set_defaults(func=cmd_validate)

    inv = sub.add_parser("invariants", help="print the invariant report of a CT")
    inv.add_argument("path")
    inv.add_argument("--chain", help="total order of higher-order edges, e.g. c,d,e,q")
    inv.add_argument("--depth", type=int, default=12, help="length of displayed ray prefixes")
    inv.add_argument("--json", action="store_true")
    inv.add_argument("--special", action="append", default=[], metavar="EDGES",
                     help="ask whether the subgraph on these edges gives a special free factor system")
    inv.add_argument("--special-without", action="append", default=[], metavar="EDGES",
                     help="same question for the complement of these edges")
    inv.set_defaults(func=cmd_invariants)

    cmp_ = sub.add_parser("compare", help="compare the invariants of two CTs")
    cmp_.add_argument("a")
    cmp_.add_argument("b")
    cmp_.add_argument("--chainA")
    cmp_.add_argument("--chainB")
    cmp_.set_defaults(func=cmd_compare)

    ver = sub.add_parser("verify", help="check a proposed conjugator theta")
    ver.add_argument("phi")
    ver.add_argument("psi")
    ver.add_argument("--theta", required=True, help='e.g. "x1 -> a; x2 -> ba"')
    ver.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except CTFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except InvalidTotalOrder as exc:
        print(f"error: invalid chain order: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
