"""Print visible lines, forward indices and staple pairs for a CT and its powers.

    python3 scripts/staples_report.py running --powers 1 2 --lines 12
"""

import argparse

from upgconj import example_path
from upgconj.ct import ct_power, load_ct
from upgconj.staples import (
    equivalence_classes,
    forward_index,
    m_of_phi,
    orbit_bound,
    staple_pairs,
    staple_pairs_by_ray,
    translation_number,
    visible_lines,
)


def report(c, n_lines):
    for name in c.higher_edges:
        print(f"R_{name}: translation number {translation_number(c, name)}, B = {orbit_bound(c, name)}")
        for v in visible_lines(c, name, n_lines):
            print(f"  line {v.index:>3} -> {forward_index(c, name, v.index):>3}  {v.line}")
        for b in staple_pairs(c, name):
            print(f"  pair at {b.index}: {b.kind} {b} m = {m_of_phi(c, b)}")
    for k, cls in enumerate(equivalence_classes(staple_pairs_by_ray(c))):
        print(f"class {k}: " + "; ".join(f"({x}, {y})" for x, y in sorted(cls)))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("example", nargs="?", default="running", help="shipped example name or path to a .ct file")
    ap.add_argument("--powers", type=int, nargs="+", default=[1, 2])
    ap.add_argument("--lines", type=int, default=12)
    args = ap.parse_args()
    path = example_path(args.example)
    c = load_ct(path if path.exists() else args.example)
    for k in args.powers:
        print(f"=== power {k} ===")
        report(ct_power(c, k) if k > 1 else c, args.lines)


if __name__ == "__main__":
    main()
