"""Tabulate |f_#^k(E)| for every edge next to its fitted growth polynomial.

    python3 scripts/growth_table.py fixed_edge --max-k 20
"""

import argparse

from upgconj import example_path
from upgconj.ct import growth_polynomial, load_ct
from upgconj.graphmap import iterate_length


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("example", nargs="?", default="running")
    ap.add_argument("--max-k", type=int, default=15)
    args = ap.parse_args()
    path = example_path(args.example)
    c = load_ct(path if path.exists() else args.example)
    for name in c.edges:
        poly, k0 = growth_polynomial(c, name)
        values = [iterate_length(c.fmap, name, k) for k in range(args.max_k + 1)]
        fits = all(poly(k) == v for k, v in enumerate(values) if k >= k0)
        print(f"{name}: {poly} (k >= {k0}) {'fits' if fits else 'MISMATCH'}")
        print("   " + " ".join(map(str, values)))


if __name__ == "__main__":
    main()
