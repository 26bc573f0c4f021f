"""Compare Stallings membership with two brute-force oracles on random subgroups of F_3.

The naive oracle accepts exactly the products of at most ``--depth`` generators.
It under-approximates the subgroup, so it reports false disagreements for words
that need longer products.  The certified oracle (used by the test suite) checks
accepted words against a length-bounded closure and rejected words against
permutation actions fixing the subgroup.

    python3 scripts/membership_study.py --subgroups 50 --depth 4
"""

import argparse
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from oracles import all_words, subgroup_elements  # noqa: E402
from test_stallings import membership_disagreements, random_word  # noqa: E402
from upgconj.stallings import fold, membership  # noqa: E402
from upgconj.words import Word  # noqa: E402


def naive_disagreements(n_subgroups, depth, seed):
    rng = random.Random(seed)
    short = [w for w in all_words(3, 4) if w]
    bad = 0
    for _ in range(n_subgroups):
        gens = [random_word(rng, 3, 1, 4) for _ in range(rng.randint(1, 3))]
        h = fold([Word(g, 3) for g in gens], 3)
        products = subgroup_elements(gens, depth)
        bad += sum(membership(h, Word(w, 3)) != (w in products) for w in short)
    return bad


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--subgroups", type=int, default=50)
    ap.add_argument("--depth", type=int, default=4)
    ap.add_argument("--seed", type=int, default=20240611)
    args = ap.parse_args()

    t = time.perf_counter()
    naive = naive_disagreements(args.subgroups, args.depth, args.seed)
    print(f"naive oracle (products of <= {args.depth} generators): {naive} disagreements "
          f"({time.perf_counter() - t:.1f}s)")
    t = time.perf_counter()
    certified = membership_disagreements(args.subgroups, args.seed)
    print(f"certified oracle: {len(certified)} disagreements ({time.perf_counter() - t:.1f}s)")


if __name__ == "__main__":
    main()
