"""How many Whitehead moves the exhaustive oracle needs before it agrees with whitehead_orbit.

For each depth, every pair of cyclic words of length <= MAX_LEN in F_2 is
compared; the count of disagreements should fall to zero once the depth is
large enough to connect every orbit within the length window.

    python3 scripts/whitehead_study.py --max-len 4 --depths 1 2 3
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from oracles import cyclic_words, whitehead_closure  # noqa: E402
from upgconj.iterset import whitehead_orbit  # noqa: E402
from upgconj.words import CyclicWord  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-len", type=int, default=4)
    ap.add_argument("--depths", type=int, nargs="+", default=[1, 2, 3])
    args = ap.parse_args()

    keys = cyclic_words(2, args.max_len)
    verdict = {(u, v): whitehead_orbit([CyclicWord(u, 2)], [CyclicWord(v, 2)])[0] for u in keys for v in keys}
    print(f"{len(keys)} cyclic words, {sum(verdict.values())} equivalent ordered pairs")
    for depth in args.depths:
        t = time.perf_counter()
        bad = 0
        for u in keys:
            orbit = whitehead_closure(u, 2, depth)
            bad += sum(verdict[u, v] != (v in orbit) for v in keys)
        print(f"depth {depth}: {bad} disagreements ({time.perf_counter() - t:.1f}s)")


if __name__ == "__main__":
    main()
