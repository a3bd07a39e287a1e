#!/usr/bin/env python3
"""Fraction of sampled lifts with two cycles in one small ball.

A sample counts as tangled when some radius-l ball of its quotient
graph carries more than one cycle.  The fraction should fall as the
lift size grows.
"""

import argparse
import sys

from liftspec.graphs import build_colored_graph, is_tangle_free
from liftspec.model import sample_symmetric
from liftspec.presets import regular_weight_system


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, default=4)
    ap.add_argument("--l", dest="radius", type=int, default=2)
    ap.add_argument("--sizes", default="100,200,500,1000,2000")
    ap.add_argument("--seeds", type=int, default=100)
    args = ap.parse_args()
    ws = regular_weight_system(args.d)
    print(f"d={args.d}, ball radius {args.radius}, {args.seeds} samples per size")
    print(f"{'n':>6} {'tangled':>8}")
    for n in (int(s) for s in args.sizes.split(",")):
        tangled = 0
        for seed in range(args.seeds):
            pf = sample_symmetric(n, ws.num_free_pairs, ws.d, seed)
            if not is_tangle_free(build_colored_graph(pf), args.radius):
                tangled += 1
        print(f"{n:>6} {tangled / args.seeds:>8.2f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
