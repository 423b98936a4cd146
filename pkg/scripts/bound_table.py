"""Tabulate synthesized bound against measured cost for every first-order corpus entry.

Usage: python3 scripts/bound_table.py [--costs default|paper-example|zero] [--max-n 8]
Prints TSV: entry, bound, then n, cost, bound(n), slack per row.
"""

import argparse
import random
import sys

from lfpl import evalop as op
from lfpl.corpus import growable, load_entries, sized_env
from lfpl.costpoly import PolySynth, poly_eval, show_poly
from lfpl.deep import run_deep


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--costs", default="paper-example")
    ap.add_argument("--max-n", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    cm = op.CostModel.preset(args.costs)
    rng = random.Random(args.seed)
    print("entry\tbound\tn\tcost\tbound_n\tslack")
    for e in load_entries():
        if not growable(e):
            continue
        ctx, tt = e.applied()
        p = PolySynth(cm).term(tt)
        for n in range(args.max_n + 1):
            env = sized_env(ctx, n, rng)
            cost = op.evaluate(env, tt, cm).cost
            b = poly_eval(p, n)
            print(f"{e.label}\t{show_poly(p)}\t{n}\t{cost}\t{b}\t{b - cost}")
    return 0


if __name__ == "__main__":
    sys.exit(run_deep(main))
