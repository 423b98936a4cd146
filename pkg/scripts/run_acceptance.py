"""Run every property suite once and print a PASS/FAIL line for each.

Usage: python3 scripts/run_acceptance.py [--seed N] [--random-terms N]
"""

import argparse
import sys

from lfpl.deep import run_deep
from lfpl.suites import SUITES, SuiteConfig, env_seed


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=env_seed())
    ap.add_argument("--random-terms", type=int, default=500)
    args = ap.parse_args()
    cfg = SuiteConfig(seed=args.seed, random_terms=args.random_terms)
    ok = True
    for name, suite in SUITES.items():
        r = suite(cfg)
        print(r.line(), flush=True)
        ok &= r.ok
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(run_deep(main))
