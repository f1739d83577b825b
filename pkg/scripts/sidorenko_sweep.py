"""Run every verification family and print one summary row per family.

    python3 scripts/sidorenko_sweep.py --trials 200 --seed 1 --out sweep.json
"""

import argparse
import json

from logcalc.harness import FAMILIES, SuiteConfig, run_suite
from logcalc.reports import report_to_doc


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-blocks", type=int, default=4)
    ap.add_argument("--families", nargs="*", default=list(FAMILIES), choices=FAMILIES)
    ap.add_argument("--out", help="write all suite reports as one JSON document")
    args = ap.parse_args()

    docs = {}
    print(f"{'family':<16} {'trials':>6} {'min margin':>14} {'failures':>8} {'seconds':>8}")
    for fam in args.families:
        rep = run_suite(SuiteConfig(fam, args.trials, args.max_blocks, seed=args.seed))
        print(f"{fam:<16} {len(rep.trials):>6} {rep.min_margin:>14.3e} {len(rep.failures):>8} {rep.wall_clock:>8.2f}")
        docs[fam] = report_to_doc(rep, timing=True)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(docs, fh, indent=2, sort_keys=True)


if __name__ == "__main__":
    main()
