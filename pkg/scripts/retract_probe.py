"""Exploratory: smoothness margins of retract labeled trees.

For every connected bipartite graph on at most ``--max-vertices`` vertices and
every labeled subtree (at most ``--max-tree`` vertices) it retracts onto, report
the smallest smoothness margin over random positive graphons. Negative values
would be evidence on the retract-implies-smooth question; they are reported,
not treated as errors.
"""

import argparse

from logcalc.corpus import retract_pairs
from logcalc.graphs import GraphError, retract_check
from logcalc.harness import retract_smoothness_probe


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-vertices", type=int, default=5)
    ap.add_argument("--max-tree", type=int, default=3)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rows = []
    for h in retract_pairs(args.max_vertices, args.max_tree):
        if not h.is_bipartite() or not retract_check(h, h.labels):
            continue
        try:
            rep = retract_smoothness_probe(h, args.trials, args.seed)
        except GraphError as exc:
            print(f"skip {h}: {exc}")
            continue
        rows.append((rep.min_margin, rep.negative, h))
    rows.sort(key=lambda r: r[0])
    print(f"{len(rows)} retract instances; {sum(r[1] > 0 for r in rows)} with a negative margin")
    for margin, neg, h in rows[:15]:
        print(f"  {margin:+.3e}  negative={neg:<3} labels={list(h.labels)} edges={list(h.edges)}")


if __name__ == "__main__":
    main()
