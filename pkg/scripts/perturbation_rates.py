"""Sidorenko margin along zero-mean perturbations of a constant graphon.

Prints margin and margin/eps^2 per direction. For forcing graphs (C4, CFS
graphs that are not trees) the ratio stays away from 0; for a path with a
degree-regular direction the margin is identically 0.
"""

import argparse
from fractions import Fraction

from logcalc.graphs import build_cfs_graph, build_cycle, build_path
from logcalc.harness import perturbation_scan, random_direction

GRAPHS = {
    "C4": (build_cycle(4), False),
    "C6": (build_cycle(6), False),
    "CFS(3,[123])": (build_cfs_graph(3, [(1, 2, 3)]), False),
    "P2 (degree-regular)": (build_path(2), True),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--blocks", type=int, default=3)
    ap.add_argument("--directions", type=int, default=5)
    ap.add_argument("--base", default="1/2")
    args = ap.parse_args()
    eps = [Fraction(1, 100), Fraction(1, 50), Fraction(1, 20), Fraction(1, 10)]
    for name, (H, regular) in GRAPHS.items():
        print(f"\n{name}")
        print(f"  {'dir':>3} " + " ".join(f"{'eps=' + str(float(e)):>22}" for e in eps))
        for seed in range(args.directions):
            D = random_direction(args.blocks, seed, degree_regular=regular)
            reps = perturbation_scan(H, Fraction(args.base), D, eps)
            cells = [f"{r.margin:+.3e} ({r.exact['margin/eps^2']:+.3f})" for r in reps]
            print(f"  {seed:>3} " + " ".join(f"{c:>22}" for c in cells))


if __name__ == "__main__":
    main()
