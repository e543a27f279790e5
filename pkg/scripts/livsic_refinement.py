"""Ground-truth gap and reported bounds of the real solver as the depth grows.

Prints CSV rows ``seed,depth,budget,gap,tabulation_bound,roundoff_bound,residual``.
"""
import argparse
import csv
import sys

from horolivsic.livsic import gap_to_ground_truth, random_telescoped, solve_livsic


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--source-depth", type=int, default=2)
    ap.add_argument("--depths", type=int, nargs="+", default=[3, 4, 5, 6, 7, 8])
    args = ap.parse_args(argv)
    out = csv.writer(sys.stdout)
    out.writerow(["seed", "depth", "budget", "gap", "tabulation_bound", "roundoff_bound", "residual"])
    for seed in range(args.seeds):
        psi, g = random_telescoped(seed, 2, args.source_depth)
        for d in args.depths:
            if d < psi.depth:
                continue
            sol = solve_livsic(psi, depth=d)
            out.writerow([seed, d, sol.orbit_budget, repr(gap_to_ground_truth(sol, g)),
                          repr(sol.tabulation_bound), repr(sol.roundoff_bound),
                          repr(sol.residual.max_residual)])


if __name__ == "__main__":
    main()
