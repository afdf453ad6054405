"""Ensemble structure of MLW networks over a grid of m0.

    python scripts/network_table.py --rho 0.5 --m0 3 10 20 30 --runs 10
    python scripts/network_table.py --e4 1          # inter-world edge sensitivity
"""

import argparse

import numpy as np

from mlwng.generators import MLWParams, gen_mlw
from mlwng.graph import community_ratio, compute_stats


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--rho", type=float, default=0.5)
    ap.add_argument("--m0", type=int, nargs="+", default=[3, 10, 20, 30, 100])
    ap.add_argument("--runs", type=int, default=10)
    ap.add_argument("--e4", type=int, default=2)
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--seed", type=int, default=2018)
    args = ap.parse_args()

    print(f"{'m0':>4} {'N_LW':>5} {'<k>':>7} {'<pl>':>6} {'<cc>':>6} {'R':>9} {'R_std':>9}")
    for m0 in args.m0:
        params = MLWParams.from_rho(args.n, args.rho, m0, e4=args.e4, alpha=args.alpha)
        graphs = [gen_mlw(params, np.random.SeedSequence([args.seed, m0, i])) for i in range(args.runs)]
        stats = [compute_stats(g) for g in graphs]
        ratios = [community_ratio(g).mean_ratio for g in graphs]
        print(f"{m0:>4} {params.n_lw:>5} {np.mean([s.avg_degree for s in stats]):7.2f} "
              f"{np.mean([s.avg_path_length for s in stats]):6.3f} "
              f"{np.mean([s.avg_clustering for s in stats]):6.3f} "
              f"{np.mean(ratios):9.5f} {np.std(ratios):9.2e}")


if __name__ == "__main__":
    main()
