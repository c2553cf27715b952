"""Best-found min-equilibrium regret as the density grid is refined.

Usage: python3 scripts/regret_refinement.py [--games 20] [--seed 0] [--grids 2 5 10 20]
"""

import argparse
import time

import numpy as np

from maxplus_games import search_min_equilibrium
from maxplus_games.sampling import random_game


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--games", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--grids", type=int, nargs="+", default=[2, 5, 10, 20])
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    print("game  range  " + "  ".join(f"m={m:<3}" for m in args.grids) + "  (regret / range)")
    start = time.perf_counter()
    for k in range(args.games):
        g = random_game(rng, (2, 2))
        spread = max(p.max() for p in g.payoffs) - min(p.min() for p in g.payoffs)
        ratios = [search_min_equilibrium(g, m).regret / spread for m in args.grids]
        print(f"{k:>4}  {spread:5.2f}  " + "  ".join(f"{r:.3f}" for r in ratios))
    print(f"elapsed {time.perf_counter() - start:.2f}s")


if __name__ == "__main__":
    main()
