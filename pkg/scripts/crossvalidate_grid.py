"""Analytic vs simulated backhaul over the q x M x alpha validation grid.

Prints one row per (config, mode) and exits nonzero if any |z| exceeds 3.
"""

import argparse
import itertools
import sys

from lrfc_cache.config import REFERENCE_GAMMA, NetworkConfig
from lrfc_cache.placement import optimize_bound, optimize_mds
from lrfc_cache.sim import crossvalidate


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    print(f"{'q':>4} {'M':>4} {'alpha':>5} {'mode':>5} {'analytic':>10} {'simulated':>10} {'stderr':>8} {'z':>6}")
    flagged = 0
    for q, M, alpha in itertools.product((2, 4, 128), (0, 10, 50, 100), (0.0, 0.8)):
        cfg = NetworkConfig(n=100, k=10, M=M, q=q, alpha=alpha, gamma=REFERENCE_GAMMA, seed=args.seed)
        rows = crossvalidate(cfg, optimize_bound(cfg).x, ("lrfc",), args.trials, workers=args.workers)
        rows += crossvalidate(cfg, optimize_mds(cfg).x, ("mds",), args.trials, workers=args.workers)
        for r in rows:
            flagged += r.flagged
            print(
                f"{q:>4} {M:>4} {alpha:>5} {r.mode:>5} {r.analytic:>10.5f} {r.empirical:>10.5f}"
                f" {r.stderr:>8.5f} {r.z_score:>6.2f}{'  <--' if r.flagged else ''}"
            )
    print(f"{flagged} of 48 rows outside 3 standard errors")
    sys.exit(1 if flagged else 0)


if __name__ == "__main__":
    main()
