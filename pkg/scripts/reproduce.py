"""Regenerate every table and sweep as CSV/JSON under an output directory.

    python3 scripts/reproduce.py --out results
    python3 scripts/reproduce.py --out results --trials 0      # analytic curves only
    python3 scripts/reproduce.py --only popularity
"""

import argparse
import sys
import time
from pathlib import Path

from lrfc_cache.cli import main as cli

CONFIGS = Path(__file__).parent / "configs"


def run(argv: list[str]) -> None:
    start = time.perf_counter()
    code = cli(argv)
    if code:
        sys.exit(code)
    print(f"  {argv[0]:<15} {time.perf_counter() - start:6.1f}s  -> {argv[argv.index('--out') + 1]}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--trials", type=int, help="override the per-point trial count")
    ap.add_argument("--only", action="append", help="run just these config names (repeatable)")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    common = ["--seed", str(args.seed)]
    if args.trials is not None:
        common += ["--trials", str(args.trials)]

    if not args.only:
        table_trials = ["--trials", str(args.trials if args.trials is not None else 1_000_000)]
        run(["overhead-table", "--seed", str(args.seed), *table_trials, "--out", str(out / "overhead_table.csv")])
        run(["geometry", "--out", str(out / "geometry.json")])

    for cfg in sorted(CONFIGS.glob("*.json")):
        if args.only and cfg.stem not in args.only:
            continue
        run(["sweep", "--config", str(cfg), *common, "--out", str(out / f"{cfg.stem}.csv")])


if __name__ == "__main__":
    main()
