"""Command line entry point: overhead table, parameter sweeps, geometry, simulation, placement.

All commands are deterministic for a given ``--seed``. Failures exit with
status 1 (2 for usage errors) and a JSON object on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .analysis import DEFAULT_TOL, delta_u, expected_backhaul, expected_overhead, mds_expected_backhaul
from .config import REFERENCE_GAMMA, REFERENCE_OVERHEAD_TABLE, NetworkConfig
from .lrfc import sample_overheads
from .placement import optimize_bound, optimize_exact, optimize_mds
from .sim import GridGeometry, chunk_rng, connectivity_distribution, simulate_delivery

SWEEP_HEADER = ["scheme", "q", "n", "k", "M", "alpha", "rate_analytic", "rate_bound", "rate_sim", "ci95"]
SWEEP_PARAMS = ("M", "alpha", "n")


class CLIError(Exception):
    pass


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


@dataclass(frozen=True)
class Scheme:
    kind: str  # "lrfc" or "mds"
    q: int | None = None

    @classmethod
    def parse(cls, text: str) -> Scheme:
        text = text.strip().lower()
        if text == "mds":
            return cls("mds")
        name, _, q = text.partition(":")
        if name != "lrfc" or not q.isdigit():
            raise CLIError(f"bad scheme {text!r}; use 'mds' or 'lrfc:<q>'")
        return cls("lrfc", int(q))

    def __str__(self) -> str:
        return "mds" if self.kind == "mds" else f"lrfc:{self.q}"


@dataclass(frozen=True)
class SweepSpec:
    base: NetworkConfig
    param: str
    values: tuple
    schemes: tuple[Scheme, ...]
    trials: int = 100_000
    out: str | None = None
    tol: float = DEFAULT_TOL

    def __post_init__(self) -> None:
        if self.param not in SWEEP_PARAMS:
            raise CLIError(f"sweep parameter must be one of {SWEEP_PARAMS}, got {self.param!r}")
        if not self.values:
            raise CLIError("sweep needs at least one value")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise CLIError("sweep values must be strictly increasing")
        if not self.schemes:
            raise CLIError("at least one scheme is required")


def sweep_point(base: NetworkConfig, scheme: Scheme, trials: int, tol: float) -> list:
    """One CSV row: placement is re-optimized for this point."""
    if scheme.kind == "mds":
        cfg = base
        x = optimize_mds(cfg).x
        analytic = mds_expected_backhaul(cfg, x).normalized
        bound = None
    else:
        cfg = base.with_(q=scheme.q)
        x = optimize_bound(cfg).x
        rep = expected_backhaul(cfg, x, tol)
        analytic, bound = rep.normalized, rep.normalized_bound
    sim, ci = None, None
    if trials > 0:
        res = simulate_delivery(cfg, x, scheme.kind, trials=trials)
        sim, ci = res.normalized, 1.96 * res.normalized_stderr
    return [scheme.kind, scheme.q, cfg.n, cfg.k, cfg.M, float(cfg.alpha), analytic, bound, sim, ci]


def run_sweep(spec: SweepSpec) -> list[list]:
    rows = []
    for scheme in spec.schemes:
        for value in spec.values:
            base = spec.base.with_(**{spec.param: value})
            rows.append(sweep_point(base, scheme, spec.trials, spec.tol))
    return rows


def to_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def overhead_table(qs: Sequence[int], k: int, trials: int, seed: int, tol: float = DEFAULT_TOL) -> list[dict]:
    """Formula vs. simulated mean overhead vs. bound, with the reference values alongside."""
    rows = []
    for i, q in enumerate(qs):
        formula = expected_overhead(k, q, tol)
        bound = delta_u(q) if q > 2 else None
        row = {"q": q, "k": k, "formula": formula, "sim": None, "sim_stderr": None, "z": None, "bound": bound}
        if trials > 0:
            draws = sample_overheads(k, q, trials, chunk_rng(seed, i))
            mean, se = float(draws.mean()), float(draws.std(ddof=1) / trials**0.5)
            row.update(sim=mean, sim_stderr=se, z=(mean - formula) / se if se > 0 else None)
        ref, ref_bound = REFERENCE_OVERHEAD_TABLE.get(q, (None, None)) if k == 10 else (None, None)
        row.update(
            reference=ref,
            reference_bound=ref_bound,
            formula_minus_reference=None if ref is None else formula - ref,
        )
        rows.append(row)
    return rows


OVERHEAD_COLUMNS = [
    "q", "k", "formula", "sim", "sim_stderr", "z", "bound",
    "reference", "reference_bound", "formula_minus_reference",
]


def geometry_report(r: float, d: float, samples: int, seed: int | None) -> dict:
    conn = connectivity_distribution(GridGeometry(r, d), samples, seed)
    report = {
        "r": r,
        "d": d,
        "samples": conn.samples,
        "pmf_by_hub_count": [float(v) for v in conn.pmf],
        "uncovered": conn.uncovered,
        "gaps": conn.has_gaps,
    }
    if conn.uncovered < 1:
        report["gamma"] = list(conn.gamma())
    if (r, d) == (60.0, 45.0):
        report["reference_gamma"] = list(REFERENCE_GAMMA)
    return report


# ---------------------------------------------------------------- argparse


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CLIError(message)


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="JSON file with network parameters")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--out", help="write the result here instead of stdout")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    return p


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="lrfc-cache", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("overhead-table", parents=[common], help="mean decoding overhead per field size")
    p.add_argument("--q", default="2,4,8,16,32,64,128", help="comma separated field orders")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("sweep", parents=[common], help="normalized backhaul rate over M, alpha or n")
    p.add_argument("--param", choices=SWEEP_PARAMS)
    p.add_argument("--values", help="comma separated sweep values")
    p.add_argument("--schemes", help="comma separated, e.g. mds,lrfc:2,lrfc:128")

    p = sub.add_parser("geometry", parents=[common], help="connectivity distribution of the hub grid")
    p.add_argument("--r", type=float, default=60.0)
    p.add_argument("--d", type=float, default=45.0)
    p.add_argument("--samples", type=int, default=1_000_000)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo delivery for one placement")
    p.add_argument("--mode", choices=("lrfc", "mds"), default="lrfc")
    p.add_argument("--placement", help="JSON array with x_j; optimized placement if omitted")
    p.add_argument("--records", help="write per-trial records (trial,j,h,z,t) as CSV")

    p = sub.add_parser("placement", parents=[common], help="print an optimized placement as JSON")
    p.add_argument("--objective", choices=("bound", "mds", "exact"), default="bound")
    p.add_argument("--headroom", type=int, default=0)
    return parser


def _load(args) -> dict:
    raw = json.loads(Path(args.config).read_text()) if args.config else {}
    if not isinstance(raw, dict):
        raise CLIError("config file must hold a JSON object")
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.trials is not None:
        raw["trials"] = args.trials
    return raw


def _network(raw: dict) -> NetworkConfig:
    try:
        return NetworkConfig.from_dict(raw)
    except (TypeError, ValueError) as exc:
        raise CLIError(f"invalid network configuration: {exc}") from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _cmd_overhead_table(args, raw) -> None:
    qs = [int(v) for v in args.q.split(",")]
    trials = raw.get("trials", 100_000)
    rows = overhead_table(qs, args.k, trials, raw.get("seed", 0), args.tol)
    if args.format == "json":
        _emit(_dump(rows), args.out)
    else:
        _emit(to_csv(OVERHEAD_COLUMNS, [[r[c] for c in OVERHEAD_COLUMNS] for r in rows]), args.out)


def _cmd_sweep(args, raw) -> None:
    sweep = raw.pop("sweep", {})
    schemes = raw.pop("schemes", None)
    param = args.param or sweep.get("param")
    values = _floats(args.values) if args.values else sweep.get("values")
    if args.schemes:
        schemes = args.schemes.split(",")
    if not param or values is None or not schemes:
        raise CLIError("sweep needs --param, --values and --schemes (or the same keys in --config)")
    if param in ("M", "n"):
        if any(float(v) != int(v) for v in values):
            raise CLIError(f"{param} values must be integers")
        values = [int(v) for v in values]
    else:
        values = [float(v) for v in values]
    if param == "n" and min(values) < raw.get("M", 0):
        raise CLIError("every library size n must be >= M")
    base = _network({**raw, param: values[0]})
    spec = SweepSpec(
        base=base,
        param=param,
        values=tuple(values),
        schemes=tuple(Scheme.parse(s) for s in schemes),
        trials=base.trials,
        out=args.out,
        tol=args.tol,
    )
    _emit(to_csv(SWEEP_HEADER, run_sweep(spec)), args.out)


def _cmd_geometry(args, raw) -> None:
    _emit(_dump(geometry_report(args.r, args.d, args.samples, raw.get("seed"))), args.out)


def _placement_for(args, cfg: NetworkConfig, mode: str) -> list[int]:
    if args.placement:
        text = args.placement
        x = json.loads(Path(text).read_text() if Path(text).is_file() else text)
        if not isinstance(x, list) or not all(isinstance(v, int) for v in x):
            raise CLIError("placement must be a JSON array of integers")
        return x
    return list(optimize_mds(cfg).x if mode == "mds" else optimize_bound(cfg).x)


def _cmd_simulate(args, raw) -> None:
    cfg = _network(raw)
    x = _placement_for(args, cfg, args.mode)
    res = simulate_delivery(cfg, x, args.mode)
    if args.mode == "mds":
        analytic = mds_expected_backhaul(cfg, x).expected
    else:
        analytic = expected_backhaul(cfg, x, args.tol).expected
    summary = {
        "config": cfg.to_dict(),
        "mode": args.mode,
        "placement": list(x),
        "trials": res.trials,
        "mean_backhaul": res.mean,
        "stderr": res.stderr,
        "normalized": res.normalized,
        "analytic": analytic,
        "z": (res.mean - analytic) / res.stderr if res.stderr > 0 else None,
    }
    if args.records:
        Path(args.records).write_text(res.records_csv())
    _emit(_dump(summary), args.out)


def _cmd_placement(args, raw) -> None:
    cfg = _network(raw)
    if args.objective == "mds":
        pl = optimize_mds(cfg)
    elif args.objective == "exact":
        pl = optimize_exact(cfg, headroom=args.headroom, tol=args.tol)
    else:
        pl = optimize_bound(cfg, headroom=args.headroom)
    _emit(_dump({"x": pl.to_json(), "objective": pl.objective, "objective_kind": pl.objective_kind}), args.out)


COMMANDS = {
    "overhead-table": _cmd_overhead_table,
    "sweep": _cmd_sweep,
    "geometry": _cmd_geometry,
    "simulate": _cmd_simulate,
    "placement": _cmd_placement,
}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        COMMANDS[args.command](args, _load(args))
    except CLIError as exc:
        sys.stderr.write(json.dumps({"error": "usage", "message": str(exc)}) + "\n")
        return 2
    except Exception as exc:  # noqa: BLE001 - reported as JSON for callers
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
