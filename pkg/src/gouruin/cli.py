"""Command-line entry point: ``gouruin {classify,bounds,thetas,simulate,verify-examples}``.

Every command writes one JSON report to standard output. Exit codes: 0 on
success, 1 when the model file cannot be used, 2 when verification fails.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from typing import Sequence

from .asymptotics import classify, limit_conditions
from .bounds import compute_bounds
from .fixtures import export_fixtures, verify_examples
from .levy import ModelError, marginal
from .modelio import load_model
from .ruin import classify_ruin, z_infinity_support
from .simulate import SimConfig, SimulationError, estimate_extremes, run_batch, estimate_from_batch
from .thresholds import theta_profile

SCHEMA = 1
EXIT_OK = 0
EXIT_MODEL = 1
EXIT_VERIFY = 2


def _emit(command: str, payload: dict) -> None:
    report = {"schema": SCHEMA, "command": command, **payload}
    json.dump(report, sys.stdout, indent=2, default=str)
    sys.stdout.write("\n")


def _cmd_thetas(args) -> int:
    triplet = load_model(args.model)
    _emit("thetas", {"model": args.model, "profile": theta_profile(triplet).to_json()})
    return EXIT_OK


def _cmd_bounds(args) -> int:
    triplet = load_model(args.model)
    _emit("bounds", {"model": args.model, "bounds": compute_bounds(triplet).to_json()})
    return EXIT_OK


def _cmd_classify(args) -> int:
    triplet = load_model(args.model)
    bounds = compute_bounds(triplet)
    asym = classify(marginal(triplet, "xi"))
    regime = classify_ruin(triplet, bounds, asym)
    limits = limit_conditions(triplet)
    payload = {
        "model": args.model,
        "summary": str(regime),
        "regime": regime.to_json(),
        "limits": limits.to_json(),
    }
    if limits.convergent:
        payload["z_infinity_support"] = z_infinity_support(triplet, bounds).to_json()
    _emit("classify", payload)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    triplet = load_model(args.model)
    zs = args.z
    config = SimConfig(
        z=zs[0], horizon=args.horizon, paths=args.paths, seed=args.seed, dt=args.dt, workers=args.workers
    )
    config.check(triplet)
    results = run_batch(triplet, config, zs)
    estimates = [estimate_from_batch(r, config, z).to_json() for r, z in zip(results, zs)]
    if args.out_csv:
        with open(args.out_csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["z", "path", "ruin_time", "min", "max", "terminal_V", "terminal_Z"])
            for z, res in zip(zs, results):
                for i, row in enumerate(res.to_rows()):
                    rt = "NA" if row["ruin_time"] is None else repr(row["ruin_time"])
                    writer.writerow([z, i, rt, row["min"], row["max"], row["terminal_V"], row["terminal_Z"]])
    payload = {"model": args.model, "scheme": config.scheme, "seed": args.seed, "estimates": estimates}
    if args.extremes:
        payload["extremes"] = [
            estimate_extremes(triplet, SimConfig(**{**config.__dict__, "z": z})).to_json() for z in zs
        ]
    _emit("simulate", payload)
    return EXIT_OK


def _cmd_verify(args) -> int:
    results = verify_examples(simulate=not args.no_simulate, paths=args.paths)
    if args.export:
        export_fixtures(args.export)
    failed = [r for r in results if not r.ok]
    for r in failed:
        print(f"FAIL {r.name}\n{r.diff()}", file=sys.stderr)
    _emit(
        "verify-examples",
        {
            "ok": not failed,
            "passed": len(results) - len(failed),
            "failed": len(failed),
            "fixtures": [r.to_json() for r in results],
        },
    )
    return EXIT_VERIFY if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gouruin", description="Ruin regimes of GOU processes.")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, func, help_ in (
        ("classify", _cmd_classify, "ruin regime as a function of the start value"),
        ("bounds", _cmd_bounds, "L*, U*, L, U, degeneracy and taxonomy"),
        ("thetas", _cmd_thetas, "the eight quadrant thresholds"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("model", help="model JSON file")
        p.set_defaults(func=func)

    p = sub.add_parser("simulate", help="Monte Carlo ruin estimate")
    p.add_argument("model", help="model JSON file")
    p.add_argument("--z", type=float, nargs="+", required=True, help="start value(s); shared driving paths")
    p.add_argument("--horizon", type=float, default=50.0)
    p.add_argument("--paths", type=int, default=1000)
    p.add_argument("--dt", type=float, default=None, help="Euler step; omit for the exact scheme")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out-csv", default=None, help="write per-path rows to this file")
    p.add_argument("--extremes", action="store_true", help="also report running-extreme quantiles")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("verify-examples", help="check the embedded example corpus")
    p.add_argument("--export", metavar="DIR", default=None, help="also write the fixtures to DIR")
    p.add_argument("--paths", type=int, default=1000, help="paths per simulation check")
    p.add_argument("--no-simulate", action="store_true", help="skip the simulation checks")
    p.set_defaults(func=_cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ModelError, SimulationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())
