"""Command-line front end for the experiment runners.

One subcommand per experiment kind; flags override the optional YAML
config file.  Exit codes: 0 success, 1 validation failure, 2
configuration error, 3 solver failure rate above one half.
"""

from __future__ import annotations

import argparse
import sys

import yaml

from sensem.config import ConfigError
from sensem.experiments import (
    EXPERIMENT_KINDS,
    ExperimentResult,
    run_experiment,
    spec_from_config,
)

_KIND_HELP = {
    "pareto": "accuracy-versus-secrecy frontier over a floor grid",
    "converge": "per-iteration accuracy traces for the antenna/element cases",
    "power-sweep": "accuracy against the transmit power budget",
    "elements-sweep": "accuracy against the number of reflecting elements",
    "bc-compare": "semantic versus bit-oriented secrecy at shared designs",
    "validate": "run the identity-oracle suite and report pass/fail",
}


def _csv_floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _csv_ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x.strip())


def _csv_names(text: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in text.split(",") if x.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sensem",
        description="Sensing-accuracy and semantic-secrecy design sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in EXPERIMENT_KINDS:
        sp = sub.add_parser(kind, help=_KIND_HELP[kind])
        sp.add_argument("--config", help="YAML config file")
        sp.add_argument("--seed", type=int, help="master seed (realization i uses seed+i)")
        sp.add_argument("--realizations", type=int, help="channel draws per sweep point")
        sp.add_argument("--out-dir", help="output directory (default runs/)")
        sp.add_argument(
            "--baselines",
            type=_csv_names,
            help="comma list: no_extras,matched_filter,fixed_directions,random_phases",
        )
        sp.add_argument("--eps-points", type=int, help="secrecy-floor grid size")
        sp.add_argument("--jobs", type=int, help="worker processes (output bytes unchanged)")
        sp.add_argument("--thorough", action="store_true",
                        help="full design settings instead of the sweep profile")
        sp.add_argument("--epsilon", type=float, help="secrecy floor in suts/sec")
        sp.add_argument("--r-th", type=float, help="pin the leakage split instead of searching")
        sp.add_argument("--power-dbm", type=_csv_floats, help="comma list of budgets in dBm")
        if kind == "elements-sweep":
            sp.add_argument("--n-grid", type=_csv_ints, help="comma list of element counts")
        if kind == "bc-compare":
            sp.add_argument("--kappa-grid", type=_csv_floats,
                            help="comma list of symbols-per-word values")
            sp.add_argument("--crb-cap-db", type=float, help="accuracy cap flagging rows")
            sp.add_argument("--mu", type=float, help="bits per word of the reference encoder")
            sp.add_argument("--cqi-table", help="CSV file of threshold_db,efficiency rows")
    return parser


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed YAML in {path}: {exc}") from None
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must be a mapping of blocks")
    return data


def _overrides(args: argparse.Namespace) -> dict:
    mapping = {
        "seed": "master_seed",
        "realizations": "realizations",
        "out_dir": "out_dir",
        "baselines": "baselines",
        "eps_points": "eps_points",
        "jobs": "jobs",
        "epsilon": "epsilon",
        "r_th": "r_th",
        "power_dbm": "power_dbm",
        "n_grid": "n_grid",
        "kappa_grid": "kappa_grid",
        "crb_cap_db": "crb_cap_db",
        "mu": "bc_mu",
        "cqi_table": "cqi_table_path",
    }
    out = {}
    for arg_name, spec_name in mapping.items():
        value = getattr(args, arg_name, None)
        if value is not None:
            out[spec_name] = value
    if args.thorough:
        out["fast"] = False
    return out


def _print_outcome(result: ExperimentResult) -> None:
    if result.csv_path is not None:
        print(f"rows: {len(result.rows)} -> {result.csv_path}")
    print(f"summary: {result.json_path}")
    if result.kind == "validate":
        for oracle in result.summary.get("oracles", []):
            mark = "PASS" if oracle["passed"] else "FAIL"
            print(f"  {mark} {oracle['name']}: error {oracle['error']:.3e}")
    elif result.failure_rate > 0.0:
        print(f"solver failure rate: {result.failure_rate:.1%}")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _load_config(args.config)
        spec = spec_from_config(args.command, config, **_overrides(args))
        result = run_experiment(spec)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    _print_outcome(result)
    if args.command == "validate":
        return 0 if result.summary.get("passed") else 1
    if result.failure_rate > 0.5:
        print("more than half of the rows failed to solve", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
