"""Command-line interface.

Subcommands:
  run        execute an experiment described by a JSON config file
  summarize  recompute summaries for raw.csv files and emit a combined CSV
  theory     print analytic vs Monte-Carlo Haar moments
  route      report the SWAP-routing overhead of a serialized circuit

Exit codes: 0 success, 1 configuration error, 2 runtime error,
3 theory-check violation.
"""

from __future__ import annotations

import argparse
import glob
import json
import sys
from dataclasses import replace
from pathlib import Path

from .circuits import load_circuit
from .exceptions import ConfigError
from .experiments import ExperimentConfig, derive_seed, run_experiment, summarize
from .simulator import observable_from_name
from .theory import moment_report
from .topology import coupling_graph_from_name, transpile_overhead

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_VIOLATION = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qnnlab",
        description="Variational-circuit training lab with chip-topology restrictions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment from a JSON config")
    run.add_argument("--config", required=True, help="path to the config file")
    run.add_argument("--paper-scale", action="store_true",
                     help="use the publication-scale trial counts and qubit range")
    run.add_argument("--workers", type=int, default=None,
                     help="parallel trial workers (default: from config)")
    run.add_argument("--out", default=None, help="override the output directory")

    summ = sub.add_parser("summarize", help="summarize raw.csv result files")
    summ.add_argument("paths", nargs="+", help="raw.csv paths or globs")
    summ.add_argument("--out", default=None, help="combined long-format CSV path")

    theory = sub.add_parser("theory", help="analytic vs Monte-Carlo Haar moments")
    theory.add_argument("--d", default="2,4,8",
                        help="comma-separated Hilbert dimensions (powers of two)")
    theory.add_argument("--samples", type=int, default=100_000)
    theory.add_argument("--seed", type=int, default=0)
    theory.add_argument("--out", default=None, help="write the report as JSON")

    route = sub.add_parser("route", help="SWAP-routing overhead of a circuit")
    route.add_argument("--topology", default="guadalupe",
                       help="built-in name or coupling-graph JSON path")
    route.add_argument("--circuit", required=True, help="serialized circuit JSON")
    return parser


def _cmd_run(args) -> int:
    config = ExperimentConfig.from_json(args.config, paper_scale=args.paper_scale)
    if args.workers is not None:
        config = replace(config, workers=args.workers)
    if args.out is not None:
        config = replace(config, output_dir=args.out)
    result = run_experiment(config)
    print(json.dumps(result, indent=2))
    if result.get("violations", 0):
        return EXIT_VIOLATION
    return EXIT_OK


def _cmd_summarize(args) -> int:
    paths: list[str] = []
    for pattern in args.paths:
        matches = glob.glob(pattern, recursive=True)
        paths.extend(matches if matches else [pattern])
    missing = [p for p in paths if not Path(p).exists()]
    if missing:
        raise ConfigError(f"no such result files: {missing}")
    summaries = summarize(paths, combined_csv=args.out)
    for summary in summaries:
        print(
            f"N={summary.get('num_qubits')} L={summary.get('depth')} "
            f"arm={summary.get('arm')} trials={summary['trials']} "
            f"final_mean={summary['final_mean']:.6f} "
            f"final_spread={summary['final_spread']:.6f}"
        )
    return EXIT_OK


def _cmd_theory(args) -> int:
    try:
        dims = [int(part) for part in args.d.split(",") if part]
    except ValueError as exc:
        raise ConfigError(f"bad --d value {args.d!r}") from exc
    if not dims:
        raise ConfigError("--d must list at least one dimension")
    report = []
    for name in ("z_last", "proj0_last"):
        obs = observable_from_name(name)
        for d in dims:
            entry = moment_report(
                obs, d, args.samples, seed=derive_seed(args.seed, "theory_mc", name, d)
            )
            report.append(entry)
            print(
                f"{name:11s} d={d:4d}  mean {entry['mc']['mean']:+.5f} "
                f"(analytic {entry['analytic']['mean']:+.5f}, "
                f"se {entry['mc']['se_mean']:.2e})  "
                f"var {entry['mc']['var']:.5f} "
                f"(analytic {entry['analytic']['var']:.5f}, "
                f"se {entry['mc']['se_var']:.2e})"
            )
    if args.out:
        Path(args.out).write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
    return EXIT_OK


def _cmd_route(args) -> int:
    graph = coupling_graph_from_name(args.topology)
    circuit_path = Path(args.circuit)
    if not circuit_path.exists():
        raise ConfigError(f"no such circuit file: {circuit_path}")
    circuit = load_circuit(circuit_path)
    report = transpile_overhead(circuit, graph)
    print(
        json.dumps(
            {
                "topology": graph.name,
                "logical_two_qubit": report.logical_two_qubit,
                "swaps": report.swaps,
                "physical_cnots": report.physical_cnots,
            },
            indent=2,
        )
    )
    return EXIT_OK


_COMMANDS = {
    "run": _cmd_run,
    "summarize": _cmd_summarize,
    "theory": _cmd_theory,
    "route": _cmd_route,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
