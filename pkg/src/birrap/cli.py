"""Command-line entry point.

Subcommands: run (execute an experiment), factorial (all eight factorial
variants plus the gap table), metrics (summary table from a results
directory), oracle (brute-force lattice front), plot-data (plot-ready CSV
emission). Exit code 0 on success, nonzero with a diagnostic otherwise.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .harness import (
    ALGORITHM_NAMES,
    ExperimentConfig,
    LatticeSpec,
    emit_plot_data,
    load_results,
    oracle_front,
    run_experiment,
    write_oracle,
)
from .metrics import build_simulated_front, factorial_gap, tabulate, write_gap_json, write_metrics_csv
from .model import benchmark
from .mosso import VARIANT_NAMES


def _load_config_file(path: str) -> dict:
    text = Path(path).read_bytes()
    if path.endswith(".toml"):
        try:
            import tomllib  # py311+
        except ImportError:  # pragma: no cover - py310 fallback
            import tomli as tomllib
        return tomllib.loads(text.decode("utf-8"))
    return json.loads(text.decode("utf-8"))


def _add_sizing_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--runs", type=int, default=None, help="independent runs per (problem, algorithm)")
    sub.add_argument("--sol", type=int, default=None, help="population size")
    sub.add_argument("--gen", type=int, default=None, help="generations")
    sub.add_argument("--rep", type=int, default=None, help="repository capacity (default: population size)")
    sub.add_argument("--seed", type=int, default=None, help="base seed")
    sub.add_argument("--out", default=None, help="output directory")
    sub.add_argument("--r-lb", type=float, default=None, help="reliability lower bound")
    sub.add_argument("--formula-mode", choices=("standard_active", "literal"), default=None)
    sub.add_argument("--config", default=None, help="JSON/TOML config file; flags override it")
    sub.add_argument("--workers", type=int, default=None, help="worker processes (or set BIRRAP_WORKERS)")


def _build_config(args, algorithms_override=None) -> ExperimentConfig:
    data: dict = {}
    if args.config:
        data.update(_load_config_file(args.config))
    mapping = {
        "runs": "n_run",
        "sol": "n_sol",
        "gen": "n_gen",
        "rep": "n_rep",
        "seed": "seed",
        "out": "out_dir",
        "r_lb": "r_lb",
        "formula_mode": "formula_mode",
    }
    for flag, key in mapping.items():
        value = getattr(args, flag)
        if value is not None:
            data[key] = value
    if getattr(args, "problem", None):
        data["problems"] = args.problem
    if algorithms_override is not None:
        data["algorithms"] = algorithms_override
    elif getattr(args, "algo", None):
        data["algorithms"] = args.algo
    defaults = dict(n_run=50, n_sol=100, n_gen=1000, seed=1, out_dir="results")
    for key, value in defaults.items():
        data.setdefault(key, value)
    try:
        return ExperimentConfig(**data)
    except TypeError as exc:
        raise ValueError(f"bad configuration key: {exc}") from exc


def _cmd_run(args) -> int:
    config = _build_config(args)
    manifest = run_experiment(config, workers=args.workers)
    print(f"wrote {len(manifest['files'])} artifacts to {config.out_dir}")
    return 0


def _cmd_factorial(args) -> int:
    config = _build_config(args, algorithms_override=list(VARIANT_NAMES))
    run_experiment(config, workers=args.workers)
    grouped = load_results(config.out_dir)
    for problem_id in config.problems:
        per_algo = {algo: grouped[(problem_id, algo)] for algo in VARIANT_NAMES}
        reference = build_simulated_front([rec for recs in per_algo.values() for rec in recs])
        rows = tabulate(per_algo, reference)
        out = Path(config.out_dir)
        write_metrics_csv(rows, out / f"table5-problem-{problem_id}.csv")
        write_gap_json(factorial_gap(rows), out / f"gaps-problem-{problem_id}.json")
        print(f"problem {problem_id}: metrics and gap table written under {config.out_dir}")
    return 0


def _cmd_metrics(args) -> int:
    grouped = load_results(args.results)
    if not grouped:
        raise ValueError(f"no run records found under {args.results}")
    out = Path(args.out or args.results)
    problem_ids = sorted({pid for pid, _ in grouped})
    for problem_id in problem_ids:
        per_algo = {algo: recs for (pid, algo), recs in sorted(grouped.items()) if pid == problem_id}
        records = [rec for recs in per_algo.values() for rec in recs]
        reference = build_simulated_front(records)
        rows = tabulate(per_algo, reference, normalize=args.normalize, per_run=args.per_run)
        write_metrics_csv(rows, out / f"table5-problem-{problem_id}.csv")
        with open(out / f"simulated-front-problem-{problem_id}.csv", "w", encoding="utf-8") as fh:
            fh.write("f_r,f_c\n")
            for fr, fc in reference.points:
                fh.write(f"{float(fr)!r},{float(fc)!r}\n")
        if set(VARIANT_NAMES) <= set(per_algo):
            mosso_rows = [row for row in rows if row.algorithm in VARIANT_NAMES]
            write_gap_json(factorial_gap(mosso_rows), out / f"gaps-problem-{problem_id}.json")
        print(f"problem {problem_id}: metrics written to {out}")
    return 0


def _cmd_oracle(args) -> int:
    problem = benchmark(args.problem, formula_mode=args.formula_mode or "standard_active")
    lattice = LatticeSpec(
        n_values=[int(v) for v in args.n_values.split(",")],
        r_values=[float(v) for v in args.r_values.split(",")],
    )
    result = oracle_front(problem, lattice, ceiling=args.ceiling)
    paths = write_oracle(result, args.out)
    print(
        f"lattice {result.n_total} points, {result.n_feasible} feasible, "
        f"front size {len(result.front)}; wrote {len(paths)} files to {args.out}"
    )
    return 0


def _cmd_plot_data(args) -> int:
    grouped = load_results(args.results)
    if not grouped:
        raise ValueError(f"no run records found under {args.results}")
    problem_ids = sorted({pid for pid, _ in grouped})
    written = []
    for problem_id in problem_ids:
        per_algo = {algo: recs for (pid, algo), recs in sorted(grouped.items()) if pid == problem_id}
        records = [rec for recs in per_algo.values() for rec in recs]
        try:
            reference = build_simulated_front(records)
        except ValueError:
            reference = None
        written += emit_plot_data(per_algo, reference, Path(args.out) / f"problem-{problem_id}")
    print(f"wrote {len(written)} plot files to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="birrap",
        description="Bi-objective reliability-redundancy allocation experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute an experiment")
    p_run.add_argument("--problem", type=int, action="append", choices=(1, 2, 3, 4))
    p_run.add_argument("--algo", action="append", choices=ALGORITHM_NAMES, metavar="ALGO")
    _add_sizing_flags(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_fact = sub.add_parser("factorial", help="run all eight factorial variants and the gap analysis")
    p_fact.add_argument("--problem", type=int, action="append", choices=(1, 2, 3, 4))
    _add_sizing_flags(p_fact)
    p_fact.set_defaults(func=_cmd_factorial)

    p_met = sub.add_parser("metrics", help="summary table and simulated front from a results directory")
    p_met.add_argument("--results", required=True)
    p_met.add_argument("--out", default=None)
    p_met.add_argument("--normalize", action="store_true", help="min-max normalize distances")
    p_met.add_argument("--per-run", action="store_true", help="average per-run GD/SP instead of pooling")
    p_met.set_defaults(func=_cmd_metrics)

    p_orc = sub.add_parser("oracle", help="brute-force lattice front")
    p_orc.add_argument("--problem", type=int, required=True, choices=(1, 2, 3, 4))
    p_orc.add_argument("--n-values", required=True, help="comma list, e.g. 1,2,3")
    p_orc.add_argument("--r-values", required=True, help="comma list, e.g. 0.75,0.8,0.85,0.9,0.95")
    p_orc.add_argument("--ceiling", type=int, default=10_000_000)
    p_orc.add_argument("--formula-mode", choices=("standard_active", "literal"), default=None)
    p_orc.add_argument("--out", required=True)
    p_orc.set_defaults(func=_cmd_oracle)

    p_plot = sub.add_parser("plot-data", help="emit plot-ready CSV files")
    p_plot.add_argument("--results", required=True)
    p_plot.add_argument("--out", required=True)
    p_plot.set_defaults(func=_cmd_plot_data)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
