"""Command-line front end: optimize, compare strategies, report importance.

Exit codes: 0 on success, 2 on usage, configuration or data errors.
The output directory defaults to $HOUSES_LOG_DIR when set.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import fanova
from .evolution import ESConfig
from .external import ExternalObjective, make_objective
from .gp import fit
from .objectives import BUILTINS, ObjectiveSpec, default_space
from .optimizer import RunConfig, RunState, replay, run
from .runlog import read_log
from .space import SearchSpace, load_space

_STRATEGY_FLAGS = {"houses": "houses", "gp": "gp_stationary", "random": "random"}
_KERNEL_FLAGS = {"ard": "ard_se", "houses": "houses"}


class CliError(Exception):
    """Anticipated configuration/data problem; reported on stderr, exit 2."""


def _default_out() -> str:
    return os.environ.get("HOUSES_LOG_DIR", "houses_out")


def _resolve_space(args) -> SearchSpace:
    if args.space is not None:
        try:
            return load_space(args.space)
        except FileNotFoundError:
            raise CliError(f"--space: file not found: {args.space}")
        except ValueError as exc:
            raise CliError(f"--space: {exc}")
    if args.objective in BUILTINS:
        return default_space(args.objective)
    raise CliError("--space is required for non-builtin objectives")


def _looks_like_command(label: str) -> bool:
    return any(ch in label for ch in " \t/") or Path(label).exists()


def _check_objective_label(label: str) -> None:
    if label not in BUILTINS and not _looks_like_command(label):
        raise CliError(f"--objective: unknown builtin {label!r} (known: {sorted(BUILTINS)}); "
                       "pass a command line to use an external worker")


def _resolve_objective(label: str, space: SearchSpace, timeout: float):
    _check_objective_label(label)
    if label in BUILTINS:
        required = BUILTINS[label]["dim"]
        if required is not None and space.dim != required:
            raise CliError(f"--objective {label} expects a {required}-dimensional space, got {space.dim}")
        spec = ObjectiveSpec(kind="builtin", name=label, timeout=timeout)
    else:
        spec = ObjectiveSpec(kind="external", command=label, timeout=timeout)
    return make_objective(spec, space)


def _es_config(args, dim: int) -> ESConfig:
    return ESConfig(grids=args.es_grids, offspring=args.es_offspring,
                    mutation_rate=args.es_pm, eta=args.es_eta)


def _run_config(args, space: SearchSpace, strategy: str, seed: int) -> RunConfig:
    return RunConfig(budget=args.budget, n0=args.n0, strategy=strategy,
                     kernel=_KERNEL_FLAGS[args.kernel], acquisition=args.acq,
                     ucb_w=args.ucb_w, es=_es_config(args, space.dim), seed=seed)


def _write_csv(path: Path, headers: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(headers)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])


def _best_trace(records, budget: int) -> list[float]:
    trace, best = [], float("inf")
    for record in records:
        if record.ok and record.value < best:
            best = record.value
        trace.append(best)
    while len(trace) < budget:
        trace.append(best)
    return trace[:budget]


# --- optimize -----------------------------------------------------------------

def cmd_optimize(args) -> int:
    _check_objective_label(args.objective)
    space = _resolve_space(args)
    objective = _resolve_objective(args.objective, space, args.timeout)
    strategy = _STRATEGY_FLAGS[args.strategy]
    config = _run_config(args, space, strategy, args.seed)
    out = Path(args.out or _default_out())
    out.mkdir(parents=True, exist_ok=True)
    log_path = out / "run.jsonl"

    try:
        if isinstance(objective, ExternalObjective):
            with objective:
                state = run(space, objective, config, log_path=log_path,
                            objective_label=args.objective)
        else:
            state = run(space, objective, config, log_path=log_path,
                        objective_label=args.objective)
    except ValueError as exc:
        raise CliError(str(exc))

    summary = _summarize(space, config, state, args.objective)
    with open(out / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    print(f"run log: {log_path}")
    if summary["best"] is None:
        print("no successful evaluation")
    else:
        print(f"best objective: {summary['best']['value']!r}")
        for name, value in summary["best"]["raw"].items():
            print(f"  {name} = {value}")
    return 0


def _summarize(space: SearchSpace, config: RunConfig, state: RunState, label: str) -> dict:
    best = state.best_record
    return {
        "objective": label,
        "budget": config.budget,
        "strategy": config.strategy,
        "kernel": config.effective_kernel,
        "acquisition": config.acquisition,
        "seed": config.seed,
        "evaluations": len(state.history),
        "failed": sum(1 for r in state.history if not r.ok),
        "best": None if best is None else {
            "index": best.index,
            "value": best.value,
            "raw": dict(zip(space.names, best.raw)),
        },
    }


# --- compare --------------------------------------------------------------------

def _compare_cell(payload: dict) -> tuple[str, int, str]:
    """One (strategy, seed) run, executed possibly in a worker process."""
    space = SearchSpace.from_dict(payload["space"])
    config = RunConfig.from_dict(payload["config"])
    label = payload["objective"]
    if label in BUILTINS:
        spec = ObjectiveSpec(kind="builtin", name=label)
    else:
        spec = ObjectiveSpec(kind="external", command=label, timeout=payload["timeout"])
    objective = make_objective(spec, space)
    if isinstance(objective, ExternalObjective):
        with objective:
            run(space, objective, config, log_path=payload["log_path"], objective_label=label)
    else:
        run(space, objective, config, log_path=payload["log_path"], objective_label=label)
    return payload["strategy_flag"], config.seed, payload["log_path"]


def cmd_compare(args) -> int:
    _check_objective_label(args.objective)
    space = _resolve_space(args)
    _resolve_objective(args.objective, space, args.timeout)  # fail fast on bad flags
    strategies = [s.strip() for s in args.strategies.split(",") if s.strip()]
    for s in strategies:
        if s not in _STRATEGY_FLAGS:
            raise CliError(f"--strategies: unknown strategy {s!r} (choose from {sorted(_STRATEGY_FLAGS)})")
    out = Path(args.out or _default_out())
    runs_dir = out / "runs"
    runs_dir.mkdir(parents=True, exist_ok=True)

    cells = []
    for flag in strategies:
        for seed in range(args.seeds):
            config = _run_config(args, space, _STRATEGY_FLAGS[flag], seed)
            cells.append({
                "space": space.to_dict(), "config": config.to_dict(),
                "objective": args.objective, "timeout": args.timeout,
                "strategy_flag": flag,
                "log_path": str(runs_dir / f"{flag}_seed{seed}.jsonl"),
            })

    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_compare_cell, cells))
    else:
        results = [_compare_cell(cell) for cell in cells]

    traces: dict[str, dict[int, list[float]]] = {flag: {} for flag in strategies}
    for flag, seed, log_path in results:
        _, records = read_log(log_path)
        traces[flag][seed] = _best_trace(records, args.budget)

    rows = []
    for flag in strategies:
        for seed in sorted(traces[flag]):
            for i, value in enumerate(traces[flag][seed]):
                rows.append((flag, seed, i, value))
    _write_csv(out / "compare.csv", ["strategy", "seed", "eval_index", "best_so_far"], rows)

    median_rows = []
    for flag in strategies:
        matrix = np.array([traces[flag][seed] for seed in sorted(traces[flag])])
        med = np.median(matrix, axis=0)
        q25 = np.quantile(matrix, 0.25, axis=0)
        q75 = np.quantile(matrix, 0.75, axis=0)
        for i in range(args.budget):
            median_rows.append((flag, i, float(med[i]), float(q25[i]), float(q75[i])))
    _write_csv(out / "compare_median.csv",
               ["strategy", "eval_index", "median", "q25", "q75"], median_rows)

    finals = {flag: np.array([traces[flag][seed][-1] for seed in sorted(traces[flag])])
              for flag in strategies}
    print(f"{'strategy':<12} median final best")
    for flag in strategies:
        print(f"{flag:<12} {np.median(finals[flag])!r}")
    if len(strategies) > 1:
        print("\nwins (row strictly better than column, out of "
              f"{args.seeds} seeds):")
        print(" " * 12 + "".join(f"{s:>12}" for s in strategies))
        for a in strategies:
            cells_row = []
            for b in strategies:
                cells_row.append("-" if a == b else str(int(np.sum(finals[a] < finals[b]))))
            print(f"{a:<12}" + "".join(f"{c:>12}" for c in cells_row))
    print(f"\nwrote {out / 'compare.csv'} and {out / 'compare_median.csv'}")
    return 0


# --- importance -----------------------------------------------------------------

def cmd_importance(args) -> int:
    log_path = Path(args.log)
    if not log_path.exists():
        raise CliError(f"--log: file not found: {log_path}")
    state = replay(log_path)
    space, config = state.space, state.config
    ok = state.ok_records()
    if len(ok) < 2 * space.dim:
        raise CliError(f"--log: need at least {2 * space.dim} successful records to "
                       f"fit the surrogate, found {len(ok)}")

    X = np.array([r.unit for r in ok])
    y = np.array([r.value for r in ok])
    kernel = config.effective_kernel
    anchor = state.best_unit if kernel != "ard_se" else None
    model = fit(X, y, kind=kernel, anchor=anchor, seed=[config.seed, 0, 1])

    out = Path(args.out or _default_out())
    out.mkdir(parents=True, exist_ok=True)
    report = fanova.importance(model.mean_function(), space.dim,
                               grid_size=args.grid, mc_samples=args.samples,
                               seed=config.seed)
    rows = [(space.names[d], float(report.variances[d]), float(report.importances[d]))
            for d in range(space.dim)]
    _write_csv(out / "importance.csv", ["dimension", "variance", "importance"], rows)
    print(f"{'dimension':<20} {'V_d':>14} {'I_d':>8}")
    for name, variance, share in rows:
        print(f"{name:<20} {variance:>14.6g} {share:>8.4f}")

    for d in range(space.dim):
        curve = fanova.marginal_curve(model.mean_function(), space.dim, d,
                                      grid_size=args.grid, mc_samples=args.samples,
                                      seed=config.seed)
        _write_csv(out / f"marginal_{space.names[d]}.csv", ["grid_value", "marginal"],
                   [(float(g), float(v)) for g, v in zip(curve.grid, curve.values)])
    print(f"wrote {out / 'importance.csv'} and per-dimension marginal CSVs")
    return 0


# --- argument parsing -------------------------------------------------------------

def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--space", help="space definition file (YAML)")
    parser.add_argument("--objective", required=True,
                        help="builtin objective name or external worker command")
    parser.add_argument("--budget", type=int, default=200, help="true evaluations (default 200)")
    parser.add_argument("--kernel", choices=sorted(_KERNEL_FLAGS), default="houses")
    parser.add_argument("--acq", choices=("ei", "pi", "ucb"), default="ucb")
    parser.add_argument("--ucb-w", type=float, default=2.0, dest="ucb_w")
    parser.add_argument("--n0", type=int, default=None, help="initial population (default max(10, 2D))")
    parser.add_argument("--timeout", type=float, default=600.0,
                        help="external evaluation timeout in seconds")
    parser.add_argument("--es-grids", type=int, default=5, dest="es_grids")
    parser.add_argument("--es-offspring", type=int, default=10, dest="es_offspring")
    parser.add_argument("--es-pm", type=float, default=None, dest="es_pm",
                        help="base mutation rate (default 1/D)")
    parser.add_argument("--es-eta", type=float, default=20.0, dest="es_eta")
    parser.add_argument("--out", default=None, help="output directory (default $HOUSES_LOG_DIR or ./houses_out)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="houses",
                                     description="Surrogate-assisted hyperparameter optimization")
    sub = parser.add_subparsers(dest="command", required=True)

    p_opt = sub.add_parser("optimize", help="run one optimization")
    _add_common(p_opt)
    p_opt.add_argument("--strategy", choices=sorted(_STRATEGY_FLAGS), default="houses")
    p_opt.add_argument("--seed", type=int, default=0)
    p_opt.set_defaults(func=cmd_optimize)

    p_cmp = sub.add_parser("compare", help="compare strategies over repeated seeds")
    _add_common(p_cmp)
    p_cmp.add_argument("--seeds", type=int, default=5, help="number of seeds per strategy")
    p_cmp.add_argument("--strategies", default="houses,random",
                       help="comma-separated subset of houses,gp,random")
    p_cmp.add_argument("--jobs", type=int, default=1, help="parallel (strategy, seed) cells")
    p_cmp.set_defaults(func=cmd_compare)

    p_imp = sub.add_parser("importance", help="per-dimension importance from a run log")
    p_imp.add_argument("--log", required=True, help="run log (JSONL) to analyze")
    p_imp.add_argument("--out", default=None)
    p_imp.add_argument("--grid", type=int, default=20, help="marginal grid size")
    p_imp.add_argument("--samples", type=int, default=512, help="integration samples per grid point")
    p_imp.set_defaults(func=cmd_importance)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
