"""Command-line harness: single runs, replicated benchmarks, problem listing.

Exit codes: 0 success, 1 configuration error, 2 run failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import BatchConfig, export_history, export_rejects, export_summary, run_batch
from .driver import RunConfig, run
from .problems import BUILTIN_PROBLEMS, make_problem
from .surrogate import KernelKind

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_FAILURE = 2

_KERNELS = {k.value: k for k in KernelKind}


class _ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad usage; remap to the config-error code.
    def error(self, message):
        raise _ConfigError(message)


def _add_problem_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--problem", required=True, help="built-in problem name")
    parser.add_argument("--alpha", type=float, default=None, help="forrester oscillation coefficient")
    parser.add_argument("--e-modulus", type=float, default=None, help="welded plate Young's modulus (MPa)")


def _add_run_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--budget", type=int, required=True, help="accepted infill evaluations after the initial design (k_max)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--kernel", choices=sorted(_KERNELS), default=KernelKind.GAUSSIAN.value)
    parser.add_argument("--n0", type=int, default=None, help="initial sample count (default 2m+1)")
    parser.add_argument("--epsilon", type=float, default=1e-3, help="minimum unit-space distance for new samples")
    parser.add_argument("--cycle", default="global,local,uniform", help="comma-separated criterion order")
    parser.add_argument("--no-tune", action="store_true", help="disable shape-parameter tuning")
    parser.add_argument("--out", required=True, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ssbo", description="Sequential surrogate-based optimization of expensive black-box problems")
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser("run", help="execute one optimization run")
    _add_problem_arguments(run_parser)
    _add_run_arguments(run_parser)

    bench_parser = sub.add_parser("bench", help="run replicated experiments and aggregate statistics")
    _add_problem_arguments(bench_parser)
    _add_run_arguments(bench_parser)
    bench_parser.add_argument("--replications", type=int, default=50)
    bench_parser.add_argument("--global-tol", type=float, default=0.01, help="relative tolerance for counting a replication as globally converged")

    sub.add_parser("problems", help="list built-in problems")
    return parser


def _problem_params(args) -> dict:
    params = {}
    if args.alpha is not None:
        params["alpha"] = args.alpha
    if args.e_modulus is not None:
        params["e_modulus"] = args.e_modulus
    return params


def _run_config(args) -> RunConfig:
    cycle = tuple(tag.strip() for tag in args.cycle.split(",") if tag.strip())
    return RunConfig(
        k_max=args.budget,
        n0=args.n0,
        epsilon=args.epsilon,
        kernel=_KERNELS[args.kernel],
        tune=not args.no_tune,
        seed=args.seed,
        criterion_cycle=cycle,
    )


def _cmd_run(args) -> int:
    problem = make_problem(args.problem, **_problem_params(args))
    config = _run_config(args)
    record = run(problem, config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    export_history(record, out / "history.csv")
    export_rejects(record, out / "rejects.csv")
    print(f"problem: {record.problem_name}")
    print(f"status: {record.status}")
    print(f"evaluations: {record.total_evaluations}")
    if record.incumbent is not None:
        x_text = ", ".join(f"{v:.6g}" for v in record.incumbent.sample.x_raw)
        print(f"best J: {record.final_objective:.6g} (feasible: {str(record.final_feasible).lower()})")
        print(f"best x: [{x_text}]")
    print(f"history: {out / 'history.csv'}")
    return EXIT_OK if not record.status.startswith("error") else EXIT_FAILURE


def _cmd_bench(args) -> int:
    config = BatchConfig(
        problem=args.problem,
        problem_params=_problem_params(args),
        run_config=_run_config(args),
        replications=args.replications,
        base_seed=args.seed,
        global_tolerance=args.global_tol,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    def save(index: int, record) -> None:
        export_history(record, out / f"history_{index:03d}.csv")
        export_rejects(record, out / f"rejects_{index:03d}.csv")

    summary = run_batch(config, on_record=save)
    export_summary(summary, out / "summary.json")
    print(f"problem: {summary.problem}")
    print(f"replications: {summary.replications} ({len(summary.failed_replications)} failed)")
    print(f"mean J: {summary.mean_objective:.6g}  std J: {summary.std_objective:.6g}")
    print(f"mean evaluations: {summary.mean_evaluations:.6g}")
    print(f"global probability: {summary.global_probability:.6g}")
    print(f"summary: {out / 'summary.json'}")
    if len(summary.failed_replications) == summary.replications:
        return EXIT_FAILURE
    return EXIT_OK


def _cmd_problems() -> int:
    print(f"{'name':<14} {'m':>2} {'q':>2}  {'bounds':<34} {'best known':<12} source")
    for name in BUILTIN_PROBLEMS:
        problem = make_problem(name)
        bounds = " x ".join(
            f"[{lo:g}, {hi:g}]" for lo, hi in zip(problem.bounds.lower, problem.bounds.upper)
        )
        best = "-" if problem.best_known is None else f"{problem.best_known:g}"
        source = problem.best_known_source or "-"
        print(f"{name:<14} {problem.dim:>2} {problem.n_constraints:>2}  {bounds:<34} {best:<12} {source}")
    print("\nforrester accepts --alpha (default 0); welded_plate accepts --e-modulus (default 2e5 MPa).")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "bench":
            return _cmd_bench(args)
        return _cmd_problems()
    except _ConfigError as exc:
        print(f"ssbo: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"ssbo: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"ssbo: error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
