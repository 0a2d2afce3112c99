"""Batch experiment runner and machine-readable exports.

A batch repeats one run configuration over consecutive seeds and aggregates
final objectives, evaluation counts, and the fraction of replications that
finished feasible within tolerance of the best-known optimum. Histories go to
CSV, summaries to JSON.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .driver import RunConfig, RunRecord, run
from .problems import ProblemSpec, make_problem


@dataclass(frozen=True)
class BatchConfig:
    """A run template repeated over seeds base_seed, base_seed+1, ..."""

    problem: str
    run_config: RunConfig
    problem_params: dict = field(default_factory=dict)
    replications: int = 50
    base_seed: int = 0
    global_tolerance: float = 0.01  # relative tolerance for "reached the optimum"

    def __post_init__(self) -> None:
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.global_tolerance <= 0.0:
            raise ValueError("global_tolerance must be positive")


@dataclass
class BatchSummary:
    problem: str
    replications: int
    final_objectives: list[float]       # successful replications, run order
    final_feasible: list[bool]
    evaluation_counts: list[int]
    mean_objective: float
    std_objective: float                # sample standard deviation (n-1)
    mean_evaluations: float
    global_probability: float           # NaN when best_known is unknown
    cdf: list[float]                    # sorted final objectives
    best_known: float | None
    failed_replications: list[dict]     # [{"replication": i, "status": ...}]
    config: BatchConfig


def run_batch(config: BatchConfig, problem: ProblemSpec | None = None,
              run_fn=run, on_record=None) -> BatchSummary:
    """Execute the batch sequentially and aggregate.

    Replications aborting with an error status are excluded from the
    statistics and listed under failed_replications. on_record, when given,
    receives (replication_index, RunRecord) after each run.
    """
    if problem is None:
        problem = make_problem(config.problem, **config.problem_params)
    finals: list[float] = []
    feasible: list[bool] = []
    counts: list[int] = []
    failed: list[dict] = []
    for i in range(config.replications):
        record: RunRecord = run_fn(problem, replace(config.run_config, seed=config.base_seed + i))
        if on_record is not None:
            on_record(i, record)
        if record.status.startswith("error") or record.incumbent is None:
            failed.append({"replication": i, "status": record.status})
            continue
        finals.append(float(record.final_objective))
        feasible.append(bool(record.final_feasible))
        counts.append(int(record.total_evaluations))

    if finals:
        mean_objective = float(np.mean(finals))
        std_objective = float(np.std(finals, ddof=1)) if len(finals) > 1 else 0.0
        mean_evaluations = float(np.mean(counts))
    else:
        mean_objective = std_objective = mean_evaluations = float("nan")

    if problem.best_known is None or not finals:
        probability = float("nan")
    else:
        tol = config.global_tolerance * (1.0 + abs(problem.best_known))
        hits = [
            feas and abs(value - problem.best_known) <= tol
            for value, feas in zip(finals, feasible)
        ]
        probability = float(np.mean(hits))

    return BatchSummary(
        problem=problem.name,
        replications=config.replications,
        final_objectives=finals,
        final_feasible=feasible,
        evaluation_counts=counts,
        mean_objective=mean_objective,
        std_objective=std_objective,
        mean_evaluations=mean_evaluations,
        global_probability=probability,
        cdf=sorted(finals),
        best_known=problem.best_known,
        failed_replications=failed,
        config=config,
    )


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def export_history(record: RunRecord, path) -> Path:
    """Write the per-evaluation history as CSV: one row per true evaluation,
    17 significant digits, rejected candidates excluded."""
    path = Path(path)
    m, q = record.dim, record.n_constraints
    header = (
        ["eval", "criterion"]
        + [f"x_{i + 1}" for i in range(m)]
        + ["J"]
        + [f"g_{j + 1}" for j in range(q)]
        + ["incumbent_J", "incumbent_feasible"]
    )
    lines = [",".join(header)]
    for row in record.rows:
        fields = [str(row.index), row.criterion]
        fields += [_fmt(v) for v in row.x_raw]
        fields.append(_fmt(row.objective))
        fields += [_fmt(v) for v in row.constraints]
        fields.append(_fmt(row.incumbent_objective))
        fields.append("true" if row.incumbent_feasible else "false")
        lines.append(",".join(fields))
    path.write_text("\n".join(lines) + "\n")
    return path


def export_rejects(record: RunRecord, path) -> Path:
    """Write the rejected-candidate sidecar CSV (iteration = evaluations done
    at the time of rejection)."""
    path = Path(path)
    header = ["iteration", "criterion"] + [f"x_{i + 1}" for i in range(record.dim)] + ["min_distance"]
    lines = [",".join(header)]
    for reject in record.rejects:
        fields = [str(reject.evaluations), reject.criterion]
        fields += [_fmt(v) for v in reject.x_raw]
        fields.append(_fmt(reject.distance))
        lines.append(",".join(fields))
    path.write_text("\n".join(lines) + "\n")
    return path


def _run_config_dict(config: RunConfig) -> dict:
    data = asdict(config)
    data["kernel"] = config.kernel.value
    data["criterion_cycle"] = list(config.criterion_cycle)
    return data


def _batch_config_dict(config: BatchConfig) -> dict:
    return {
        "problem": config.problem,
        "problem_params": dict(config.problem_params),
        "run_config": _run_config_dict(config.run_config),
        "replications": config.replications,
        "base_seed": config.base_seed,
        "global_tolerance": config.global_tolerance,
    }


def export_summary(summary: BatchSummary, path) -> Path:
    """Write the batch summary as JSON; identical batches produce identical
    documents apart from the timestamp field."""
    path = Path(path)
    document = {
        "problem": summary.problem,
        "replications": summary.replications,
        "mean_J": summary.mean_objective,
        "std_J": summary.std_objective,
        "mean_evals": summary.mean_evaluations,
        "global_probability": summary.global_probability,
        "cdf": list(summary.cdf),
        "best_known": summary.best_known,
        "replication_J": list(summary.final_objectives),
        "replication_feasible": list(summary.final_feasible),
        "replication_evals": list(summary.evaluation_counts),
        "failed_replications": list(summary.failed_replications),
        "config": _batch_config_dict(summary.config),
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    path.write_text(json.dumps(document, indent=2, sort_keys=True, allow_nan=True) + "\n")
    return path
