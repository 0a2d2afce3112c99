"""Sequential optimization loop: initial Latin hypercube design, surrogate
refits, rotating infill criteria with distance-based rejection, incumbent
tracking and a full per-evaluation history."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .infill import (
    CRITERION_GLOBAL,
    CRITERION_LOCAL,
    CRITERION_TAGS,
    CRITERION_UNIFORM,
    Incumbent,
    Sample,
    SampleSet,
    accept_candidate,
    criterion_global,
    criterion_local,
    criterion_uniform,
    min_distance,
)
from .problems import CountingEvaluator, ProblemSpec
from .solvers import SolverSettings
from .space import denormalize, lhs_sample
from .surrogate import KernelKind, build_bundle

DOE_TAG = "DoE"

STATUS_OK = "ok"
STATUS_STALLED = "stalled"
_SEED_BOUND = 2**63 - 1


@dataclass(frozen=True)
class RunConfig:
    """Settings for one optimization run.

    k_max counts accepted infill evaluations after the initial design, so the
    total budget is n0 + k_max true evaluations. n0 defaults to 2m+1 and p
    (reduced-interval size) defaults to n0.
    """

    k_max: int
    n0: int | None = None
    epsilon: float = 1e-3
    p: int | None = None
    tau_feas: float = 1e-6
    kernel: KernelKind = KernelKind.GAUSSIAN
    tune: bool = True
    solver: SolverSettings = field(default_factory=SolverSettings)
    seed: int = 0
    criterion_cycle: tuple[str, ...] = (CRITERION_GLOBAL, CRITERION_LOCAL, CRITERION_UNIFORM)
    n_lhs: int = 10000

    def __post_init__(self) -> None:
        if self.k_max < 0:
            raise ValueError("k_max must be >= 0")
        if self.epsilon <= 0.0:
            raise ValueError("epsilon must be positive")
        if self.n_lhs < 1:
            raise ValueError("n_lhs must be >= 1")
        if not self.criterion_cycle:
            raise ValueError("criterion cycle must be nonempty")
        object.__setattr__(self, "criterion_cycle", tuple(self.criterion_cycle))
        for tag in self.criterion_cycle:
            if tag not in CRITERION_TAGS:
                raise ValueError(f"unknown criterion tag {tag!r}; valid: {CRITERION_TAGS}")

    def resolve_counts(self, dim: int) -> tuple[int, int]:
        """Return (n0, p) with defaults filled in for a problem of this dimension."""
        n0 = self.n0 if self.n0 is not None else 2 * dim + 1
        if n0 < 2:
            raise ValueError("n0 must be >= 2")
        p = self.p if self.p is not None else n0
        if p < 2:
            raise ValueError("p must be >= 2")
        if p > n0 + self.k_max:
            raise ValueError("p cannot exceed the total evaluation budget n0 + k_max")
        return n0, p


@dataclass(frozen=True)
class EvaluationRow:
    """One true evaluation: inputs, responses and the incumbent right after it."""

    index: int
    criterion: str
    x_raw: np.ndarray
    objective: float
    constraints: np.ndarray
    incumbent_objective: float
    incumbent_feasible: bool


@dataclass(frozen=True)
class RejectedCandidate:
    """Candidate abandoned by the distance rule; no true evaluation happened."""

    evaluations: int
    criterion: str
    x_raw: np.ndarray
    distance: float


@dataclass
class RunRecord:
    """Complete history of one run."""

    problem_name: str
    dim: int
    n_constraints: int
    config: RunConfig
    rows: list[EvaluationRow]
    rejects: list[RejectedCandidate]
    incumbent: Incumbent | None
    total_evaluations: int
    wall_time: float
    status: str

    @property
    def final_objective(self) -> float:
        if self.incumbent is None:
            return float("nan")
        return self.incumbent.sample.objective

    @property
    def final_feasible(self) -> bool:
        return self.incumbent is not None and self.incumbent.feasible


def select_incumbent(sample_set: SampleSet, tau_feas: float = 1e-6) -> Incumbent:
    """Best sample under feasibility-first ranking: feasible (all constraints
    <= tau_feas) with minimal objective, else minimal objective overall. Ties
    go to the earliest-inserted sample."""
    if len(sample_set) == 0:
        raise ValueError("sample set is empty")
    best = None
    best_index = -1
    best_feasible = False
    for i, sample in enumerate(sample_set):
        feasible = bool((sample.constraints <= tau_feas).all())
        if best is None:
            take = True
        elif feasible != best_feasible:
            take = feasible
        else:
            take = sample.objective < best.objective
        if take:
            best, best_index, best_feasible = sample, i, feasible
    return Incumbent(sample=best, index=best_index, feasible=best_feasible)


def run(problem: ProblemSpec, config: RunConfig) -> RunRecord:
    """Execute one optimization run. Deterministic for a fixed config.

    An evaluator returning non-finite values aborts the run with an error
    status and a partial record; exhausting every criterion on rejected
    candidates records a stall.
    """
    start_time = time.perf_counter()
    m = problem.dim
    n0, p = config.resolve_counts(m)
    counter = CountingEvaluator(problem)
    master = np.random.default_rng(config.seed)

    def child_seed() -> int:
        return int(master.integers(0, _SEED_BOUND))

    samples = SampleSet(m, problem.n_constraints)
    rows: list[EvaluationRow] = []
    rejects: list[RejectedCandidate] = []
    incumbent: Incumbent | None = None
    status = STATUS_OK

    def finish() -> RunRecord:
        return RunRecord(
            problem_name=problem.name,
            dim=m,
            n_constraints=problem.n_constraints,
            config=config,
            rows=rows,
            rejects=rejects,
            incumbent=incumbent,
            total_evaluations=counter.count,
            wall_time=time.perf_counter() - start_time,
            status=status,
        )

    def evaluate_and_record(unit_x: np.ndarray, tag: str) -> bool:
        nonlocal incumbent, status
        raw = denormalize(unit_x, problem.bounds)
        objective, constraints = counter.evaluate(raw)
        objective = float(objective)
        constraints = np.asarray(constraints, dtype=float).reshape(-1)
        if constraints.size != problem.n_constraints:
            status = "error: evaluator returned the wrong number of constraints"
            return False
        if not (np.isfinite(objective) and np.isfinite(constraints).all()):
            status = "error: non-finite evaluation"
            return False
        samples.add(Sample(x=unit_x.copy(), x_raw=raw, objective=objective, constraints=constraints))
        incumbent = select_incumbent(samples, config.tau_feas)
        rows.append(EvaluationRow(
            index=counter.count,
            criterion=tag,
            x_raw=raw,
            objective=objective,
            constraints=constraints,
            incumbent_objective=incumbent.sample.objective,
            incumbent_feasible=incumbent.feasible,
        ))
        return True

    # Initial design
    for unit_x in lhs_sample(n0, m, seed=child_seed()):
        if not evaluate_and_record(unit_x, DOE_TAG):
            return finish()

    # Surrogates are rebuilt lazily: only the global criterion consumes the
    # all-sample bundle, and only when samples were added since its last build.
    bundle = None
    bundle_size = 0

    def generate(tag: str, seed: int):
        nonlocal bundle, bundle_size
        if tag == CRITERION_GLOBAL:
            if bundle is None or bundle_size != len(samples):
                bundle = build_bundle(samples, config.kernel, tune=config.tune)
                bundle_size = len(samples)
            return criterion_global(bundle, config.solver, seed=seed)
        if tag == CRITERION_UNIFORM:
            return criterion_uniform(samples, config.n_lhs, seed=seed)
        if len(samples) < p:
            return None  # local criterion unavailable until p samples exist
        return criterion_local(
            samples, incumbent, p, config.kernel, config.solver, seed=seed, tune=config.tune
        )

    def log_reject(candidate) -> None:
        rejects.append(RejectedCandidate(
            evaluations=counter.count,
            criterion=candidate.criterion,
            x_raw=denormalize(candidate.x, problem.bounds),
            distance=min_distance(candidate.x, samples.unit_inputs()),
        ))

    cycle = config.criterion_cycle
    pointer = 0
    consecutive_rejects = 0
    accepted = 0
    while accepted < config.k_max:
        tag = cycle[pointer % len(cycle)]
        pointer += 1
        candidate = generate(tag, child_seed())
        if candidate is not None and accept_candidate(candidate, samples, config.epsilon):
            if not evaluate_and_record(candidate.x, candidate.criterion):
                return finish()
            accepted += 1
            consecutive_rejects = 0
            continue
        if candidate is not None:
            log_reject(candidate)
        consecutive_rejects += 1
        if consecutive_rejects < len(cycle):
            continue
        # Every criterion in the cycle rejected: try one reseeded
        # space-filling candidate before declaring a stall.
        fallback = criterion_uniform(samples, config.n_lhs, seed=child_seed())
        if accept_candidate(fallback, samples, config.epsilon):
            if not evaluate_and_record(fallback.x, fallback.criterion):
                return finish()
            accepted += 1
            consecutive_rejects = 0
        else:
            log_reject(fallback)
            status = STATUS_STALLED
            break

    return finish()
