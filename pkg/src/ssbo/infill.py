"""Sample-set bookkeeping and the three infill criteria.

New points come from (a) a global surrogate minimization, (b) a space-filling
max-min-distance pick over a fresh Latin hypercube, or (c) a local surrogate
minimization on the box spanned by the samples nearest the incumbent. A
candidate closer than epsilon to any existing sample is rejected before any
expensive evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .solvers import BoxProblem, SolverSettings, candidate_search, ga_minimize, local_minimize
from .space import DesignSpace, lhs_sample, min_distance
from .surrogate import KernelKind, SurrogateBundle, build_bundle, predict

CRITERION_GLOBAL = "global"
CRITERION_UNIFORM = "uniform"
CRITERION_LOCAL = "local"
CRITERION_TAGS = (CRITERION_GLOBAL, CRITERION_LOCAL, CRITERION_UNIFORM)

DEFAULT_EPSILON = 1e-3
DEFAULT_N_LHS = 10000
# Half-width added to zero-width reduced-interval dimensions, in unit range.
DEGENERATE_HALF_WIDTH = 0.005


@dataclass(frozen=True)
class Sample:
    """One evaluated design point."""

    x: np.ndarray            # unit-cube coordinates
    x_raw: np.ndarray        # problem units
    objective: float
    constraints: np.ndarray  # (q,), feasible iff all <= tolerance


class SampleSet:
    """Ordered collection of evaluated samples with pairwise-distinct inputs."""

    def __init__(self, dim: int, n_constraints: int, samples=()):
        self.dim = dim
        self.n_constraints = n_constraints
        self._samples: list[Sample] = []
        for s in samples:
            self.add(s)

    def __len__(self) -> int:
        return len(self._samples)

    def __iter__(self):
        return iter(self._samples)

    def __getitem__(self, index: int) -> Sample:
        return self._samples[index]

    def add(self, sample: Sample) -> None:
        if sample.x.shape != (self.dim,):
            raise ValueError(f"sample input has shape {sample.x.shape}, expected ({self.dim},)")
        if sample.constraints.shape != (self.n_constraints,):
            raise ValueError("sample constraint vector has the wrong length")
        if not (np.isfinite(sample.objective) and np.isfinite(sample.constraints).all()):
            raise ValueError("sample carries non-finite responses")
        if self._samples and min_distance(sample.x, self.unit_inputs()) <= 0.0:
            raise ValueError("sample input coincides with an existing sample")
        self._samples.append(sample)

    def unit_inputs(self) -> np.ndarray:
        return np.array([s.x for s in self._samples])

    def raw_inputs(self) -> np.ndarray:
        return np.array([s.x_raw for s in self._samples])

    def objective_values(self) -> np.ndarray:
        return np.array([s.objective for s in self._samples])

    def constraint_values(self) -> np.ndarray:
        if not self._samples:
            return np.zeros((0, self.n_constraints))
        return np.array([s.constraints for s in self._samples]).reshape(len(self._samples), self.n_constraints)


@dataclass(frozen=True)
class Incumbent:
    """Current best sample: feasible with minimal objective when any sample is
    feasible, otherwise minimal objective overall."""

    sample: Sample
    index: int
    feasible: bool


@dataclass(frozen=True)
class ReducedInterval:
    """Bounding box of the p samples nearest the incumbent, clipped to the unit cube."""

    box: DesignSpace
    members: tuple[Sample, ...]
    indices: np.ndarray


@dataclass(frozen=True)
class InfillCandidate:
    x: np.ndarray
    criterion: str


def reduced_interval(sample_set: SampleSet, incumbent: Incumbent, p: int) -> ReducedInterval:
    """Select the p samples nearest the incumbent (ties by insertion order) and
    wrap them in their axis-aligned bounding box; zero-width dimensions are
    widened by +/-0.5% of the unit range."""
    n = len(sample_set)
    if not 1 <= p <= n:
        raise ValueError(f"need 1 <= p <= {n}, got {p}")
    inputs = sample_set.unit_inputs()
    distances = np.linalg.norm(inputs - incumbent.sample.x, axis=1)
    order = np.argsort(distances, kind="stable")[:p]
    members = inputs[order]
    lower = members.min(axis=0)
    upper = members.max(axis=0)
    degenerate = upper - lower == 0.0
    lower = np.where(degenerate, lower - DEGENERATE_HALF_WIDTH, lower)
    upper = np.where(degenerate, upper + DEGENERATE_HALF_WIDTH, upper)
    lower = np.clip(lower, 0.0, 1.0)
    upper = np.clip(upper, 0.0, 1.0)
    return ReducedInterval(
        box=DesignSpace(lower, upper),
        members=tuple(sample_set[int(i)] for i in order),
        indices=order,
    )


def _bundle_problem(bundle: SurrogateBundle, box: DesignSpace) -> BoxProblem:
    return BoxProblem(
        objective=lambda pts: predict(bundle.objective, pts),
        constraints=tuple(
            (lambda pts, model=model: predict(model, pts)) for model in bundle.constraints
        ),
        box=box,
        vectorized=True,
    )


def criterion_global(bundle: SurrogateBundle, settings: SolverSettings | None = None, seed=None) -> InfillCandidate:
    """Global surrogate minimization over the full unit cube."""
    m = bundle.objective.dim
    problem = _bundle_problem(bundle, DesignSpace(np.zeros(m), np.ones(m)))
    x = ga_minimize(problem, settings, seed=seed)
    return InfillCandidate(x=x, criterion=CRITERION_GLOBAL)


def criterion_uniform(sample_set: SampleSet, n_lhs: int = DEFAULT_N_LHS, seed=None) -> InfillCandidate:
    """Space-filling pick: the Latin hypercube candidate furthest from the
    existing samples (largest minimum distance; ties by lowest index)."""
    if len(sample_set) == 0:
        raise ValueError("sample set is empty")
    candidates = lhs_sample(n_lhs, sample_set.dim, seed=seed)
    existing = sample_set.unit_inputs()

    def negated_min_distance(pts):
        return -cdist(pts, existing).min(axis=1)

    x = candidate_search(negated_min_distance, candidates, batch=True)
    return InfillCandidate(x=x, criterion=CRITERION_UNIFORM)


def criterion_local(
    sample_set: SampleSet,
    incumbent: Incumbent,
    p: int,
    kernel: KernelKind,
    settings: SolverSettings | None = None,
    seed=None,
    tune: bool = True,
) -> InfillCandidate:
    """Local refinement: fit surrogates to the reduced-interval members only and
    descend from the incumbent within the reduced box.

    The seed argument is accepted for signature parity with the other criteria;
    the local search is deterministic.
    """
    del seed
    if p < 2:
        raise ValueError("local criterion needs at least two reduced-interval members")
    region = reduced_interval(sample_set, incumbent, p)
    local_set = SampleSet(sample_set.dim, sample_set.n_constraints, region.members)
    bundle = build_bundle(local_set, kernel, tune=tune)
    problem = _bundle_problem(bundle, region.box)
    x = local_minimize(problem, incumbent.sample.x, settings)
    return InfillCandidate(x=x, criterion=CRITERION_LOCAL)


def accept_candidate(candidate: InfillCandidate, sample_set: SampleSet, epsilon: float = DEFAULT_EPSILON) -> bool:
    """Reject (False) iff the candidate is within epsilon of an existing sample,
    so the expensive evaluation is skipped."""
    if len(sample_set) == 0:
        raise ValueError("sample set is empty")
    return min_distance(candidate.x, sample_set.unit_inputs()) >= epsilon
