"""Optimizers for cheap-to-evaluate surrogate functions.

All three solvers operate on unit-cube sub-boxes and never return points
outside them: a real-coded genetic algorithm for global search, a penalized
projected-gradient descent for local refinement, and an argmin scan over a
finite candidate set.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize as scipy_minimize

from .space import DesignSpace

_ARMIJO = 1e-4
_GRAD_TOL = 1e-8
_STEP_TOL = 1e-10
_MAX_BACKTRACKS = 60


@dataclass(frozen=True)
class BoxProblem:
    """Cheap objective and inequality constraints (feasible iff <= 0) on a sub-box
    of the unit cube.

    With vectorized=True the callables accept a (k, m) batch and return (k,);
    otherwise they take a single point and return a scalar.
    """

    objective: Callable
    box: DesignSpace
    constraints: tuple[Callable, ...] = ()
    vectorized: bool = False

    def __post_init__(self) -> None:
        if (self.box.lower < -1e-12).any() or (self.box.upper > 1.0 + 1e-12).any():
            raise ValueError("box must lie within the unit cube")


@dataclass(frozen=True)
class SolverSettings:
    population: int = 50
    generations: int = 100
    penalty_weight: float = 1e3
    fd_step: float = 1e-6
    max_local_iters: int = 100
    seed: int | None = None
    tournament_size: int = 2
    crossover_rate: float = 0.9
    blend_alpha: float = 0.5
    mutation_sigma: float = 0.1  # fraction of box width
    elite: int = 1

    def __post_init__(self) -> None:
        if min(self.population, self.generations, self.max_local_iters) < 1:
            raise ValueError("population, generations and max_local_iters must be >= 1")
        if not 0.0 < self.fd_step < 1e-2:
            raise ValueError("fd_step must lie in (0, 1e-2)")
        if self.penalty_weight <= 0.0:
            raise ValueError("penalty_weight must be positive")


def _eval_objective(problem: BoxProblem, pts: np.ndarray) -> np.ndarray:
    if problem.vectorized:
        values = np.asarray(problem.objective(pts), dtype=float).reshape(pts.shape[0])
    else:
        values = np.array([float(problem.objective(p)) for p in pts])
    if not np.isfinite(values).all():
        raise ValueError("objective callable returned a non-finite value")
    return values


def _eval_constraints(problem: BoxProblem, pts: np.ndarray) -> np.ndarray:
    if not problem.constraints:
        return np.zeros((pts.shape[0], 0))
    if problem.vectorized:
        cols = [np.asarray(g(pts), dtype=float).reshape(pts.shape[0]) for g in problem.constraints]
        values = np.column_stack(cols)
    else:
        values = np.array([[float(g(p)) for g in problem.constraints] for p in pts])
    if not np.isfinite(values).all():
        raise ValueError("constraint callable returned a non-finite value")
    return values


def _penalized_batch(problem: BoxProblem, pts: np.ndarray, weight: float) -> np.ndarray:
    values = _eval_objective(problem, pts)
    g = _eval_constraints(problem, pts)
    if g.size:
        values = values + weight * np.square(np.clip(g, 0.0, None)).sum(axis=1)
    return values


def penalized_value(problem: BoxProblem, x, weight: float) -> float:
    """Objective plus weight times the sum of squared constraint violations."""
    pts = np.asarray(x, dtype=float)[None, :]
    return float(_penalized_batch(problem, pts, weight)[0])


def _beats(obj_a, viol_a, obj_b, viol_b):
    """Feasibility-first comparison: feasible beats infeasible, then lower
    objective among feasible, lower total violation among infeasible."""
    feas_a = viol_a <= 0.0
    feas_b = viol_b <= 0.0
    both_feas = feas_a & feas_b
    return np.where(
        feas_a != feas_b, feas_a, np.where(both_feas, obj_a < obj_b, viol_a < viol_b)
    )


def ga_minimize(problem: BoxProblem, settings: SolverSettings | None = None, seed=None) -> np.ndarray:
    """Real-coded GA over the box; returns the best point ever evaluated under
    feasibility-first ranking. Deterministic for a fixed seed."""
    s = settings if settings is not None else SolverSettings()
    rng = np.random.default_rng(s.seed if seed is None else seed)
    lower, upper = problem.box.lower, problem.box.upper
    m = lower.size
    width = upper - lower

    def evaluate(pts):
        obj = _eval_objective(problem, pts)
        g = _eval_constraints(problem, pts)
        viol = np.clip(g, 0.0, None).sum(axis=1) if g.size else np.zeros(len(pts))
        return obj, viol

    pop = lower + rng.random((s.population, m)) * width
    obj, viol = evaluate(pop)

    def pop_best_index(o, v):
        feasible = v <= 0.0
        if feasible.any():
            masked = np.where(feasible, o, np.inf)
            return int(np.argmin(masked))
        return int(np.argmin(v))

    idx = pop_best_index(obj, viol)
    best_x, best_obj, best_viol = pop[idx].copy(), obj[idx], viol[idx]

    n_children = s.population - s.elite
    for _ in range(s.generations):
        def tournament():
            entries = rng.integers(0, s.population, size=(s.tournament_size, n_children))
            winners = entries[0]
            for row in entries[1:]:
                take = _beats(obj[row], viol[row], obj[winners], viol[winners])
                winners = np.where(take, row, winners)
            return winners

        parents_a = pop[tournament()]
        parents_b = pop[tournament()]
        span = np.abs(parents_a - parents_b)
        blend_lo = np.minimum(parents_a, parents_b) - s.blend_alpha * span
        blend_hi = np.maximum(parents_a, parents_b) + s.blend_alpha * span
        blended = blend_lo + rng.random((n_children, m)) * (blend_hi - blend_lo)
        do_cross = rng.random(n_children) < s.crossover_rate
        children = np.where(do_cross[:, None], blended, parents_a)

        mutate = rng.random((n_children, m)) < 1.0 / m
        noise = rng.normal(0.0, 1.0, (n_children, m)) * (s.mutation_sigma * width)
        children = np.clip(children + mutate * noise, lower, upper)

        elite_idx = pop_best_index(obj, viol)
        pop = np.vstack([pop[elite_idx][None, :].repeat(s.elite, axis=0), children])
        obj, viol = evaluate(pop)

        idx = pop_best_index(obj, viol)
        if bool(_beats(obj[idx], viol[idx], best_obj, best_viol)):
            best_x, best_obj, best_viol = pop[idx].copy(), obj[idx], viol[idx]

    return np.clip(best_x, lower, upper)


def _fd_gradient(phi_batch, x: np.ndarray, lower: np.ndarray, upper: np.ndarray, h: float) -> np.ndarray:
    """Central finite differences, degrading to one-sided at box faces."""
    m = x.size
    room_up = np.minimum(h, upper - x)
    room_down = np.minimum(h, x - lower)
    plus = np.repeat(x[None, :], m, axis=0)
    minus = plus.copy()
    plus[np.arange(m), np.arange(m)] += room_up
    minus[np.arange(m), np.arange(m)] -= room_down
    denom = room_up + room_down
    grad = np.zeros(m)
    usable = denom > 0.0
    if usable.any():
        f_plus = phi_batch(plus[usable])
        f_minus = phi_batch(minus[usable])
        grad[usable] = (f_plus - f_minus) / denom[usable]
    return grad


def _sqp_polish(problem: BoxProblem, x: np.ndarray, settings: SolverSettings) -> np.ndarray | None:
    """Run SLSQP on the constrained problem from x; None on failure.

    The penalty steepens the descent surface by penalty_weight * m along
    active constraints, which stalls plain gradient steps; a proper SQP step
    does not suffer from that.
    """
    lower, upper = problem.box.lower, problem.box.upper

    def objective(pt):
        return float(_eval_objective(problem, np.asarray(pt, dtype=float)[None, :])[0])

    constraints = [
        {"type": "ineq", "fun": (lambda pt, g=g: -float(_scalar_constraint(problem, g, pt)))}
        for g in problem.constraints
    ]
    try:
        with warnings.catch_warnings():
            # SLSQP warns when roundoff pushes iterates marginally past a bound
            warnings.simplefilter("ignore", RuntimeWarning)
            result = scipy_minimize(
                objective,
                x0=x.copy(),
                method="SLSQP",
                bounds=list(zip(lower, upper)),
                constraints=constraints,
                options={"maxiter": settings.max_local_iters, "ftol": 1e-12},
            )
    except (ValueError, FloatingPointError):
        return None
    if not np.isfinite(result.x).all():
        return None
    return np.clip(result.x, lower, upper)


def _scalar_constraint(problem: BoxProblem, g: Callable, pt) -> float:
    pts = np.asarray(pt, dtype=float)[None, :]
    if problem.vectorized:
        return float(np.asarray(g(pts), dtype=float).reshape(1)[0])
    return float(g(pts[0]))


def local_minimize(problem: BoxProblem, start, settings: SolverSettings | None = None) -> np.ndarray:
    """Descend the penalized objective from a given start point.

    Projected-gradient descent with a backtracking Armijo line search, then an
    SQP polish that is kept only when it improves the penalized value. The
    result stays inside the box and never has a worse penalized value than the
    start.
    """
    s = settings if settings is not None else SolverSettings()
    lower, upper = problem.box.lower, problem.box.upper
    x = np.clip(np.asarray(start, dtype=float), lower, upper)
    if x.shape != lower.shape:
        raise ValueError("start point dimension does not match the box")
    weight = s.penalty_weight

    def phi_batch(pts):
        return _penalized_batch(problem, pts, weight)

    f_x = float(phi_batch(x[None, :])[0])
    trial_step = 1.0
    for _ in range(s.max_local_iters):
        grad = _fd_gradient(phi_batch, x, lower, upper, s.fd_step)
        if np.linalg.norm(grad) < _GRAD_TOL:
            break
        t = trial_step
        accepted = False
        for _ in range(_MAX_BACKTRACKS):
            candidate = np.clip(x - t * grad, lower, upper)
            move = candidate - x
            slope = min(float(grad @ move), 0.0)
            f_candidate = float(phi_batch(candidate[None, :])[0])
            if f_candidate <= f_x + _ARMIJO * slope:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            break
        moved = float(np.linalg.norm(candidate - x))
        x, f_x = candidate, f_candidate
        trial_step = min(t * 2.0, 1e6)
        if moved < _STEP_TOL:
            break

    polished = _sqp_polish(problem, x, s)
    if polished is not None:
        f_polished = float(phi_batch(polished[None, :])[0])
        if np.isfinite(f_polished) and f_polished < f_x:
            return polished
    return x


def candidate_search(score: Callable, candidates: Sequence, batch: bool = False) -> np.ndarray:
    """Return the candidate with the lowest score; ties go to the lowest index.

    With batch=True the score callable receives the full (k, m) candidate
    array and must return k scores.
    """
    pts = np.atleast_2d(np.asarray(candidates, dtype=float))
    if pts.size == 0:
        raise ValueError("candidate list is empty")
    if batch:
        values = np.asarray(score(pts), dtype=float).ravel()
        if values.size != pts.shape[0]:
            raise ValueError("batch score returned the wrong number of values")
    else:
        values = np.array([float(score(p)) for p in pts])
    if not np.isfinite(values).all():
        raise ValueError("score returned a non-finite value")
    return pts[int(np.argmin(values))].copy()
