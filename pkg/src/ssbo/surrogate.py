"""Radial basis function interpolation with leave-one-out tuned shape parameters.

Models interpolate exactly (F beta = y); a diagonal ridge is added only when
the system is badly conditioned, and the amount actually applied is recorded
on the model.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve
from scipy.linalg.lapack import dgecon
from scipy.spatial.distance import cdist, pdist

CONDITION_LIMIT = 1e12
RIDGE_SCALE = 1e-10
DUPLICATE_TOL = 1e-12

# Shape-parameter search grid: 30 log-spaced values, then golden-section
# refinement of the winning cell down to 1/1000 of the cell width.
SHAPE_GRID = np.logspace(-2.0, 2.0, 30)
_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


class KernelKind(enum.Enum):
    GAUSSIAN = "gaussian"
    MULTIQUADRIC = "multiquadric"
    INVERSE_MULTIQUADRIC = "inverse-multiquadric"
    THIN_PLATE = "thin-plate"


def kernel_value(kernel: KernelKind, r, c: float):
    """Evaluate the radial basis f(r) for shape parameter c; r may be an array."""
    r2 = np.square(r)
    if kernel is KernelKind.GAUSSIAN:
        return np.exp(-c * r2)
    if kernel is KernelKind.MULTIQUADRIC:
        return np.sqrt(1.0 + c * r2)
    if kernel is KernelKind.INVERSE_MULTIQUADRIC:
        return 1.0 / np.sqrt(1.0 + c * r2)
    if kernel is KernelKind.THIN_PLATE:
        return r2 * np.log1p(c * r2)
    raise ValueError(f"unknown kernel {kernel!r}")


@dataclass(frozen=True)
class RbfModel:
    """Fitted interpolant: prediction is kernel_value(||x - X_i||) dotted with beta."""

    kernel: KernelKind
    c: float
    X: np.ndarray       # (n, m) training inputs, unit-cube coordinates
    beta: np.ndarray    # (n,) coefficients
    ridge: float = 0.0  # diagonal regularization actually applied, 0 if none

    @property
    def n_train(self) -> int:
        return self.X.shape[0]

    @property
    def dim(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class SurrogateBundle:
    """One objective model plus one model per constraint, sharing training inputs."""

    objective: RbfModel
    constraints: tuple[RbfModel, ...] = ()


def _check_training_data(inputs, responses) -> tuple[np.ndarray, np.ndarray]:
    X = np.atleast_2d(np.asarray(inputs, dtype=float))
    y = np.asarray(responses, dtype=float).ravel()
    if X.shape[0] != y.size:
        raise ValueError(f"{X.shape[0]} inputs but {y.size} responses")
    if not np.isfinite(X).all():
        raise ValueError("non-finite training inputs")
    if not np.isfinite(y).all():
        raise ValueError("non-finite training responses")
    if X.shape[0] > 1 and pdist(X).min() <= DUPLICATE_TOL:
        raise ValueError("duplicate training inputs")
    return X, y


def _factor_system(F: np.ndarray):
    """LU-factor F, adding a diagonal ridge when badly conditioned.

    Returns (lu_and_piv, ridge). Raises ValueError if singular even with ridge.
    """
    anorm = np.linalg.norm(F, 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu = lu_factor(F)
        rcond = dgecon(lu[0], anorm)[0]
        if np.isfinite(rcond) and rcond > 0.0 and 1.0 / rcond <= CONDITION_LIMIT:
            return lu, 0.0
        ridge = RIDGE_SCALE * float(np.mean(np.diag(F)))
        if ridge <= 0.0:
            # thin-plate kernels have a zero diagonal; fall back to the mean magnitude
            ridge = RIDGE_SCALE * (float(np.mean(np.abs(F))) + 1.0)
        lu = lu_factor(F + ridge * np.eye(F.shape[0]))
        rcond = dgecon(lu[0], anorm)[0]
    if not np.isfinite(rcond) or rcond <= 0.0:
        raise ValueError("interpolation matrix is singular even with ridge")
    return lu, ridge


def fit(inputs, responses, kernel: KernelKind, c: float) -> RbfModel:
    """Solve the interpolation system for the coefficient vector."""
    if not np.isfinite(c) or c <= 0.0:
        raise ValueError("shape parameter must be positive and finite")
    X, y = _check_training_data(inputs, responses)
    F = kernel_value(kernel, cdist(X, X), c)
    lu, ridge = _factor_system(F)
    beta = lu_solve(lu, y)
    if not np.isfinite(beta).all():
        raise ValueError("interpolation system could not be solved")
    return RbfModel(kernel=kernel, c=float(c), X=X.copy(), beta=beta, ridge=ridge)


def predict(model: RbfModel, x):
    """Evaluate the interpolant at one point (m,) or a batch (k, m)."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    if pts.shape[1] != model.dim:
        raise ValueError(f"point dimension {pts.shape[1]} does not match model dimension {model.dim}")
    values = kernel_value(model.kernel, cdist(pts, model.X), model.c) @ model.beta
    return float(values[0]) if single else values


def _loocv_from_distances(D: np.ndarray, y: np.ndarray, kernel: KernelKind, c: float) -> float:
    """Sum of squared leave-one-out residuals via one factorization.

    For the symmetric interpolation matrix A the held-out residual is
    beta_i / (A^{-1})_{ii}; falls back to literal refits if that is
    numerically unusable.
    """
    F = kernel_value(kernel, D, c)
    try:
        lu, _ = _factor_system(F)
        beta = lu_solve(lu, y)
        inv_diag = np.diag(lu_solve(lu, np.eye(F.shape[0])))
        if np.isfinite(beta).all() and np.isfinite(inv_diag).all() and (inv_diag != 0.0).all():
            residuals = beta / inv_diag
            total = float(residuals @ residuals)
            if np.isfinite(total):
                return total
    except ValueError:
        pass
    return _loocv_by_refit(D, y, kernel, c)


def _loocv_by_refit(D: np.ndarray, y: np.ndarray, kernel: KernelKind, c: float) -> float:
    n = y.size
    F = kernel_value(kernel, D, c)
    total = 0.0
    for i in range(n):
        keep = np.arange(n) != i
        sub = F[np.ix_(keep, keep)]
        lu, _ = _factor_system(sub)
        beta = lu_solve(lu, y[keep])
        held_out = float(F[i, keep] @ beta)
        total += (y[i] - held_out) ** 2
    return total


def loocv_error(inputs, responses, kernel: KernelKind, c: float) -> float:
    """Leave-one-out cross-validation error: sum over samples of the squared
    residual between each response and the prediction of a model fit without it."""
    if not np.isfinite(c) or c <= 0.0:
        raise ValueError("shape parameter must be positive and finite")
    X, y = _check_training_data(inputs, responses)
    if X.shape[0] < 2:
        raise ValueError("leave-one-out validation needs at least two samples")
    return _loocv_from_distances(cdist(X, X), y, kernel, c)


def tune_shape(inputs, responses, kernel: KernelKind) -> float:
    """Pick the shape parameter minimizing the leave-one-out error.

    Scans the fixed log grid, then golden-section refines inside the cell
    around the best grid value (three further digits in log space). The
    returned value never loses to any grid value.
    """
    X, y = _check_training_data(inputs, responses)
    if X.shape[0] < 2:
        raise ValueError("shape tuning needs at least two samples")
    D = cdist(X, X)

    def objective(log_c: float) -> float:
        try:
            err = _loocv_from_distances(D, y, kernel, 10.0 ** log_c)
        except ValueError:
            return np.inf
        return err if np.isfinite(err) else np.inf

    logs = np.log10(SHAPE_GRID)
    values = np.array([objective(lc) for lc in logs])
    best_idx = int(np.argmin(values))
    best_log, best_val = logs[best_idx], values[best_idx]
    if not np.isfinite(best_val):
        raise ValueError("no usable shape parameter on the search grid")

    lo = logs[max(best_idx - 1, 0)]
    hi = logs[min(best_idx + 1, logs.size - 1)]
    tol = (logs[1] - logs[0]) / 1000.0
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = objective(x1), objective(x2)
    while hi - lo > tol:
        for lx, fx in ((x1, f1), (x2, f2)):
            if fx < best_val:
                best_log, best_val = lx, fx
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = objective(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = objective(x2)
    for lx, fx in ((x1, f1), (x2, f2)):
        if fx < best_val:
            best_log, best_val = lx, fx
    return float(10.0 ** best_log)


def build_bundle(sample_set, kernel: KernelKind, tune: bool = True) -> SurrogateBundle:
    """Fit the objective model and one model per constraint component.

    Each model gets its own tuned shape parameter; with a single sample
    (tuning impossible) or tuning disabled, c defaults to 1.
    """
    X = sample_set.unit_inputs()
    y = sample_set.objective_values()
    G = sample_set.constraint_values()
    n = X.shape[0]

    def fit_one(values: np.ndarray) -> RbfModel:
        c = tune_shape(X, values, kernel) if tune and n >= 2 else 1.0
        return fit(X, values, kernel, c)

    objective = fit_one(y)
    constraints = tuple(fit_one(G[:, j]) for j in range(G.shape[1]))
    return SurrogateBundle(objective=objective, constraints=constraints)
