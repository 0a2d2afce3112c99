"""Box-bounded design spaces: unit-cube normalization, Latin hypercube sampling,
and the minimum-distance computation used by the space-filling infill rule."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Slack allowed outside the box before normalize() rejects, relative to each range.
_BOUNDS_RTOL = 1e-9
# Slack allowed on unit coordinates before denormalize() rejects.
_UNIT_TOL = 1e-12


@dataclass(frozen=True)
class DesignSpace:
    """Axis-aligned box, lower[i] < upper[i] elementwise."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self) -> None:
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if lower.ndim != 1 or upper.shape != lower.shape or lower.size == 0:
            raise ValueError("bounds must be 1-D vectors of equal nonzero length")
        if not (np.isfinite(lower).all() and np.isfinite(upper).all()):
            raise ValueError("bounds must be finite")
        if not (lower < upper).all():
            raise ValueError("every lower bound must lie strictly below its upper bound")

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def widths(self) -> np.ndarray:
        return self.upper - self.lower


def normalize(x, space: DesignSpace) -> np.ndarray:
    """Map a point in problem units onto the unit cube.

    Inputs slightly outside the box (within 1e-9 of each range) are clipped;
    anything further out is rejected.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != space.lower.shape:
        raise ValueError(f"point has shape {x.shape}, expected {space.lower.shape}")
    tol = _BOUNDS_RTOL * space.widths
    if (x < space.lower - tol).any() or (x > space.upper + tol).any():
        raise ValueError("point lies outside the design space")
    return np.clip((x - space.lower) / space.widths, 0.0, 1.0)


def denormalize(u, space: DesignSpace) -> np.ndarray:
    """Map unit-cube coordinates back to problem units (inverse of normalize)."""
    u = np.asarray(u, dtype=float)
    if u.shape != space.lower.shape:
        raise ValueError(f"point has shape {u.shape}, expected {space.lower.shape}")
    if (u < -_UNIT_TOL).any() or (u > 1.0 + _UNIT_TOL).any():
        raise ValueError("unit coordinates must lie in [0, 1]")
    return space.lower + np.clip(u, 0.0, 1.0) * space.widths


def lhs_sample(n: int, m: int, seed=None, jitter: bool = True) -> np.ndarray:
    """Latin hypercube sample of n points in [0, 1]^m, shape (n, m).

    Each dimension gets one point per equal-width stratum via a random
    permutation. Points sit at stratum centers; with jitter on (default) they
    are displaced uniformly within their stratum. Deterministic for a fixed
    seed.
    """
    if n < 1:
        raise ValueError("need at least one sample")
    if m < 1:
        raise ValueError("dimension must be at least 1")
    rng = np.random.default_rng(seed)
    points = np.empty((n, m))
    for j in range(m):
        strata = rng.permutation(n)
        offsets = rng.random(n) if jitter else np.full(n, 0.5)
        points[:, j] = (strata + offsets) / n
    return points


def min_distance(x, points) -> float:
    """Smallest Euclidean distance from x to any row of points (unit coordinates)."""
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        raise ValueError("point set is empty")
    pts = np.atleast_2d(pts)
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or pts.shape[1] != x.size:
        raise ValueError("dimension mismatch between point and set")
    diff = pts - x
    return float(np.sqrt(np.einsum("ij,ij->i", diff, diff).min()))
