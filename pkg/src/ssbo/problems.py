"""Closed-form benchmark problems behind a counting black-box interface.

Custom expensive models plug in the same way: construct a ProblemSpec with
your own evaluate callable (raw point -> (objective, constraint vector)).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .space import DesignSpace

BUILTIN_PROBLEMS = ("forrester", "constrained2d", "welded_plate")

# Provenance of best-known values: reported in the benchmark literature vs
# derived here by dense search.
SOURCE_LITERATURE = "literature"
SOURCE_GRID = "grid-search"


@dataclass(frozen=True)
class ProblemSpec:
    """Black-box problem: bounds, constraint count and a deterministic evaluator."""

    name: str
    bounds: DesignSpace
    n_constraints: int
    evaluate: Callable[[np.ndarray], tuple[float, np.ndarray]]
    best_known: float | None = None
    best_known_source: str | None = None

    @property
    def dim(self) -> int:
        return self.bounds.dim


class CountingEvaluator:
    """Wraps a ProblemSpec and counts evaluate calls (exact under concurrency)."""

    def __init__(self, problem: ProblemSpec):
        self.problem = problem
        self._count = 0
        self._lock = threading.Lock()

    @property
    def count(self) -> int:
        return self._count

    def evaluate(self, x) -> tuple[float, np.ndarray]:
        with self._lock:
            self._count += 1
        return self.problem.evaluate(x)


def forrester_alpha(x, alpha: float = 0.0):
    """Multi-peak 1-D test function (6x-2)^2 sin(12x-4) cos(alpha (x-1)^2).

    alpha controls the oscillation; alpha = 0 gives the classic two-term form.
    Accepts scalars or arrays.
    """
    x = np.asarray(x, dtype=float)
    base = 6.0 * x - 2.0
    value = base * base * np.sin(12.0 * x - 4.0) * np.cos(alpha * np.square(x - 1.0))
    return float(value) if value.ndim == 0 else value


def constrained_2d(x) -> tuple[float, np.ndarray]:
    """Linear objective with three nonlinear inequality constraints on [0, 10]^2."""
    x1, x2 = float(x[0]), float(x[1])
    objective = x1 + x2
    g = np.array([
        1.0 - x1 * x1 * x2 / 20.0,
        1.0 - (x1 + x2 - 5.0) ** 2 / 30.0 - (x1 - x2 - 12.0) ** 2 / 120.0,
        1.0 - 80.0 / (x1 * x1 + 8.0 * x2 + 5.0),
    ])
    return objective, g


@dataclass(frozen=True)
class WeldedPlateConstants:
    """Cost coefficients, load case and material limits for the welded plate."""

    cost_weld: float = 6.739e-5
    cost_plate: float = 2.936e-6
    length: float = 500.0            # mm, load arm
    load: float = 10000.0            # N
    shear_modulus: float = 82680.0   # MPa
    e_modulus: float = 2.0e5         # MPa
    stress_limit: float = 210.0      # MPa
    shear_limit: float = 70.0        # MPa
    deflection_limit: float = 5.0    # mm

    def __post_init__(self) -> None:
        values = (self.cost_weld, self.cost_plate, self.length, self.load,
                  self.shear_modulus, self.e_modulus, self.stress_limit,
                  self.shear_limit, self.deflection_limit)
        if any(v <= 0.0 for v in values):
            raise ValueError("all welded-plate constants must be positive")


DEFAULT_WELDED_CONSTANTS = WeldedPlateConstants()

WELDED_PLATE_BOUNDS = DesignSpace(
    lower=np.array([100.0, 2.0, 100.0, 5.0]),   # s, t, h, b in mm
    upper=np.array([500.0, 6.0, 500.0, 10.0]),
)


def welded_plate(x, constants: WeldedPlateConstants = DEFAULT_WELDED_CONSTANTS) -> tuple[float, np.ndarray]:
    """Welded plate design: cost objective and five constraints.

    x = [s, t, h, b]: weld length, weld thickness, plate height, plate
    thickness (mm). Constraints: bending stress, shear stress, deflection,
    buckling-load ratio, weld/plate thickness ratio (feasible iff <= 0).
    """
    s, t, h, b = (float(v) for v in x)
    k = constants
    length, load = k.length, k.load

    cost = k.cost_weld * s * t * t + k.cost_plate * (length + s) * h * b

    bending_stress = 6.0 * load * length / (b * h * h)

    moment = load * (length + 0.5 * s)
    radius = math.sqrt(0.25 * s * s + 0.25 * (t + h) ** 2)
    polar_term = 2.0 * math.sqrt(2.0) * t * s * (s * s / 12.0 + 0.25 * (t + h) ** 2)
    direct_shear = load / (math.sqrt(2.0) * t * s)
    torsional_shear = moment * radius / polar_term
    shear_stress = math.sqrt(
        direct_shear ** 2 + torsional_shear ** 2 + direct_shear * torsional_shear * s / radius
    )

    deflection = 4.0 * load * length ** 3 * b / (k.e_modulus * h ** 3)

    buckling_scale = math.sqrt(k.e_modulus * k.shear_modulus * h * h * b ** 6 / 36.0)
    buckling_knockdown = 1.0 - 0.25 * h / length * math.sqrt(k.e_modulus / k.shear_modulus)
    buckling_load = 4.013 * buckling_scale * buckling_knockdown / length ** 2

    g = np.array([
        bending_stress - k.stress_limit,
        shear_stress - k.shear_limit,
        deflection - k.deflection_limit,
        1.0 - buckling_load / load,
        t / b - 1.0,
    ])
    return cost, g


def _forrester_best(alpha: float) -> tuple[float, str]:
    if alpha == 512.0:
        return -8.8988, SOURCE_LITERATURE
    grid = np.linspace(0.0, 1.0, 100001)
    return float(forrester_alpha(grid, alpha).min()), SOURCE_GRID


def make_problem(name: str, **params) -> ProblemSpec:
    """Build a built-in ProblemSpec by name.

    forrester takes alpha (default 0); welded_plate takes e_modulus (default
    2e5 MPa). Unknown names or parameters are rejected.
    """
    if name == "forrester":
        alpha = float(params.pop("alpha", 0.0))
        _reject_extra(name, params)
        best, source = _forrester_best(alpha)
        return ProblemSpec(
            name=f"forrester(alpha={alpha:g})",
            bounds=DesignSpace(np.array([0.0]), np.array([1.0])),
            n_constraints=0,
            evaluate=lambda x, a=alpha: (float(forrester_alpha(float(x[0]), a)), np.empty(0)),
            best_known=best,
            best_known_source=source,
        )
    if name == "constrained2d":
        _reject_extra(name, params)
        return ProblemSpec(
            name="constrained2d",
            bounds=DesignSpace(np.zeros(2), np.full(2, 10.0)),
            n_constraints=3,
            evaluate=constrained_2d,
            best_known=5.1768,
            best_known_source=SOURCE_LITERATURE,
        )
    if name == "welded_plate":
        e_modulus = float(params.pop("e_modulus", DEFAULT_WELDED_CONSTANTS.e_modulus))
        _reject_extra(name, params)
        constants = WeldedPlateConstants(e_modulus=e_modulus)
        return ProblemSpec(
            name="welded_plate",
            bounds=WELDED_PLATE_BOUNDS,
            n_constraints=5,
            evaluate=lambda x, k=constants: welded_plate(x, k),
            best_known=2.6143,
            best_known_source=SOURCE_LITERATURE,
        )
    raise ValueError(f"unknown problem {name!r}; built-ins: {', '.join(BUILTIN_PROBLEMS)}")


def _reject_extra(name: str, params: dict) -> None:
    if params:
        raise ValueError(f"unknown parameters for {name!r}: {', '.join(sorted(params))}")
