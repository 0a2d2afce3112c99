"""Tests for the benchmark problems and the counting evaluator."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from ssbo.problems import (
    BUILTIN_PROBLEMS,
    CountingEvaluator,
    WeldedPlateConstants,
    constrained_2d,
    forrester_alpha,
    make_problem,
    welded_plate,
)


class TestForrester:
    def test_zero_at_one_third(self):
        for alpha in (0.0, 5.0, 512.0):
            assert forrester_alpha(1.0 / 3.0, alpha) == pytest.approx(0.0, abs=1e-12)

    def test_value_at_origin(self):
        # 4 sin(-4) cos(0)
        assert forrester_alpha(0.0, 0.0) == pytest.approx(4.0 * math.sin(-4.0), rel=1e-12)
        assert forrester_alpha(0.0, 0.0) == pytest.approx(3.027209981231713, rel=1e-9)

    def test_alpha_zero_reduces_to_two_term_form(self):
        xs = np.linspace(0.0, 1.0, 101)
        expected = (6 * xs - 2) ** 2 * np.sin(12 * xs - 4)
        np.testing.assert_allclose(forrester_alpha(xs, 0.0), expected, rtol=1e-14)

    def test_accepts_arrays(self):
        values = forrester_alpha(np.array([0.0, 0.5, 1.0]), 64.0)
        assert values.shape == (3,)


class TestConstrained2d:
    def test_values_at_origin(self):
        objective, g = constrained_2d(np.zeros(2))
        assert objective == 0.0
        assert g[0] == pytest.approx(1.0)
        assert g[1] == pytest.approx(1.0 - 25.0 / 30.0 - 144.0 / 120.0)
        assert g[2] == pytest.approx(1.0 - 16.0)

    def test_first_constraint_boundary_identity(self):
        # any point with x1^2 x2 = 20 sits exactly on the first boundary
        for x1 in (1.0, 2.0, 4.0):
            x2 = 20.0 / x1**2
            _, g = constrained_2d(np.array([x1, x2]))
            assert g[0] == pytest.approx(0.0, abs=1e-12)

    def test_best_feasible_near_reported_value(self):
        grid = np.linspace(0.0, 10.0, 2001)
        xx, yy = np.meshgrid(grid, grid, indexing="ij")
        g1 = 1.0 - xx**2 * yy / 20.0
        g2 = 1.0 - (xx + yy - 5.0) ** 2 / 30.0 - (xx - yy - 12.0) ** 2 / 120.0
        g3 = 1.0 - 80.0 / (xx**2 + 8.0 * yy + 5.0)
        feasible = (g1 <= 0.0) & (g2 <= 0.0) & (g3 <= 0.0)
        best = float(np.where(feasible, xx + yy, np.inf).min())
        assert best == pytest.approx(5.1768, abs=0.01)


def _welded_reference(x, k: WeldedPlateConstants):
    # independent transcription: vectorized numpy with different grouping
    s, t, h, b = np.asarray(x, dtype=float)
    th = t + h
    cost = k.cost_weld * s * t**2 + k.cost_plate * (k.length + s) * h * b
    sigma = 6.0 * k.load * k.length * b**-1.0 * h**-2.0
    m_arm = k.load * (k.length + 0.5 * s)
    r_val = np.sqrt(0.25 * (s**2 + th**2))
    j_val = 2.0 * np.sqrt(2.0) * t * s * (s**2 / 12.0 + 0.25 * th**2)
    t1 = k.load * (np.sqrt(2.0) * t * s) ** -1.0
    t2 = m_arm * r_val * j_val**-1.0
    tau = np.sqrt(t1**2 + t2**2 + t1 * t2 * s * r_val**-1.0)
    delta = 4.0 * k.load * k.length**3 * b * k.e_modulus**-1.0 * h**-3.0
    t3 = np.sqrt(k.e_modulus * k.shear_modulus * h**2 * b**6 / 36.0)
    t4 = 1.0 - 0.25 * h * k.length**-1.0 * np.sqrt(k.e_modulus * k.shear_modulus**-1.0)
    p_c = 4.013 * t3 * t4 * k.length**-2.0
    g = np.array([
        sigma - k.stress_limit,
        tau - k.shear_limit,
        delta - k.deflection_limit,
        1.0 - p_c * k.load**-1.0,
        t * b**-1.0 - 1.0,
    ])
    return float(cost), g


class TestWeldedPlate:
    def test_thickness_ratio_boundary(self):
        _, g = welded_plate(np.array([200.0, 5.5, 300.0, 5.5]))
        assert g[4] == pytest.approx(0.0, abs=1e-15)

    def test_reference_point_cost(self):
        cost, g = welded_plate(np.array([200.0, 4.0, 300.0, 6.0]))
        assert cost == pytest.approx(6.739e-5 * 200 * 16 + 2.936e-6 * 700 * 1800, rel=1e-12)
        ref_cost, ref_g = _welded_reference(np.array([200.0, 4.0, 300.0, 6.0]), WeldedPlateConstants())
        assert cost == pytest.approx(ref_cost, rel=1e-12)
        np.testing.assert_allclose(g, ref_g, rtol=1e-9)

    def test_matches_independent_transcription_everywhere(self):
        constants = WeldedPlateConstants()
        bounds_lo = np.array([100.0, 2.0, 100.0, 5.0])
        bounds_hi = np.array([500.0, 6.0, 500.0, 10.0])
        rng = np.random.default_rng(61)
        for _ in range(1000):
            x = bounds_lo + rng.random(4) * (bounds_hi - bounds_lo)
            cost, g = welded_plate(x, constants)
            ref_cost, ref_g = _welded_reference(x, constants)
            assert cost == pytest.approx(ref_cost, rel=1e-9)
            np.testing.assert_allclose(g, ref_g, rtol=1e-9, atol=1e-9)

    def test_constants_validated(self):
        with pytest.raises(ValueError):
            WeldedPlateConstants(load=-1.0)


class TestMakeProblem:
    def test_forrester_alpha_512(self):
        problem = make_problem("forrester", alpha=512.0)
        assert problem.dim == 1
        assert problem.n_constraints == 0
        assert problem.best_known == pytest.approx(-8.8988)
        assert problem.best_known_source == "literature"

    def test_forrester_alpha_zero_grid_derived(self):
        problem = make_problem("forrester")
        assert problem.best_known == pytest.approx(-6.0207, abs=1e-3)
        assert problem.best_known_source == "grid-search"

    def test_constrained2d_fields(self):
        problem = make_problem("constrained2d")
        assert problem.dim == 2
        assert problem.n_constraints == 3
        np.testing.assert_array_equal(problem.bounds.lower, [0.0, 0.0])
        np.testing.assert_array_equal(problem.bounds.upper, [10.0, 10.0])
        assert problem.best_known == pytest.approx(5.1768)

    def test_welded_plate_fields(self):
        problem = make_problem("welded_plate")
        assert problem.dim == 4
        assert problem.n_constraints == 5

    def test_unknown_name_rejected(self):
        with pytest.raises(ValueError, match="unknown problem"):
            make_problem("rosenbrock")

    def test_unknown_parameter_rejected(self):
        with pytest.raises(ValueError, match="unknown parameters"):
            make_problem("constrained2d", alpha=1.0)

    def test_builtins_all_constructible(self):
        for name in BUILTIN_PROBLEMS:
            problem = make_problem(name)
            x = (problem.bounds.lower + problem.bounds.upper) / 2.0
            objective, g = problem.evaluate(x)
            assert np.isfinite(objective)
            assert g.shape == (problem.n_constraints,)


class TestCountingEvaluator:
    def test_counts_each_call(self):
        counter = CountingEvaluator(make_problem("constrained2d"))
        for _ in range(5):
            counter.evaluate(np.array([1.0, 1.0]))
        assert counter.count == 5

    def test_exact_under_concurrency(self):
        counter = CountingEvaluator(make_problem("constrained2d"))

        def worker(_):
            for _ in range(100):
                counter.evaluate(np.array([2.0, 2.0]))

        with ThreadPoolExecutor(max_workers=8) as pool:
            list(pool.map(worker, range(8)))
        assert counter.count == 800
