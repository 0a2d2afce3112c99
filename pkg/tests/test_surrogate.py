"""Tests for RBF fitting, prediction, leave-one-out error and shape tuning."""

from __future__ import annotations

import math

import numpy as np
import pytest

from ssbo.problems import forrester_alpha
from ssbo.surrogate import (
    SHAPE_GRID,
    KernelKind,
    build_bundle,
    fit,
    kernel_value,
    loocv_error,
    predict,
    tune_shape,
)

ALL_KERNELS = list(KernelKind)


def _scalar_kernel(kind: KernelKind, r: float, c: float) -> float:
    # independent straight-line transcription of the four basis functions
    if kind is KernelKind.GAUSSIAN:
        return math.exp(-c * r * r)
    if kind is KernelKind.MULTIQUADRIC:
        return (1.0 + c * r * r) ** 0.5
    if kind is KernelKind.INVERSE_MULTIQUADRIC:
        return (1.0 + c * r * r) ** -0.5
    return r * r * math.log(1.0 + c * r * r)


class TestKernels:
    @pytest.mark.parametrize("kind", ALL_KERNELS)
    @pytest.mark.parametrize("r", [0.0, 0.5, 1.0, 2.0])
    @pytest.mark.parametrize("c", [0.1, 1.0, 10.0])
    def test_pointwise_values(self, kind, r, c):
        assert kernel_value(kind, r, c) == pytest.approx(_scalar_kernel(kind, r, c), rel=1e-14)

    def test_value_at_zero_radius(self):
        for kind in ALL_KERNELS:
            expected = 0.0 if kind is KernelKind.THIN_PLATE else 1.0
            assert kernel_value(kind, 0.0, 2.0) == expected


class TestFit:
    def test_single_sample_gaussian(self):
        model = fit(np.array([[0.4]]), np.array([2.5]), KernelKind.GAUSSIAN, 1.0)
        assert model.beta == pytest.approx(np.array([2.5]))
        assert predict(model, np.array([0.4])) == pytest.approx(2.5)

    @pytest.mark.parametrize("kind", ALL_KERNELS)
    def test_interpolates_training_points(self, kind):
        rng = np.random.default_rng(5)
        X = rng.random((5, 1))
        y = rng.normal(size=5)
        model = fit(X, y, kind, 2.0)
        assert model.ridge == 0.0
        np.testing.assert_allclose(predict(model, X), y, atol=1e-6 * (1 + np.abs(y).max()))

    def test_duplicate_inputs_rejected(self):
        X = np.array([[0.2, 0.3], [0.2, 0.3], [0.8, 0.1]])
        with pytest.raises(ValueError, match="duplicate"):
            fit(X, np.arange(3.0), KernelKind.GAUSSIAN, 1.0)

    def test_non_finite_responses_rejected(self):
        with pytest.raises(ValueError):
            fit(np.array([[0.1], [0.9]]), np.array([1.0, np.nan]), KernelKind.GAUSSIAN, 1.0)

    def test_non_positive_shape_rejected(self):
        with pytest.raises(ValueError):
            fit(np.array([[0.1], [0.9]]), np.array([1.0, 2.0]), KernelKind.GAUSSIAN, 0.0)


class TestPredict:
    def test_constant_data_reproduced(self):
        rng = np.random.default_rng(9)
        X = rng.random((6, 2))
        model = fit(X, np.full(6, 3.0), KernelKind.MULTIQUADRIC, 1.5)
        np.testing.assert_allclose(predict(model, X), 3.0, atol=1e-6)

    def test_matches_independent_linear_solve(self):
        # independent oracle: explicit loops building the collocation matrix,
        # numpy-only solve, scalar kernel evaluation
        rng = np.random.default_rng(21)
        X = rng.random((20, 1))
        y = forrester_alpha(X.ravel(), 0.0)
        c = 300.0  # narrow kernel keeps the system well conditioned (~1e5)
        model = fit(X, y, KernelKind.GAUSSIAN, c)

        n = len(X)
        F = np.empty((n, n))
        for i in range(n):
            for j in range(n):
                F[i, j] = _scalar_kernel(KernelKind.GAUSSIAN, abs(X[i, 0] - X[j, 0]), c)
        beta = np.linalg.solve(F, y)

        queries = rng.random(50)
        for q in queries:
            expected = sum(
                beta[i] * _scalar_kernel(KernelKind.GAUSSIAN, abs(q - X[i, 0]), c)
                for i in range(n)
            )
            assert predict(model, np.array([q])) == pytest.approx(expected, abs=1e-8)

    def test_dimension_mismatch_rejected(self):
        model = fit(np.array([[0.1, 0.2]]), np.array([1.0]), KernelKind.GAUSSIAN, 1.0)
        with pytest.raises(ValueError):
            predict(model, np.array([0.1]))

    @pytest.mark.parametrize("kind", ALL_KERNELS)
    def test_finite_everywhere_on_cube(self, kind):
        rng = np.random.default_rng(3)
        X = rng.random((12, 3))
        y = rng.normal(size=12) * 100
        model = fit(X, y, kind, 1.0)
        values = predict(model, rng.random((200, 3)))
        assert np.isfinite(values).all()


class TestLoocv:
    def test_two_samples_hand_computed(self):
        x = np.array([[0.2], [0.7]])
        y = np.array([1.5, -2.0])
        c = 3.0
        f_r = math.exp(-c * 0.5**2)
        # each held-out model is a single-sample fit with beta = other response
        expected = (y[0] - y[1] * f_r) ** 2 + (y[1] - y[0] * f_r) ** 2
        assert loocv_error(x, y, KernelKind.GAUSSIAN, c) == pytest.approx(expected, rel=1e-12)

    def test_matches_literal_refit(self):
        rng = np.random.default_rng(17)
        for kind in ALL_KERNELS:
            X = rng.random((9, 2))
            y = rng.normal(size=9)
            c = 4.0
            brute = 0.0
            for i in range(9):
                keep = np.arange(9) != i
                model = fit(X[keep], y[keep], kind, c)
                brute += (y[i] - predict(model, X[i])) ** 2
            assert loocv_error(X, y, kind, c) == pytest.approx(brute, rel=1e-8)

    def test_nonnegative(self):
        rng = np.random.default_rng(2)
        X = rng.random((7, 1))
        y = rng.normal(size=7)
        assert loocv_error(X, y, KernelKind.MULTIQUADRIC, 1.0) >= 0.0

    def test_zero_responses_give_zero_error(self):
        rng = np.random.default_rng(4)
        X = rng.random((6, 2))
        assert loocv_error(X, np.zeros(6), KernelKind.GAUSSIAN, 1.0) == pytest.approx(0.0, abs=1e-20)

    def test_needs_two_samples(self):
        with pytest.raises(ValueError):
            loocv_error(np.array([[0.5]]), np.array([1.0]), KernelKind.GAUSSIAN, 1.0)


class TestTuneShape:
    def test_never_loses_to_grid(self):
        rng = np.random.default_rng(31)
        for kind in (KernelKind.GAUSSIAN, KernelKind.MULTIQUADRIC):
            X = rng.random((8, 2))
            y = rng.normal(size=8)
            c_star = tune_shape(X, y, kind)
            best = loocv_error(X, y, kind, c_star)
            for c in SHAPE_GRID:
                assert best <= loocv_error(X, y, kind, c) * (1 + 1e-12)

    def test_sign_flip_gives_same_shape(self):
        rng = np.random.default_rng(33)
        X = rng.random((7, 1))
        y = rng.normal(size=7)
        assert tune_shape(X, y, KernelKind.GAUSSIAN) == tune_shape(X, -y, KernelKind.GAUSSIAN)

    def test_agrees_with_dense_grid_scan(self):
        rng = np.random.default_rng(35)
        X = rng.random((10, 1))
        y = forrester_alpha(X.ravel(), 0.0)
        c_star = tune_shape(X, y, KernelKind.GAUSSIAN)
        dense = np.logspace(-2, 2, 1000)
        errors = [loocv_error(X, y, KernelKind.GAUSSIAN, c) for c in dense]
        c_dense = dense[int(np.argmin(errors))]
        cell_width = 4.0 / (len(SHAPE_GRID) - 1)  # log10 spacing of the coarse grid
        assert abs(math.log10(c_star) - math.log10(c_dense)) <= cell_width + 1e-9


class _StubSamples:
    def __init__(self, X, y, G):
        self._X, self._y, self._G = X, y, G

    def unit_inputs(self):
        return self._X

    def objective_values(self):
        return self._y

    def constraint_values(self):
        return self._G


class TestBuildBundle:
    def test_unconstrained_gives_empty_constraint_list(self):
        rng = np.random.default_rng(41)
        X = rng.random((5, 1))
        stub = _StubSamples(X, rng.normal(size=5), np.zeros((5, 0)))
        bundle = build_bundle(stub, KernelKind.GAUSSIAN, tune=True)
        assert bundle.constraints == ()

    def test_constrained_models_interpolate(self):
        rng = np.random.default_rng(43)
        X = rng.random((5, 2))
        y = rng.normal(size=5)
        G = rng.normal(size=(5, 3))
        bundle = build_bundle(_StubSamples(X, y, G), KernelKind.GAUSSIAN, tune=True)
        assert len(bundle.constraints) == 3
        np.testing.assert_allclose(predict(bundle.objective, X), y, atol=1e-6 * (1 + np.abs(y).max()))
        for j, model in enumerate(bundle.constraints):
            np.testing.assert_allclose(predict(model, X), G[:, j], atol=1e-6 * (1 + np.abs(G[:, j]).max()))

    def test_shape_parameters_match_direct_tuning(self):
        rng = np.random.default_rng(45)
        X = rng.random((6, 2))
        y = rng.normal(size=6)
        G = rng.normal(size=(6, 2))
        bundle = build_bundle(_StubSamples(X, y, G), KernelKind.MULTIQUADRIC, tune=True)
        assert bundle.objective.c == tune_shape(X, y, KernelKind.MULTIQUADRIC)
        for j, model in enumerate(bundle.constraints):
            assert model.c == tune_shape(X, G[:, j], KernelKind.MULTIQUADRIC)

    def test_single_sample_uses_default_shape(self):
        stub = _StubSamples(np.array([[0.5]]), np.array([2.0]), np.zeros((1, 0)))
        bundle = build_bundle(stub, KernelKind.GAUSSIAN, tune=True)
        assert bundle.objective.c == 1.0


class TestInterpolationProperty:
    @pytest.mark.parametrize("kind", ALL_KERNELS)
    def test_random_datasets(self, kind):
        rng = np.random.default_rng(51)
        for _ in range(10):
            m = int(rng.integers(1, 5))
            n = int(rng.integers(3, 15))
            X = rng.random((n, m))
            y = rng.normal(size=n) * 10
            model = fit(X, y, kind, float(rng.choice([0.5, 1.0, 10.0])))
            if model.ridge == 0.0:
                residual = np.abs(predict(model, X) - y).max()
                assert residual <= 1e-6 * (1 + np.abs(y).max())
