import numpy as np
import pytest

from densreg import (
    GramMatrix,
    LqdFunction,
    demix_uniform,
    fit_fpca,
    gram_matrix,
    inverse_lqd,
    l2_distance_sq,
    lqd,
    mix_with_uniform,
    predict_scores,
    project,
    restore_distribution,
    sigma_heuristic,
    train_restorer,
)
from densreg.errors import (
    DegenerateKernelWidth,
    GridMismatch,
    InvalidSmoothing,
    TrainingSetTooLarge,
)
from densreg.grids import Grid, integrate
from densreg.rkhs import (
    _scores_from_kernel_vector,
    fit,
    kernel_vector,
    solve_coefficients,
)
from conftest import gaussian_bump_mixture


def const_fn(grid, c):
    return LqdFunction(grid, np.full(grid.n_points, float(c)))


def random_fns(rng, grid, n):
    t = grid.nodes
    return [
        LqdFunction(
            grid,
            rng.normal() * np.sin(2 * np.pi * t)
            + rng.normal() * np.cos(2 * np.pi * t)
            + rng.normal() * t
            + rng.normal(),
        )
        for _ in range(n)
    ]


class TestL2Distance:
    def test_identical(self, grid201):
        f = const_fn(grid201, 1.3)
        assert l2_distance_sq(f, f) == 0.0

    def test_constant_gap(self, grid201):
        assert l2_distance_sq(const_fn(grid201, 0), const_fn(grid201, 2.0)) == pytest.approx(4.0)

    def test_linear_ramp(self, grid1001):
        ramp = LqdFunction(grid1001, grid1001.nodes.copy())
        assert l2_distance_sq(ramp, const_fn(grid1001, 0)) == pytest.approx(1 / 3, abs=1e-6)

    def test_grid_mismatch(self, grid201, grid1001):
        with pytest.raises(GridMismatch):
            l2_distance_sq(const_fn(grid201, 0), const_fn(grid1001, 0))


class TestSigmaHeuristic:
    def test_identical_predictors(self, grid201):
        with pytest.raises(DegenerateKernelWidth):
            sigma_heuristic([const_fn(grid201, 1), const_fn(grid201, 1)])

    def test_two_point_average(self, grid201):
        # distances {0, 1, 1, 0} averaged over the full 2x2 table
        sigma = sigma_heuristic([const_fn(grid201, 0), const_fn(grid201, 1)])
        assert sigma == pytest.approx(0.5)

    def test_scale_equivariance(self, grid201):
        rng = np.random.default_rng(0)
        fns = random_fns(rng, grid201, 6)
        sigma = sigma_heuristic(fns)
        tripled = [LqdFunction(grid201, 3.0 * f.values) for f in fns]
        assert sigma_heuristic(tripled) == pytest.approx(3.0 * sigma, rel=1e-12)


class TestGramMatrix:
    def test_unit_diagonal(self, grid201):
        rng = np.random.default_rng(1)
        fns = random_fns(rng, grid201, 5)
        gram = gram_matrix(fns, sigma_heuristic(fns))
        np.testing.assert_array_equal(np.diag(gram.matrix), 1.0)
        np.testing.assert_allclose(gram.matrix, gram.matrix.T, atol=1e-15)

    def test_distance_of_two_sigma_squared(self, grid201):
        # d = 4, sigma^2 = 2 gives exp(-1)
        fns = [const_fn(grid201, 0), const_fn(grid201, 2.0)]
        gram = gram_matrix(fns, np.sqrt(2.0))
        assert gram.matrix[0, 1] == pytest.approx(np.exp(-1.0))

    def test_two_point_example(self, grid201):
        fns = [const_fn(grid201, 0), const_fn(grid201, 1)]
        gram = gram_matrix(fns, 0.5)
        assert gram.matrix[0, 1] == pytest.approx(np.exp(-2.0))
        assert gram.matrix[0, 1] == pytest.approx(0.13534, abs=1e-5)

    def test_positive_semidefinite(self, grid201):
        rng = np.random.default_rng(2)
        fns = random_fns(rng, grid201, 8)
        gram = gram_matrix(fns, sigma_heuristic(fns))
        assert np.linalg.eigvalsh(gram.matrix).min() > -1e-10


class TestFit:
    def test_single_pair_scalar_solve(self):
        gram = GramMatrix(matrix=np.array([[1.0]]), sigma=1.0)
        y = np.array([[3.0, -2.0]])
        b = solve_coefficients(gram, y, 0.5)
        np.testing.assert_allclose(b, y / 1.5)

    def test_invalid_smoothing(self):
        gram = GramMatrix(matrix=np.array([[1.0]]), sigma=1.0)
        with pytest.raises(InvalidSmoothing):
            solve_coefficients(gram, np.array([[1.0]]), 0.0)

    def test_huge_ridge_shrinks_coefficients(self, grid201):
        rng = np.random.default_rng(3)
        fns = random_fns(rng, grid201, 8)
        gram = gram_matrix(fns, sigma_heuristic(fns))
        y = rng.normal(size=(8, 3))
        b = solve_coefficients(gram, y, 1e6)
        assert np.linalg.norm(b) < 1e-4 * np.linalg.norm(y)

    def test_block_solve_equals_kronecker_solve(self, grid201):
        """The m decoupled SPD systems reproduce the vectorized solution of
        the full (nm x nm) operator-kernel ridge system."""
        rng = np.random.default_rng(4)
        for _ in range(20):
            n = int(rng.integers(2, 21))
            m = int(rng.integers(1, 6))
            fns = random_fns(rng, grid201, n)
            gram = gram_matrix(fns, sigma_heuristic(fns))
            y = rng.normal(size=(n, m))
            lam = 10.0 ** rng.uniform(-3, 0)
            b = solve_coefficients(gram, y, lam)
            big = np.kron(np.eye(m), gram.matrix) + lam * np.eye(n * m)
            vec_b = np.linalg.solve(big, y.flatten(order="F"))
            np.testing.assert_allclose(b, vec_b.reshape((n, m), order="F"), atol=1e-10)

    def test_residual_norm(self, grid201):
        rng = np.random.default_rng(5)
        fns = random_fns(rng, grid201, 12)
        gram = gram_matrix(fns, sigma_heuristic(fns))
        y = rng.normal(size=(12, 4))
        b = solve_coefficients(gram, y, 0.1)
        residual = (gram.matrix + 0.1 * np.eye(12)) @ b - y
        assert np.linalg.norm(residual) < 1e-8 * np.linalg.norm(y)

    def test_training_size_cap(self, grid201):
        rng = np.random.default_rng(6)
        fns = random_fns(rng, grid201, 4)
        gram = gram_matrix(fns, sigma_heuristic(fns))
        dummy_fpca = fit_fpca(fns)
        with pytest.raises(TrainingSetTooLarge):
            fit(gram, np.zeros((4, 1)), 0.1, fns, dummy_fpca, 0.5, max_training_size=3)


class TestPredict:
    def _model(self, rng, grid, n=8, lambda_s=0.1):
        fns = random_fns(rng, grid, n)
        gram = gram_matrix(fns, sigma_heuristic(fns))
        y = rng.normal(size=(n, 3))
        fpca_model = fit_fpca(fns)
        return fit(gram, y, lambda_s, fns, fpca_model, 0.5), fns, y

    def test_interpolates_training_points_at_tiny_ridge(self, grid201):
        rng = np.random.default_rng(7)
        model, fns, y = self._model(rng, grid201, n=8, lambda_s=1e-10)
        for i in (0, 3, 7):
            xi = predict_scores(model, fns[i])
            np.testing.assert_allclose(xi, y[i], atol=1e-4)

    def test_zero_kernel_vector_predicts_zero(self, grid201):
        rng = np.random.default_rng(8)
        model, _, _ = self._model(rng, grid201)
        xi = _scores_from_kernel_vector(model, np.zeros(model.n_training))
        np.testing.assert_array_equal(xi, 0.0)

    def test_single_pair_prediction(self, grid201):
        f1 = const_fn(grid201, 0.0)
        gram = GramMatrix(matrix=np.array([[1.0]]), sigma=0.5)
        y = np.array([[2.0]])
        fns = [f1, const_fn(grid201, 1.0)]
        fpca_model = fit_fpca(fns)
        model = fit(gram, y, 1.0, [f1], fpca_model, 0.5)
        psi0 = const_fn(grid201, 0.3)
        k = np.exp(-l2_distance_sq(psi0, f1) / (2 * 0.5**2))
        np.testing.assert_allclose(predict_scores(model, psi0), [k * 2.0 / 2.0])

    def test_prediction_linear_in_targets(self, grid201):
        rng = np.random.default_rng(9)
        fns = random_fns(rng, grid201, 6)
        gram = gram_matrix(fns, sigma_heuristic(fns))
        y1 = rng.normal(size=(6, 2))
        y2 = rng.normal(size=(6, 2))
        fpca_model = fit_fpca(fns)
        psi0 = random_fns(rng, grid201, 1)[0]
        p1 = predict_scores(fit(gram, y1, 0.1, fns, fpca_model, 0.5), psi0)
        p2 = predict_scores(fit(gram, y2, 0.1, fns, fpca_model, 0.5), psi0)
        p12 = predict_scores(fit(gram, y1 + y2, 0.1, fns, fpca_model, 0.5), psi0)
        np.testing.assert_allclose(p12, p1 + p2, atol=1e-10)

    def test_kernel_vector_bounds(self, grid201):
        rng = np.random.default_rng(10)
        model, fns, _ = self._model(rng, grid201)
        k = kernel_vector(model, random_fns(rng, grid201, 1)[0])
        assert np.all(k > 0) and np.all(k <= 1)
        bound = sum(np.linalg.norm(row) for row in model.coefficients)
        assert np.linalg.norm(predict_scores(model, fns[0])) <= bound + 1e-12

    def test_grid_mismatch(self, grid201, grid1001):
        rng = np.random.default_rng(11)
        model, _, _ = self._model(rng, grid201)
        with pytest.raises(GridMismatch):
            predict_scores(model, const_fn(grid1001, 0.0))


class TestRestoreDistribution:
    def test_identity_relation_restores_the_predictor(self, grid201):
        """Trained on pairs with f == g, querying a training predictor
        should approximately return it."""
        rng = np.random.default_rng(12)
        densities = [gaussian_bump_mixture(rng, grid201) for _ in range(12)]
        model = train_restorer(
            [(d, d) for d in densities], alpha=0.5, truncation=8, lambda_s=1e-4
        )
        restored = restore_distribution(model, densities[0])
        err = integrate(np.abs(restored.values - densities[0].values), grid201)
        assert err < 0.1

    def test_huge_ridge_returns_mean_distribution(self, grid201):
        rng = np.random.default_rng(13)
        pairs = [
            (gaussian_bump_mixture(rng, grid201), gaussian_bump_mixture(rng, grid201))
            for _ in range(10)
        ]
        model = train_restorer(pairs, alpha=0.5, truncation=5, lambda_s=1e6)
        restored = restore_distribution(model, pairs[0][0])
        mean_dist = demix_uniform(
            inverse_lqd(LqdFunction(grid201, model.fpca.mean.copy())), 0.5
        )
        err = integrate(np.abs(restored.values - mean_dist.values), grid201)
        assert err < 1e-3

    def test_output_is_valid_density(self, grid201):
        rng = np.random.default_rng(14)
        pairs = [
            (gaussian_bump_mixture(rng, grid201), gaussian_bump_mixture(rng, grid201))
            for _ in range(8)
        ]
        model = train_restorer(pairs, alpha=0.3, truncation=5)
        out = restore_distribution(model, gaussian_bump_mixture(rng, grid201))
        assert np.all(out.values >= 0)
        assert integrate(out.values, grid201) == pytest.approx(1.0, abs=1e-9)
