"""Function-to-vector kernel ridge regression with a Gaussian operator kernel.

The regression maps a predictor function (the collaborative sensor's LQD
function) to the score vector of the target sensor's LQD function. Because
the operator-valued kernel is a scalar Gaussian kernel times the identity,
the ridge system over vectorized coefficients decouples into m independent
symmetric positive-definite solves in the n x n Gram matrix: O(n^3 + n^2 m)
work instead of O((n m)^3), with an identical solution.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .density import DensityGrid, mix_with_uniform, demix_uniform
from .errors import (
    DegenerateKernelWidth,
    InsufficientData,
    InvalidSmoothing,
    TrainingSetTooLarge,
    ValidationError,
)
from .fpca import FpcaModel, reconstruct
from .grids import Grid, integrate, require_same_grid, trapezoid_weights
from .lqd import LqdFunction, inverse_lqd, lqd

DEFAULT_LAMBDA = 0.1

# Global fits beyond this size should switch to a local fitting strategy,
# which this library deliberately does not implement.
DEFAULT_MAX_TRAINING_SIZE = 5000


@dataclass(frozen=True)
class GramMatrix:
    """Gaussian kernel Gram matrix of the training predictor functions."""

    matrix: np.ndarray = field(repr=False)
    sigma: float = 1.0

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValidationError(f"Gram matrix must be square, got {a.shape}")
        if self.sigma <= 0:
            raise ValidationError(f"kernel width must be positive, got {self.sigma}")
        if not np.allclose(a, a.T, atol=1e-12):
            raise ValidationError("Gram matrix must be symmetric")
        if not np.allclose(np.diag(a), 1.0, atol=1e-12):
            raise ValidationError("Gram matrix must have unit diagonal")
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)

    @property
    def size(self) -> int:
        return int(self.matrix.shape[0])


@dataclass(frozen=True)
class TrainedRkhsModel:
    """Everything needed to restore a missing density from a predictor.

    Attributes
    ----------
    coefficients : np.ndarray, shape (n, m)
        Row j holds the coefficient vector of training predictor j.
    sigma : float
        Gaussian kernel width in predictor-function L2 units.
    lambda_s : float
        Ridge smoothing parameter used in the fit.
    predictor_values : np.ndarray, shape (n, n_points)
        Nodal values of the training predictor LQD functions; required at
        prediction time to evaluate the kernel against a new predictor.
    fpca : FpcaModel
        Basis in which target score vectors are expressed.
    alpha : float
        Uniform mixture weight used to precondition every density.
    """

    grid: Grid
    coefficients: np.ndarray = field(repr=False)
    sigma: float = 1.0
    lambda_s: float = DEFAULT_LAMBDA
    predictor_values: np.ndarray = field(repr=False, default=None)
    fpca: FpcaModel = None
    alpha: float = 0.5

    def __post_init__(self):
        for arr in (self.coefficients, self.predictor_values):
            if arr is not None:
                arr.setflags(write=False)

    @property
    def n_training(self) -> int:
        return int(self.coefficients.shape[0])

    @property
    def truncation(self) -> int:
        return int(self.coefficients.shape[1])


def l2_distance_sq(psi_a: LqdFunction, psi_b: LqdFunction) -> float:
    """Squared L2 distance between two functions on the same grid."""
    require_same_grid(psi_a.grid, psi_b.grid)
    diff = psi_a.values - psi_b.values
    return integrate(diff * diff, psi_a.grid)


def _pairwise_l2_sq(stack: np.ndarray, grid: Grid) -> np.ndarray:
    """All pairwise squared L2 distances between rows, via the Gram identity."""
    w = trapezoid_weights(grid)
    inner = (stack * w) @ stack.T
    diag = np.diag(inner)
    d = diag[:, None] + diag[None, :] - 2.0 * inner
    np.fill_diagonal(d, 0.0)
    return np.maximum(d, 0.0)


def sigma_heuristic(predictors: list[LqdFunction]) -> float:
    """Kernel width as the mean of all pairwise L2 distances.

    The average runs over the full n x n table including the zero diagonal.
    """
    if len(predictors) < 2:
        raise InsufficientData("kernel width heuristic needs >= 2 predictors")
    grid, stack = predictors[0].grid, np.array([p.values for p in predictors])
    for p in predictors[1:]:
        require_same_grid(grid, p.grid)
    d = _pairwise_l2_sq(stack, grid)
    sigma = float(np.sqrt(d).sum() / len(predictors) ** 2)
    if sigma <= 0.0:
        raise DegenerateKernelWidth("all training predictors are identical")
    return sigma


def gram_matrix(predictors: list[LqdFunction], sigma: float) -> GramMatrix:
    """Gaussian Gram matrix a_ij = exp(-d_ij / (2 sigma^2)); unit diagonal."""
    if sigma <= 0:
        raise ValidationError(f"kernel width must be positive, got {sigma}")
    grid, stack = predictors[0].grid, np.array([p.values for p in predictors])
    for p in predictors[1:]:
        require_same_grid(grid, p.grid)
    d = _pairwise_l2_sq(stack, grid)
    a = np.exp(-d / (2.0 * sigma**2))
    np.fill_diagonal(a, 1.0)
    return GramMatrix(matrix=a, sigma=float(sigma))


def solve_coefficients(gram: GramMatrix, scores: np.ndarray, lambda_s: float) -> np.ndarray:
    """Solve (A + lambda_s I) B = Y by Cholesky factorization."""
    if lambda_s <= 0:
        raise InvalidSmoothing(f"lambda_s must be positive, got {lambda_s}")
    y = np.atleast_2d(np.asarray(scores, dtype=float))
    if y.shape[0] != gram.size:
        raise ValidationError(
            f"score matrix has {y.shape[0]} rows for {gram.size} training points"
        )
    system = gram.matrix + lambda_s * np.eye(gram.size)
    return cho_solve(cho_factor(system), y)


def fit(
    gram: GramMatrix,
    scores: np.ndarray,
    lambda_s: float,
    predictors: list[LqdFunction],
    fpca_model: FpcaModel,
    alpha: float,
    max_training_size: int = DEFAULT_MAX_TRAINING_SIZE,
) -> TrainedRkhsModel:
    """Assemble a trained model from the Gram matrix and target scores."""
    if gram.size > max_training_size:
        raise TrainingSetTooLarge(
            f"{gram.size} training functions exceed the global-fit cap "
            f"{max_training_size}; use a smaller training set"
        )
    if len(predictors) != gram.size:
        raise ValidationError("predictor count must match the Gram matrix size")
    grid = predictors[0].grid
    coeffs = solve_coefficients(gram, scores, lambda_s)
    return TrainedRkhsModel(
        grid=grid,
        coefficients=coeffs,
        sigma=gram.sigma,
        lambda_s=float(lambda_s),
        predictor_values=np.array([p.values for p in predictors]),
        fpca=fpca_model,
        alpha=float(alpha),
    )


def kernel_vector(model: TrainedRkhsModel, psi_0: LqdFunction) -> np.ndarray:
    """Kernel evaluations of a new predictor against every training predictor."""
    require_same_grid(psi_0.grid, model.grid)
    w = trapezoid_weights(model.grid)
    diff = model.predictor_values - psi_0.values
    d = (diff * diff) @ w
    return np.exp(-np.maximum(d, 0.0) / (2.0 * model.sigma**2))


def _scores_from_kernel_vector(model: TrainedRkhsModel, k: np.ndarray) -> np.ndarray:
    return k @ model.coefficients


def predict_scores(model: TrainedRkhsModel, psi_0: LqdFunction) -> np.ndarray:
    """Predicted score vector for a new predictor function."""
    return _scores_from_kernel_vector(model, kernel_vector(model, psi_0))


def restore_distribution(model: TrainedRkhsModel, g0_hat: DensityGrid) -> DensityGrid:
    """Restore the missing density from the collaborative sensor's density.

    Pipeline: mix with the uniform density at the model's alpha, transform
    to LQD space, regress the score vector, reconstruct the LQD function,
    invert the transform, and demix.
    """
    g_star = mix_with_uniform(g0_hat, model.alpha, allow_any_alpha=True)
    scores = predict_scores(model, lqd(g_star))
    restored_star = inverse_lqd(reconstruct(scores, model.fpca))
    return demix_uniform(restored_star, model.alpha)
