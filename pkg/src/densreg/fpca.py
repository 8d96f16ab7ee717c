"""Functional PCA by discretization on the shared uniform grid.

Functions are represented by their nodal values; integrals in the
eigenproblem are approximated by the nodal sum w * sum(.), which turns the
covariance-operator eigenanalysis into an ordinary symmetric matrix
eigendecomposition. A matrix eigenpair (lambda, u) converts to a functional
eigenpair via rho = w * lambda and phi = u / sqrt(w), making the
eigenfunctions orthonormal in the same nodal quadrature. Scores use that
quadrature too so that projection and reconstruction are exact inverses on
the retained basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientData, TruncationExceedsRank, ValidationError
from .grids import Grid, require_same_grid
from .lqd import LqdFunction

DEFAULT_TRUNCATION = 10

# Eigenvalues below this fraction of the leading one are numerical noise.
_RANK_CUTOFF = 1e-12


@dataclass(frozen=True)
class FpcaModel:
    """Mean function plus an orthonormal eigenbasis with eigenvalues.

    Attributes
    ----------
    grid : Grid
        Shared grid of all member functions.
    mean : np.ndarray, shape (n_points,)
        Pointwise mean of the training functions.
    eigenfunctions : np.ndarray, shape (n_retained, n_points)
        Rows phi_k, orthonormal under the nodal inner product
        w * phi_j @ phi_k.
    eigenvalues : np.ndarray, shape (n_retained,)
        Nonnegative, descending.
    """

    grid: Grid
    mean: np.ndarray = field(repr=False)
    eigenfunctions: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.eigenfunctions.shape != (self.eigenvalues.shape[0], self.grid.n_points):
            raise ValidationError("eigenfunction matrix shape mismatch")
        if np.any(np.diff(self.eigenvalues) > 0) or np.any(self.eigenvalues < 0):
            raise ValidationError("eigenvalues must be nonnegative and descending")
        for arr in (self.mean, self.eigenfunctions, self.eigenvalues):
            arr.setflags(write=False)

    @property
    def n_retained(self) -> int:
        return int(self.eigenvalues.shape[0])


def _stack(functions) -> tuple[Grid, np.ndarray]:
    grid = functions[0].grid
    for fn in functions[1:]:
        require_same_grid(grid, fn.grid)
    return grid, np.array([fn.values for fn in functions], dtype=float)


def fit_fpca(functions: list[LqdFunction]) -> FpcaModel:
    """Eigendecompose the covariance of a set of functions on one grid.

    Uses the 1/n covariance convention. Eigenvalues below
    1e-12 of the leading eigenvalue are dropped. Each retained
    eigenfunction is flipped, if necessary, so its largest-magnitude nodal
    value is positive, making signs reproducible across runs.
    """
    if len(functions) < 2:
        raise InsufficientData(f"FPCA needs >= 2 functions, got {len(functions)}")
    grid, rows = _stack(functions)
    w = grid.spacing
    mean = rows.mean(axis=0)
    centered = rows - mean
    cov = centered.T @ centered / len(functions)
    lam, vecs = np.linalg.eigh(cov)
    order = np.argsort(lam)[::-1]
    lam = lam[order]
    vecs = vecs[:, order]
    rho = w * lam
    if rho[0] > 0:
        keep = rho >= _RANK_CUTOFF * rho[0]
    else:
        keep = np.zeros(rho.shape, dtype=bool)
    rho = rho[keep]
    phi = vecs[:, keep].T / np.sqrt(w)
    for k in range(phi.shape[0]):
        peak = np.argmax(np.abs(phi[k]))
        if phi[k, peak] < 0:
            phi[k] = -phi[k]
    return FpcaModel(grid=grid, mean=mean, eigenfunctions=phi, eigenvalues=rho)


def project(psi: LqdFunction, model: FpcaModel, m: int = DEFAULT_TRUNCATION) -> np.ndarray:
    """Score vector of a function in the leading m eigenfunctions.

    xi_k is the nodal inner product of the centered function with phi_k,
    the quadrature under which the basis is orthonormal.
    """
    require_same_grid(psi.grid, model.grid)
    if m < 1:
        raise ValidationError(f"truncation order must be >= 1, got {m}")
    if m > model.n_retained:
        raise TruncationExceedsRank(
            f"truncation order {m} exceeds retained rank {model.n_retained}"
        )
    centered = psi.values - model.mean
    return model.grid.spacing * (model.eigenfunctions[:m] @ centered)


def reconstruct(scores: np.ndarray, model: FpcaModel) -> LqdFunction:
    """Truncated Karhunen-Loeve reconstruction: mean + sum of scored modes."""
    xi = np.asarray(scores, dtype=float).ravel()
    if xi.shape[0] > model.n_retained:
        raise TruncationExceedsRank(
            f"score length {xi.shape[0]} exceeds retained rank {model.n_retained}"
        )
    values = model.mean + xi @ model.eigenfunctions[: xi.shape[0]]
    return LqdFunction(model.grid, values)
