"""Comparison methods: direct density regression and warping-function regression.

Both baselines are Nadaraya-Watson kernel regressions over the L1 distance
between predictor densities. DDR averages the training target densities
directly; DWR averages the warping functions that transport each training
predictor onto its target, then pushes the new predictor through the
averaged warp. Convex combinations keep both estimates inside their
constrained function spaces.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .density import (
    DensityGrid,
    MixedDensityGrid,
    cdf_of,
    demix_uniform,
    mix_with_uniform,
)
from .errors import (
    EmptyDensity,
    EmptyNeighbourhood,
    InsufficientData,
    ValidationError,
)
from .grids import (
    Grid,
    as_grid_values,
    integrate,
    require_same_grid,
    strictly_increasing,
)

GAUSSIAN = "gaussian"
TRIANGULAR = "triangular"

# Smallest positive bandwidth: used when the covering distance is exactly 0,
# where any positive bandwidth satisfies the neighbour-count condition.
_BANDWIDTH_FLOOR = 1e-12


def gaussian_kernel(u: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * np.square(u)) / np.sqrt(2.0 * np.pi)


def triangular_kernel(u: np.ndarray) -> np.ndarray:
    absu = np.abs(u)
    return np.where(absu <= 1.0, 1.0 - absu, 0.0)


_KERNELS = {GAUSSIAN: gaussian_kernel, TRIANGULAR: triangular_kernel}
FINITE_SUPPORT_KERNELS = frozenset({TRIANGULAR})


@dataclass(frozen=True)
class KernelSpec:
    """Kernel shape plus bandwidth strategy for Nadaraya-Watson regression.

    Exactly one of ``bandwidth`` (fixed h > 0) or ``neighbour_percent``
    (zeta in (0, 100], resolved per prediction so that ceil(n * zeta / 100)
    kernel values are strictly positive) must be given. The neighbour-count
    strategy requires a kernel with finite support near the origin.
    """

    kind: str = GAUSSIAN
    bandwidth: float | None = None
    neighbour_percent: float | None = None

    def __post_init__(self):
        if self.kind not in _KERNELS:
            raise ValidationError(f"unknown kernel kind {self.kind!r}")
        if (self.bandwidth is None) == (self.neighbour_percent is None):
            raise ValidationError(
                "give exactly one of bandwidth or neighbour_percent"
            )
        if self.bandwidth is not None and self.bandwidth <= 0:
            raise ValidationError(f"bandwidth must be positive, got {self.bandwidth}")
        if self.neighbour_percent is not None:
            if not 0 < self.neighbour_percent <= 100:
                raise ValidationError(
                    f"neighbour_percent must lie in (0, 100], got {self.neighbour_percent}"
                )
            if self.kind not in FINITE_SUPPORT_KERNELS:
                raise ValidationError(
                    "neighbour-count bandwidths need a finite-support kernel"
                )

    def resolve_bandwidth(self, distances: np.ndarray) -> float:
        if self.bandwidth is not None:
            return float(self.bandwidth)
        return bandwidth_from_neighbours(distances, self.neighbour_percent, self.kind)


@dataclass(frozen=True)
class WarpingGrid:
    """Monotone map of [0, 1] onto itself with its derivative values."""

    grid: Grid
    gamma: np.ndarray = field(repr=False)
    dgamma: np.ndarray = field(repr=False)

    def __post_init__(self):
        g = as_grid_values(self.gamma, self.grid)
        dg = as_grid_values(self.dgamma, self.grid)
        if np.any(np.diff(g) < 0) or np.any(dg < 0):
            raise ValidationError("warping function must be nondecreasing")
        if abs(g[0]) > 1e-9 or abs(g[-1] - 1.0) > 1e-9:
            raise ValidationError("warping function must pin 0 to 0 and 1 to 1")
        g.setflags(write=False)
        dg.setflags(write=False)
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "dgamma", dg)


def l1_distance(g_a: DensityGrid, g_b: DensityGrid) -> float:
    """L1 distance between two densities on the same grid; lies in [0, 2]."""
    require_same_grid(g_a.grid, g_b.grid)
    return integrate(np.abs(g_a.values - g_b.values), g_a.grid)


def nw_weights(distances: np.ndarray, bandwidth: float, kind: str = GAUSSIAN) -> np.ndarray:
    """Normalized Nadaraya-Watson weights K(d_i / h) / sum_j K(d_j / h)."""
    if bandwidth <= 0:
        raise ValidationError(f"bandwidth must be positive, got {bandwidth}")
    d = np.asarray(distances, dtype=float)
    raw = _KERNELS[kind](d / bandwidth)
    total = raw.sum()
    if total <= 0.0:
        raise EmptyNeighbourhood(
            f"no training distance within bandwidth {bandwidth}"
        )
    return raw / total


def bandwidth_from_neighbours(distances: np.ndarray, zeta_percent: float, kind: str = TRIANGULAR) -> float:
    """Smallest bandwidth giving at least ceil(n * zeta / 100) positive weights.

    For a finite-support kernel, the infimum is the k-th smallest distance,
    at which the kernel value is exactly zero; multiplying by (1 + 1e-9)
    realizes the strict inequality.
    """
    if kind not in FINITE_SUPPORT_KERNELS:
        raise ValidationError("neighbour-count bandwidths need a finite-support kernel")
    if not 0 < zeta_percent <= 100:
        raise ValidationError(f"zeta must lie in (0, 100], got {zeta_percent}")
    d = np.sort(np.asarray(distances, dtype=float))
    k = min(int(np.ceil(d.size * zeta_percent / 100.0)), d.size)
    covering = d[max(k, 1) - 1]
    if covering <= 0.0:
        return _BANDWIDTH_FLOOR
    return covering * (1.0 + 1e-9)


def _resolve_weights(training_predictors, g0: DensityGrid, kernel: KernelSpec) -> np.ndarray:
    distances = np.array([l1_distance(g0, g) for g in training_predictors])
    return nw_weights(distances, kernel.resolve_bandwidth(distances), kernel.kind)


def ddr_predict(training, g0: DensityGrid, kernel: KernelSpec) -> DensityGrid:
    """Direct distribution-to-distribution regression.

    ``training`` is a sequence of (predictor, target) DensityGrid pairs.
    The prediction is the Nadaraya-Watson convex combination of training
    targets, which is automatically a valid density.
    """
    if not training:
        raise InsufficientData("DDR needs at least one training pair")
    weights = _resolve_weights([g for g, _ in training], g0, kernel)
    combined = weights @ np.array([f.values for _, f in training])
    return DensityGrid(g0.grid, combined)


def estimate_warping(g: MixedDensityGrid, f: MixedDensityGrid) -> WarpingGrid:
    """Closed-form warp transporting g onto f: gamma = Q_g o F_f.

    By construction F_g(gamma(x)) = F_f(x), so the defining relation
    f = (g o gamma) * gamma' holds exactly for strictly positive densities;
    the derivative is approximated by central differences on the grid.
    """
    grid = require_same_grid(g.grid, f.grid)
    prob = cdf_of(f).values
    # evaluate Q_g directly by inverting g's CDF at the needed probability
    # levels; one interpolation, exact at shared nodes when f == g
    gamma = np.interp(prob, strictly_increasing(cdf_of(g).values), grid.nodes)
    gamma[0] = 0.0
    gamma[-1] = 1.0
    gamma = np.maximum.accumulate(gamma)
    dgamma = np.maximum(np.gradient(gamma, grid.spacing), 0.0)
    return WarpingGrid(grid, gamma, dgamma)


def combine_warpings(warpings, weights: np.ndarray) -> WarpingGrid:
    """Convex combination of warping functions; the space is closed under it."""
    grid = warpings[0].grid
    for wp in warpings[1:]:
        require_same_grid(grid, wp.grid)
    gamma = weights @ np.array([wp.gamma for wp in warpings])
    gamma[0] = 0.0
    gamma[-1] = 1.0
    dgamma = np.maximum(np.gradient(gamma, grid.spacing), 0.0)
    return WarpingGrid(grid, np.maximum.accumulate(gamma), dgamma)


def dwr_predict(training, g0: DensityGrid, kernel: KernelSpec, alpha: float) -> DensityGrid:
    """Distribution-to-warping-function regression.

    All densities are mixed with the uniform density at weight ``alpha``
    so the per-pair warps are well defined; the weighted warp is applied
    to the mixed predictor and the result is renormalized and demixed.
    """
    if not training:
        raise InsufficientData("DWR needs at least one training pair")
    weights = _resolve_weights([g for g, _ in training], g0, kernel)
    warpings = [
        estimate_warping(
            mix_with_uniform(g, alpha, allow_any_alpha=True),
            mix_with_uniform(f, alpha, allow_any_alpha=True),
        )
        for g, f in training
    ]
    combined = combine_warpings(warpings, weights)
    g0_star = mix_with_uniform(g0, alpha, allow_any_alpha=True)
    pushed = np.interp(combined.gamma, g0.grid.nodes, g0_star.values) * combined.dgamma
    mass = integrate(pushed, g0.grid)
    if mass <= 0.0:
        raise EmptyDensity("warped predictor carries no mass")
    return demix_uniform(DensityGrid(g0.grid, pushed / mass), alpha)
