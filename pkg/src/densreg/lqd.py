"""Log-quantile-density transform between densities and Hilbert-space functions.

A strictly positive density f on [0, 1] maps to psi(t) = log Q'(t)
= -log f(Q(t)), an unconstrained square-integrable function of the
probability level t. The inverse transform integrates exp(psi) to rebuild
the quantile curve and reads the density off it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .density import DensityGrid, MixedDensityGrid, _invert_cdf, cdf_of
from .errors import TransformOverflow, ValidationError
from .grids import Grid, as_grid_values, cumulative_integral, integrate, strictly_increasing

# exp overflows float64 just above 709; anything near it means the caller
# skipped uniform-mixture preconditioning.
_PSI_OVERFLOW = 700.0

_DIAGNOSTIC_FLOOR = 1e-12


@dataclass(frozen=True)
class LqdFunction:
    """Log quantile density values on the probability-level grid."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = as_grid_values(self.values, self.grid)
        if not np.all(np.isfinite(vals)):
            raise ValidationError("LQD values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


def _lqd_from_values(density_values: np.ndarray, grid: Grid) -> LqdFunction:
    cdf = cumulative_integral(density_values, grid)
    cdf /= cdf[-1]
    q = _invert_cdf(np.clip(np.maximum.accumulate(cdf), 0.0, 1.0), grid)
    f_at_q = np.interp(q, grid.nodes, density_values)
    return LqdFunction(grid, -np.log(f_at_q))


def lqd(f_star: MixedDensityGrid) -> LqdFunction:
    """Transform a mixed density to its log-quantile-density function.

    The uniform floor alpha guarantees psi <= -log(alpha), so the result
    is always finite and the inverse quadrature stays accurate.
    """
    return _lqd_from_values(np.asarray(f_star.values), f_star.grid)


def lqd_raw(f: DensityGrid, floor: float = _DIAGNOSTIC_FLOOR) -> LqdFunction:
    """Diagnostic transform of an unmixed density.

    Near-zero density values are clipped to ``floor`` to keep psi finite;
    the resulting spike in exp(psi) is exactly the quadrature hazard that
    uniform-mixture preconditioning exists to remove. Use only to study
    that failure mode.
    """
    if floor <= 0 or -np.log(floor) > _PSI_OVERFLOW:
        raise ValidationError(f"floor must lie in [exp(-700), inf), got {floor}")
    return _lqd_from_values(np.maximum(np.asarray(f.values), floor), f.grid)


def inverse_lqd(psi: LqdFunction) -> DensityGrid:
    """Map a log-quantile-density function back to a density on [0, 1].

    The quantile curve is rebuilt as the normalized cumulative integral of
    exp(psi); the density along the curve is theta * exp(-psi); the pairs
    (Q(t), f(Q(t))) are then resampled onto the x-grid and renormalized.
    Adding a constant to psi leaves the result unchanged.

    Raises
    ------
    TransformOverflow
        If exp(psi) would overflow float64, which signals an
        unpreconditioned near-zero density upstream.
    """
    grid = psi.grid
    vals = np.asarray(psi.values)
    if np.max(vals) > _PSI_OVERFLOW:
        raise TransformOverflow(
            f"max psi {np.max(vals):.1f} exceeds {_PSI_OVERFLOW}; "
            "mix the source density with the uniform density first"
        )
    growth = np.exp(vals)
    theta = integrate(growth, grid)
    q = cumulative_integral(growth, grid) / theta
    q[-1] = 1.0  # cumulative trapezoid of the full range equals theta exactly
    density_on_curve = theta * np.exp(-vals)
    resampled = np.interp(grid.nodes, strictly_increasing(q), density_on_curve)
    return DensityGrid(grid, resampled / integrate(resampled, grid))
