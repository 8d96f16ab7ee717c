"""Estimate, normalize, precondition, and invert probability densities on [0, 1].

Everything downstream (transforms, regression, baselines) consumes the types
defined here: densities and CDF/quantile curves sampled on one shared uniform
grid. Densities are estimated from samples by a Gaussian kernel density
estimate, truncated to the unit interval, and optionally blended with the
uniform density so they are bounded away from zero.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AlphaOutOfRange,
    DegenerateSample,
    EmptyDensity,
    InsufficientData,
    OutOfSupport,
    ValidationError,
)
from .grids import (
    Grid,
    as_grid_values,
    cumulative_integral,
    integrate,
    strictly_increasing,
)

MASS_TOLERANCE = 1e-9
ALPHA_MIN = 0.2
ALPHA_MAX = 0.5


@dataclass(frozen=True)
class SupportInterval:
    """Estimated support of a sensor's data in raw units.

    Attributes
    ----------
    lower, upper : float
        Estimated support bounds; the open margins beyond the observed
        sample range are kappa_lower * s / sqrt(n) and
        kappa_upper * s / sqrt(n).
    kappa_lower, kappa_upper : float
        Margin multipliers (>= 1).
    sample_std : float
        Corrected (ddof=1) standard deviation of the samples used.
    sample_size : int
        Number of samples used.
    """

    lower: float
    upper: float
    kappa_lower: float = 1.0
    kappa_upper: float = 1.0
    sample_std: float = float("nan")  # nan when the bounds were given, not derived
    sample_size: int = 0

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValidationError(
                f"support lower bound {self.lower} must be below upper {self.upper}"
            )

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def to_unit(self, values) -> np.ndarray:
        """Affine map raw values onto [0, 1]; order preserving."""
        return (np.asarray(values, dtype=float) - self.lower) / self.width

    def from_unit(self, values) -> np.ndarray:
        """Inverse of :meth:`to_unit`."""
        return self.lower + np.asarray(values, dtype=float) * self.width


@dataclass(frozen=True)
class DensityGrid:
    """A probability density sampled on a uniform grid over [0, 1].

    Values are nonnegative and the trapezoid integral over [0, 1] equals
    one to within ``MASS_TOLERANCE``; both are checked at construction.
    """

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = as_grid_values(self.values, self.grid)
        if np.any(vals < 0):
            raise ValidationError("density values must be nonnegative")
        mass = integrate(vals, self.grid)
        if abs(mass - 1.0) > MASS_TOLERANCE:
            raise ValidationError(
                f"density must integrate to 1 within {MASS_TOLERANCE}, got {mass!r}"
            )
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class MixedDensityGrid:
    """A density blended with the uniform density: (1 - alpha) f + alpha.

    The blend is bounded below by ``alpha``, which keeps the quantile
    density finite and the inverse log-quantile-density quadrature stable.
    """

    base: DensityGrid
    alpha: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise AlphaOutOfRange(f"alpha must lie in (0, 1), got {self.alpha}")
        vals = as_grid_values(self.values, self.base.grid)
        if np.min(vals) < self.alpha - 1e-12:
            raise ValidationError("mixed density dips below its uniform floor")
        mass = integrate(vals, self.base.grid)
        if abs(mass - 1.0) > MASS_TOLERANCE:
            raise ValidationError(f"mixed density must keep unit mass, got {mass!r}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def grid(self) -> Grid:
        return self.base.grid


@dataclass(frozen=True)
class CdfGrid:
    """Cumulative distribution values on the shared grid; F(0)=0, F(1)=1."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = as_grid_values(self.values, self.grid)
        if np.any(np.diff(vals) < 0):
            raise ValidationError("CDF values must be nondecreasing")
        if abs(vals[0]) > MASS_TOLERANCE or abs(vals[-1] - 1.0) > MASS_TOLERANCE:
            raise ValidationError("CDF must run from 0 to 1")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class QuantileGrid:
    """Quantile values Q(t) on a probability-level grid; Q(0)=0, Q(1)=1."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = as_grid_values(self.values, self.grid)
        if np.any(np.diff(vals) < 0):
            raise ValidationError("quantile values must be nondecreasing")
        if abs(vals[0]) > MASS_TOLERANCE or abs(vals[-1] - 1.0) > MASS_TOLERANCE:
            raise ValidationError("quantile curve must run from 0 to 1")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


def estimate_support(samples, kappa_lower: float = 1.0, kappa_upper: float = 1.0) -> SupportInterval:
    """Estimate the support of the underlying distribution from samples.

    The observed range is widened by kappa * s / sqrt(n) on each side,
    where s is the corrected sample standard deviation. Larger kappas give
    a wider estimated support.

    Parameters
    ----------
    samples : array-like
        Raw observations, at least two, not all identical.
    kappa_lower, kappa_upper : float
        Margin multipliers, each >= 1.

    Returns
    -------
    SupportInterval
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 2:
        raise InsufficientData(f"support estimation needs >= 2 samples, got {x.size}")
    if kappa_lower < 1.0 or kappa_upper < 1.0:
        raise ValidationError("kappa_lower and kappa_upper must be >= 1")
    s = float(np.std(x, ddof=1))
    if s == 0.0:
        raise DegenerateSample("all samples identical; support width is undefined")
    margin = s / np.sqrt(x.size)
    return SupportInterval(
        lower=float(x.min() - kappa_lower * margin),
        upper=float(x.max() + kappa_upper * margin),
        kappa_lower=float(kappa_lower),
        kappa_upper=float(kappa_upper),
        sample_std=s,
        sample_size=int(x.size),
    )


def rescale_to_unit(samples, support: SupportInterval) -> np.ndarray:
    """Map raw samples into [0, 1] by the affine support transform."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size and (x.min() < support.lower or x.max() > support.upper):
        bad = x[(x < support.lower) | (x > support.upper)][0]
        raise OutOfSupport(
            f"sample {bad!r} outside support [{support.lower}, {support.upper}]"
        )
    return support.to_unit(x)


def silverman_bandwidth(unit_samples: np.ndarray) -> float:
    """Silverman's rule-of-thumb bandwidth, robust IQR form."""
    x = np.asarray(unit_samples, dtype=float)
    s = float(np.std(x, ddof=1))
    q75, q25 = np.percentile(x, [75, 25])
    spread = min(s, (q75 - q25) / 1.34)
    if spread == 0.0:
        spread = s  # zero IQR with positive std: fall back to the std
    if spread == 0.0:
        raise DegenerateSample("zero sample spread; bandwidth is undefined")
    return 0.9 * spread * x.size ** (-0.2)


def kde_estimate(unit_samples, grid: Grid, bandwidth: float | None = None) -> np.ndarray:
    """Gaussian kernel density estimate evaluated on the grid.

    Returns the raw (untruncated) estimate: kernel mass falling outside
    [0, 1] is not redistributed, so the values generally integrate to less
    than one over the grid. Pass the result to :func:`truncate_normalize`.

    Parameters
    ----------
    unit_samples : array-like
        Samples in [0, 1]; at least 5.
    grid : Grid
        Evaluation nodes.
    bandwidth : float, optional
        Kernel bandwidth; defaults to Silverman's rule of thumb.

    Returns
    -------
    np.ndarray
        Nonnegative raw density values, one per grid node.
    """
    x = np.asarray(unit_samples, dtype=float).ravel()
    if x.size < 5:
        raise InsufficientData(f"KDE needs >= 5 samples, got {x.size}")
    h = silverman_bandwidth(x) if bandwidth is None else float(bandwidth)
    if h <= 0:
        raise ValidationError(f"bandwidth must be positive, got {h}")
    nodes = grid.nodes
    out = np.zeros(grid.n_points)
    # chunk over samples to bound the temporary (n_points x chunk) matrix
    chunk = 512
    for i in range(0, x.size, chunk):
        z = (nodes[:, None] - x[None, i : i + chunk]) / h
        np.square(z, out=z)
        z *= -0.5
        np.exp(z, out=z)
        out += z.sum(axis=1)
    out /= x.size * h * np.sqrt(2.0 * np.pi)
    return out


def truncate_normalize(raw_values, grid: Grid) -> DensityGrid:
    """Restrict raw density values to [0, 1] and renormalize to unit mass."""
    vals = as_grid_values(raw_values, grid)
    if np.any(vals < 0):
        raise ValidationError("raw density values must be nonnegative")
    mass = integrate(vals, grid)
    if mass <= 0.0:
        raise EmptyDensity("raw density integrates to zero on [0, 1]")
    return DensityGrid(grid, vals / mass)


def mix_with_uniform(f: DensityGrid, alpha: float, allow_any_alpha: bool = False) -> MixedDensityGrid:
    """Blend a density with the uniform density: (1 - alpha) f + alpha.

    ``alpha`` is restricted to [0.2, 0.5]: smaller values fail to cure
    near-zero densities, larger ones wash out the shape. Setting
    ``allow_any_alpha`` relaxes the restriction to (0, 1) with a warning.
    """
    if not 0.0 < alpha < 1.0:
        raise AlphaOutOfRange(f"alpha must lie in (0, 1), got {alpha}")
    if not ALPHA_MIN <= alpha <= ALPHA_MAX:
        if not allow_any_alpha:
            raise AlphaOutOfRange(
                f"alpha={alpha} outside [{ALPHA_MIN}, {ALPHA_MAX}]; "
                "pass allow_any_alpha=True to override"
            )
        warnings.warn(
            f"alpha={alpha} outside the recommended range [{ALPHA_MIN}, {ALPHA_MAX}]",
            stacklevel=2,
        )
    mixed = (1.0 - alpha) * f.values + alpha
    return MixedDensityGrid(base=f, alpha=float(alpha), values=mixed)


def demix_uniform(f_star: DensityGrid | MixedDensityGrid, alpha: float) -> DensityGrid:
    """Remove the uniform component added by :func:`mix_with_uniform`.

    Works on any unit-mass density estimate, including regression outputs
    that may dip below ``alpha``; the absolute value folds such dips back
    into the density before renormalization.
    """
    if not 0.0 < alpha < 1.0:
        raise AlphaOutOfRange(f"alpha must lie in (0, 1), got {alpha}")
    grid = f_star.grid
    folded = np.abs(np.asarray(f_star.values) - alpha)
    mass = integrate(folded, grid)
    if mass <= 0.0:
        raise EmptyDensity("density is identically alpha; nothing left after demixing")
    return DensityGrid(grid, folded / mass)


def cdf_of(f: DensityGrid | MixedDensityGrid) -> CdfGrid:
    """Cumulative distribution of a density, pinned to F(0)=0 and F(1)=1."""
    grid = f.grid
    c = cumulative_integral(np.asarray(f.values), grid)
    c /= c[-1]
    c = np.maximum.accumulate(c)
    return CdfGrid(grid, np.clip(c, 0.0, 1.0))


def _invert_cdf(cdf_values: np.ndarray, grid: Grid) -> np.ndarray:
    """Evaluate the inverse of a nondecreasing CDF on the probability grid."""
    table = strictly_increasing(cdf_values)
    q = np.interp(grid.nodes, table, grid.nodes)
    q[0] = 0.0
    q[-1] = 1.0
    return np.maximum.accumulate(q)


def quantile_of(f: MixedDensityGrid) -> QuantileGrid:
    """Quantile function Q = F^{-1} on the probability-level grid.

    Requires a mixed density: values >= alpha make the CDF strictly
    increasing, so inversion by piecewise-linear interpolation is stable.
    Exact floating-point ties are broken by strict-monotonization.
    """
    cdf = cdf_of(f)
    return QuantileGrid(f.grid, _invert_cdf(cdf.values, f.grid))
