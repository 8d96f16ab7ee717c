"""Uniform grids on [0, 1] and the quadrature helpers used everywhere else."""

from __future__ import annotations

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from .errors import GridMismatch, ValidationError

DEFAULT_GRID_POINTS = 1001

# Strict-monotonization bump: large enough to break exact float ties in a
# cumulative integral, small enough to stay far below grid resolution.
_TIE_BREAK = 1e-14


class Grid:
    """Evenly spaced nodes t_1 = 0 < t_2 < ... < t_{n} = 1.

    The same object represents the abscissa for densities (x in [0, 1]) and
    for probability levels (t in [0, 1]); only the interpretation differs.
    Instances are immutable and compare equal iff they have the same number
    of nodes.
    """

    __slots__ = ("n_points", "spacing", "nodes")

    def __init__(self, n_points: int = DEFAULT_GRID_POINTS):
        n_points = int(n_points)
        if n_points < 2:
            raise ValidationError(f"grid needs at least 2 nodes, got {n_points}")
        object.__setattr__(self, "n_points", n_points)
        object.__setattr__(self, "spacing", 1.0 / (n_points - 1))
        nodes = np.linspace(0.0, 1.0, n_points)
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)

    def __setattr__(self, name, value):
        raise AttributeError("Grid is immutable")

    def __eq__(self, other):
        return isinstance(other, Grid) and other.n_points == self.n_points

    def __hash__(self):
        return hash(("Grid", self.n_points))

    def __repr__(self):
        return f"Grid(n_points={self.n_points})"


def as_grid_values(values, grid: Grid) -> np.ndarray:
    """Coerce to a float64 vector matching ``grid`` and return a copy."""
    out = np.asarray(values, dtype=float).copy()
    if out.ndim != 1 or out.shape[0] != grid.n_points:
        raise GridMismatch(
            f"expected {grid.n_points} values on the grid, got shape {out.shape}"
        )
    return out


def require_same_grid(a: Grid, b: Grid) -> Grid:
    if a != b:
        raise GridMismatch(f"grids differ: {a!r} vs {b!r}")
    return a


def integrate(values: np.ndarray, grid: Grid) -> float:
    """Trapezoid integral of nodal values over [0, 1]."""
    return float(trapezoid(values, dx=grid.spacing))


def cumulative_integral(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Cumulative trapezoid integral, anchored at 0 on the first node."""
    return cumulative_trapezoid(values, dx=grid.spacing, initial=0.0)


def trapezoid_weights(grid: Grid) -> np.ndarray:
    """Quadrature weights so that weights @ values == integrate(values)."""
    w = np.full(grid.n_points, grid.spacing)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def strictly_increasing(values: np.ndarray) -> np.ndarray:
    """Break exact ties in a nondecreasing sequence for safe inversion.

    Adds l * 1e-14 to the l-th entry; the perturbation is orders of
    magnitude below grid resolution and only matters where consecutive
    values coincide bit-for-bit.
    """
    return values + np.arange(values.shape[0]) * _TIE_BREAK
