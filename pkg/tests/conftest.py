import numpy as np
import pytest

from densreg import DensityGrid, Grid
from densreg.grids import integrate


@pytest.fixture(scope="session")
def grid1001():
    return Grid(1001)


@pytest.fixture(scope="session")
def grid201():
    return Grid(201)


def gaussian_bump_mixture(rng, grid, n_low=2, n_high=5):
    """Random smooth density: a few Gaussian bumps truncated to [0, 1]."""
    k = int(rng.integers(n_low, n_high + 1))
    locs = rng.uniform(0.1, 0.9, k)
    scales = rng.uniform(0.05, 0.15, k)
    weights = rng.dirichlet(np.ones(k))
    x = grid.nodes
    values = np.zeros(grid.n_points)
    for loc, scale, weight in zip(locs, scales, weights):
        values += weight * np.exp(-0.5 * ((x - loc) / scale) ** 2) / (
            scale * np.sqrt(2 * np.pi)
        )
    return DensityGrid(grid, values / integrate(values, grid))


def uniform_density(grid):
    return DensityGrid(grid, np.ones(grid.n_points))


def linear_density(grid):
    """f(x) = 2x; the trapezoid rule integrates it exactly."""
    return DensityGrid(grid, 2.0 * grid.nodes)


@pytest.fixture
def random_density():
    return gaussian_bump_mixture
