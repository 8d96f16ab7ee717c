"""densreg: restore a sensor's missing-segment density from a correlated sensor.

The core method maps densities to unconstrained Hilbert-space functions via
the log-quantile-density transform, regresses in the transformed space with
a Gaussian operator kernel in an RKHS, and maps the prediction back. Two
Nadaraya-Watson baselines (direct density regression and warping-function
regression), cross-validation, metrics, and a seeded synthetic-data
generator round out the toolkit.
"""

__version__ = "0.1.0"

from .grids import Grid, DEFAULT_GRID_POINTS
from .density import (
    CdfGrid,
    DensityGrid,
    MixedDensityGrid,
    QuantileGrid,
    SupportInterval,
    cdf_of,
    demix_uniform,
    estimate_support,
    kde_estimate,
    mix_with_uniform,
    quantile_of,
    rescale_to_unit,
    silverman_bandwidth,
    truncate_normalize,
)
from .lqd import LqdFunction, inverse_lqd, lqd, lqd_raw
from .fpca import FpcaModel, fit_fpca, project, reconstruct
from .rkhs import (
    GramMatrix,
    TrainedRkhsModel,
    fit,
    gram_matrix,
    kernel_vector,
    l2_distance_sq,
    predict_scores,
    restore_distribution,
    sigma_heuristic,
)
from .baselines import (
    KernelSpec,
    WarpingGrid,
    bandwidth_from_neighbours,
    combine_warpings,
    ddr_predict,
    dwr_predict,
    estimate_warping,
    l1_distance,
    nw_weights,
)
from .selection import HyperGrid, loocv_risk, select_hyperparameter
from .metrics import TrialReport, iae, miae, relative_miae
from .synth import DayScenario, DayRecord, extrapolation_scenario, generate_dataset, generate_day
from .pipeline import (
    benchmark_extrapolation,
    benchmark_general,
    estimate_density,
    train_restorer,
)

__all__ = [
    "Grid",
    "DEFAULT_GRID_POINTS",
    "CdfGrid",
    "DensityGrid",
    "MixedDensityGrid",
    "QuantileGrid",
    "SupportInterval",
    "cdf_of",
    "demix_uniform",
    "estimate_support",
    "kde_estimate",
    "mix_with_uniform",
    "quantile_of",
    "rescale_to_unit",
    "silverman_bandwidth",
    "truncate_normalize",
    "LqdFunction",
    "inverse_lqd",
    "lqd",
    "lqd_raw",
    "FpcaModel",
    "fit_fpca",
    "project",
    "reconstruct",
    "GramMatrix",
    "TrainedRkhsModel",
    "fit",
    "gram_matrix",
    "kernel_vector",
    "l2_distance_sq",
    "predict_scores",
    "restore_distribution",
    "sigma_heuristic",
    "KernelSpec",
    "WarpingGrid",
    "bandwidth_from_neighbours",
    "combine_warpings",
    "ddr_predict",
    "dwr_predict",
    "estimate_warping",
    "l1_distance",
    "nw_weights",
    "HyperGrid",
    "loocv_risk",
    "select_hyperparameter",
    "TrialReport",
    "iae",
    "miae",
    "relative_miae",
    "DayScenario",
    "DayRecord",
    "extrapolation_scenario",
    "generate_dataset",
    "generate_day",
    "benchmark_extrapolation",
    "benchmark_general",
    "estimate_density",
    "train_restorer",
]
