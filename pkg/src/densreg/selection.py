"""Leave-one-out cross-validation for hyperparameter and strategy selection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .density import DensityGrid
from .errors import InsufficientData, NoViableCandidate, NumericalError, ValidationError
from .grids import integrate

# Default ridge-parameter candidates, bracketing the usual working values.
DEFAULT_LAMBDA_GRID = (0.01, 0.05, 0.1, 0.15, 0.2, 0.5)

# Default neighbour percentages for finite-support kernel strategies.
DEFAULT_ZETA_GRID = (10.0, 20.0, 30.0, 50.0, 75.0, 100.0)


@dataclass(frozen=True)
class HyperGrid:
    """A named, finite list of candidate values for one hyperparameter."""

    name: str
    candidates: tuple

    def __post_init__(self):
        cands = tuple(self.candidates)
        if not cands:
            raise ValidationError(f"hyperparameter grid {self.name!r} is empty")
        if len(set(cands)) != len(cands):
            raise ValidationError(f"hyperparameter grid {self.name!r} has duplicates")
        object.__setattr__(self, "candidates", cands)


def loocv_risk(method, training, theta) -> float:
    """Leave-one-out squared-L2 risk of a regression procedure.

    ``method(training_pairs, predictor, theta)`` must return the predicted
    target DensityGrid. Each training pair is held out in turn; the
    squared-L2 distance between its prediction and its true target is
    accumulated. A fold on which the method fails numerically (for
    example an empty kernel neighbourhood) makes the candidate's risk
    infinite rather than aborting the sweep.
    """
    if len(training) < 2:
        raise InsufficientData("LOOCV needs >= 2 training pairs")
    risk = 0.0
    for k in range(len(training)):
        held_g, held_f = training[k]
        rest = training[:k] + training[k + 1 :]
        try:
            predicted = method(rest, held_g, theta)
        except NumericalError:
            return float("inf")
        diff = predicted.values - held_f.values
        risk += integrate(diff * diff, held_f.grid)
    return risk


def _smoother(a, b):
    """Tie-break toward the smoother model: the larger numeric candidate."""
    try:
        return b > a
    except TypeError:
        return False


def select_hyperparameter(method, training, grid: HyperGrid):
    """Pick the candidate minimizing LOOCV risk.

    Returns
    -------
    (best, table) : tuple
        ``best`` is the selected candidate; ``table`` is the list of
        (candidate, risk) pairs in grid order. Exact risk ties resolve
        to the smoother (larger-valued) candidate.
    """
    table = [(theta, loocv_risk(method, training, theta)) for theta in grid.candidates]
    best, best_risk = None, float("inf")
    for theta, risk in table:
        if risk < best_risk or (risk == best_risk and best is not None and _smoother(best, theta)):
            best, best_risk = theta, risk
    if not np.isfinite(best_risk):
        raise NoViableCandidate(
            f"every candidate in {grid.name!r} produced infinite risk"
        )
    return best, table


def ddr_bandwidth_method(kind: str):
    """Adapter: DDR as a function of the fixed bandwidth h."""
    from .baselines import KernelSpec, ddr_predict

    def run(training, g0: DensityGrid, h):
        return ddr_predict(training, g0, KernelSpec(kind=kind, bandwidth=h))

    return run


def dwr_zeta_method(kind: str, alpha: float):
    """Adapter: DWR as a function of the neighbour percentage zeta."""
    from .baselines import KernelSpec, dwr_predict

    def run(training, g0: DensityGrid, zeta):
        return dwr_predict(training, g0, KernelSpec(kind=kind, neighbour_percent=zeta), alpha)

    return run


def rkhs_lambda_method(alpha: float, truncation: int, sigma=None):
    """Adapter: the full LQD-RKHS pipeline as a function of lambda_s."""
    from .pipeline import train_restorer
    from .rkhs import restore_distribution

    def run(training, g0: DensityGrid, lambda_s):
        model = train_restorer(
            training, alpha=alpha, truncation=truncation, lambda_s=lambda_s, sigma=sigma
        )
        return restore_distribution(model, g0)

    return run
