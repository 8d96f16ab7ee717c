"""Restoration error metrics and per-trial comparison reports."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .density import DensityGrid
from .errors import DivisionByZeroBaseline, EmptySet, ValidationError
from .grids import integrate, require_same_grid

BASELINE_METHOD = "ddr"


def iae(restored: DensityGrid, truth: DensityGrid) -> float:
    """Integrated absolute error between a restored and a true density."""
    require_same_grid(restored.grid, truth.grid)
    return integrate(np.abs(restored.values - truth.values), truth.grid)


def miae(restored_set, truth_set) -> float:
    """Mean IAE over paired restored/true densities."""
    if len(restored_set) != len(truth_set):
        raise ValidationError("restored and truth sets must have equal length")
    if not restored_set:
        raise EmptySet("MIAE over an empty set is undefined")
    return float(np.mean([iae(r, t) for r, t in zip(restored_set, truth_set)]))


def relative_miae(method_miae: float, ddr_miae: float) -> float:
    """MIAE ratio against the DDR baseline; below 1 beats the baseline."""
    if ddr_miae == 0.0:
        raise DivisionByZeroBaseline("baseline MIAE is zero")
    return method_miae / ddr_miae


@dataclass(frozen=True)
class TrialReport:
    """Errors of every method on one train/test split.

    ``iae_values`` maps method name to the per-test-density IAE list;
    ``miae_values`` holds each method's mean; ``relative_miae_values``
    holds each method's MIAE divided by the DDR baseline's (absent when
    the trial did not run DDR).
    """

    trial: int
    seed: int
    iae_values: dict = field(repr=False)
    miae_values: dict = field(default=None)
    relative_miae_values: dict = field(default=None)

    def __post_init__(self):
        miaes = {
            name: float(np.mean(vals)) for name, vals in self.iae_values.items()
        }
        if self.miae_values is not None and any(
            abs(self.miae_values[k] - miaes[k]) > 1e-12 for k in miaes
        ):
            raise ValidationError("MIAE entries disagree with the IAE lists")
        object.__setattr__(self, "miae_values", miaes)
        if self.relative_miae_values is None:
            rel = {}
            if BASELINE_METHOD in miaes:
                base = miaes[BASELINE_METHOD]
                rel = {name: relative_miae(m, base) for name, m in miaes.items()}
            object.__setattr__(self, "relative_miae_values", rel)

    def to_dict(self) -> dict:
        return {
            "trial": self.trial,
            "seed": self.seed,
            "iae": {k: list(map(float, v)) for k, v in self.iae_values.items()},
            "miae": dict(self.miae_values),
            "relative_miae": dict(self.relative_miae_values),
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "TrialReport":
        return cls(
            trial=int(payload["trial"]),
            seed=int(payload["seed"]),
            iae_values=payload["iae"],
            miae_values=payload.get("miae"),
            relative_miae_values=payload.get("relative_miae"),
        )
