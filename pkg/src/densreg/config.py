"""Pipeline configuration: one TOML file governs every numeric default.

Command-line flags override file values; the fully resolved configuration
is validated once against the owning modules' preconditions and embedded
in every artifact's provenance record.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, asdict, fields

from .density import ALPHA_MAX, ALPHA_MIN
from .errors import ValidationError
from .selection import DEFAULT_LAMBDA_GRID, DEFAULT_ZETA_GRID

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


@dataclass
class PipelineConfig:
    # shared numerics
    grid_points: int = 1001
    alpha: float = 0.5
    allow_any_alpha: bool = False
    truncation: int = 10
    lambda_s: float = 0.1
    sigma: float | None = None  # None means the training-data heuristic
    kappa_lower: float = 1.0
    kappa_upper: float = 1.0
    max_training_size: int = 5000
    # baseline kernels
    ddr_kernel: str = "gaussian"
    dwr_kernel: str = "triangular"
    # cross-validation grids
    lambda_grid: tuple = DEFAULT_LAMBDA_GRID
    zeta_grid: tuple = DEFAULT_ZETA_GRID
    bandwidth_factors: tuple = (0.125, 0.25, 0.5, 1.0, 2.0)
    # synthetic data
    seed: int = 20180406
    days: int = 178
    samples_per_day: int = 8640
    coupling: float = 0.8
    # benchmark protocol
    trials: int = 10
    train_days: int = 50
    test_days: int = 100
    extrapolation: bool = False
    extrap_train_days: int = 40
    extrap_test_days: int = 8
    extrap_lambda_s: float = 0.15
    analytic_truth: bool = False

    def validate(self) -> "PipelineConfig":
        if self.grid_points < 2:
            raise ValidationError(f"grid_points must be >= 2, got {self.grid_points}")
        if not 0 < self.alpha < 1:
            raise ValidationError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.allow_any_alpha and not ALPHA_MIN <= self.alpha <= ALPHA_MAX:
            raise ValidationError(
                f"alpha={self.alpha} outside [{ALPHA_MIN}, {ALPHA_MAX}] "
                "(set allow_any_alpha to override)"
            )
        if self.truncation < 1:
            raise ValidationError(f"truncation must be >= 1, got {self.truncation}")
        for name in ("lambda_s", "extrap_lambda_s"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive")
        if self.sigma is not None and self.sigma <= 0:
            raise ValidationError(f"sigma must be positive, got {self.sigma}")
        if self.kappa_lower < 1 or self.kappa_upper < 1:
            raise ValidationError("kappa_lower and kappa_upper must be >= 1")
        if self.days < 1:
            raise ValidationError(f"days must be >= 1, got {self.days}")
        if self.samples_per_day < 100:
            raise ValidationError("samples_per_day must be >= 100")
        if not 0 <= self.coupling <= 1:
            raise ValidationError(f"coupling must lie in [0, 1], got {self.coupling}")
        if self.trials < 1 or self.train_days < 2 or self.test_days < 1:
            raise ValidationError("trials >= 1, train_days >= 2, test_days >= 1 required")
        for name in ("lambda_grid", "zeta_grid", "bandwidth_factors"):
            if not tuple(getattr(self, name)):
                raise ValidationError(f"{name} must be a nonempty list")
        return self

    def to_dict(self) -> dict:
        out = asdict(self)
        for key, value in out.items():
            if isinstance(value, tuple):
                out[key] = list(value)
        return out


_FIELD_NAMES = {f.name for f in fields(PipelineConfig)}
_TUPLE_FIELDS = {"lambda_grid", "zeta_grid", "bandwidth_factors"}


def load_config(path=None, overrides: dict | None = None) -> PipelineConfig:
    """Build the configuration from defaults, an optional TOML file, and overrides."""
    values = {}
    if path is not None:
        with open(path, "rb") as handle:
            loaded = tomllib.load(handle)
        unknown = set(loaded) - _FIELD_NAMES
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        values.update(loaded)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in _FIELD_NAMES:
            raise ValidationError(f"unknown config override {key!r}")
        values[key] = value
    for key in _TUPLE_FIELDS & set(values):
        values[key] = tuple(values[key])
    return PipelineConfig(**values).validate()
