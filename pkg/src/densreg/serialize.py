"""File formats: CSV for curves and samples, JSON for models and manifests.

All writes are atomic (temp file then rename) so concurrent producers never
leave partial artifacts. Floats are written with shortest round-trip
representation, which keeps repeated runs byte-identical.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import WarpingGrid
from .density import DensityGrid, SupportInterval
from .errors import ValidationError
from .fpca import FpcaModel
from .grids import Grid
from .lqd import LqdFunction
from .metrics import TrialReport
from .rkhs import TrainedRkhsModel


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(float(v)) if isinstance(v, float) else str(v) for v in row))
    return "\n".join(lines) + "\n"


def write_samples_csv(path, values, segment_ids=None) -> None:
    """Write samples in the ingestion format: `value[,segment_id]`."""
    values = np.asarray(values, dtype=float).ravel()
    if segment_ids is None:
        rows = ((float(v),) for v in values)
        atomic_write_text(path, _csv_text(["value"], rows))
    else:
        rows = ((float(v), s) for v, s in zip(values, segment_ids))
        atomic_write_text(path, _csv_text(["value", "segment_id"], rows))


def read_samples_csv(path, segment=None) -> np.ndarray:
    """Read a samples CSV; header row with a `value` column is required.

    When the file carries a `segment_id` column, ``segment`` selects one
    segment; omitting it returns every row. Malformed rows raise a
    ValidationError naming the file and line.
    """
    path = Path(path)
    values = []
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: empty file; header row required") from None
        header = [h.strip() for h in header]
        if "value" not in header:
            raise ValidationError(f"{path}:1: header must contain a 'value' column")
        value_col = header.index("value")
        segment_col = header.index("segment_id") if "segment_id" in header else None
        if segment is not None and segment_col is None:
            raise ValidationError(f"{path}: no segment_id column to filter on")
        for line_no, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) <= value_col:
                raise ValidationError(f"{path}:{line_no}: missing value field")
            if segment is not None and row[segment_col].strip() != str(segment):
                continue
            try:
                values.append(float(row[value_col]))
            except ValueError:
                raise ValidationError(
                    f"{path}:{line_no}: cannot parse value {row[value_col]!r}"
                ) from None
    return np.asarray(values, dtype=float)


def _support_to_dict(support: SupportInterval | None):
    if support is None:
        return None
    return {
        "lower": support.lower,
        "upper": support.upper,
        "kappa_lower": support.kappa_lower,
        "kappa_upper": support.kappa_upper,
        "sample_std": support.sample_std,
        "sample_size": support.sample_size,
    }


def _support_from_dict(payload):
    if payload is None:
        return None
    return SupportInterval(**payload)


def write_density_csv(path, density: DensityGrid, support=None, alpha=None) -> None:
    """Write a density as `t,f` rows plus a JSON metadata sidecar."""
    rows = zip(density.grid.nodes.tolist(), density.values.tolist())
    atomic_write_text(path, _csv_text(["t", "f"], rows))
    sidecar = {
        "grid_points": density.grid.n_points,
        "support": _support_to_dict(support),
        "alpha": alpha,
    }
    atomic_write_text(Path(path).with_suffix(".json"), json.dumps(sidecar, indent=1))


def _read_curve_csv(path, expected_header):
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = [h.strip() for h in next(reader, [])]
        if header != expected_header:
            raise ValidationError(
                f"{path}:1: expected header {','.join(expected_header)}, got {','.join(header)}"
            )
        columns = ([], [])
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                columns[0].append(float(row[0]))
                columns[1].append(float(row[1]))
            except (ValueError, IndexError):
                raise ValidationError(f"{path}:{line_no}: malformed row {row!r}") from None
    return np.asarray(columns[0]), np.asarray(columns[1])


def read_density_csv(path) -> tuple[DensityGrid, dict]:
    """Read a `t,f` density CSV; returns the density and sidecar metadata."""
    t, f = _read_curve_csv(path, ["t", "f"])
    density = DensityGrid(Grid(t.size), f)
    sidecar_path = Path(path).with_suffix(".json")
    meta = {}
    if sidecar_path.exists():
        meta = json.loads(sidecar_path.read_text(encoding="utf-8"))
    return density, meta


def write_lqd_csv(path, psi: LqdFunction) -> None:
    rows = zip(psi.grid.nodes.tolist(), psi.values.tolist())
    atomic_write_text(path, _csv_text(["t", "psi"], rows))


def read_lqd_csv(path) -> LqdFunction:
    t, vals = _read_curve_csv(path, ["t", "psi"])
    return LqdFunction(Grid(t.size), vals)


def write_warping_csv(path, warping: WarpingGrid) -> None:
    rows = zip(
        warping.grid.nodes.tolist(), warping.gamma.tolist(), warping.dgamma.tolist()
    )
    atomic_write_text(path, _csv_text(["x", "gamma", "dgamma"], rows))


def fpca_to_dict(model: FpcaModel) -> dict:
    return {
        "grid_points": model.grid.n_points,
        "mean": model.mean.tolist(),
        "eigenfunctions": model.eigenfunctions.tolist(),
        "eigenvalues": model.eigenvalues.tolist(),
    }


def fpca_from_dict(payload: dict) -> FpcaModel:
    return FpcaModel(
        grid=Grid(payload["grid_points"]),
        mean=np.asarray(payload["mean"], dtype=float),
        eigenfunctions=np.asarray(payload["eigenfunctions"], dtype=float),
        eigenvalues=np.asarray(payload["eigenvalues"], dtype=float),
    )


def write_fpca_json(path, model: FpcaModel) -> None:
    atomic_write_text(path, json.dumps(fpca_to_dict(model)))


def read_fpca_json(path) -> FpcaModel:
    return fpca_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def model_to_dict(model: TrainedRkhsModel, predictor_support=None, target_support=None) -> dict:
    return {
        "format": "densreg-rkhs-model",
        "version": __version__,
        "grid_points": model.grid.n_points,
        "coefficients": model.coefficients.tolist(),
        "sigma": model.sigma,
        "lambda_s": model.lambda_s,
        "alpha": model.alpha,
        "predictor_values": model.predictor_values.tolist(),
        "fpca": fpca_to_dict(model.fpca),
        "predictor_support": _support_to_dict(predictor_support),
        "target_support": _support_to_dict(target_support),
    }


def model_from_dict(payload: dict):
    """Returns (model, predictor_support, target_support)."""
    model = TrainedRkhsModel(
        grid=Grid(payload["grid_points"]),
        coefficients=np.asarray(payload["coefficients"], dtype=float),
        sigma=float(payload["sigma"]),
        lambda_s=float(payload["lambda_s"]),
        predictor_values=np.asarray(payload["predictor_values"], dtype=float),
        fpca=fpca_from_dict(payload["fpca"]),
        alpha=float(payload["alpha"]),
    )
    return (
        model,
        _support_from_dict(payload.get("predictor_support")),
        _support_from_dict(payload.get("target_support")),
    )


def write_model_json(path, model: TrainedRkhsModel, predictor_support=None, target_support=None) -> None:
    atomic_write_text(path, json.dumps(model_to_dict(model, predictor_support, target_support)))


def read_model_json(path):
    return model_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def write_reports_json(path, reports, manifest=None) -> None:
    payload = {
        "version": __version__,
        "manifest": manifest,
        "reports": [r.to_dict() for r in reports],
    }
    atomic_write_text(path, json.dumps(payload, indent=1))


def write_benchmark_csvs(out_dir, reports) -> tuple[Path, Path]:
    """Write the per-trial summary and the per-density IAE tables.

    Returns the (summary_path, iae_path) pair. Relative MIAE cells are
    empty when the trial had no DDR baseline.
    """
    out_dir = Path(out_dir)
    summary_rows = []
    iae_rows = []
    for report in reports:
        for method in sorted(report.miae_values):
            rel = report.relative_miae_values.get(method)
            summary_rows.append(
                (
                    report.trial,
                    method,
                    repr(float(report.miae_values[method])),
                    "" if rel is None else repr(float(rel)),
                )
            )
            for idx, value in enumerate(report.iae_values[method]):
                iae_rows.append((report.trial, method, idx, float(value)))
    summary_path = out_dir / "trials.csv"
    iae_path = out_dir / "iae.csv"
    atomic_write_text(
        summary_path, _csv_text(["trial", "method", "miae", "relative_miae"], summary_rows)
    )
    atomic_write_text(iae_path, _csv_text(["trial", "method", "test_index", "iae"], iae_rows))
    return summary_path, iae_path


def read_reports_json(path):
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    return [TrialReport.from_dict(r) for r in payload["reports"]], payload.get("manifest")


def provenance(config_dict: dict, extra: dict | None = None) -> dict:
    """Replay record: canonical config, its digest, and the library version."""
    canonical = json.dumps(config_dict, sort_keys=True)
    record = {
        "version": __version__,
        "config": config_dict,
        "config_digest": hashlib.sha256(canonical.encode()).hexdigest(),
    }
    if extra:
        record.update(extra)
    return record


def write_provenance(path, config_dict: dict, extra: dict | None = None) -> None:
    atomic_write_text(path, json.dumps(provenance(config_dict, extra), indent=1))
