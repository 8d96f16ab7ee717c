"""Command-line interface for the restoration workflow.

Subcommands: synth, estimate, transform, train, restore, cv, benchmark,
evaluate. A TOML config file supplies defaults; flags override it. Exit
codes: 0 success, 2 validation error, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path

from .config import PipelineConfig, load_config
from .density import SupportInterval, estimate_support, mix_with_uniform
from .errors import DensRegError, NumericalError, ValidationError
from .grids import Grid
from .lqd import lqd
from .metrics import TrialReport, iae
from .pipeline import (
    benchmark_extrapolation,
    benchmark_general,
    estimate_density,
    train_restorer,
)
from .rkhs import restore_distribution
from .selection import (
    HyperGrid,
    ddr_bandwidth_method,
    dwr_zeta_method,
    rkhs_lambda_method,
    select_hyperparameter,
)
from .serialize import (
    atomic_write_text,
    read_density_csv,
    read_model_json,
    read_samples_csv,
    write_benchmark_csvs,
    write_density_csv,
    write_lqd_csv,
    write_model_json,
    write_provenance,
    write_reports_json,
    write_samples_csv,
    _csv_text,
)
from .synth import DayScenario, generate_dataset

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

log = logging.getLogger("densreg")


def _parse_day_list(text: str) -> list[int]:
    """Parse day selections like '0-49' or '0,3,7-9'."""
    days = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-", 1)
            days.extend(range(int(lo), int(hi) + 1))
        elif part:
            days.append(int(part))
    if not days:
        raise ValidationError(f"no days selected from {text!r}")
    return days


def _parse_floats(text: str) -> tuple:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _config_from_args(args) -> PipelineConfig:
    overrides = {
        name: getattr(args, name, None)
        for name in (
            "grid_points",
            "alpha",
            "truncation",
            "lambda_s",
            "sigma",
            "seed",
            "days",
            "samples_per_day",
            "coupling",
            "trials",
            "train_days",
            "test_days",
            "analytic_truth",
        )
    }
    return load_config(getattr(args, "config", None), overrides)


def _scenario(config: PipelineConfig) -> DayScenario:
    return DayScenario.default(
        coupling=config.coupling, samples_per_day=config.samples_per_day
    )


def _load_dataset_pairs(dataset: Path, days: list[int], grid: Grid):
    """Estimated (predictor, target) density pairs for the given day files."""
    pairs = []
    for day in days:
        g_samples = read_samples_csv(dataset / f"day{day:03d}_a.csv")
        f_samples = read_samples_csv(dataset / f"day{day:03d}_b.csv")
        pairs.append(
            (estimate_density(g_samples, grid), estimate_density(f_samples, grid))
        )
    return pairs


def _file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def cmd_synth(args) -> int:
    config = _config_from_args(args)
    grid = Grid(config.grid_points)
    out = Path(args.out)
    records, manifest = generate_dataset(config.seed, config.days, _scenario(config), grid)
    for rec in records:
        write_samples_csv(out / f"day{rec.day_index:03d}_a.csv", rec.samples_a)
        write_samples_csv(out / f"day{rec.day_index:03d}_b.csv", rec.samples_b)
    atomic_write_text(out / "manifest.json", json.dumps(manifest, indent=1))
    write_provenance(out / "provenance.json", config.to_dict())
    print(f"wrote {len(records)} days to {out}")
    return EXIT_OK


def _support_from_flag(text: str | None, samples, config: PipelineConfig):
    if text in (None, "unit"):
        return None
    if text == "auto":
        return estimate_support(samples, config.kappa_lower, config.kappa_upper)
    lo, hi = (float(v) for v in text.split(","))
    return SupportInterval(lower=lo, upper=hi)


def cmd_estimate(args) -> int:
    config = _config_from_args(args)
    grid = Grid(config.grid_points)
    samples = read_samples_csv(args.samples, segment=args.segment)
    support = _support_from_flag(args.support, samples, config)
    density = estimate_density(samples, grid, support=support)
    write_density_csv(args.out, density, support=support, alpha=None)
    print(f"estimated density on {grid.n_points} nodes -> {args.out}")
    return EXIT_OK


def cmd_transform(args) -> int:
    config = _config_from_args(args)
    density, _ = read_density_csv(args.density)
    psi = lqd(mix_with_uniform(density, config.alpha, config.allow_any_alpha))
    write_lqd_csv(args.out, psi)
    print(f"wrote LQD function -> {args.out}")
    return EXIT_OK


def cmd_train(args) -> int:
    config = _config_from_args(args)
    grid = Grid(config.grid_points)
    dataset = Path(args.dataset)
    days = _parse_day_list(args.train_day_list)
    training = _load_dataset_pairs(dataset, days, grid)
    model = train_restorer(
        training,
        alpha=config.alpha,
        truncation=config.truncation,
        lambda_s=config.lambda_s,
        sigma=config.sigma,
        max_training_size=config.max_training_size,
    )
    write_model_json(args.out, model)
    write_provenance(
        Path(args.out).with_suffix(".provenance.json"),
        config.to_dict(),
        {"dataset": str(dataset), "train_days": days},
    )
    print(f"trained on {len(training)} day pairs -> {args.out}")
    return EXIT_OK


def cmd_restore(args) -> int:
    config = _config_from_args(args)
    model, predictor_support, _ = read_model_json(args.model)
    out_dir = Path(args.out_dir)
    model_digest = _file_digest(args.model)
    for input_path in args.inputs:
        input_path = Path(input_path)
        samples = read_samples_csv(input_path)
        g0 = estimate_density(samples, model.grid, support=predictor_support)
        restored = restore_distribution(model, g0)
        out_path = out_dir / f"{input_path.stem}_restored.csv"
        write_density_csv(out_path, restored, alpha=model.alpha)
        write_provenance(
            out_path.with_suffix(".provenance.json"),
            config.to_dict(),
            {
                "model": str(args.model),
                "model_digest": model_digest,
                "input": str(input_path),
                "input_digest": _file_digest(input_path),
            },
        )
        print(f"restored {input_path.name} -> {out_path}")
    return EXIT_OK


def cmd_cv(args) -> int:
    config = _config_from_args(args)
    grid = Grid(config.grid_points)
    training = _load_dataset_pairs(Path(args.dataset), _parse_day_list(args.day_list), grid)
    if args.method == "ddr":
        method = ddr_bandwidth_method(config.ddr_kernel)
        candidates = _parse_floats(args.candidates) if args.candidates else None
        if candidates is None:
            from .pipeline import default_bandwidth_grid

            hyper = default_bandwidth_grid(training, config.bandwidth_factors)
        else:
            hyper = HyperGrid("ddr_bandwidth", candidates)
    elif args.method == "dwr":
        method = dwr_zeta_method(config.dwr_kernel, config.alpha)
        hyper = HyperGrid(
            "dwr_zeta",
            _parse_floats(args.candidates) if args.candidates else config.zeta_grid,
        )
    else:
        method = rkhs_lambda_method(config.alpha, config.truncation, config.sigma)
        hyper = HyperGrid(
            "lambda_s",
            _parse_floats(args.candidates) if args.candidates else config.lambda_grid,
        )
    best, table = select_hyperparameter(method, training, hyper)
    rows = [(cand, risk) for cand, risk in table]
    atomic_write_text(args.out, _csv_text(["candidate", "risk"], rows))
    print(f"selected {hyper.name} = {best} -> {args.out}")
    return EXIT_OK


def cmd_benchmark(args) -> int:
    config = _config_from_args(args)
    if getattr(args, "extrapolation", False):
        config.extrapolation = True
    grid = Grid(config.grid_points)
    out = Path(args.out)
    if config.extrapolation:
        reports, manifest = benchmark_extrapolation(
            config.seed,
            grid,
            n_runs=config.trials,
            n_train=config.extrap_train_days,
            n_test=config.extrap_test_days,
            alpha=config.alpha,
            truncation=config.truncation,
            lambda_s=config.extrap_lambda_s,
            zeta_grid=config.zeta_grid,
            samples_per_day=config.samples_per_day,
            analytic_truth=config.analytic_truth,
        )
    else:
        reports, manifest = benchmark_general(
            config.seed,
            grid,
            _scenario(config),
            n_days=config.days,
            n_trials=config.trials,
            n_train=config.train_days,
            n_test=config.test_days,
            alpha=config.alpha,
            truncation=config.truncation,
            lambda_s=config.lambda_s,
            zeta_grid=config.zeta_grid,
            bandwidth_factors=config.bandwidth_factors,
            analytic_truth=config.analytic_truth,
        )
    summary_path, _ = write_benchmark_csvs(out, reports)
    write_reports_json(out / "reports.json", reports, manifest)
    write_provenance(out / "provenance.json", config.to_dict())
    print(f"wrote {len(reports)} trial reports -> {summary_path}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    method_dirs = {}
    for spec in args.methods:
        if "=" not in spec:
            raise ValidationError(f"--method expects NAME=DIR, got {spec!r}")
        name, _, directory = spec.partition("=")
        method_dirs[name] = Path(directory)
    truth_dir = Path(args.truth_dir)
    truth_files = sorted(p.name for p in truth_dir.glob("*.csv"))
    if not truth_files:
        raise ValidationError(f"no density CSVs found in {truth_dir}")
    iae_values = {}
    for name, directory in method_dirs.items():
        errors = []
        for fname in truth_files:
            truth, _ = read_density_csv(truth_dir / fname)
            restored, _ = read_density_csv(directory / fname)
            errors.append(iae(restored, truth))
        iae_values[name] = errors
    report = TrialReport(trial=0, seed=0, iae_values=iae_values)
    write_benchmark_csvs(Path(args.out_dir), [report])
    for name, value in sorted(report.miae_values.items()):
        rel = report.relative_miae_values.get(name)
        suffix = f" (relative {rel:.4f})" if rel is not None else ""
        print(f"{name}: MIAE = {value:.6f}{suffix}")
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="TOML config file")
    parser.add_argument("--grid-points", dest="grid_points", type=int)
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="densreg",
        description="Restore missing sensor-segment densities by distribution regression",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic paired-sensor dataset")
    _add_common(p)
    p.add_argument("--days", type=int)
    p.add_argument("--samples-per-day", dest="samples_per_day", type=int)
    p.add_argument("--coupling", type=float)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("estimate", help="estimate a density from a samples CSV")
    _add_common(p)
    p.add_argument("--samples", required=True)
    p.add_argument("--segment", help="segment_id to select")
    p.add_argument(
        "--support",
        help="'auto', 'unit', or 'LO,HI' in raw units (default: unit interval)",
    )
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("transform", help="mix and LQD-transform a density CSV")
    _add_common(p)
    p.add_argument("--density", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("train", help="train the LQD-RKHS restoration model")
    _add_common(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--train-days", dest="train_day_list", required=True, help="e.g. 0-49")
    p.add_argument("--truncation", type=int)
    p.add_argument("--lambda-s", dest="lambda_s", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("restore", help="restore densities for collaborator-day CSVs")
    _add_common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--input", dest="inputs", action="append", required=True)
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.set_defaults(func=cmd_restore)

    p = sub.add_parser("cv", help="leave-one-out cross-validation risk table")
    _add_common(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--days", dest="day_list", required=True, help="e.g. 0-19")
    p.add_argument("--method", choices=["ddr", "dwr", "lqd-rkhs"], required=True)
    p.add_argument("--candidates", help="comma-separated candidate values")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("benchmark", help="repeated-trial method comparison")
    _add_common(p)
    p.add_argument("--days", type=int)
    p.add_argument("--samples-per-day", dest="samples_per_day", type=int)
    p.add_argument("--coupling", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--train-days", dest="train_days", type=int)
    p.add_argument("--test-days", dest="test_days", type=int)
    p.add_argument("--extrapolation", action="store_true")
    p.add_argument("--analytic-truth", dest="analytic_truth", action="store_true", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("evaluate", help="score restored densities against truth")
    p.add_argument("--truth-dir", dest="truth_dir", required=True)
    p.add_argument(
        "--method",
        dest="methods",
        action="append",
        required=True,
        help="NAME=DIR of restored densities; repeatable",
    )
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.set_defaults(func=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except ValidationError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except DensRegError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
