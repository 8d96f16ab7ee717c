import json

import numpy as np
import pytest

from densreg import (
    SupportInterval,
    TrialReport,
    estimate_warping,
    fit_fpca,
    lqd,
    mix_with_uniform,
    predict_scores,
    train_restorer,
)
from densreg.errors import ValidationError
from densreg.lqd import LqdFunction
from densreg.serialize import (
    atomic_write_text,
    fpca_from_dict,
    fpca_to_dict,
    provenance,
    read_density_csv,
    read_lqd_csv,
    read_model_json,
    read_reports_json,
    read_samples_csv,
    write_benchmark_csvs,
    write_density_csv,
    write_lqd_csv,
    write_model_json,
    write_reports_json,
    write_samples_csv,
    write_warping_csv,
)
from conftest import gaussian_bump_mixture


class TestSamplesCsv:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "samples.csv"
        values = np.array([0.25, 0.5, 0.125])
        write_samples_csv(path, values)
        np.testing.assert_array_equal(read_samples_csv(path), values)
        assert path.read_text().splitlines()[0] == "value"

    def test_segment_filter(self, tmp_path):
        path = tmp_path / "segmented.csv"
        write_samples_csv(path, [0.1, 0.2, 0.3, 0.4], ["d0", "d1", "d0", "d1"])
        np.testing.assert_array_equal(read_samples_csv(path, segment="d0"), [0.1, 0.3])
        np.testing.assert_array_equal(read_samples_csv(path), [0.1, 0.2, 0.3, 0.4])

    def test_missing_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0.1\n0.2\n")
        with pytest.raises(ValidationError, match="value"):
            read_samples_csv(path)

    def test_malformed_row_names_file_and_line(self, tmp_path):
        path = tmp_path / "corrupt.csv"
        path.write_text("value\n0.1\nnot-a-number\n")
        with pytest.raises(ValidationError, match=r"corrupt\.csv:3"):
            read_samples_csv(path)

    def test_filter_without_segment_column(self, tmp_path):
        path = tmp_path / "plain.csv"
        write_samples_csv(path, [0.1])
        with pytest.raises(ValidationError):
            read_samples_csv(path, segment="d0")


class TestCurveCsv:
    def test_density_round_trip_with_sidecar(self, tmp_path, grid201):
        rng = np.random.default_rng(0)
        density = gaussian_bump_mixture(rng, grid201)
        support = SupportInterval(lower=-3.0, upper=5.0, sample_std=1.2, sample_size=40)
        path = tmp_path / "density.csv"
        write_density_csv(path, density, support=support, alpha=0.5)
        loaded, meta = read_density_csv(path)
        np.testing.assert_array_equal(loaded.values, density.values)
        assert meta["grid_points"] == 201
        assert meta["alpha"] == 0.5
        assert meta["support"]["lower"] == -3.0

    def test_lqd_round_trip(self, tmp_path, grid201):
        rng = np.random.default_rng(1)
        psi = lqd(mix_with_uniform(gaussian_bump_mixture(rng, grid201), 0.4))
        path = tmp_path / "psi.csv"
        write_lqd_csv(path, psi)
        loaded = read_lqd_csv(path)
        np.testing.assert_array_equal(loaded.values, psi.values)

    def test_warping_csv_columns(self, tmp_path, grid201):
        rng = np.random.default_rng(2)
        g = mix_with_uniform(gaussian_bump_mixture(rng, grid201), 0.3)
        f = mix_with_uniform(gaussian_bump_mixture(rng, grid201), 0.3)
        path = tmp_path / "warp.csv"
        write_warping_csv(path, estimate_warping(g, f))
        header = path.read_text().splitlines()[0]
        assert header == "x,gamma,dgamma"

    def test_wrong_header_rejected(self, tmp_path):
        path = tmp_path / "wrong.csv"
        path.write_text("a,b\n0,1\n")
        with pytest.raises(ValidationError):
            read_density_csv(path)


class TestModelJson:
    def test_fpca_round_trip(self, grid201):
        rng = np.random.default_rng(3)
        funcs = [
            lqd(mix_with_uniform(gaussian_bump_mixture(rng, grid201), 0.5))
            for _ in range(6)
        ]
        model = fit_fpca(funcs)
        clone = fpca_from_dict(fpca_to_dict(model))
        np.testing.assert_array_equal(clone.mean, model.mean)
        np.testing.assert_array_equal(clone.eigenfunctions, model.eigenfunctions)
        np.testing.assert_array_equal(clone.eigenvalues, model.eigenvalues)

    def test_trained_model_round_trip_preserves_predictions(self, tmp_path, grid201):
        rng = np.random.default_rng(4)
        pairs = [
            (gaussian_bump_mixture(rng, grid201), gaussian_bump_mixture(rng, grid201))
            for _ in range(8)
        ]
        model = train_restorer(pairs, alpha=0.5, truncation=4)
        path = tmp_path / "model.json"
        support = SupportInterval(lower=0.0, upper=10.0)
        write_model_json(path, model, predictor_support=support)
        loaded, pred_support, target_support = read_model_json(path)
        assert pred_support.upper == 10.0
        assert target_support is None
        np.testing.assert_array_equal(loaded.coefficients, model.coefficients)
        np.testing.assert_array_equal(loaded.predictor_values, model.predictor_values)
        assert (loaded.sigma, loaded.lambda_s, loaded.alpha) == (
            model.sigma,
            model.lambda_s,
            model.alpha,
        )
        probe = lqd(mix_with_uniform(gaussian_bump_mixture(rng, grid201), 0.5))
        # predictions agree to round-off (BLAS summation order may differ
        # between distinct buffers of identical content)
        np.testing.assert_allclose(
            predict_scores(loaded, probe), predict_scores(model, probe), atol=1e-12
        )


class TestReportsAndProvenance:
    def test_reports_round_trip(self, tmp_path):
        reports = [
            TrialReport(trial=0, seed=1, iae_values={"ddr": [0.2, 0.4], "dwr": [0.1, 0.3]}),
            TrialReport(trial=1, seed=2, iae_values={"ddr": [0.5], "dwr": [0.4]}),
        ]
        path = tmp_path / "reports.json"
        write_reports_json(path, reports, manifest={"master_seed": 9})
        loaded, manifest = read_reports_json(path)
        assert manifest == {"master_seed": 9}
        assert loaded[0].miae_values == reports[0].miae_values

    def test_benchmark_csv_schema(self, tmp_path):
        reports = [TrialReport(trial=0, seed=1, iae_values={"ddr": [0.2], "dwr": [0.1]})]
        summary, iae_path = write_benchmark_csvs(tmp_path, reports)
        lines = summary.read_text().splitlines()
        assert lines[0] == "trial,method,miae,relative_miae"
        assert lines[1].startswith("0,ddr,0.2,1.0")
        assert iae_path.read_text().splitlines()[0] == "trial,method,test_index,iae"

    def test_provenance_digest_is_stable(self):
        a = provenance({"alpha": 0.5, "seed": 1})
        b = provenance({"seed": 1, "alpha": 0.5})
        assert a["config_digest"] == b["config_digest"]
        assert a["version"]

    def test_atomic_write_leaves_no_temp_files(self, tmp_path):
        path = tmp_path / "sub" / "out.txt"
        atomic_write_text(path, "hello")
        assert path.read_text() == "hello"
        assert [p.name for p in path.parent.iterdir()] == ["out.txt"]
