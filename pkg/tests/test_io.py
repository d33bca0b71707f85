import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import make_mixture
from uniformize import io as uio
from uniformize.errors import (
    InvalidInputError,
    ModelIntegrityError,
    ModelVersionError,
    ParseError,
)
from uniformize.synth import ConstantDim, MixtureDim, SynthSpec, generate
from uniformize.transformer import TransformModel, fit_model


class TestCsvMatrix:
    def test_basic_parse(self, tmp_path):
        path = tmp_path / "z.csv"
        path.write_text("z0,z1\n0.0,1.0\n2.0,3.0\n")
        out = uio.read_matrix(path)
        assert np.array_equal(out, [[0.0, 1.0], [2.0, 3.0]])

    def test_round_trip_exact(self, tmp_path):
        rng = np.random.default_rng(110)
        X = np.column_stack(
            [
                rng.standard_normal(50) * 1e-8,
                rng.standard_normal(50) * 1e8,
                rng.standard_normal(50) + np.pi,
            ]
        )
        path = tmp_path / "m.csv"
        uio.write_matrix(X, path)
        assert np.array_equal(uio.read_matrix(path), X)

    def test_header_written(self, tmp_path):
        path = tmp_path / "m.csv"
        uio.write_matrix([[1.0, 2.0]], path)
        assert path.read_text().splitlines()[0] == "z0,z1"

    def test_ragged_row(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("z0,z1\n1.0,2.0\n3.0\n")
        with pytest.raises(ParseError, match="line 3"):
            uio.read_matrix(path)

    def test_non_numeric_cell(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("z0,z1\n1.0,2.0\n3.0,oops\n")
        with pytest.raises(ParseError, match=r"line 3, column 1"):
            uio.read_matrix(path)

    def test_nan_cell_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("z0\n1.0\nnan\n")
        with pytest.raises(ParseError, match="not finite"):
            uio.read_matrix(path)

    def test_blank_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("z0\n1.0\n\n2.0\n")
        with pytest.raises(ParseError, match="line 3"):
            uio.read_matrix(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("")
        with pytest.raises(ParseError, match="empty"):
            uio.read_matrix(path)

    def test_header_only(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("z0,z1\n")
        with pytest.raises(ParseError, match="no data rows"):
            uio.read_matrix(path)

    def test_single_column(self, tmp_path):
        path = tmp_path / "one.csv"
        path.write_text("z0\n1.5\n2.5\n")
        assert uio.read_matrix(path).shape == (2, 1)

    def test_unknown_format(self, tmp_path):
        with pytest.raises(InvalidInputError):
            uio.read_matrix(tmp_path / "x.csv", fmt="parquet")


class TestNpyMatrix:
    def test_float64_round_trip(self, tmp_path):
        X = np.random.default_rng(111).standard_normal((20, 3))
        path = tmp_path / "m.npy"
        np.save(path, X)
        assert np.array_equal(uio.read_matrix(path), X)

    def test_float32_upcast(self, tmp_path):
        X = np.random.default_rng(112).standard_normal((5, 2)).astype(np.float32)
        path = tmp_path / "m.npy"
        np.save(path, X)
        out = uio.read_matrix(path)
        assert out.dtype == np.float64
        assert_allclose(out, X, rtol=1e-6)

    def test_one_dimensional_rejected(self, tmp_path):
        path = tmp_path / "m.npy"
        np.save(path, np.zeros(5))
        with pytest.raises(ParseError, match="2-D"):
            uio.read_matrix(path)

    def test_integer_dtype_rejected(self, tmp_path):
        path = tmp_path / "m.npy"
        np.save(path, np.zeros((3, 2), dtype=np.int64))
        with pytest.raises(ParseError, match="dtype"):
            uio.read_matrix(path)

    def test_big_endian_rejected(self, tmp_path):
        path = tmp_path / "m.npy"
        np.save(path, np.zeros((3, 2)).astype(">f8"))
        with pytest.raises(ParseError, match="dtype"):
            uio.read_matrix(path)

    def test_fortran_order_rejected(self, tmp_path):
        path = tmp_path / "m.npy"
        np.save(path, np.asfortranarray(np.random.default_rng(0).normal(size=(4, 3))))
        with pytest.raises(ParseError, match="Fortran"):
            uio.read_matrix(path)

    def test_newer_version_rejected(self, tmp_path):
        path = tmp_path / "m.npy"
        with open(path, "wb") as fh:
            np.lib.format.write_array(fh, np.zeros((2, 2)), version=(2, 0))
        with pytest.raises(ParseError, match="version"):
            uio.read_matrix(path)

    def test_garbage_magic(self, tmp_path):
        path = tmp_path / "m.npy"
        path.write_bytes(b"definitely not numpy data")
        with pytest.raises(ParseError, match="NPY"):
            uio.read_matrix(path)

    def test_truncated(self, tmp_path):
        path = tmp_path / "m.npy"
        np.save(path, np.zeros((100, 4)))
        data = path.read_bytes()
        path.write_bytes(data[: len(data) - 512])
        with pytest.raises(ParseError, match="truncated"):
            uio.read_matrix(path)

    def test_nan_rejected(self, tmp_path):
        X = np.zeros((4, 2))
        X[2, 1] = np.nan
        path = tmp_path / "m.npy"
        np.save(path, X)
        with pytest.raises(ParseError, match="row 2, column 1"):
            uio.read_matrix(path)


class TestFactors:
    def test_round_trip(self, tmp_path):
        Y = np.array([[0, 3], [2, 1], [5, 0]])
        path = tmp_path / "f.csv"
        uio.write_factors(Y, path)
        assert np.array_equal(uio.read_factors(path), Y)

    def test_non_integer_rejected(self, tmp_path):
        path = tmp_path / "f.csv"
        path.write_text("f0\n1.5\n")
        with pytest.raises(ParseError, match="integer"):
            uio.read_factors(path)


class TestModelSerialization:
    def fitted_model(self):
        rng = np.random.default_rng(113)
        X = np.column_stack(
            [
                np.concatenate([rng.normal(-3, 0.5, 2000), rng.normal(3, 0.5, 2000)]),
                rng.standard_normal(4000),
            ]
        )
        return fit_model(X)

    def test_round_trip_exact(self, tmp_path):
        model = self.fitted_model()
        path = tmp_path / "model.json"
        uio.write_model(model, path)
        assert uio.read_model(path) == model

    def test_version_check(self, tmp_path):
        model = self.fitted_model()
        doc = uio.model_to_dict(model)
        doc["format_version"] = "999"
        path = tmp_path / "model.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(ModelVersionError):
            uio.read_model(path)

    def test_weight_integrity(self, tmp_path):
        model = self.fitted_model()
        doc = uio.model_to_dict(model)
        doc["dimensions"][0]["components"][0]["weight"] = 0.3
        doc["dimensions"][0]["components"][1]["weight"] = 0.5
        path = tmp_path / "model.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(ModelIntegrityError, match="sum"):
            uio.read_model(path)

    def test_missing_field(self, tmp_path):
        doc = uio.model_to_dict(self.fitted_model())
        del doc["dimensions"][0]["bandwidth"]
        path = tmp_path / "model.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(ParseError, match="missing field"):
            uio.read_model(path)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text("{not json")
        with pytest.raises(ParseError, match="JSON"):
            uio.read_model(path)

    def test_decreasing_means_rejected(self, tmp_path):
        doc = uio.model_to_dict(self.fitted_model())
        comps = doc["dimensions"][0]["components"]
        comps[0]["mean"], comps[1]["mean"] = comps[1]["mean"], comps[0]["mean"]
        path = tmp_path / "model.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(ModelIntegrityError):
            uio.read_model(path)


class TestTruthModels:
    def test_all_mixture_is_loadable(self, tmp_path):
        spec = SynthSpec(
            n=100,
            seed=1,
            dimensions=(
                MixtureDim(components=make_mixture((0.5, -2.0, 1.0), (0.5, 2.0, 1.0)).components),
            ),
        )
        result = generate(spec)
        path = tmp_path / "truth.json"
        uio.write_truth_models(result.truth, 1, 100, path)
        model = uio.read_model(path)
        assert model.dimensions[0] == result.truth[0]

    def test_partial_truth_not_loadable(self, tmp_path):
        spec = SynthSpec(
            n=50,
            seed=2,
            dimensions=(
                MixtureDim(components=make_mixture((1.0, 0.0, 1.0)).components),
                ConstantDim(3.0),
            ),
        )
        result = generate(spec)
        path = tmp_path / "truth.json"
        uio.write_truth_models(result.truth, 2, 50, path)
        doc = json.loads(path.read_text())
        assert doc["dimensions"][1] is None
        with pytest.raises(ParseError, match="null dimensions"):
            uio.read_model(path)


class TestHistogramExport:
    def test_two_cluster_counts(self):
        X = np.array([[-1.0], [-1.0], [1.0], [1.0]])
        model = TransformModel(
            dimensions=(make_mixture((0.5, -1.0, 0.25), (0.5, 1.0, 0.25)),)
        )
        hist = uio.export_histogram(X, model, bins=2)
        dim = hist.dimensions[0]
        assert dim.counts.tolist() == [[2, 0], [0, 2]]
        assert len(dim.edges) == 3

    def test_count_conservation(self):
        rng = np.random.default_rng(114)
        X = np.column_stack(
            [
                np.concatenate([rng.normal(-3, 0.5, 3000), rng.normal(3, 0.5, 3000)]),
                rng.standard_normal(6000),
            ]
        )
        model = fit_model(X)
        hist = uio.export_histogram(X, model, bins=37)
        for dim in hist.dimensions:
            assert dim.counts.sum() == 6000

    def test_uniform_data_max_bin(self):
        # Multinomial tail: P(any of 50 bins > 1.35 * n/bins) is ~1e-6 at n=10000.
        rng = np.random.default_rng(115)
        X = rng.uniform(-4, 4, size=(10000, 1))
        model = fit_model(X)
        hist = uio.export_histogram(X, model, bins=50)
        totals = hist.dimensions[0].counts.sum(axis=0)
        assert totals.max() <= 1.35 * 10000 / 50

    def test_constant_column(self):
        X = np.full((20, 1), 3.0)
        model = fit_model(X)
        hist = uio.export_histogram(X, model, bins=4)
        dim = hist.dimensions[0]
        assert dim.counts.sum() == 20
        assert dim.collapsed

    def test_column_mismatch(self):
        model = TransformModel(dimensions=(make_mixture((1.0, 0.0, 1.0)),))
        with pytest.raises(InvalidInputError):
            uio.export_histogram(np.zeros((5, 2)), model, bins=4)

    def test_dict_schema(self):
        X = np.array([[-1.0], [0.5], [2.0]])
        model = TransformModel(dimensions=(make_mixture((1.0, 0.0, 1.0)),))
        doc = uio.histogram_to_dict(uio.export_histogram(X, model, bins=3))
        assert doc["bins"] == 3
        dim = doc["dimensions"][0]
        assert set(dim) == {"edges", "cluster_counts", "clusters", "collapsed"}
        assert len(dim["edges"]) == 4


class TestSynthSpecFile:
    def test_read(self, tmp_path):
        doc = {
            "n": 10,
            "seed": 3,
            "dimensions": [{"kind": "constant", "value": 1.0}],
        }
        path = tmp_path / "spec.json"
        path.write_text(json.dumps(doc))
        spec = uio.read_synth_spec(path)
        assert spec.n == 10

    def test_bad_json(self, tmp_path):
        path = tmp_path / "spec.json"
        path.write_text("nope{")
        with pytest.raises(ParseError):
            uio.read_synth_spec(path)

    def test_invalid_spec_wrapped(self, tmp_path):
        path = tmp_path / "spec.json"
        path.write_text(json.dumps({"n": 10, "seed": 0, "dimensions": []}))
        with pytest.raises(ParseError, match="dimensions"):
            uio.read_synth_spec(path)


class TestReportDict:
    def test_nulls_for_unselected(self):
        from uniformize.metrics import MetricReport

        doc = uio.report_to_dict(MetricReport(tc=0.5))
        assert doc["tc"] == 0.5
        assert doc["mig"] is None
        assert doc["beta_vae_score"] is None
        assert doc["tmc"] is None
