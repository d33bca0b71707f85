"""File formats: CSV/NPY matrices, JSON models, reports, and histograms.

CSV is the canonical interchange format (header row, finite decimals, 17
significant digits on write). NPY v1.0 files of little-endian float32 or
float64, C-order, 2-D are accepted read-only. Model JSON relies on
Python's shortest-round-trip float repr, so read(write(m)) reproduces
every float exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ._validation import as_factor_matrix, as_matrix
from .cluster import assign_clusters
from .errors import (
    InvalidInputError,
    ModelIntegrityError,
    ModelVersionError,
    ParseError,
)
from .metrics import MetricReport
from .mixture import GaussianComponent, MixtureModel
from .synth import SynthSpec, spec_from_dict
from .transformer import TransformModel

MODEL_FORMAT_VERSION = "1"


# ---------------------------------------------------------------------------
# sample matrices


def read_matrix(path, fmt: str | None = None) -> np.ndarray:
    """Read an n x d sample matrix from a CSV or NPY file.

    ``fmt`` is "csv" or "npy"; when omitted it is inferred from the file
    suffix (".npy" means NPY, anything else CSV).
    """
    path = str(path)
    if fmt is None:
        fmt = "npy" if path.endswith(".npy") else "csv"
    if fmt == "csv":
        return _read_csv(path)
    if fmt == "npy":
        return _read_npy(path)
    raise InvalidInputError(f"unknown matrix format {fmt!r}; use 'csv' or 'npy'")


def write_matrix(X, path, prefix: str = "z") -> None:
    """Write a matrix as CSV with a ``z0,z1,...`` header, losslessly."""
    X = as_matrix(X, "X")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(f"{prefix}{j}" for j in range(X.shape[1])) + "\n")
        for row in X:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def read_factors(path) -> np.ndarray:
    """Read integer factor labels from a CSV file."""
    raw = _read_csv(str(path))
    try:
        return as_factor_matrix(raw)
    except InvalidInputError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def write_factors(Y, path) -> None:
    Y = as_factor_matrix(Y)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(f"f{j}" for j in range(Y.shape[1])) + "\n")
        for row in Y:
            fh.write(",".join(str(int(v)) for v in row) + "\n")


def _read_csv(path: str) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError(f"{path}: file is empty")
    width = len(lines[0].split(","))
    if len(lines) < 2:
        raise ParseError(f"{path}: no data rows after the header")
    if any(not line.strip() for line in lines[1:]):
        _scan_csv_rows(path, lines, width)
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2, dtype=np.float64)
    except ValueError:
        _scan_csv_rows(path, lines, width)
        raise ParseError(f"{path}: malformed CSV")  # pragma: no cover - scan raises first
    if data.shape[1] != width:
        _scan_csv_rows(path, lines, width)
    if not np.isfinite(data).all():
        rows, cols = np.nonzero(~np.isfinite(data))
        raise ParseError(
            f"{path}: line {rows[0] + 2}, column {cols[0]}: value is not finite"
        )
    return data


def _scan_csv_rows(path: str, lines: list[str], width: int) -> None:
    """Slow re-parse that pinpoints the first malformed cell."""
    for i, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != width:
            raise ParseError(
                f"{path}: line {i}: expected {width} columns, got {len(cells)}"
            )
        for j, cell in enumerate(cells):
            try:
                value = float(cell)
            except ValueError:
                raise ParseError(
                    f"{path}: line {i}, column {j}: {cell.strip()!r} is not a number"
                ) from None
            if not np.isfinite(value):
                raise ParseError(f"{path}: line {i}, column {j}: value is not finite")


def _read_npy(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        try:
            version = np.lib.format.read_magic(fh)
        except ValueError as exc:
            raise ParseError(f"{path}: not an NPY file ({exc})") from exc
        if version != (1, 0):
            raise ParseError(f"{path}: unsupported NPY version {version[0]}.{version[1]}")
        shape, fortran_order, dtype = np.lib.format.read_array_header_1_0(fh)
        if len(shape) != 2:
            raise ParseError(f"{path}: expected 2-D array, got shape {shape}")
        if fortran_order:
            raise ParseError(f"{path}: Fortran-order arrays are not supported")
        if dtype.str not in ("<f4", "<f8"):
            raise ParseError(
                f"{path}: unsupported dtype {dtype.str!r}; need little-endian float32/float64"
            )
        count = shape[0] * shape[1]
        data = np.fromfile(fh, dtype=dtype, count=count)
    if data.size != count:
        raise ParseError(f"{path}: truncated data, expected {count} values got {data.size}")
    data = data.reshape(shape).astype(np.float64)
    if not np.isfinite(data).all():
        rows, cols = np.nonzero(~np.isfinite(data))
        raise ParseError(
            f"{path}: non-finite value at row {rows[0]}, column {cols[0]}"
        )
    return data


# ---------------------------------------------------------------------------
# transform models


def model_to_dict(model: TransformModel) -> dict:
    return {
        "format_version": MODEL_FORMAT_VERSION,
        "fit_config": {
            "grid_size": model.grid_size,
            "min_prominence": model.min_prominence,
            "output_range": [model.lo, model.hi],
        },
        "provenance": {"rows": model.n_rows, "columns": model.n_cols},
        "dimensions": [_dimension_to_dict(m) for m in model.dimensions],
    }


def _dimension_to_dict(m: MixtureModel) -> dict:
    return {
        "components": [
            {"weight": c.weight, "mean": c.mean, "variance": c.variance}
            for c in m.components
        ],
        "thresholds": list(m.thresholds),
        "bandwidth": m.bandwidth,
        "sample_count": m.sample_count,
        "collapsed": m.collapsed,
    }


def _dimension_from_dict(doc: dict, where: str) -> MixtureModel:
    try:
        components = tuple(
            GaussianComponent(
                weight=float(c["weight"]),
                mean=float(c["mean"]),
                variance=float(c["variance"]),
            )
            for c in doc["components"]
        )
        weight_sum = sum(c.weight for c in components)
        if abs(weight_sum - 1.0) > 1e-9:
            raise ModelIntegrityError(
                f"{where}: component weights sum to {weight_sum}, expected 1"
            )
        return MixtureModel(
            components=components,
            thresholds=tuple(float(t) for t in doc["thresholds"]),
            bandwidth=float(doc["bandwidth"]),
            sample_count=int(doc["sample_count"]),
            collapsed=bool(doc["collapsed"]),
        )
    except KeyError as exc:
        raise ParseError(f"{where}: missing field {exc}") from exc
    except InvalidInputError as exc:
        raise ModelIntegrityError(f"{where}: {exc}") from exc


def model_from_dict(doc: dict) -> TransformModel:
    version = doc.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ModelVersionError(
            f"unsupported model format_version {version!r}, expected {MODEL_FORMAT_VERSION!r}"
        )
    dims = doc.get("dimensions", [])
    if any(d is None for d in dims):
        raise ParseError("model document has null dimensions (partial ground truth file?)")
    try:
        config = doc["fit_config"]
        lo, hi = config["output_range"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"model document is malformed: {exc}") from exc
    dimensions = tuple(
        _dimension_from_dict(d, f"dimension {j}") for j, d in enumerate(dims)
    )
    try:
        return TransformModel(
            dimensions=dimensions,
            grid_size=int(config["grid_size"]),
            min_prominence=float(config["min_prominence"]),
            lo=float(lo),
            hi=float(hi),
            n_rows=int(doc.get("provenance", {}).get("rows", 0)),
        )
    except (KeyError, InvalidInputError) as exc:
        raise ModelIntegrityError(f"model document is inconsistent: {exc}") from exc


def write_model(model: TransformModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, indent=2)
        fh.write("\n")


def read_model(path) -> TransformModel:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON ({exc})") from exc
    return model_from_dict(doc)


def write_truth_models(truth: dict[int, MixtureModel], n_cols: int, n_rows: int, path) -> None:
    """Write per-dimension ground-truth mixtures from a generator run.

    Dimensions without a known mixture are recorded as null; the file is a
    loadable transform model only when every dimension has ground truth.
    """
    dims = [truth.get(j) for j in range(n_cols)]
    if all(d is not None for d in dims) and dims:
        model = TransformModel(dimensions=tuple(dims), n_rows=n_rows)
        write_model(model, path)
        return
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "dimensions": [None if d is None else _dimension_to_dict(d) for d in dims],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# histograms


@dataclass(frozen=True)
class DimensionHistogram:
    """Clustered histogram of one dimension: shared edges, counts per cluster."""

    edges: np.ndarray
    counts: np.ndarray  # shape (n_clusters, bins)
    collapsed: bool

    @property
    def n_clusters(self) -> int:
        return self.counts.shape[0]


@dataclass(frozen=True)
class HistogramExport:
    bins: int
    dimensions: tuple[DimensionHistogram, ...]


def export_histogram(X, model: TransformModel, bins: int = 100) -> HistogramExport:
    """Bucket each column into equal-width bins, counted per cluster label.

    Cluster labels come from the model's thresholds, so the bars show how
    the fitted components tile the data.
    """
    X = as_matrix(X, "X")
    if X.shape[1] != model.n_cols:
        raise InvalidInputError(
            f"matrix has {X.shape[1]} columns but the model was fitted on {model.n_cols}"
        )
    if bins < 1:
        raise InvalidInputError(f"bins must be positive, got {bins}")

    out = []
    for j, mix in enumerate(model.dimensions):
        col = X[:, j]
        lo, hi = float(col.min()), float(col.max())
        if lo == hi:
            lo, hi = lo - 0.5, hi + 0.5
        edges = np.linspace(lo, hi, bins + 1)
        labels = assign_clusters(col, mix.thresholds).labels
        k = len(mix.components)
        counts = np.stack(
            [np.histogram(col[labels == c + 1], bins=edges)[0] for c in range(k)]
        )
        out.append(DimensionHistogram(edges=edges, counts=counts, collapsed=mix.collapsed))
    return HistogramExport(bins=bins, dimensions=tuple(out))


def histogram_to_dict(hist: HistogramExport) -> dict:
    return {
        "bins": hist.bins,
        "dimensions": [
            {
                "edges": d.edges.tolist(),
                "cluster_counts": d.counts.tolist(),
                "clusters": d.n_clusters,
                "collapsed": d.collapsed,
            }
            for d in hist.dimensions
        ],
    }


# ---------------------------------------------------------------------------
# metric reports and synthesis specs


def report_to_dict(report: MetricReport) -> dict:
    return {
        "mig": report.mig,
        "tc": report.tc,
        "factor_vae_score": report.factor_vae_score,
        "correlation": None if report.correlation is None else report.correlation.tolist(),
        "beta_vae_score": report.beta_vae_score,
        "tmc": report.tmc,
    }


def read_synth_spec(path) -> SynthSpec:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON ({exc})") from exc
    try:
        return spec_from_dict(doc)
    except InvalidInputError as exc:
        raise ParseError(f"{path}: {exc}") from exc
