"""Fit per-dimension mixtures and map samples to a uniform range.

Fitting runs the density -> extrema -> clusters -> components pipeline on
every column independently. Transforming pushes each value through its
column's mixture CDF and rescales the result linearly onto [lo, hi]
(default [-4, 4]); inversion solves the monotone CDF by bracketed
bisection.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit, logit
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import as_matrix
from .cluster import DEFAULT_MIN_PROMINENCE, assign_clusters, estimate_components, find_extrema
from .errors import InvalidInputError, RangeError, ShapeMismatchError
from .kde import DEFAULT_GRID_SIZE, estimate_density
from .mixture import MixtureModel, invert_monotone

DEFAULT_RANGE = (-4.0, 4.0)

# Probabilities are clipped here before quantile inversion, so values at the
# exact edges of [lo, hi] stay finite.
_P_EDGE = 1e-12


@dataclass(frozen=True)
class TransformModel:
    """Fitted state: one mixture per input column plus the fit settings."""

    dimensions: tuple[MixtureModel, ...]
    grid_size: int = DEFAULT_GRID_SIZE
    min_prominence: float = DEFAULT_MIN_PROMINENCE
    lo: float = DEFAULT_RANGE[0]
    hi: float = DEFAULT_RANGE[1]
    n_rows: int = field(default=0)

    def __post_init__(self):
        object.__setattr__(self, "dimensions", tuple(self.dimensions))
        if len(self.dimensions) == 0:
            raise InvalidInputError("model needs at least one dimension")
        if not self.lo < self.hi:
            raise InvalidInputError(f"output range is empty: [{self.lo}, {self.hi}]")

    @property
    def n_cols(self) -> int:
        return len(self.dimensions)


def fit_dimension(
    samples,
    grid_size: int = DEFAULT_GRID_SIZE,
    min_prominence: float = DEFAULT_MIN_PROMINENCE,
) -> MixtureModel:
    """Fit the mixture of a single latent dimension.

    A dimension is flagged collapsed when its samples are constant or when
    any cluster holds at most one sample.
    """
    estimate = estimate_density(samples, grid_size=grid_size)
    extrema = find_extrema(estimate, min_prominence)
    assignment = assign_clusters(samples, extrema.minima)
    components, kept = estimate_components(
        samples, assignment, extrema.maxima, estimate.bandwidth
    )
    # Between consecutive surviving clusters, the right boundary of the
    # earlier one separates them; intervals of dropped clusters are empty.
    thresholds = tuple(float(extrema.minima[j]) for j in kept[:-1])
    collapsed = estimate.constant or bool(np.min(assignment.cluster_sizes) <= 1)
    return MixtureModel(
        components=tuple(components),
        thresholds=thresholds,
        bandwidth=estimate.bandwidth,
        sample_count=estimate.sample_count,
        collapsed=collapsed,
    )


def _resolve_jobs(n_jobs, n_cols: int) -> int:
    if n_jobs is None:
        return 1
    if n_jobs == -1:
        return min(os.cpu_count() or 1, n_cols)
    if n_jobs < 1:
        raise InvalidInputError(f"n_jobs must be a positive int, -1 or None, got {n_jobs}")
    return min(int(n_jobs), n_cols)


def _per_column(fn, n_cols: int, n_jobs) -> list:
    workers = _resolve_jobs(n_jobs, n_cols)
    if workers <= 1:
        return [fn(j) for j in range(n_cols)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(n_cols)))


def fit_model(
    X,
    grid_size: int = DEFAULT_GRID_SIZE,
    min_prominence: float = DEFAULT_MIN_PROMINENCE,
    output_range: tuple[float, float] = DEFAULT_RANGE,
    n_jobs=None,
) -> TransformModel:
    """Fit one mixture per column of ``X``; deterministic, no randomness."""
    X = as_matrix(X, "X", min_rows=2)
    lo, hi = (float(output_range[0]), float(output_range[1]))
    if not lo < hi:
        raise InvalidInputError(f"output range is empty: [{lo}, {hi}]")

    def fit_col(j: int) -> MixtureModel:
        try:
            return fit_dimension(X[:, j], grid_size, min_prominence)
        except InvalidInputError as exc:
            raise InvalidInputError(f"column {j}: {exc}") from exc

    dims = _per_column(fit_col, X.shape[1], n_jobs)
    return TransformModel(
        dimensions=tuple(dims),
        grid_size=grid_size,
        min_prominence=min_prominence,
        lo=lo,
        hi=hi,
        n_rows=X.shape[0],
    )


def _check_columns(model: TransformModel, X: np.ndarray) -> None:
    if X.shape[1] != model.n_cols:
        raise ShapeMismatchError(
            f"matrix has {X.shape[1]} columns but the model was fitted on {model.n_cols}"
        )


def _column_cdf(mix: MixtureModel, z: np.ndarray, smoothing) -> np.ndarray:
    if smoothing is None:
        return mix.cdf(z)
    t = (z[..., None] - mix.means) / (mix.stds * smoothing)
    return expit(t) @ mix.weights


def _column_quantile(mix: MixtureModel, p: np.ndarray, smoothing) -> np.ndarray:
    if smoothing is None:
        return mix.quantile(p)
    per_comp = mix.means + (mix.stds * smoothing) * logit(p)[..., None]
    return invert_monotone(
        lambda z: _column_cdf(mix, z, smoothing),
        p,
        per_comp.min(axis=-1),
        per_comp.max(axis=-1),
    )


def apply_model(model: TransformModel, X, smoothing=None, n_jobs=None) -> np.ndarray:
    """Map each entry through its column CDF onto [lo, hi]."""
    X = as_matrix(X, "X")
    _check_columns(model, X)
    span = model.hi - model.lo

    def transform_col(j: int) -> np.ndarray:
        return model.lo + span * _column_cdf(model.dimensions[j], X[:, j], smoothing)

    cols = _per_column(transform_col, model.n_cols, n_jobs)
    return np.column_stack(cols)


def invert_model(model: TransformModel, Z, smoothing=None, n_jobs=None) -> np.ndarray:
    """Recover latent values whose transform reproduces ``Z``.

    Entries must lie within [lo, hi] (up to 1e-9 slack); exact edge values
    map to the model's extreme quantiles rather than infinities.
    """
    Z = as_matrix(Z, "Z")
    _check_columns(model, Z)
    if Z.min() < model.lo - 1e-9 or Z.max() > model.hi + 1e-9:
        bad = np.nonzero((Z < model.lo - 1e-9) | (Z > model.hi + 1e-9))
        raise RangeError(
            f"value {Z[bad[0][0], bad[1][0]]!r} at row {bad[0][0]}, column {bad[1][0]} "
            f"is outside the output range [{model.lo}, {model.hi}]"
        )
    p_all = (Z - model.lo) / (model.hi - model.lo)
    np.clip(p_all, _P_EDGE, 1.0 - _P_EDGE, out=p_all)

    def invert_col(j: int) -> np.ndarray:
        return _column_quantile(model.dimensions[j], p_all[:, j], smoothing)

    cols = _per_column(invert_col, model.n_cols, n_jobs)
    return np.column_stack(cols)


class Uniformizer(TransformerMixin, BaseEstimator):
    """Transformer that uniformizes each feature of a sample matrix.

    ``fit`` learns a Gaussian mixture per column by clustering a kernel
    density estimate; ``transform`` applies the probability integral
    transform of that mixture, rescaled onto ``output_range``. Columns are
    handled independently, so the transform is monotone per feature and the
    output is uniformly distributed wherever the mixture fits the data.

    Parameters
    ----------
    grid_size : int, default 1024
        Resolution of the density grid used during fitting.
    min_prominence : float, default 0.01
        Density peaks below this fraction of the tallest peak are ignored.
        Zero keeps every peak.
    output_range : (float, float), default (-4.0, 4.0)
        Target interval of the transformed values.
    edge_smoothing : float, optional
        Off by default. When set, child Gaussian CDFs are replaced by
        logistic curves with this temperature, softening the sharp edges
        that variance underestimation can cause. Exactness tests apply to
        the default (disabled) mode only.
    n_jobs : int, optional
        Columns processed in parallel (-1 for all cores). Results do not
        depend on this value.

    Attributes
    ----------
    model_ : TransformModel
        Fitted per-column mixtures; serializable via
        :func:`uniformize.io.write_model`.

    Examples
    --------
    >>> import numpy as np
    >>> from uniformize import Uniformizer
    >>> rng = np.random.default_rng(0)
    >>> X = np.concatenate([rng.normal(-3, 0.5, 5000), rng.normal(3, 0.5, 5000)])
    >>> U = Uniformizer().fit_transform(X.reshape(-1, 1))
    >>> bool((U >= -4).all() and (U <= 4).all())
    True
    """

    def __init__(
        self,
        grid_size: int = DEFAULT_GRID_SIZE,
        min_prominence: float = DEFAULT_MIN_PROMINENCE,
        output_range: tuple[float, float] = DEFAULT_RANGE,
        edge_smoothing: float | None = None,
        n_jobs: int | None = None,
    ):
        self.grid_size = grid_size
        self.min_prominence = min_prominence
        self.output_range = output_range
        self.edge_smoothing = edge_smoothing
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        """Fit one mixture per column of ``X``; ``y`` is ignored."""
        if self.edge_smoothing is not None and not self.edge_smoothing > 0:
            raise InvalidInputError(
                f"edge_smoothing must be positive or None, got {self.edge_smoothing}"
            )
        self.model_ = fit_model(
            X,
            grid_size=self.grid_size,
            min_prominence=self.min_prominence,
            output_range=self.output_range,
            n_jobs=self.n_jobs,
        )
        self.n_features_in_ = self.model_.n_cols
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "model_")
        return apply_model(self.model_, X, self.edge_smoothing, self.n_jobs)

    def inverse_transform(self, Z) -> np.ndarray:
        check_is_fitted(self, "model_")
        return invert_model(self.model_, Z, self.edge_smoothing, self.n_jobs)

    @classmethod
    def from_model(cls, model: TransformModel, **kwargs) -> "Uniformizer":
        """Rebuild a fitted transformer from a (de)serialized model."""
        est = cls(
            grid_size=model.grid_size,
            min_prominence=model.min_prominence,
            output_range=(model.lo, model.hi),
            **kwargs,
        )
        est.model_ = model
        est.n_features_in_ = model.n_cols
        return est
