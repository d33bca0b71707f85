"""Disentanglement scores for (latent matrix, factor labels) pairs.

The estimators are chosen so that scores are invariant to per-column
monotone rescaling of the latents, which is what makes before/after
comparisons around a monotone transform meaningful: MIG uses equal-count
binning, total correlation uses the Gaussian closed form, and the
FactorVAE score normalizes by per-dimension standard deviation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ._validation import as_factor_matrix, as_matrix, check_same_rows
from .errors import InvalidInputError, NumericError

DEFAULT_MIG_BINS = 20
DEFAULT_VOTES = 800
DEFAULT_BATCH = 64


@dataclass
class MetricReport:
    """Scores for one dataset; fields are None when not requested.

    ``beta_vae_score`` and ``tmc`` are reserved slots for metrics this
    package does not compute (they need trained classifiers); they stay
    None and serialize as null.
    """

    mig: float | None = None
    tc: float | None = None
    factor_vae_score: float | None = None
    correlation: np.ndarray | None = None
    beta_vae_score: float | None = None
    tmc: float | None = None


def equal_count_bins(values, bins: int) -> np.ndarray:
    """Rank-based discretization into ``bins`` near-equal-count bins.

    Depends only on the ordering of ``values`` (ties broken by position),
    so any strictly increasing map of the column yields identical codes.
    """
    x = np.asarray(values)
    n = x.shape[0]
    order = np.argsort(x, kind="stable")
    codes = np.empty(n, dtype=np.int64)
    codes[order] = np.arange(n, dtype=np.int64) * bins // n
    return codes


def _discrete_mutual_info(a: np.ndarray, ka: int, b: np.ndarray, kb: int) -> float:
    """Plug-in mutual information (nats) of two integer code arrays."""
    joint = np.bincount(a * kb + b, minlength=ka * kb).reshape(ka, kb)
    joint = joint / a.shape[0]
    outer = joint.sum(axis=1, keepdims=True) * joint.sum(axis=0, keepdims=True)
    nz = joint > 0
    return float(np.sum(joint[nz] * (np.log(joint[nz]) - np.log(outer[nz]))))


def _discrete_entropy(codes: np.ndarray, k: int) -> float:
    p = np.bincount(codes, minlength=k) / codes.shape[0]
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


def mig(latents, factors, bins: int = DEFAULT_MIG_BINS) -> float:
    """Mutual information gap, averaged over factors and clamped to [0, 1].

    Per factor: bin every latent column into ``bins`` equal-count bins,
    compute plug-in mutual information with the factor, and take the gap
    between the two most informative latents normalized by the factor's
    entropy. Factors with a single observed class are skipped with a
    warning.
    """
    X = as_matrix(latents, "latents")
    Y = as_factor_matrix(factors)
    check_same_rows(X, Y, "latents", "factors")
    if bins < 2:
        raise InvalidInputError(f"bins must be at least 2, got {bins}")
    n, d = X.shape
    if n < 10 * bins:
        raise InvalidInputError(f"need at least {10 * bins} rows for {bins} bins, got {n}")

    codes = [equal_count_bins(X[:, i], bins) for i in range(d)]
    gaps = []
    for j in range(Y.shape[1]):
        _, y = np.unique(Y[:, j], return_inverse=True)
        k = int(y.max()) + 1
        if k < 2:
            warnings.warn(f"factor {j} has a single observed class; skipping", stacklevel=2)
            continue
        info = sorted(
            (_discrete_mutual_info(c, bins, y, k) for c in codes), reverse=True
        )
        runner_up = info[1] if d > 1 else 0.0
        gaps.append((info[0] - runner_up) / _discrete_entropy(y, k))
    if not gaps:
        raise InvalidInputError("every factor has a single observed class")
    return float(np.clip(np.mean(gaps), 0.0, 1.0))


def total_correlation(latents) -> float:
    """Total correlation (nats) under a Gaussian fit of the joint.

    Computed as 0.5 * (sum of log marginal variances - log determinant of
    the covariance). The covariance diagonal is nudged by 1e-10 * trace/d
    before evaluation, keeping the value finite and non-negative.
    """
    X = as_matrix(latents, "latents")
    n, d = X.shape
    if n <= d:
        raise InvalidInputError(f"need more rows than columns, got {n} rows for {d} columns")
    if d == 1:
        return 0.0

    cov = np.cov(X, rowvar=False)
    trace = float(np.trace(cov))
    if trace <= 0.0:
        raise NumericError(
            f"covariance is singular: columns {list(range(d))} all have zero variance"
        )
    cov[np.diag_indices_from(cov)] += 1e-10 * trace / d
    sign, logdet = np.linalg.slogdet(cov)
    if sign <= 0 or not np.isfinite(logdet):
        zero_var = np.flatnonzero(np.diag(cov) <= 0)
        raise NumericError(
            "covariance is singular after regularization"
            + (f": offending columns {zero_var.tolist()}" if zero_var.size else "")
        )
    tc = 0.5 * (float(np.sum(np.log(np.diag(cov)))) - logdet)
    return max(tc, 0.0)


def factor_vae_score(
    latents,
    factors,
    votes: int = DEFAULT_VOTES,
    batch: int = DEFAULT_BATCH,
    seed: int = 0,
) -> float:
    """Majority-vote accuracy of the fixed-factor / least-variance game.

    Each vote fixes one factor, draws ``batch`` rows sharing a value of it,
    and records which dimension of the std-normalized latents has the
    smallest variance. A majority-vote classifier is built from the first
    80% of votes and scored on the remaining 20%. Deterministic for a
    fixed seed.
    """
    X = as_matrix(latents, "latents")
    Y = as_factor_matrix(factors)
    check_same_rows(X, Y, "latents", "factors")
    if votes < 100:
        raise InvalidInputError(f"need at least 100 votes, got {votes}")
    if batch < 1:
        raise InvalidInputError(f"batch must be positive, got {batch}")

    std = X.std(axis=0)
    active = np.flatnonzero(std > 0)
    if active.size == 0:
        raise InvalidInputError("every latent dimension has zero variance")
    Z = X[:, active] / std[active]

    # Per factor: row-index pools of the classes with at least `batch` members.
    pools: dict[int, list[np.ndarray]] = {}
    for j in range(Y.shape[1]):
        values, counts = np.unique(Y[:, j], return_counts=True)
        eligible = [np.flatnonzero(Y[:, j] == v) for v, c in zip(values, counts) if c >= batch]
        if eligible:
            pools[j] = eligible
    if not pools:
        raise InvalidInputError(f"no factor class has {batch} or more samples")
    usable_factors = sorted(pools)

    rng = np.random.default_rng(seed)
    dim_votes = np.empty(votes, dtype=np.int64)
    factor_votes = np.empty(votes, dtype=np.int64)
    for v in range(votes):
        f = usable_factors[rng.integers(len(usable_factors))]
        rows = pools[f][rng.integers(len(pools[f]))]
        chosen = rng.choice(rows, size=batch, replace=False)
        dim_votes[v] = np.argmin(Z[chosen].var(axis=0))
        factor_votes[v] = f

    n_train = int(round(votes * 0.8))
    table = np.zeros((active.size, Y.shape[1]), dtype=np.int64)
    np.add.at(table, (dim_votes[:n_train], factor_votes[:n_train]), 1)
    classifier = np.argmax(table, axis=1)
    hits = classifier[dim_votes[n_train:]] == factor_votes[n_train:]
    return float(np.mean(hits))


def correlation_heatmap(latents, factors) -> np.ndarray:
    """Pearson correlation of every latent column with every factor column.

    Zero-variance columns produce zero entries and a warning.
    """
    X = as_matrix(latents, "latents")
    Y = as_factor_matrix(factors).astype(np.float64)
    check_same_rows(X, Y, "latents", "factors")
    n = X.shape[0]
    if n < 3:
        raise InvalidInputError(f"need at least 3 rows, got {n}")

    Xc = X - X.mean(axis=0)
    Yc = Y - Y.mean(axis=0)
    sx = np.sqrt(np.sum(Xc * Xc, axis=0))
    sy = np.sqrt(np.sum(Yc * Yc, axis=0))
    if np.any(sx == 0) or np.any(sy == 0):
        warnings.warn("zero-variance columns produce zero correlation", stacklevel=2)
    denom = np.outer(sx, sy)
    with np.errstate(invalid="ignore", divide="ignore"):
        corr = np.where(denom > 0, (Xc.T @ Yc) / np.where(denom > 0, denom, 1.0), 0.0)
    return np.clip(corr, -1.0, 1.0)


def compute_report(
    latents,
    factors=None,
    select: tuple[str, ...] = ("mig", "tc", "factor_vae", "correlation"),
    bins: int = DEFAULT_MIG_BINS,
    votes: int = DEFAULT_VOTES,
    batch: int = DEFAULT_BATCH,
    seed: int = 0,
) -> MetricReport:
    """Compute the selected metrics into a single report."""
    known = {"mig", "tc", "factor_vae", "correlation"}
    unknown = set(select) - known
    if unknown:
        raise InvalidInputError(f"unknown metrics {sorted(unknown)}; choose from {sorted(known)}")
    needs_factors = {"mig", "factor_vae", "correlation"} & set(select)
    if needs_factors and factors is None:
        raise InvalidInputError(f"metrics {sorted(needs_factors)} require factor labels")

    report = MetricReport()
    if "mig" in select:
        report.mig = mig(latents, factors, bins=bins)
    if "tc" in select:
        report.tc = total_correlation(latents)
    if "factor_vae" in select:
        report.factor_vae_score = factor_vae_score(
            latents, factors, votes=votes, batch=batch, seed=seed
        )
    if "correlation" in select:
        report.correlation = correlation_heatmap(latents, factors)
    return report
