"""Extrema-based univariate clustering of a gridded density estimate.

Local maxima of the estimated density become cluster centroids, the local
minima between them become assignment thresholds, and each cluster yields
one Gaussian component: mean = centroid, variance = spread of the cluster's
members around that centroid, weight = member fraction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import as_vector
from .errors import InvalidInputError
from .kde import DensityEstimate
from .mixture import GaussianComponent

DEFAULT_MIN_PROMINENCE = 0.01


@dataclass(frozen=True)
class ExtremaSet:
    """Alternating local maxima and minima of a density curve.

    ``maxima`` and ``minima`` hold grid values (not indices) and strictly
    interleave: max < min < max < ... < max.
    """

    maxima: np.ndarray
    minima: np.ndarray

    def __post_init__(self):
        if len(self.maxima) < 1:
            raise InvalidInputError("extrema set needs at least one maximum")
        if len(self.minima) != len(self.maxima) - 1:
            raise InvalidInputError(
                f"{len(self.maxima)} maxima require {len(self.maxima) - 1} minima, "
                f"got {len(self.minima)}"
            )
        merged = np.empty(len(self.maxima) + len(self.minima))
        merged[::2] = self.maxima
        merged[1::2] = self.minima
        if np.any(np.diff(merged) <= 0):
            raise InvalidInputError("maxima and minima must strictly interleave")


@dataclass(frozen=True)
class ClusterAssignment:
    """Cluster labels in [1, K] for each sample plus per-cluster counts."""

    labels: np.ndarray
    cluster_sizes: np.ndarray

    @property
    def n_clusters(self) -> int:
        return len(self.cluster_sizes)


def _run_bounds(values: np.ndarray):
    """Start (inclusive) and end (exclusive) indices of equal-value runs."""
    change = np.flatnonzero(np.diff(values) != 0) + 1
    starts = np.concatenate(([0], change))
    ends = np.concatenate((change, [len(values)]))
    return starts, ends


def find_extrema(
    estimate: DensityEstimate,
    min_prominence_fraction: float = DEFAULT_MIN_PROMINENCE,
) -> ExtremaSet:
    """Locate density peaks and the valleys separating them.

    A grid point is a peak when its density exceeds both neighbours;
    plateaus collapse to their centre point and array boundaries count as
    lower neighbours. Peaks below ``min_prominence_fraction`` times the
    global maximum are discarded (pass 0 to keep every peak), and each
    surviving pair of adjacent peaks is separated by the lowest grid point
    strictly between them.
    """
    if not 0.0 <= min_prominence_fraction < 1.0:
        raise InvalidInputError(
            f"min_prominence_fraction must be in [0, 1), got {min_prominence_fraction}"
        )
    density = np.asarray(estimate.density, dtype=np.float64)
    if density.size == 0 or not np.any(density > 0):
        raise InvalidInputError("density estimate is empty or identically zero")

    starts, ends = _run_bounds(density)
    values = density[starts]
    left = np.concatenate(([-np.inf], values[:-1]))
    right = np.concatenate((values[1:], [-np.inf]))
    is_peak = (values > left) & (values > right)
    peak_idx = ((starts[is_peak] + ends[is_peak] - 1) // 2).astype(np.intp)

    keep = density[peak_idx] >= min_prominence_fraction * density.max()
    peak_idx = peak_idx[keep]

    valley_idx = np.empty(len(peak_idx) - 1, dtype=np.intp)
    for j, (a, b) in enumerate(zip(peak_idx[:-1], peak_idx[1:])):
        valley_idx[j] = a + 1 + np.argmin(density[a + 1 : b])

    grid = np.asarray(estimate.grid)
    return ExtremaSet(maxima=grid[peak_idx], minima=grid[valley_idx])


def assign_clusters(samples, minima) -> ClusterAssignment:
    """Label each sample by the interval between thresholds it falls in.

    With thresholds d_1 < ... < d_{K-1}: label 1 for z <= d_1, label j+1
    for d_j < z <= d_{j+1}, label K for z > d_{K-1}. No thresholds means a
    single cluster.
    """
    x = as_vector(samples)
    thresholds = np.asarray(minima, dtype=np.float64)
    if thresholds.size > 1 and np.any(np.diff(thresholds) <= 0):
        raise InvalidInputError("minima must be strictly increasing")
    labels = np.searchsorted(thresholds, x, side="left") + 1
    k = thresholds.size + 1
    sizes = np.bincount(labels, minlength=k + 1)[1:]
    return ClusterAssignment(labels=labels, cluster_sizes=sizes)


def estimate_components(
    samples,
    assignment: ClusterAssignment,
    maxima,
    bandwidth: float,
):
    """Estimate one Gaussian component per non-empty cluster.

    Component k uses the density peak ``maxima[k]`` as its mean (not the
    cluster sample mean), the spread of cluster members around that peak as
    its variance, and the member fraction as its weight. The variance is
    floored at ``bandwidth ** 2``: the density estimate cannot resolve
    structure narrower than one bandwidth, and singletons have no spread at
    all. Empty clusters are dropped; the surviving weights still sum to 1.

    Returns
    -------
    components : list of GaussianComponent
    kept : list of int
        Original cluster indices (0-based) of the returned components.
    """
    x = as_vector(samples)
    centroids = np.asarray(maxima, dtype=np.float64)
    k = assignment.n_clusters
    if centroids.size != k:
        raise InvalidInputError(
            f"expected {k} centroids for {k} clusters, got {centroids.size}"
        )
    if not bandwidth > 0:
        raise InvalidInputError(f"bandwidth must be positive, got {bandwidth}")

    idx = assignment.labels - 1
    sq_dev = (x - centroids[idx]) ** 2
    sq_sums = np.bincount(idx, weights=sq_dev, minlength=k)
    sizes = assignment.cluster_sizes
    floor = bandwidth * bandwidth

    components = []
    kept = []
    for j in range(k):
        size = int(sizes[j])
        if size == 0:
            continue
        variance = sq_sums[j] / (size - 1) if size > 1 else 0.0
        components.append(
            GaussianComponent(
                weight=size / x.size,
                mean=float(centroids[j]),
                variance=float(max(variance, floor)),
            )
        )
        kept.append(j)
    return components, kept
