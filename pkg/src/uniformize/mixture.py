"""Gaussian mixture representation of one latent dimension.

A MixtureModel is immutable once built: evaluation methods are pure and the
sampler takes an explicit seed, so instances are safe to share across
threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import InvalidInputError

_SQRT_2PI = math.sqrt(2.0 * math.pi)

# Constructor-level simplex tolerance; freshly fitted models are far tighter
# (1e-12, covered by tests), this guards against corrupted inputs.
WEIGHT_SUM_TOL = 1e-9


@dataclass(frozen=True)
class GaussianComponent:
    """One mixture component: weight, mean, and variance."""

    weight: float
    mean: float
    variance: float

    def __post_init__(self):
        for name in ("weight", "mean", "variance"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidInputError(f"component {name} must be finite")
        if not 0.0 < self.weight <= 1.0 + WEIGHT_SUM_TOL:
            raise InvalidInputError(f"component weight must be in (0, 1], got {self.weight}")
        if self.variance <= 0.0:
            raise InvalidInputError(f"component variance must be positive, got {self.variance}")

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)


@dataclass(frozen=True)
class MixtureModel:
    """Weighted sum of Gaussians for a single dimension.

    Attributes
    ----------
    components : tuple of GaussianComponent
        Ordered by strictly increasing mean; weights sum to one.
    thresholds : tuple of float
        Cluster boundaries separating adjacent components (length K - 1).
    bandwidth : float
        KDE bandwidth used during fitting; doubles as the resolution floor.
    sample_count : int
        Number of samples the model was fitted on.
    collapsed : bool
        True when the dimension carried no usable information (constant
        input or a cluster with at most one member).
    """

    components: tuple[GaussianComponent, ...]
    thresholds: tuple[float, ...] = field(default=())
    bandwidth: float = 1.0
    sample_count: int = 1
    collapsed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "thresholds", tuple(float(t) for t in self.thresholds))
        k = len(self.components)
        if k == 0:
            raise InvalidInputError("mixture needs at least one component")
        total = math.fsum(c.weight for c in self.components)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise InvalidInputError(f"component weights sum to {total}, expected 1")
        means = [c.mean for c in self.components]
        if any(b <= a for a, b in zip(means, means[1:])):
            raise InvalidInputError("component means must be strictly increasing")
        if len(self.thresholds) != k - 1:
            raise InvalidInputError(
                f"expected {k - 1} thresholds for {k} components, got {len(self.thresholds)}"
            )
        if not self.bandwidth > 0:
            raise InvalidInputError(f"bandwidth must be positive, got {self.bandwidth}")
        if self.sample_count < 1:
            raise InvalidInputError(f"sample_count must be positive, got {self.sample_count}")

    def __len__(self) -> int:
        return len(self.components)

    # Array views of the component parameters, cached for evaluation speed.

    @cached_property
    def weights(self) -> np.ndarray:
        return np.array([c.weight for c in self.components])

    @cached_property
    def means(self) -> np.ndarray:
        return np.array([c.mean for c in self.components])

    @cached_property
    def stds(self) -> np.ndarray:
        return np.sqrt([c.variance for c in self.components])

    def pdf(self, z):
        """Mixture density at ``z`` (scalar or array)."""
        z = np.asarray(z, dtype=np.float64)
        t = (z[..., None] - self.means) / self.stds
        coef = self.weights / (self.stds * _SQRT_2PI)
        out = np.exp(-0.5 * t * t) @ coef
        return float(out) if out.ndim == 0 else out

    def cdf(self, z):
        """Mixture cumulative distribution at ``z`` (scalar or array).

        Child Gaussian CDFs are evaluated through the error function at
        full double precision (absolute error well under 1e-10).
        """
        z = np.asarray(z, dtype=np.float64)
        t = (z[..., None] - self.means) / self.stds
        out = ndtr(t) @ self.weights
        return float(out) if out.ndim == 0 else out

    def quantile(self, p):
        """Inverse of :meth:`cdf` for probabilities strictly inside (0, 1)."""
        p = np.asarray(p, dtype=np.float64)
        scalar = p.ndim == 0
        p = np.atleast_1d(p)
        if np.any((p <= 0.0) | (p >= 1.0)):
            raise InvalidInputError("quantile probabilities must lie strictly in (0, 1)")
        # Component quantiles bracket the mixture quantile on both sides.
        per_comp = self.means + self.stds * ndtri(p)[..., None]
        lo = per_comp.min(axis=-1)
        hi = per_comp.max(axis=-1)
        out = invert_monotone(self.cdf, p, lo, hi)
        return float(out[0]) if scalar else out

    def sample(self, count: int, seed) -> np.ndarray:
        """Draw ``count`` values: pick a component by weight, then its Gaussian.

        ``seed`` may be an int or a numpy Generator; results are identical
        for identical seeds.
        """
        if count < 1:
            raise InvalidInputError(f"count must be positive, got {count}")
        rng = np.random.default_rng(seed) if not isinstance(seed, np.random.Generator) else seed
        w = self.weights / self.weights.sum()
        idx = rng.choice(len(self.components), size=count, p=w)
        return self.means[idx] + self.stds[idx] * rng.standard_normal(count)


def invert_monotone(fn, target, lo, hi, max_iter: int = 200) -> np.ndarray:
    """Vectorized bisection: solve fn(x) = target on the bracket [lo, hi].

    ``fn`` must be non-decreasing. Iterates until brackets shrink to
    floating-point resolution, so the residual in probability space is
    limited only by the accuracy of ``fn`` itself.
    """
    lo = np.array(lo, dtype=np.float64, copy=True)
    hi = np.array(hi, dtype=np.float64, copy=True)
    target = np.asarray(target, dtype=np.float64)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        go_right = fn(mid) < target
        lo = np.where(go_right, mid, lo)
        hi = np.where(go_right, hi, mid)
        if np.max(hi - lo) <= 1e-15 * max(1.0, np.max(np.abs(mid))):
            break
    return 0.5 * (lo + hi)
