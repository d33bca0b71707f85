"""Shared test helpers: KS statistics and compact mixture construction."""

import numpy as np

from uniformize.mixture import GaussianComponent, MixtureModel
from uniformize.synth import truth_model


def ks_uniform(values, lo=-4.0, hi=4.0):
    """One-sample KS statistic against the uniform distribution on [lo, hi]."""
    u = np.sort((np.asarray(values, dtype=np.float64).ravel() - lo) / (hi - lo))
    n = u.size
    i = np.arange(1, n + 1)
    return float(max((i / n - u).max(), (u - (i - 1) / n).max()))


def ks_against_cdf(values, cdf):
    """One-sample KS statistic of ``values`` against a CDF callable."""
    x = np.sort(np.asarray(values, dtype=np.float64).ravel())
    f = cdf(x)
    n = x.size
    i = np.arange(1, n + 1)
    return float(max((i / n - f).max(), (f - (i - 1) / n).max()))


def make_mixture(*triples, n=10000, **kwargs):
    """MixtureModel from (weight, mean, variance) triples, thresholds at midpoints."""
    components = [GaussianComponent(weight=w, mean=m, variance=v) for w, m, v in triples]
    model = truth_model(components, n)
    if kwargs:
        import dataclasses

        model = dataclasses.replace(model, **kwargs)
    return model


def random_mixture(rng, k=None, n=10000):
    """A random well-conditioned mixture: separated means, moderate widths."""
    if k is None:
        k = int(rng.integers(1, 5))
    means = np.cumsum(rng.uniform(2.0, 4.0, size=k)) + rng.uniform(-6.0, 0.0)
    sigmas = rng.uniform(0.3, 1.2, size=k)
    weights = rng.dirichlet(np.full(k, 5.0))
    weights = 0.9 * weights + 0.1 / k  # keep every weight above 0.025
    weights = weights / weights.sum()
    triples = [
        (float(w), float(m), float(s * s)) for w, m, s in zip(weights, means, sigmas)
    ]
    return make_mixture(*triples, n=n)


__all__ = ["ks_uniform", "ks_against_cdf", "make_mixture", "random_mixture", "MixtureModel"]
