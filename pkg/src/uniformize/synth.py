"""Seeded synthetic latent datasets with known ground truth.

Generators cover the situations the transform has to cope with: mixture
shaped dimensions, wrapped periodic features, collapsed (constant)
dimensions, and dimensions tied to discrete factors. Mixture dimensions
return their true model so tests can compare fitted parameters against it.

All randomness flows through NumPy's PCG64 generator seeded from a single
SeedSequence; identical specs produce bit-identical output on any platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .mixture import GaussianComponent, MixtureModel


@dataclass(frozen=True)
class MixtureDim:
    """Samples drawn from a known Gaussian mixture."""

    components: tuple[GaussianComponent, ...]


@dataclass(frozen=True)
class PeriodicDim:
    """A uniform angle on [0, 2*pi) reduced modulo ``period``, plus noise."""

    period: float
    noise: float = 0.0


@dataclass(frozen=True)
class ConstantDim:
    """A collapsed dimension: every sample equals ``value``."""

    value: float


@dataclass(frozen=True)
class FactorCopyDim:
    """The value of one discrete factor, plus Gaussian noise."""

    factor: int
    noise: float = 0.0


@dataclass(frozen=True)
class FactorSpec:
    """One discrete factor: class count and optional sampling weights."""

    cardinality: int
    weights: tuple[float, ...] | None = None


@dataclass(frozen=True)
class SynthSpec:
    n: int
    seed: int
    dimensions: tuple
    factors: tuple[FactorSpec, ...] = field(default=())


@dataclass(frozen=True)
class SynthResult:
    latents: np.ndarray
    factors: np.ndarray
    truth: dict[int, MixtureModel]


def truth_model(components, n: int) -> MixtureModel:
    """Ground-truth MixtureModel for a component list.

    Thresholds are placed midway between adjacent means and the bandwidth
    slot holds the smallest component width (there is no KDE here).
    """
    comps = tuple(components)
    means = [c.mean for c in comps]
    thresholds = tuple(0.5 * (a + b) for a, b in zip(means, means[1:]))
    return MixtureModel(
        components=comps,
        thresholds=thresholds,
        bandwidth=min(c.std for c in comps),
        sample_count=n,
    )


def _validate_spec(spec: SynthSpec) -> None:
    if spec.n < 1:
        raise InvalidInputError(f"n must be positive, got {spec.n}")
    if len(spec.dimensions) == 0:
        raise InvalidInputError("dimensions must not be empty")
    for i, f in enumerate(spec.factors):
        path = f"factors[{i}]"
        if f.cardinality < 1:
            raise InvalidInputError(f"{path}.cardinality must be positive, got {f.cardinality}")
        if f.weights is not None:
            if len(f.weights) != f.cardinality:
                raise InvalidInputError(
                    f"{path}.weights must have {f.cardinality} entries, got {len(f.weights)}"
                )
            if any(w < 0 for w in f.weights) or abs(math.fsum(f.weights) - 1.0) > 1e-9:
                raise InvalidInputError(f"{path}.weights must be non-negative and sum to 1")
    for j, dim in enumerate(spec.dimensions):
        path = f"dimensions[{j}]"
        if isinstance(dim, MixtureDim):
            if len(dim.components) == 0:
                raise InvalidInputError(f"{path}.components must not be empty")
            total = math.fsum(c.weight for c in dim.components)
            if abs(total - 1.0) > 1e-9:
                raise InvalidInputError(f"{path}.components weights sum to {total}, expected 1")
        elif isinstance(dim, PeriodicDim):
            if not dim.period > 0:
                raise InvalidInputError(f"{path}.period must be positive, got {dim.period}")
            if dim.noise < 0:
                raise InvalidInputError(f"{path}.noise must be non-negative, got {dim.noise}")
        elif isinstance(dim, FactorCopyDim):
            if not 0 <= dim.factor < len(spec.factors):
                raise InvalidInputError(
                    f"{path}.factor index {dim.factor} is out of range "
                    f"for {len(spec.factors)} factors"
                )
            if dim.noise < 0:
                raise InvalidInputError(f"{path}.noise must be non-negative, got {dim.noise}")
        elif isinstance(dim, ConstantDim):
            if not math.isfinite(dim.value):
                raise InvalidInputError(f"{path}.value must be finite")
        else:
            raise InvalidInputError(f"{path}: unknown dimension kind {type(dim).__name__}")


def generate(spec: SynthSpec) -> SynthResult:
    """Generate latents, factor labels, and truth models for ``spec``.

    One child PRNG stream is spawned per factor block and per dimension,
    so output is reproducible and independent of generation order.
    """
    _validate_spec(spec)
    n = spec.n
    children = np.random.SeedSequence(spec.seed).spawn(len(spec.dimensions) + 1)

    factor_rng = np.random.default_rng(children[0])
    factor_cols = []
    for f in spec.factors:
        p = None if f.weights is None else np.asarray(f.weights, dtype=np.float64)
        factor_cols.append(factor_rng.choice(f.cardinality, size=n, p=p))
    factors = (
        np.column_stack(factor_cols) if factor_cols else np.empty((n, 0), dtype=np.int64)
    ).astype(np.int64)

    latents = np.empty((n, len(spec.dimensions)))
    truth: dict[int, MixtureModel] = {}
    for j, dim in enumerate(spec.dimensions):
        rng = np.random.default_rng(children[j + 1])
        if isinstance(dim, MixtureDim):
            model = truth_model(dim.components, n)
            latents[:, j] = model.sample(n, rng)
            truth[j] = model
        elif isinstance(dim, PeriodicDim):
            angle = rng.uniform(0.0, 2.0 * math.pi, n)
            col = np.mod(angle, dim.period)
            if dim.noise > 0:
                col = col + dim.noise * rng.standard_normal(n)
            latents[:, j] = col
        elif isinstance(dim, ConstantDim):
            latents[:, j] = dim.value
        elif isinstance(dim, FactorCopyDim):
            col = factors[:, dim.factor].astype(np.float64)
            if dim.noise > 0:
                col = col + dim.noise * rng.standard_normal(n)
            latents[:, j] = col
    return SynthResult(latents=latents, factors=factors, truth=truth)


def spec_from_dict(doc: dict) -> SynthSpec:
    """Build a SynthSpec from a parsed JSON document.

    Expected shape::

        {"n": 1000, "seed": 7,
         "factors": [{"cardinality": 3, "weights": [0.2, 0.3, 0.5]}],
         "dimensions": [
           {"kind": "mixture",
            "components": [{"weight": 0.5, "mean": -3.0, "variance": 0.25}, ...]},
           {"kind": "periodic", "period": 3.14, "noise": 0.1},
           {"kind": "constant", "value": 5.0},
           {"kind": "factor_copy", "factor": 0, "noise": 0.01}]}
    """
    if not isinstance(doc, dict):
        raise InvalidInputError("synthesis spec must be a JSON object")

    def require(mapping, key, path):
        if key not in mapping:
            raise InvalidInputError(f"missing field {path}.{key}" if path else f"missing field {key}")
        return mapping[key]

    factors = []
    for i, f in enumerate(doc.get("factors", [])):
        path = f"factors[{i}]"
        weights = f.get("weights")
        factors.append(
            FactorSpec(
                cardinality=int(require(f, "cardinality", path)),
                weights=None if weights is None else tuple(float(w) for w in weights),
            )
        )

    dims = []
    for j, d in enumerate(require(doc, "dimensions", "")):
        path = f"dimensions[{j}]"
        kind = require(d, "kind", path)
        if kind == "mixture":
            comps = []
            for c in require(d, "components", path):
                try:
                    comps.append(
                        GaussianComponent(
                            weight=float(c["weight"]),
                            mean=float(c["mean"]),
                            variance=float(c["variance"]),
                        )
                    )
                except (KeyError, InvalidInputError) as exc:
                    raise InvalidInputError(f"{path}.components[{len(comps)}]: {exc}") from exc
            dims.append(MixtureDim(components=tuple(comps)))
        elif kind == "periodic":
            dims.append(
                PeriodicDim(
                    period=float(require(d, "period", path)),
                    noise=float(d.get("noise", 0.0)),
                )
            )
        elif kind == "constant":
            dims.append(ConstantDim(value=float(require(d, "value", path))))
        elif kind == "factor_copy":
            dims.append(
                FactorCopyDim(
                    factor=int(require(d, "factor", path)),
                    noise=float(d.get("noise", 0.0)),
                )
            )
        else:
            raise InvalidInputError(f"{path}.kind: unknown generator kind {kind!r}")

    spec = SynthSpec(
        n=int(require(doc, "n", "")),
        seed=int(require(doc, "seed", "")),
        dimensions=tuple(dims),
        factors=tuple(factors),
    )
    _validate_spec(spec)
    return spec
