"""Uniformize: map mixture-shaped univariate samples onto a uniform range.

The pipeline estimates each column's density with a Gaussian KDE, clusters
it at the density minima, rebuilds the column as a Gaussian mixture, and
applies the probability integral transform of that mixture. The package
also ships disentanglement metrics, synthetic ground-truth generators, and
a CLI (``uniformize``).
"""

from .cluster import (
    ClusterAssignment,
    ExtremaSet,
    assign_clusters,
    estimate_components,
    find_extrema,
)
from .errors import (
    InvalidInputError,
    ModelIntegrityError,
    ModelVersionError,
    NumericError,
    ParseError,
    RangeError,
    ShapeMismatchError,
    UniformizeError,
)
from .kde import DensityEstimate, estimate_density, gaussian_kernel, scott_bandwidth
from .metrics import (
    MetricReport,
    correlation_heatmap,
    factor_vae_score,
    mig,
    total_correlation,
)
from .mixture import GaussianComponent, MixtureModel
from .synth import (
    ConstantDim,
    FactorCopyDim,
    FactorSpec,
    MixtureDim,
    PeriodicDim,
    SynthResult,
    SynthSpec,
    generate,
)
from .transformer import (
    TransformModel,
    Uniformizer,
    apply_model,
    fit_dimension,
    fit_model,
    invert_model,
)

__version__ = "0.1.0"

__all__ = [
    "ClusterAssignment",
    "ConstantDim",
    "DensityEstimate",
    "ExtremaSet",
    "FactorCopyDim",
    "FactorSpec",
    "GaussianComponent",
    "InvalidInputError",
    "MetricReport",
    "MixtureDim",
    "MixtureModel",
    "ModelIntegrityError",
    "ModelVersionError",
    "NumericError",
    "ParseError",
    "PeriodicDim",
    "RangeError",
    "ShapeMismatchError",
    "SynthResult",
    "SynthSpec",
    "TransformModel",
    "UniformizeError",
    "Uniformizer",
    "apply_model",
    "assign_clusters",
    "correlation_heatmap",
    "estimate_components",
    "estimate_density",
    "factor_vae_score",
    "find_extrema",
    "fit_dimension",
    "fit_model",
    "gaussian_kernel",
    "generate",
    "invert_model",
    "mig",
    "scott_bandwidth",
    "total_correlation",
]
