"""Exception types shared across the package.

The CLI maps these onto its exit-code taxonomy: invalid input and parse
problems exit 2, numeric failures exit 3.
"""


class UniformizeError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(UniformizeError, ValueError):
    """Input data or arguments violate a documented precondition."""


class ShapeMismatchError(InvalidInputError):
    """Matrix column count does not match the fitted model."""


class RangeError(InvalidInputError):
    """Value lies outside the transform's output range."""


class ParseError(UniformizeError, ValueError):
    """A file could not be parsed into the expected format."""


class ModelVersionError(ParseError):
    """Model file declares an unsupported format version."""


class ModelIntegrityError(ParseError):
    """Model file parses but violates a model invariant."""


class NumericError(UniformizeError, ArithmeticError):
    """A computation failed for numerical reasons (e.g. singular covariance)."""
