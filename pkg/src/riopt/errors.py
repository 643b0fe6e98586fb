"""Exception types raised across the package."""


class RiOptError(ValueError):
    """Base class for all package errors."""


class ParameterError(RiOptError):
    """A numeric parameter is outside its admissible range."""


class RangeError(RiOptError):
    """An interval does not intersect the sampled region."""


class DomainError(RiOptError):
    """An input function violates a sign or shape requirement."""


class ShapeError(RiOptError):
    """Two sampled functions do not live on the same grid."""


class SpecError(RiOptError):
    """A space specification is inadmissible or malformed."""


class PreconditionError(RiOptError):
    """A theorem hypothesis required by an operation fails."""


class UnsupportedDualityError(RiOptError):
    """The associate space is not in the closed-form duality table."""


class ParseError(RiOptError):
    """Text input does not follow the mini-language grammar."""
