"""Exception types shared across the toolkit."""


class RipkitError(Exception):
    """Base class for all toolkit errors."""


class InvalidDimensions(RipkitError):
    """Operands have incompatible or unsupported shapes."""


class NonFiniteInput(RipkitError):
    """An input contains NaN or infinite entries."""


class RankDeficient(RipkitError):
    """A matrix required to have full column rank does not, within tolerance."""


class ZeroVector(RipkitError):
    """A vector required to be nonzero has zero norm."""


class InvalidSupport(RipkitError):
    """A support set has out-of-range, duplicate, or conflicting indices."""


class InvalidSparsity(RipkitError):
    """A sparsity level is outside the admissible range."""


class InvalidDelta(RipkitError):
    """An isometry constant is outside the open interval (0, 1)."""


class UnknownBound(RipkitError):
    """An unrecognized bound or estimate name was requested."""


class EnumerationTooLarge(RipkitError):
    """Exact support enumeration would exceed the configured cap."""


class GuaranteeInapplicable(RipkitError):
    """A guarantee formula is undefined for the given constants (denominator not positive)."""


class UnsupportedShape(RipkitError):
    """The operation is only defined for a specific matrix shape."""


class DegenerateColumn(RipkitError):
    """A dictionary column collapsed below the renormalization threshold."""
