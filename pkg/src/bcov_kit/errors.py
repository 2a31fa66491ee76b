"""Exception types shared across the toolkit.

Constructor/validation failures raise plain ``ValueError`` with a clear
message; the classes below exist where callers need to catch a specific
failure mode programmatically.
"""


class NotTwoElementaryError(ValueError):
    """The discriminant group is not of the form (Z/2)^l."""


class OddLatticeError(ValueError):
    """An even lattice was required but the Gram diagonal is odd."""


class ThetaNearZeroError(ArithmeticError):
    """A theta constant is too close to zero to divide by (Upsilon_g pole)."""


class PrecisionLossError(ArithmeticError):
    """A certified error bound exceeds the requested tolerance."""


class TailTooLargeError(ArithmeticError):
    """The truncation tail of an infinite product/series exceeds tolerance."""


class MissingCoefficientError(KeyError):
    """A Fourier coefficient needed by a product factor is not in the table."""


class GroupTooLargeError(ValueError):
    """Group closure exceeded the configured size cap."""
