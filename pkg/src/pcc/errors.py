"""Exception hierarchy for the pcc package.

Matrix indices reported in error messages are 1-based, matching the usual
mathematical convention for comparison matrices (also used by ``Triad``).
"""


class PCError(ValueError):
    """Base class for all pcc errors."""


class NonSquareError(PCError):
    """Input matrix is not square."""


class DimensionTooSmallError(PCError):
    """Dimension below the minimum supported size."""


class DimensionMismatchError(PCError):
    """Operands have incompatible dimensions."""


class NonPositiveEntryError(PCError):
    """A matrix or weight entry is zero, negative, or not finite."""

    def __init__(self, i: int, j: int, value: float, what: str = "matrix"):
        self.i = i
        self.j = j
        self.value = value
        super().__init__(f"{what} entry ({i},{j}) must be positive, got {value!r}")


class NotReciprocalError(PCError):
    """Entries violate m_ij * m_ji = 1 beyond the reciprocity tolerance."""


class NotConsistentError(PCError):
    """Matrix fails the triad consistency test."""


class RangeOverflowError(PCError):
    """A log-domain entry exceeds the representable exponent range."""


class SpecNotValidatedError(PCError):
    """An inner-product spec was used without prior validation."""


class NotSymmetricError(PCError):
    """A parameter matrix that must be symmetric is not."""


class NotPSDError(PCError):
    """A factor matrix that must be positive semi-definite is not."""


class FormNotDefiniteError(PCError):
    """The induced bilinear form is only semi-definite, unusable for projection."""


class DegenerateBasisError(PCError):
    """Gram-Schmidt produced a vector with (numerically) zero norm."""


class NonPositiveCoordinateError(PCError):
    """A priority/solver coordinate is zero or negative."""
