"""Exception types raised by sectoria."""


class SectoriaError(Exception):
    """Base class for all sectoria errors."""


class NonHermitianInput(SectoriaError, ValueError):
    """A Hermitian matrix was required but the input is not Hermitian."""


class SingularMatrix(SectoriaError, ArithmeticError):
    """A pivot fell below the relative singularity tolerance."""


class DegenerateAngle(SectoriaError, ValueError):
    """The operation is undefined for semi-angle zero."""


class CertificationFailure(SectoriaError, RuntimeError):
    """A constructed object failed its own numerical certificate."""
