"""Exception types shared across the package.

Every error raised on a documented failure path derives from TangleSigError,
so callers (and the CLI) can distinguish bad input from genuine bugs.
"""


class TangleSigError(Exception):
    """Base class for all errors raised by tanglesig."""


class ColourMismatch(TangleSigError):
    """Boundary colourings of two tangles do not line up for composition."""


class NotAnEndomorphism(TangleSigError):
    """An operation requiring source == target got a tangle without it."""


class OmegaOnForbiddenLocus(TangleSigError):
    """Some coordinate of omega equals 1 (within tolerance)."""


class AdmissibilityViolated(TangleSigError):
    """I_c(omega) == 1 within tolerance, so the main equalities do not apply."""


class NotHermitian(TangleSigError):
    """Matrix handed to a signature computation is not Hermitian."""


class IllConditioned(TangleSigError):
    """An eigenvalue falls in the rejection band (tol, 10*tol); refine tol."""


class NotIsotropic(TangleSigError):
    """A subspace expected to be totally isotropic is not."""


class NotUnitary(TangleSigError):
    """A matrix does not preserve the relevant skew-Hermitian form."""


class SpaceMismatch(TangleSigError):
    """Source/target skew-Hermitian spaces of two relations do not match."""


class NonUniqueForm(TangleSigError):
    """The invariance system does not pin the form up to real scale at omega."""


class TransposeSymmetryViolated(TangleSigError):
    """C-complex data violates A_{-eps} = A_eps^T."""
