"""Exception hierarchy shared by all morlim modules.

Every contract violation raises a subclass of :class:`MorlimError`, so callers
(including the CLI, which maps them to exit code 3) can catch one type.
"""


class MorlimError(Exception):
    """Base class for numerical and contract errors raised by morlim."""


class DimensionMismatch(MorlimError):
    """Operands have inconsistent shapes."""


class SpectraOverlap(MorlimError):
    """Sylvester/Lyapunov spectra admit lambda_i + mu_j ~ 0; no unique solution."""


class NotSymmetric(MorlimError):
    """A matrix that must be symmetric is not."""


class BranchCutEigenvalue(MorlimError):
    """An eigenvalue sits on (or hugs) the negative real axis; the principal
    logarithm is not defined there."""


class NotStable(MorlimError):
    """Matrix is not Hurwitz (an eigenvalue has nonnegative real part)."""


class NotAntistable(MorlimError):
    """Matrix has an eigenvalue with nonpositive real part where a strictly
    antistable matrix is required."""


class SingularShift(MorlimError):
    """Transfer-function evaluation point coincides with a system pole."""


class ShiftIsPole(MorlimError):
    """An interpolation point coincides with an eigenvalue of A."""


class RankDeficientBasis(MorlimError):
    """The rational Krylov basis lost column rank."""


class UnobservablePair(MorlimError):
    """The recovered (S, C_t) pair is not observable."""


class UncontrollablePair(MorlimError):
    """The recovered (S, B_t) pair is not controllable (output-side dual)."""


class IndefiniteGramian(MorlimError):
    """A (pseudo-)Gramian is singular or lacks the required definiteness."""


class RankDeficientGramians(MorlimError):
    """Frequency-limited Gramians have numerical rank below the requested
    reduced order."""


class NotAnEigenvalue(MorlimError):
    """A pole selected for preservation is not an eigenvalue of A."""


class DefectiveEigenvalue(MorlimError):
    """A selected eigenvalue is multiple/defective; modal projection needs
    simple poles."""


class UnstableMode(MorlimError):
    """A pole selected for mirroring has nonnegative real part."""


class NoConvergence(MorlimError):
    """An iteration exhausted its budget without meeting its tolerance."""


class BadInterpolationSet(MorlimError):
    """Interpolation data violates its invariants (duplicates, broken
    conjugate closure, wrong side, or points outside the open right
    half-plane where required)."""


class NumericalFailure(MorlimError):
    """A computed quantity failed its in-op residual or consistency check."""
