"""Exception hierarchy.

Capacity errors (dimension / Fock / atom / quadrature budgets) share a base so
the CLI can map them to a dedicated exit code.
"""


class QhtError(Exception):
    """Base class for all package errors."""


class NotHermitian(QhtError):
    pass


class NotPSD(QhtError):
    pass


class TraceNotOne(QhtError):
    pass


class EigenSolverFailure(QhtError):
    pass


class DomainError(QhtError):
    """A scalar function was applied outside its domain."""


class SingularSigma(QhtError):
    """The reference operator has (numerically) zero eigenvalues."""


class SingularInput(QhtError):
    pass


class InvalidTest(QhtError):
    """Operator is not a valid test (eigenvalues outside [0, 1])."""


class EpsilonOutOfRange(QhtError):
    pass


class NonpositiveL(QhtError):
    pass


class NotNormalized(QhtError):
    pass


class BranchFault(QhtError):
    """Spectrum left the right half-plane; principal log is invalid."""


class CapacityError(QhtError):
    """Base for desk-scale capacity limits (CLI exit code 4)."""


class DimensionCap(CapacityError):
    pass


class FockCap(CapacityError):
    pass


class AtomExplosion(CapacityError):
    pass


class QuadratureBudget(CapacityError):
    pass


class ConfigError(QhtError):
    """Invalid experiment configuration (CLI exit code 2)."""


class ComputationError(QhtError):
    """A pipeline stage failed; carries stage attribution."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
