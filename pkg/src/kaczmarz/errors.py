"""Exception types raised by the solver library.

Every library-specific failure derives from :class:`KaczmarzError` so callers
can catch the whole family at once; the CLI maps subclasses onto its stable
exit codes.
"""


class KaczmarzError(Exception):
    """Base class for all errors raised by this package."""


class ContractViolation(KaczmarzError, ValueError):
    """An argument breaks a documented precondition (shape, range, name)."""


class DimensionMismatch(ContractViolation):
    """Operands have incompatible shapes."""


class NonFiniteInput(ContractViolation):
    """An input array contains NaN or infinite entries."""


class InvalidProblemError(KaczmarzError):
    """A problem instance violates its invariants (e.g. inconsistent b)."""


class ZeroRowError(InvalidProblemError):
    """An operation needs a nonzero row but the row has zero norm."""


class IllPosedProblemError(InvalidProblemError):
    """The matrix is numerically singular for the requested construction."""


class NumericFailureError(KaczmarzError):
    """A traced quantity became non-finite during iteration."""

    def __init__(self, step, message=None):
        self.step = step
        super().__init__(message or f"non-finite value detected at step {step}")


class SvdConvergenceError(KaczmarzError):
    """Jacobi sweeps hit the sweep cap before the off-diagonal tolerance."""

    def __init__(self, off_diagonal, tolerance, sweeps):
        self.off_diagonal = off_diagonal
        self.tolerance = tolerance
        self.sweeps = sweeps
        super().__init__(
            f"SVD did not converge after {sweeps} sweeps: "
            f"off-diagonal magnitude {off_diagonal:.3e} > tolerance {tolerance:.3e}"
        )


class SymmetryError(ContractViolation):
    """A matrix required to be symmetric is not."""


class SpdViolationError(KaczmarzError):
    """A quadratic form assumed positive semi-definite came out negative."""


class MatrixFormatError(KaczmarzError, ValueError):
    """A matrix/vector text file failed to parse; carries the 1-based line."""

    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


class UnknownFunctionalError(ContractViolation):
    """Requested expectation functional name is not registered."""


class UnknownDiagnosticError(ContractViolation):
    """Requested per-step diagnostic name is not registered."""


class ConfigError(KaczmarzError):
    """Invalid or missing CLI/run configuration value; names the field."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"config field '{field}': {message}")
