"""Exception and warning types shared across the package."""


class ShapeMismatch(ValueError):
    """Operands have incompatible dimensions."""


class SingularSystem(ArithmeticError):
    """A linear system could not be factorized (and jittering was disabled
    or exhausted)."""


class ConvergenceFailure(ArithmeticError):
    """An iterative factorization failed to converge."""


class SolverDiverged(ArithmeticError):
    """A time integration blew up (state norm exceeded the divergence bound)."""


class ZeroDenominator(ZeroDivisionError):
    """A relative-error metric was asked to divide by zero."""


class UnknownKernel(ValueError):
    """A kernel name does not match any registered kernel."""


class InvalidConfig(ValueError):
    """A configuration file or flag set failed validation."""


class SchemaError(ValueError):
    """A results file does not match the expected schema."""


class RankDeficientWarning(UserWarning):
    """Requested basis size exceeds the numerical rank of the data; the
    basis was truncated to the rank."""
