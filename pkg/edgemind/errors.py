"""Exception hierarchy shared by every EdgeMind module.

Each family carries the process exit code used by the command line.
"""


class EdgemindError(Exception):
    """Base class for all EdgeMind errors."""

    exit_code = 2


class ConfigError(EdgemindError):
    """Invalid configuration or parameters."""

    exit_code = 1


class InfeasibleError(ConfigError):
    """Cluster size bounds cannot be satisfied."""


class DataError(EdgemindError):
    """Input data is malformed or insufficient."""

    exit_code = 2


class ParseError(DataError):
    """A row of an input file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SchemaError(DataError):
    """A row parsed but violates the file schema."""


class ShapeError(DataError):
    """Matrix or vector dimensions do not match."""


class AlignmentError(DataError):
    """Station series are not aligned to common bins."""


class InsufficientData(DataError):
    """Not enough samples to build the requested rows."""


class MissingPrediction(DataError):
    """No prediction is available for a requested station and bin."""


class LeakageError(DataError):
    """A fitting step touched rows at or after the test cutoff."""


class NumericalError(EdgemindError):
    """A numerical routine failed."""

    exit_code = 3


class ConvergenceError(NumericalError):
    """An eigensolver or iterative method did not converge."""


class CholeskyError(NumericalError):
    """Kernel matrix stayed non positive definite after jitter escalation."""


class SingularMatrix(NumericalError):
    """A linear system was singular."""


class NonStationary(NumericalError):
    """A fitted ARMA model diverged."""
