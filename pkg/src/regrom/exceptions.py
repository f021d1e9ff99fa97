"""Exception types raised by the package."""


class RegromError(Exception):
    """Base class for all package errors."""


class SolverFailure(RegromError):
    """A Newton iteration failed to reach its residual tolerance.

    Attributes
    ----------
    step : int
        Index of the time step being solved (1-based, the step producing
        state ``step``).
    residual_norm : float
        Residual norm at the last iterate.
    iterate : ndarray or None
        Last iterate, when available.
    """

    def __init__(self, step, residual_norm, iterate=None, message=None):
        self.step = step
        self.residual_norm = float(residual_norm)
        self.iterate = iterate
        if message is None:
            message = (f"Newton failed at step {step}: residual norm "
                       f"{self.residual_norm:.3e}")
        super().__init__(message)


class RankDeficiencyError(RegromError, ValueError):
    """Requested POD dimension exceeds the numerical rank of the snapshots."""

    def __init__(self, requested, rank):
        self.requested = requested
        self.rank = rank
        super().__init__(f"requested r={requested} but snapshot numerical "
                         f"rank is {rank}")


class UndefinedEnergyError(RegromError, ValueError):
    """Energy fractions requested for an all-zero spectrum."""


class ConfigError(RegromError, ValueError):
    """Invalid experiment configuration.

    ``line`` is the 1-based line number in the source file, when known.
    """

    def __init__(self, message, line=None, key=None):
        self.line = line
        self.key = key
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MatrixFileError(RegromError, ValueError):
    """Malformed delimited-text matrix file."""
