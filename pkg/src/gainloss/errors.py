"""Exception hierarchy.

Every error raised on bad input or a failed numerical step derives from
:class:`GainLossError`, which the command line maps to exit code 1.
"""


class GainLossError(Exception):
    """Base class for all domain errors raised by the package."""


class DomainError(GainLossError, ValueError):
    """An argument lies outside the domain of the operation."""


class SizeError(GainLossError, ValueError):
    """A series or range is too short (or too long) for the operation."""


class DegenerateInputError(GainLossError, ValueError):
    """Input has no variation where variation is required."""


class EmptyError(GainLossError, ValueError):
    """An operation that needs at least one observation received none."""


class StationarityError(DomainError):
    """Model parameters do not define a stationary process."""


class SimulationError(GainLossError, RuntimeError):
    """A simulated path violated a positivity guard.

    Attributes
    ----------
    step : int
        Index (after burn-in is counted) at which the guard fired.
    """

    def __init__(self, message: str, step: int) -> None:
        super().__init__(message)
        self.step = step


class FitError(GainLossError, RuntimeError):
    """An optimizer failed; ``diagnostics`` carries what it saw."""

    def __init__(self, message: str, diagnostics: dict | None = None) -> None:
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class IngestError(GainLossError, ValueError):
    """A CSV file could not be parsed; the message names file and line."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None) -> None:
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
        self.path = path
        self.line = line
