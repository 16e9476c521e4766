"""Exception hierarchy shared by all engines."""


class TickMomentsError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(TickMomentsError, ValueError):
    """An argument is outside its admissible range."""


class InputOrderError(TickMomentsError, ValueError):
    """Trades were expected in ascending time order but were not."""


class UndefinedStatisticError(TickMomentsError, ArithmeticError):
    """A statistic was requested over an empty sample."""


class InsufficientHistoryError(TickMomentsError, LookupError):
    """No trade exists early enough to supply a lagged price."""


class IncompleteWindowError(TickMomentsError, ValueError):
    """A secondary-averaging window lacks data needed for a statistic."""


class DataError(TickMomentsError):
    """Input file content could not be used.

    ``line`` is the 1-based line number when the problem is tied to a row.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
