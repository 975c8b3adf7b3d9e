"""Exception hierarchy.

Every failure that stems from bad input data or a violated precondition is a
``DomainError``; the command line maps those to exit status 1.
"""


class DomainError(ValueError):
    """Input data or arguments violate an operation's contract."""


class ParseError(DomainError):
    """A resource file could not be parsed."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class AlignmentError(ParseError):
    """A sentence record lacks its reference translation."""


class TimingError(ParseError):
    """Token timings are inconsistent."""


class InvariantError(DomainError):
    """A data-structure invariant was violated (e.g. overlapping spans)."""


class StreamError(DomainError):
    """Streamed token events arrived out of order."""


class TrainingError(DomainError):
    """Training data cannot produce a model (e.g. a single class)."""


class MetricError(DomainError):
    """A metric is undefined for the given input (e.g. no positives)."""
