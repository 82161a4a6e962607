"""Exception hierarchy shared across the package.

Exit-code mapping for the CLI lives in :mod:`jointrank.cli`; library code
only raises, it never calls sys.exit.
"""


class AnalysisError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(AnalysisError):
    """Invalid configuration (bad paths, bad parameter combinations)."""


class InvalidInput(AnalysisError):
    """Input data violates a precondition (non-finite, wrong shape, ...)."""


class NumericalFailure(AnalysisError):
    """A numerical routine failed to converge."""

    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class ZeroMargin(AnalysisError):
    """A row or column margin is zero where a positive mass is required."""

    def __init__(self, axis, index):
        super().__init__(f"zero {axis} margin at index {index}")
        self.axis = axis
        self.index = index


class InvalidPartition(AnalysisError):
    """Partition request cannot be satisfied (too many parts, bad mode)."""


class ConstantColumn(AnalysisError):
    """A column has zero variance and cannot be standardized."""

    def __init__(self, name):
        super().__init__(f"column {name!r} has zero variance")
        self.name = name


class NoCommonCases(AnalysisError):
    """Two partitions share no case identifiers."""


class FormatError(AnalysisError):
    """A file does not match the expected layout (header, column count)."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class ParseError(AnalysisError):
    """A field could not be parsed (timestamp, date, number)."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class InvalidValue(AnalysisError):
    """A parsed field is out of range (e.g. a negative consumption bin)."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class StageError(AnalysisError):
    """Pipeline failure wrapped with the stage (S1..S5) it occurred in."""

    def __init__(self, stage, cause):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause
