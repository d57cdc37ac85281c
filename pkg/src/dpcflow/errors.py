"""Exception hierarchy shared by every stage of the pipeline."""


class DpcflowError(Exception):
    """Base class for all errors raised by this package."""


class InputError(DpcflowError):
    """Bad user input: malformed files, invalid configuration, wrong shapes."""


class MalformedRow(InputError):
    def __init__(self, line_no, message="wrong field count"):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class EmptyDataset(InputError):
    pass


class UnknownCategory(InputError):
    def __init__(self, column, value):
        self.column = column
        self.value = value
        super().__init__(f"unknown category {value!r} in column {column!r}")


class DimensionMismatch(InputError):
    pass


class InvalidConfig(InputError):
    pass


class NonFinite(InputError):
    pass


class StreamTooShort(InputError):
    pass


class WindowTooSmall(InputError):
    pass


class EmptySeries(InputError):
    pass


class HeterogeneousWindows(InputError):
    pass


class TooFewSamples(InputError):
    pass


class TooFewPoints(InputError):
    pass


class LengthMismatch(InputError):
    pass


class DefinedOnEmpty(InputError):
    pass


class MissingNeighbor(DpcflowError):
    """Internal consistency failure in cluster assignment."""


class DegenerateVarianceWarning(UserWarning):
    """All-constant data: PCA falls back to a single component."""
