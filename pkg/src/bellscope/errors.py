"""Exception types raised across the package."""


class BellscopeError(ValueError):
    """Base class for invalid-input errors."""


class InvalidDimensionError(BellscopeError):
    pass


class DimensionMismatchError(BellscopeError):
    pass


class ParameterCountError(BellscopeError):
    pass


class EnumerationCapError(BellscopeError):
    pass


class RankDeficientError(BellscopeError):
    pass


def check_dimension(d):
    """Return ``d`` as an int, raising if it is not an integer >= 2."""
    if isinstance(d, bool) or int(d) != d or d < 2:
        raise InvalidDimensionError(f"dimension must be an integer >= 2, got {d!r}")
    return int(d)
