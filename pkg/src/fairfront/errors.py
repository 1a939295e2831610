"""Exception taxonomy shared across the engine.

ConfigError maps to CLI exit code 2, DataError subclasses to 3, anything else to 4.
"""


class ConfigError(ValueError):
    """Invalid configuration (bad field values, missing required fields)."""


class DataError(ValueError):
    """Problems with input data or derived quantities."""


class SchemaError(DataError):
    """Input file has a malformed or incomplete schema."""


class RowError(DataError):
    """A specific input record is invalid; message names the line."""


class SplitError(DataError):
    """A requested train/test split would empty a group in one half."""


class ModeError(DataError):
    """Evaluation mode incompatible with the data (e.g. empirical without outcomes)."""


class MetricUndefinedError(DataError):
    """A metric's precondition fails (e.g. a group with no positives for EO)."""


class AnchorError(DataError):
    """Reference/anchor box does not enclose the front it is applied to."""


class GainUndefinedError(DataError):
    """Fairness gain requested for fronts with disjoint performance ranges."""
