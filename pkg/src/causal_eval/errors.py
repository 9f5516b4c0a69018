"""Exception hierarchy shared by every module of the harness."""


class CausalEvalError(Exception):
    """Base class for all harness errors."""


class ParameterError(CausalEvalError, ValueError):
    """An argument violates an operation's preconditions."""


class IdentifierError(CausalEvalError, LookupError):
    """A variable, category label, or column name is unknown."""


class GraphError(CausalEvalError, ValueError):
    """A graph violates its structural invariants (cycles, self-loops, ...)."""


class ExtensionError(CausalEvalError):
    """A partially directed graph admits no consistent DAG extension."""


class ZeroProbabilityEvidenceError(CausalEvalError):
    """Conditioning on an event of probability zero."""


class UndefinedRowError(CausalEvalError):
    """A CPT row has no observations and no smoothing to fall back on."""


class AlterationError(CausalEvalError):
    """A requested model alteration would produce an invalid graph."""


class DataError(CausalEvalError):
    """Base class for malformed input data."""


class CompletenessError(DataError):
    """A factorial grid is missing a (subject, assignment, trial) cell."""


class DuplicationError(DataError):
    """A factorial grid contains the same key twice."""


class SchemaError(DataError):
    """Column roles or domains do not match the data file."""


class NormalizationError(DataError):
    """An outcome cannot be normalized by its control-case median."""


class ConfigError(CausalEvalError):
    """An experiment configuration is invalid."""
