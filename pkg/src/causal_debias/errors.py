"""Exception types shared across the package."""


class CausalDebiasError(Exception):
    """Base class for all package errors."""


class IngestError(CausalDebiasError):
    """CSV could not be ingested (empty file, no header, unreadable rows)."""


class SchemaError(CausalDebiasError):
    """Column names or shapes do not match the expected schema."""


class LabelArityError(SchemaError):
    """The designated label column does not have exactly two levels."""


class CycleError(CausalDebiasError):
    """A graph operation would introduce a directed cycle."""


class EditError(CausalDebiasError):
    """An edit references unknown nodes or an invalid op/edge combination."""


class InsufficientDataError(CausalDebiasError):
    """Not enough rows to fit the requested model (n <= parameter count)."""


class DegenerateColumnError(CausalDebiasError):
    """A column has zero variance where positive variance is required."""


class ConstantLabelError(CausalDebiasError):
    """Training labels contain a single class."""


class EmptyGroupError(CausalDebiasError):
    """A group specification selects no rows."""


class ParameterError(CausalDebiasError):
    """A numeric parameter is outside its valid range."""


class SimulationOrderError(CausalDebiasError):
    """A node was simulated before its parents were materialized."""
