"""Exception hierarchy shared across the toolkit.

``PreconditionError`` marks violations of a documented input contract;
the CLI maps these to exit code 2 and everything else to exit code 1.
"""


class MeshStreamError(Exception):
    """Base class for all toolkit errors."""


class PreconditionError(MeshStreamError, ValueError):
    """An input violated a documented precondition."""


class GraphFormatError(PreconditionError):
    pass


class MeshFormatError(PreconditionError):
    pass


class LabelingError(PreconditionError):
    pass


class IndexWidthError(PreconditionError):
    pass


class PatternBoundError(PreconditionError):
    pass


class ExactSearchSizeError(PreconditionError):
    pass


class NeighborhoodOverflowError(PreconditionError):
    pass


class WorkloadMismatchError(PreconditionError):
    pass


class EquationError(PreconditionError):
    """Problem in an equation file (syntax, use-before-def, cycle)."""

    def __init__(self, message, line=None, col=None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", col {col}" if col is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.col = col


class ClusterIOError(PreconditionError):
    pass


class PositivityError(MeshStreamError):
    """A cell reached non-positive density or pressure."""

    def __init__(self, step, cell, message=None):
        super().__init__(message or f"positivity failure at step {step}, cell {cell}")
        self.step = step
        self.cell = cell
