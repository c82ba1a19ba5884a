"""Exception hierarchy shared by all quiverlie modules.

Every error raised on bad user input derives from ValidationError; errors
that signal a mathematical obstruction (a form that is not closed, a
degenerate leading term, a singular linear system) get their own classes so
callers can branch on them.
"""

from __future__ import annotations


class QuiverLieError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(QuiverLieError, ValueError):
    """Malformed input data (bad quiver, bad path, mismatched operands)."""


class DuplicateArrowNameError(ValidationError):
    pass


class ReservedNameError(ValidationError):
    """Arrow name uses the reserved star suffix."""


class UnknownVertexError(ValidationError):
    pass


class UnknownArrowError(ValidationError):
    pass


class MismatchedQuiversError(ValidationError):
    """Operands built over different (doubled) quivers."""


class CompositionError(ValidationError):
    """Consecutive arrows of a path do not compose."""


class ShapeMismatchError(ValidationError):
    """A matrix attached to an arrow has the wrong dimensions."""


class NonHomogeneousError(ValidationError):
    """Input is not homogeneous with the stated arrow multiplicities."""


class NotClosedError(QuiverLieError):
    """A form that had to be d-closed is not; carries the residual."""

    def __init__(self, message: str, residual=None):
        super().__init__(message)
        self.residual = residual


class WeightZeroError(QuiverLieError):
    """Input to the homotopy operator has a weight-zero component."""


class DegenerateFormError(QuiverLieError):
    """The constant part of a 2-form is degenerate on generators."""


class SingularMatrixError(QuiverLieError):
    pass


class ParseError(QuiverLieError):
    """Expression-DSL failure with a source position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column
