"""Exception hierarchy shared across the package.

ValidationError covers rejected inputs (bad matrices, malformed spec files,
out-of-domain parameters).  NumericError covers failures of a computation on
inputs that passed validation (eigenvalue degeneracies, singular Fisher
terms, internal consistency checks).
"""

from __future__ import annotations


class ValidationError(ValueError):
    """Input rejected by an invariant check."""


class SpecFormatError(ValidationError):
    """Channel-spec text failed to parse."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NumericError(RuntimeError):
    """Computation failed on validated inputs."""


class DegeneracyError(NumericError):
    """Eigenvalue degeneracy makes an eigenvector derivative ill-defined."""


class SingularTermError(NumericError):
    """A Fisher-information term has vanishing probability but a large derivative."""


class ConsistencyError(NumericError):
    """Two routes to the same quantity disagree beyond tolerance."""
