"""Exception types shared across the package."""

from __future__ import annotations


class LiftspecError(Exception):
    """Base class for every error raised by this package."""


class SingularMatrix(LiftspecError):
    """A matrix that must be inverted is singular or numerically so."""


class NotHermitian(LiftspecError):
    """Input expected to be Hermitian is not, beyond tolerance."""


class NotSelfAdjoint(LiftspecError):
    """Operator expected to be self-adjoint is not (weights not symmetric)."""


class DimensionTooLarge(LiftspecError):
    """Problem size exceeds the documented cap for a dense code path."""


class DimensionMismatch(LiftspecError):
    """Vector or matrix shape incompatible with the operator."""


class OddGroundSet(LiftspecError):
    """Matching colors require an even ground set."""


class IndexOutOfRange(LiftspecError):
    """A vertex or color index lies outside the declared range."""


class EmptySet(LiftspecError):
    """An operation on spectral sets received an empty set."""


class DepthTooLarge(LiftspecError):
    """Requested moment order needs a tree ball beyond the supported depth."""


class SingularResolvent(LiftspecError):
    """Root resolvent block is singular where an inverse is required."""


class SingularIteration(LiftspecError):
    """A fixed-point sweep produced a singular linear system."""


class ParseError(LiftspecError):
    """Malformed input file.  Carries field/line diagnostics when known."""

    def __init__(self, message: str, *, field: str | None = None, line: int | None = None):
        self.field = field
        self.line = line
        ctx = []
        if field is not None:
            ctx.append(f"field {field!r}")
        if line is not None:
            ctx.append(f"line {line}")
        suffix = f" ({', '.join(ctx)})" if ctx else ""
        super().__init__(message + suffix)


class SingularShift(LiftspecError):
    """The quadratic shift lambda^2 - a_{i*} a_i is singular for some color."""

    def __init__(self, index: int, message: str = ""):
        self.index = index
        super().__init__(message or f"singular quadratic shift at color {index}")


class NoConvergence(LiftspecError):
    """An iterative solver ran out of iterations before reaching tolerance."""

    def __init__(self, message: str, *, iterations: int | None = None,
                 residual: float | None = None):
        self.iterations = iterations
        self.residual = residual
        super().__init__(message)
