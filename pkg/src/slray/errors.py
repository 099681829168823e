"""Exception types shared across the package."""


class SlrayError(Exception):
    """Base class for all package errors."""


class ParseError(SlrayError):
    """Syntax error in a potential expression.

    Carries the byte offset of the offending token and a description of
    what was expected there.
    """

    def __init__(self, offset, expected, message=None):
        self.offset = offset
        self.expected = expected
        super().__init__(message or f"syntax error at offset {offset}: expected {expected}")


class DivisionByZero(SlrayError):
    def __init__(self, x):
        self.x = x
        super().__init__(f"division by zero while evaluating at x = {x}")


class DomainError(SlrayError):
    def __init__(self, message):
        super().__init__(message)


class ToleranceNotMet(SlrayError):
    """Adaptive quadrature exhausted its subdivision budget."""

    def __init__(self, achieved, requested, message=None):
        self.achieved = achieved
        self.requested = requested
        super().__init__(
            message
            or f"quadrature error estimate {achieved:.3e} above requested {requested:.3e}"
        )


class NonFiniteSample(SlrayError):
    def __init__(self, x, value=None):
        self.x = x
        self.value = value
        super().__init__(f"non-finite sample at x = {x}: {value!r}")


class NegativePsiSample(SlrayError):
    def __init__(self, x, value):
        self.x = x
        self.value = value
        super().__init__(f"comparison weight must be nonnegative; psi({x}) = {value}")


class NotAdmissible(SlrayError):
    """The spectral parameter is inside (or too close to) the sampled hull."""

    def __init__(self, reason, distance=None):
        self.reason = reason
        self.distance = distance
        super().__init__(f"not admissible: {reason}")


class AssumptionViolated(SlrayError):
    """A branch hypothesis (s != 0, arg s != pi) failed at some point."""

    def __init__(self, x, reason):
        self.x = x
        self.reason = reason
        super().__init__(f"assumption violated at x = {x}: {reason}")


class BudgetDiverges(SlrayError):
    """The error-budget integral does not converge; the asymptotic
    fundamental system carries no finite envelope."""

    def __init__(self, evidence=None):
        self.evidence = evidence
        super().__init__("error-budget integral diverges")


class StepSizeUnderflow(SlrayError):
    def __init__(self, x, h):
        self.x = x
        self.h = h
        super().__init__(f"step size underflow at x = {x} (h = {h:.3e})")


class NonFiniteState(SlrayError):
    def __init__(self, x):
        self.x = x
        super().__init__(f"non-finite state at x = {x}")


class SpecError(SlrayError):
    """Problem-spec file failed validation."""
