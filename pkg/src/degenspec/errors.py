"""Exception hierarchy shared by all modules."""


class DegenspecError(Exception):
    """Base class for all library errors."""


class DomainError(DegenspecError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class SignatureError(DomainError):
    """Orbifold signature admits no hyperbolic structure."""


class QuadratureError(DegenspecError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance.

    Carries the best value and error estimate reached before giving up.
    """

    def __init__(self, message, value=None, error_estimate=None, evaluations=0):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate
        self.evaluations = evaluations


class NonFiniteIntegrandError(QuadratureError):
    """Integrand returned NaN or infinity at a sampled abscissa."""


class InvariantViolation(DegenspecError, ValueError):
    """Structured data violates one of its declared invariants."""


class ParseError(DegenspecError, ValueError):
    """Input file could not be parsed; message carries field diagnostics."""


class AdmissibilityError(DegenspecError, ValueError):
    """Test function lacks the required decay certificate."""


class AlphaCollisionError(DomainError):
    """Truncation level alpha coincides with a listed eigenvalue."""


class ModelValidationError(InvariantViolation):
    """Scattering model data violates its invariants."""


class PoleError(DegenspecError, ArithmeticError):
    """Evaluation requested at a pole of the function."""


class FitError(DegenspecError, ValueError):
    """Least-squares fit is degenerate or ill conditioned."""


class DivergenceError(DomainError):
    """Series evaluation requested outside its convergence region."""


class InsufficientSubtractionsError(DomainError):
    """Continuation requested deeper than the subtracted expansion allows."""


class StripViolationError(DomainError):
    """Shift parameter outside the strip certified for the continuation stage."""


class ConvergenceError(DegenspecError, ArithmeticError):
    """Series or iteration failed to converge within its budget."""
