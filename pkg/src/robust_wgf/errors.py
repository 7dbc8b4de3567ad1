"""Exception hierarchy shared across the package."""


class RobustWGFError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateEnsembleError(RobustWGFError, ValueError):
    """An ensemble is too small or too concentrated for the requested operation."""


class FarFieldError(RobustWGFError, FloatingPointError):
    """Every kernel weight underflowed at an evaluation point."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class ShapeError(RobustWGFError, ValueError):
    """Array shapes or dimensions are inconsistent."""


class FactorizationError(RobustWGFError, ValueError):
    """A matrix that must be symmetric positive definite could not be factorized."""


class ModelDomainError(RobustWGFError, ValueError):
    """A forward model was evaluated outside its domain."""


class ModelEvaluationError(RobustWGFError):
    """A forward-model call failed inside a flow run."""

    def __init__(self, message, particle=None, iteration=None, trace=None):
        super().__init__(message)
        self.particle = particle
        self.iteration = iteration
        self.trace = trace


class DivergenceError(RobustWGFError, FloatingPointError):
    """A particle update produced non-finite coordinates."""

    def __init__(self, message, iteration=None, trace=None):
        super().__init__(message)
        self.iteration = iteration
        self.trace = trace


class ConfigError(RobustWGFError, ValueError):
    """A run configuration is malformed or semantically invalid."""
