"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the set where an operation is defined."""


class SingularityError(DomainError):
    """Evaluation at a point where a formula is singular (e.g. x_H = 0, x = 0)."""


class DegenerateResolutionError(DomainError):
    """Quadrature resolution too coarse for the requested region."""


class HypothesisError(DomainError):
    """A quantitative hypothesis of a construction does not hold."""


class ConstructionError(RuntimeError):
    """A construction step failed numerically; carries diagnostics."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class ResolutionWarning(UserWarning):
    """Quadrature resolution is close to the smallest truncation scale."""


class HypothesisWarning(UserWarning):
    """A hypothesis is violated but the computation proceeds anyway."""


class ConfigError(DomainError):
    """An experiment configuration is malformed or violates a hypothesis."""
