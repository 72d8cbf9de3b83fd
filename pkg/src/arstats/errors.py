"""Exception hierarchy shared by all modules."""


class ArStatsError(ValueError):
    """Base class for every error raised by this package."""


class InvalidParamsError(ArStatsError):
    pass


class PauliViolation(ArStatsError):
    """A fermionic occupation exceeds the generalized Pauli bound (total <= k - 1)."""


class CutoffTooSmall(ArStatsError):
    pass


class BasisMismatch(ArStatsError):
    pass


class DomainError(ArStatsError):
    """A coherent-state label lies outside the domain where the series converges."""


class QuadratureError(ArStatsError):
    """Two successive quadrature refinements disagree beyond the requested tolerance."""
