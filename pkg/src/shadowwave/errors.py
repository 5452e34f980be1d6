"""Exception hierarchy shared by all modules."""


class ShadowWaveError(Exception):
    """Base class for every error raised by the package."""


class DomainError(ShadowWaveError, ValueError):
    """A state lies outside the domain where a model quantity is defined."""


class ModelError(ShadowWaveError, ValueError):
    """An operation was requested for a gas model that does not support it."""


class PreconditionError(ShadowWaveError, ValueError):
    pass


class NoSolutionError(ShadowWaveError):
    pass


class ConvergenceError(ShadowWaveError, ArithmeticError):
    pass


class SingularSystemError(ShadowWaveError, ArithmeticError):
    pass


class TieError(ShadowWaveError):
    """Two structurally different candidates have indistinguishable production."""


class ReportedAmbiguity(ShadowWaveError):
    pass


class DegenerateError(ShadowWaveError, ValueError):
    pass


class UnsupportedInteraction(ShadowWaveError, NotImplementedError):
    pass


class QuadratureError(ShadowWaveError, ArithmeticError):
    pass
