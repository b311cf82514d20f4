"""Exception hierarchy shared by all modules."""


class MixexpError(Exception):
    """Base class for library errors."""


class DomainError(MixexpError, ValueError):
    """A point lies outside the domain of a structure."""


class ParameterError(MixexpError, ValueError):
    """A parameter (usually n) is outside the admissible range."""


class ConvergenceError(MixexpError, ArithmeticError):
    pass


class QuadratureError(ConvergenceError):
    pass


class TruncationError(MixexpError, ArithmeticError):
    """A series could not be truncated within the allowed number of terms."""


class SamplerError(MixexpError, RuntimeError):
    pass


class UnknownFamily(MixexpError, KeyError):
    pass


class InadmissibleTriple(MixexpError, ValueError):
    pass


class UnknownPreset(MixexpError, KeyError):
    pass
