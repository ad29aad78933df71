"""Exception hierarchy shared by every mujet module."""


class MujetError(Exception):
    """Base class for all errors raised by mujet."""


class ParseError(MujetError):
    """Malformed expression or problem-file text."""

    def __init__(self, message, position=None, text=None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class UndeclaredSymbolError(ParseError):
    pass


class JetSuffixError(ParseError):
    pass


class OrderOverflowError(MujetError):
    """A jet variable exceeds the truncation order of the bundle."""

    def __init__(self, message, variable=None):
        self.variable = variable
        super().__init__(message)


class DimensionError(MujetError):
    pass


class CyclicRulesError(MujetError):
    pass


class EvaluationError(MujetError):
    """Numeric evaluation kept hitting singular points."""


class SingularJacobianError(MujetError):
    pass


class SingularRestrictionError(MujetError):
    pass
