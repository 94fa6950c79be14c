"""Exception types raised by the engine."""


class RatkonError(Exception):
    pass


class GeneratorIndexError(RatkonError, ValueError):
    pass


class MismatchedGenerators(RatkonError, ValueError):
    pass


class ZeroAugmentation(RatkonError, ZeroDivisionError):
    pass


class SingularAugmentation(RatkonError, ZeroDivisionError):
    pass


class NonUnipotentConstantTerm(RatkonError, ValueError):
    pass


class CapExceeded(RatkonError, ValueError):
    pass


class ConstantTermPresent(RatkonError, ValueError):
    pass


class NotSubstantial(RatkonError, ValueError):
    pass


class NonIntegrable(RatkonError, ValueError):
    pass


class NonHermitianStrutPart(RatkonError, ValueError):
    pass


class WrongLegCount(RatkonError, ValueError):
    pass


class OddLegCount(RatkonError, ValueError):
    pass


class ParseError(RatkonError, ValueError):
    """Raised by the text codec; carries the offending position."""

    def __init__(self, message: str, text: str = "", pos: int = -1):
        self.text = text
        self.pos = pos
        if pos >= 0:
            message = f"{message} at position {pos} in {text!r}"
        super().__init__(message)
