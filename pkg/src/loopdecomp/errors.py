"""Exception hierarchy.

Everything raised on purpose by the engine derives from :class:`LoopDecompError`.
Errors caused by a bad request (malformed torsion string, a hypothesis that
does not hold) also derive from :class:`InputError`, which the CLI maps to
exit code 1.
"""


class LoopDecompError(Exception):
    pass


class InputError(LoopDecompError, ValueError):
    pass


# series
class NonzeroConstantTerm(LoopDecompError, ValueError):
    pass


class NonUnitDenominator(LoopDecompError, ValueError):
    pass


class NegativeCoefficient(LoopDecompError, ValueError):
    pass


# spaces
class DimTooLow(InputError):
    pass


class Mod2SmashUnsupported(LoopDecompError):
    pass


class UnsupportedShape(LoopDecompError):
    pass


class UnboundOpaqueLoop(LoopDecompError):
    pass


class UnsupportedLoopShape(LoopDecompError):
    pass


class ExpressionParseError(InputError):
    pass


# dga
class InvalidDGA(InputError):
    pass


class BasisTooLarge(LoopDecompError):
    pass


# hilton_milnor
class ExpansionTooLarge(LoopDecompError):
    pass


# decomp / cli
class InvalidInput(InputError):
    pass


class HypothesisNotMet(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class NotPrime(InputError):
    pass


class EvenExponentOne(InputError):
    pass
