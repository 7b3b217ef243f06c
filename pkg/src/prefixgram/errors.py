"""Exception hierarchy shared by all modules."""


class PrefixGramError(Exception):
    """Base class for library errors."""


class StarDiverges(PrefixGramError, ArithmeticError):
    pass


class StarUnsupported(PrefixGramError):
    pass


class GrammarSyntaxError(PrefixGramError, SyntaxError):
    """Malformed grammar text; carries the 1-based line number."""

    def __init__(self, message, lineno=None):
        loc = f"line {lineno}: " if lineno is not None else ""
        super().__init__(f"{loc}{message}")
        self.lineno = lineno


class EmptyGrammar(PrefixGramError, ValueError):
    pass


class WeightParseError(PrefixGramError, ValueError):
    def __init__(self, message, lineno=None):
        loc = f"line {lineno}: " if lineno is not None else ""
        super().__init__(f"{loc}{message}")
        self.lineno = lineno


class UnknownRule(PrefixGramError, KeyError):
    pass


class PreconditionViolated(PrefixGramError, ValueError):
    pass


class TotalsNotConverged(PrefixGramError, ArithmeticError):
    pass


class SymbolCollision(PrefixGramError, ValueError):
    pass


class EosCollision(SymbolCollision):
    pass


class UnknownTerminal(PrefixGramError, ValueError):
    pass


class ZeroPrefixMass(PrefixGramError, ZeroDivisionError):
    pass


class ForestTooLarge(PrefixGramError, RuntimeError):
    pass


class InsufficientData(PrefixGramError, ValueError):
    pass


class NonPositiveValue(PrefixGramError, ValueError):
    pass
