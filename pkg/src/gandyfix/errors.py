"""Exception hierarchy shared by every layer of the engine."""
from __future__ import annotations


class GandyFixError(Exception):
    """Base class for all engine errors."""


class AtomUsesReservedCharacter(GandyFixError, ValueError):
    pass


class AtomOutsideAlphabet(GandyFixError, ValueError):
    pass


class NotAList(GandyFixError, TypeError):
    pass


class UnboundedQuantifier(GandyFixError):
    """A quantifier was evaluated without an explicit finite pool."""


class UnboundVariable(GandyFixError, KeyError):
    pass


class CostBoundViolation(GandyFixError):
    """Metered work exceeded a declared C*n^p bound."""


class UnknownRule(GandyFixError, LookupError):
    pass


class PoolTooLarge(GandyFixError):
    pass


class DisjointnessViolation(GandyFixError):
    """Two generating rules were true on the same component tuple."""


class InsufficientSizes(GandyFixError, ValueError):
    pass


class ParseError(GandyFixError):
    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class ValidationError(GandyFixError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))
