"""Exception hierarchy shared by all slrkit modules."""


class SlrkitError(Exception):
    """Base class for all errors raised by this package."""


# -- graph algebra ----------------------------------------------------------

class GraphError(SlrkitError):
    pass


class NotComposable(GraphError):
    pass


class TypeMismatch(GraphError):
    pass


class ArityMismatch(GraphError):
    pass


class NotDisjoint(GraphError):
    pass


class Incompatible(GraphError):
    """Quotient requested for an equivalence that is not compatible."""


class TooLarge(SlrkitError):
    """Input exceeds a documented soft limit for an exhaustive procedure."""


# -- definition systems -----------------------------------------------------

class SidError(SlrkitError):
    pass


class SidSyntaxError(SidError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{line}:{column}: {message}" if line else message)
        self.line = line
        self.column = column


class ArityError(SidError):
    pass


class UndeclaredSymbol(SidError):
    pass


class ReservedLabel(SidError):
    pass


class NotRegular(SidError):
    pass


class NotEqualityFree(SidError):
    pass


class NotRigid(SidError):
    pass


class EmptyLanguage(SidError):
    pass


class UnknownRule(SidError):
    pass


# -- MSO and transductions --------------------------------------------------

class MsoError(SlrkitError):
    pass


class MsoSyntaxError(MsoError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{line}:{column}: {message}" if line else message)
        self.line = line
        self.column = column


class TransductionError(SlrkitError):
    pass


class NonFunctionalScheme(TransductionError):
    """An applied scheme instance violated the unique edge-definition condition."""


class AlphabetMismatch(TransductionError):
    pass
