"""Exception hierarchy shared by every module."""


class MtphiError(Exception):
    pass


class ValidationError(MtphiError, ValueError):
    """Input data violates a structural invariant (shape, field, nesting)."""


class InsufficientPrecision(MtphiError, ArithmeticError):
    """A decision (zero test, rank, leading digit) falls below tracked precision."""


class DomainError(MtphiError, ValueError):
    pass


class ZeroValuation(DomainError):
    """Valuation requested for an element indistinguishable from zero."""


class NotAUnit(DomainError):
    pass


class NotMixedTate(DomainError):
    pass


class NotMixedTatePhi(NotMixedTate):
    """The phi-module is not a sum of (K0, p^n)."""


class WrongShape(DomainError):
    pass


class NotUnipotent(DomainError):
    pass


class NotMTHS(DomainError):
    pass


class NotInvertible(DomainError, ZeroDivisionError):
    pass
