"""Exception hierarchy shared by all modules."""


class CMonoidError(Exception):
    """Base class for every error raised by this package."""


class InfiniteQuotient(CMonoidError):
    pass


class NotAssociative(CMonoidError):
    def __init__(self, a, b, c):
        super().__init__(f"(x{a} + x{b}) + x{c} != x{a} + (x{b} + x{c})")
        self.witness = (a, b, c)


class NotCommutative(CMonoidError):
    def __init__(self, a, b):
        super().__init__(f"x{a} + x{b} != x{b} + x{a}")
        self.witness = (a, b)


class NotIdempotent(CMonoidError):
    pass


class AmbientMismatch(CMonoidError):
    pass


class UnknownPrime(CMonoidError):
    pass


class NoAlphaFound(CMonoidError):
    def __init__(self, alpha_cap, reason=""):
        msg = f"no period alpha <= {alpha_cap} passes the certificate"
        if reason:
            msg += f" ({reason})"
        super().__init__(msg)
        self.alpha_cap = alpha_cap


class NotDense(CMonoidError):
    pass


class InvalidPresentation(CMonoidError):
    pass


class NotACongruence(CMonoidError):
    pass


class PreconditionNotSeminormal(CMonoidError):
    pass


class NotSeminormal(CMonoidError):
    pass


class PreconditionFailed(CMonoidError):
    pass


class EmptySequence(CMonoidError):
    pass


class NotInMonoid(CMonoidError):
    pass


class InvalidChain(CMonoidError):
    pass


class NonSurjectiveBonding(CMonoidError):
    pass


class ScenarioError(CMonoidError):
    """Raised while reading a scenario file; carries a line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ParseError(ScenarioError):
    pass


class UnknownGroupName(ScenarioError):
    pass


class MissingField(ScenarioError):
    pass
