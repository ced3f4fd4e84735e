"""Exception types shared by all modules."""


class PolyneckError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameter(PolyneckError, ValueError):
    pass


class PreconditionError(PolyneckError, ValueError):
    pass


class DomainError(PolyneckError, ValueError):
    pass


class SearchFailure(PolyneckError, RuntimeError):
    pass


class GenerationError(PolyneckError, RuntimeError):
    pass
