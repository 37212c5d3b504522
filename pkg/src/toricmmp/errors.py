"""Exception hierarchy.  ``exit_code`` is what the CLI returns."""


class ToricError(Exception):
    exit_code = 1


class ParseError(ToricError):
    exit_code = 2

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class FanError(ToricError):
    exit_code = 3


class PreconditionError(ToricError):
    exit_code = 4


class NotQCartierError(PreconditionError):
    pass


class NotExtremalError(PreconditionError):
    pass


class ContractionError(PreconditionError):
    """The merged cones do not form a fan (the ray was not contractible)."""


class NoFlipError(PreconditionError):
    """No ray-preserving subdivision is a flip."""


class FlopError(NoFlipError):
    """Candidates exist but the canonical class is numerically trivial on a
    new interior wall."""


class CertificateError(ToricError):
    """A verified statement failed on a concrete instance."""

    exit_code = 5

    def __init__(self, statement, detail):
        super().__init__(f"{statement}: {detail}")
        self.statement = statement
        self.detail = detail


class UniquenessViolation(CertificateError):
    pass
