"""Exception hierarchy.

``DomainError`` subclasses signal violated mathematical preconditions (CLI
exit status 1); ``SchemaError`` signals malformed input (exit status 2).
"""


class BogomolovError(Exception):
    pass


class DomainError(BogomolovError, ValueError):
    pass


class DimensionMismatch(DomainError):
    pass


class SignatureError(DomainError):
    pass


class DegenerateFormError(SignatureError):
    pass


class PreconditionError(DomainError):
    pass


class SearchCapExceeded(DomainError):
    pass


class CoveringError(DomainError):
    """No residue vector avoids every hyperplane for some prime."""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate or {}


class SchemaError(BogomolovError, ValueError):
    pass
