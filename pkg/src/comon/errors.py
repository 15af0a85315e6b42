"""Exception hierarchy shared by all modules."""


class ComonError(Exception):
    """Base class for every error raised by this package."""


class ParseError(ComonError, ValueError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class ShapeError(ComonError, ValueError):
    pass


class StructureError(ComonError):
    """A lazy container does not have the structure an operation requires."""


class PivotError(ComonError):
    pass


class NotRankOne(ComonError):
    pass


class CertificateError(ComonError):
    """A claimed certificate fails its exact re-check."""


class SymmetryError(ComonError):
    pass


class MembershipError(ComonError):
    pass


class ConstructionError(ComonError):
    pass


class PropertyViolation(ComonError):
    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message if witness is None else f"{message}: {witness!r}")


class VerificationFailure(ComonError):
    pass


class SolverIncomplete(ComonError):
    """The polynomial solver met a factor without rational roots."""

    def __init__(self, message, factor=None):
        self.factor = factor
        super().__init__(message)


class PreconditionError(ComonError, ValueError):
    pass
