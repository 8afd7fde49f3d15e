"""Exception hierarchy shared by all cognilog modules."""


class CognilogError(Exception):
    """Base class for all engine errors."""


class DuplicateIdError(CognilogError):
    pass


class DanglingReferenceError(CognilogError):
    pass


class CausalCycleError(CognilogError):
    """Non-sentinel cause arrows form a cycle after collapsing trivial pairs."""


class UnknownParticipantError(CognilogError):
    pass


class UnknownObjectError(CognilogError):
    pass


class SentinelNotBranchableError(CognilogError):
    pass


class TrivialPairError(CognilogError):
    """Trivial pairing requested for actions with diverging timestamps."""


class EmptyClassError(CognilogError):
    pass


class NotInClassError(CognilogError):
    pass


class NotTriangularError(CognilogError):
    """Cycle among non-sentinel actions where nilpotence was required."""


class DimensionMismatchError(CognilogError):
    pass


class TooLargeError(CognilogError):
    pass


class SourceTargetMismatchError(CognilogError):
    pass


class MissingTimestampError(CognilogError):
    pass


class NoAdmissibleFunctorError(CognilogError):
    pass


class AmbiguousInverseImageError(CognilogError):
    """An s-log participant has two or more equally valid preimages."""


class NotCausallyClosedError(CognilogError):
    pass


class NoPlanFoundError(CognilogError):
    pass


class ParseError(CognilogError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column
