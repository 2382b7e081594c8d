"""Exception hierarchy shared by every decomposition."""


class DQError(Exception):
    """Base class for library errors."""


class NotAppreciable(DQError):
    pass


class Negative(DQError):
    pass


class DimensionMismatch(DQError):
    pass


class NotSquare(DQError):
    pass


class ZeroVector(DQError):
    pass


class ZeroMatrix(DQError):
    pass


class ConvergenceFailure(DQError):
    pass


class PreconditionViolated(DQError):
    pass


class NotIsometry(DQError):
    pass


class NotUnitary(DQError):
    pass


class ZeroPencil(DQError):
    pass
