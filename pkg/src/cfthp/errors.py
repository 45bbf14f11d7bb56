"""Exception types raised by the simulator."""


class CfThpError(Exception):
    """Base class for all simulator errors."""


class InvalidArgumentError(CfThpError, ValueError):
    pass


class SingularFactorizationError(CfThpError, ArithmeticError):
    """An LQ factorization met a (numerically) rank-deficient row."""

    def __init__(self, message, row=None, cluster=None):
        super().__init__(message)
        self.row = row
        self.cluster = cluster


class DegenerateSinrError(CfThpError, ArithmeticError):
    """The SINR denominator is not positive."""

    def __init__(self, message, denominator=None):
        super().__init__(message)
        self.denominator = denominator


class EmptyResultError(CfThpError, ValueError):
    pass
