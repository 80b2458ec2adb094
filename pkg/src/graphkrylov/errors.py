"""Exception hierarchy shared by all modules."""


class GraphKrylovError(Exception):
    """Base class for all library errors."""


class NumericalError(GraphKrylovError):
    """A numerical stage failed (maps to CLI exit code 3)."""


class NotSymmetric(NumericalError, ValueError):
    pass


class DomainError(NumericalError, ValueError):
    """An argument lies outside the interval on which a kernel function is defined."""


class Singular(NumericalError, ArithmeticError):
    pass


class NonInvertibleCollocation(Singular):
    """The regularized collocation matrix of an RLS system is not invertible."""


class NegativePhiAtNode(NumericalError, ValueError):
    pass


class SizeExceeded(GraphKrylovError, ValueError):
    pass


class DimensionMismatch(GraphKrylovError, ValueError):
    pass


class DuplicateNode(GraphKrylovError, ValueError):
    pass


class IndexOutOfRange(GraphKrylovError, IndexError):
    pass


class GraphFormatError(GraphKrylovError, ValueError):
    """Malformed edge list, point cloud or label file."""
