"""Exception types raised across the package."""


class QuatSylvError(Exception):
    """Base class for all package errors."""


class ShapeError(QuatSylvError, ValueError):
    """Operand dimensions do not fit together."""


class InvalidAxis(QuatSylvError, ValueError):
    """An involution axis of zero length was supplied."""


class NonSquare(ShapeError):
    pass


class BadWindow(QuatSylvError, ValueError):
    """A rank-condition window lies outside ``1 <= m <= n <= k``."""


class InconsistentEquation(QuatSylvError):
    """A single four-term equation has no solution.

    Attributes
    ----------
    index : int or None
        1-based position of the equation inside its system, when known.
    residuals : tuple of float
        The four projector residuals that decided the verdict.
    """

    def __init__(self, message, index=None, residuals=()):
        super().__init__(message)
        self.index = index
        self.residuals = tuple(residuals)


class InconsistentSystem(QuatSylvError):
    """A coupled system has no solution.

    ``report`` carries the rank-condition report of the top-level system
    (a :class:`~quatsylv.sylvester.ConsistencyReport`), ``level`` the depth
    of the reduction at which the failure was detected (0 = original system).
    """

    def __init__(self, message, report=None, level=0):
        super().__init__(message)
        self.report = report
        self.level = level


class FormatError(QuatSylvError, ValueError):
    """Serialized input does not match the expected schema.

    ``field`` is a dotted path to the first offending field, e.g.
    ``equations[1].B.data[2]``.
    """

    def __init__(self, message, field=""):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field
