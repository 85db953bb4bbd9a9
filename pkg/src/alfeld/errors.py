"""Exception hierarchy shared by every module of the package."""


class AlfeldError(Exception):
    """Base class for all errors raised by this package."""


class NonSquare(AlfeldError):
    pass


class SingularMatrix(AlfeldError):
    pass


class LengthMismatch(AlfeldError, ValueError):
    pass


class AssumptionViolation(AlfeldError, ValueError):
    """Raised when element parameters break the admissibility inequalities.

    ``inequality`` carries the name of the first violated condition.
    """

    def __init__(self, inequality, message=None):
        self.inequality = inequality
        super().__init__(message or f"assumption violated: {inequality}")


class CellMismatch(AlfeldError, ValueError):
    pass


class DegenerateCell(AlfeldError, ValueError):
    pass


class SplitPointNotInterior(AlfeldError, ValueError):
    pass


class MeshFormatError(AlfeldError, ValueError):
    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


class NonConformingMesh(AlfeldError, ValueError):
    pass


class TargetTooLow(AlfeldError, ValueError):
    pass


class FrameMismatch(AlfeldError, ValueError):
    pass


class NotASubsimplex(AlfeldError, ValueError):
    pass


class DegreeMismatch(AlfeldError, ValueError):
    pass


class NotInRange(AlfeldError):
    """Raised by the Q-operator inverse.

    ``reason`` is ``"NonzeroLowLayer"`` (with ``pieces == (j,)``) or
    ``"PreimageMismatch"`` (with ``pieces == (j, j2)``).
    """

    def __init__(self, reason, pieces, detail=""):
        self.reason = reason
        self.pieces = tuple(pieces)
        super().__init__(f"{reason}{self.pieces}{': ' + detail if detail else ''}")


class SiteNotInCell(AlfeldError, ValueError):
    pass


class AssemblyMismatch(AlfeldError):
    pass


class SolveFailure(AlfeldError):
    pass


class NotMinimalFamily(AlfeldError, ValueError):
    pass


class UnsupportedDimension(AlfeldError, ValueError):
    pass
