"""Exception hierarchy shared by every module of the package."""


class BiminimalError(Exception):
    """Base class for all errors raised by :mod:`biminimal`."""


class PointOutsideChart(BiminimalError, ValueError):
    pass


class ChartExit(BiminimalError):
    """An integrated curve left the coordinate chart (e.g. reached y <= 0)."""


class NonUnitVector(BiminimalError, ValueError):
    pass


class DegenerateCurve(BiminimalError, ValueError):
    pass


class DegenerateFrame(BiminimalError):
    pass


class NonpositiveCurvature(BiminimalError, ValueError):
    pass


class CurvatureUnderflow(BiminimalError, ArithmeticError):
    pass


class Blowup(BiminimalError, ArithmeticError):
    pass


class IndeterminateMultiplier(BiminimalError):
    """The multiplier cannot be recovered: the curvature (or H) vanishes."""


class GeodesicMissesCenter(BiminimalError):
    pass


class RankDeficient(BiminimalError):
    pass


class NotSpaceForm(BiminimalError, ValueError):
    pass


class UnsupportedPair(BiminimalError, ValueError):
    """The requested construction does not accept a curve of this geometry."""
