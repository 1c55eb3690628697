"""Exception hierarchy shared by all modules."""


class GeometryError(ValueError):
    """Base class for invalid geometric input."""


class DegeneratePoint(GeometryError):
    """The bilinear pairing B(z, w) vanishes (point is off M)."""


class NotInBundle(GeometryError):
    """A pair (zeta, xi) violates xi . conj(zeta) = 0."""


class ChartSingular(GeometryError):
    """The pivot coordinate of an affine chart is (numerically) zero."""


class DimensionMismatch(GeometryError):
    pass


class NotInP(GeometryError):
    """Matrix is not in the -1 eigenspace of the Cartan involution."""


class FrameSizeMismatch(GeometryError):
    pass


class OutOfStrip(GeometryError):
    """Profile parameter outside the admissible strip."""


class PoleProximity(GeometryError):
    pass


class DegenerateSlice(GeometryError):
    """Slice angle lies on the lattice of singular orbits."""


class OutOfTable(GeometryError):
    """Requested N lies outside a tabulated potential."""


class StepTooLarge(RuntimeError):
    """Potential integration failed its residual audit."""


class NonPositive(RuntimeError):
    """Tabulated f' crossed zero."""


class StagnationAtZeroOfG(RuntimeError):
    """Profile integration started on the zero locus of the frame function."""
