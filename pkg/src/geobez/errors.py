"""Exception hierarchy for the engine."""


class MeshError(Exception):
    """Base class for mesh loading and query failures."""


class ParseError(MeshError):
    """Input geometry could not be parsed."""


class NonManifold(MeshError):
    """Mesh has an edge shared by more than two faces or incoherent winding."""


class NotWatertight(MeshError):
    """Mesh has boundary edges."""


class InvalidFace(MeshError):
    """Face index out of range."""


class InvalidBarycentric(MeshError):
    """Barycentric coordinates outside the face by more than the tolerance."""


class GeodesicError(Exception):
    """Base class for geodesic primitive failures."""


class Unreachable(GeodesicError):
    """No strip connects the two points (disconnected mesh component)."""


class DegenerateStrip(GeodesicError):
    """Strip too degenerate to run the funnel on."""


class IterationCap(GeodesicError):
    """Straightening exceeded its iteration safety cap."""


class SplineError(Exception):
    """Base class for spline construction failures."""


class ExtensionUnstable(SplineError):
    """A geodesic extension required by point insertion is unreasonably long."""


class SvgUnsupportedFeature(UserWarning):
    """An SVG feature outside the supported path subset was skipped."""
