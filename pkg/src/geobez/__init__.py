"""Bezier splines on triangle meshes under the geodesic metric."""

from .dualgraph import DualGraph, build_dual_graph
from .geodesics import GeodesicEngine, GeodesicPath, TangentVector
from .mesh import MeshPoint, TriangleMesh, load_mesh, save_obj
from .splines import (
    ControlPolygon,
    TraceConfig,
    TracedCurve,
    bspline_to_bezier,
    deboor_eval,
    decasteljau_eval,
    decasteljau_split,
    degree_elevate,
    insert,
    olr_insert,
    olr_point_eval,
    olr_subdivide,
    olr_trace,
    point_eval,
    rdc_insert,
    rdc_point_eval,
    rdc_trace,
    trace,
)

__all__ = [
    "DualGraph",
    "build_dual_graph",
    "GeodesicEngine",
    "GeodesicPath",
    "TangentVector",
    "MeshPoint",
    "TriangleMesh",
    "load_mesh",
    "save_obj",
    "ControlPolygon",
    "TraceConfig",
    "TracedCurve",
    "bspline_to_bezier",
    "deboor_eval",
    "decasteljau_eval",
    "decasteljau_split",
    "degree_elevate",
    "insert",
    "olr_insert",
    "olr_point_eval",
    "olr_subdivide",
    "olr_trace",
    "point_eval",
    "rdc_insert",
    "rdc_point_eval",
    "rdc_trace",
    "trace",
]

__version__ = "0.1.0"
