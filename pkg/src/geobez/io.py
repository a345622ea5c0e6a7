"""JSON and OBJ interchange for paths, splines, and traced curves."""

from __future__ import annotations

import json

import numpy as np

from .editing import CORNER, Spline
from .geodesics import GeodesicEngine, GeodesicPath
from .mesh import MeshPoint
from .splines import ControlPolygon, TraceConfig, TracedCurve


def point_to_json(p: MeshPoint) -> dict:
    return {"face": int(p.face), "alpha": float(p.alpha), "beta": float(p.beta)}


def point_from_json(d: dict) -> MeshPoint:
    return MeshPoint(int(d["face"]), float(d["alpha"]), float(d["beta"]))


def path_to_json(path: GeodesicPath) -> dict:
    return {
        "strip": [int(t) for t in path.strip],
        "intercepts": [float(x) for x in path.intercepts],
        "points3d": [[float(c) for c in row] for row in path.points3d],
        "length": float(path.length),
        "start": point_to_json(path.start),
        "end": point_to_json(path.end),
    }


def path_from_json(engine: GeodesicEngine, d: dict) -> GeodesicPath:
    strip = np.asarray(d["strip"], dtype=np.int64)
    start = point_from_json(d["start"])
    end = point_from_json(d["end"])
    shared = engine._shared_edges(strip)
    return GeodesicPath(start, end, strip, shared,
                        np.asarray(d["intercepts"], dtype=float),
                        np.asarray(d["points3d"], dtype=float))


def config_to_json(cfg: TraceConfig) -> dict:
    out = {"scheme": cfg.scheme, "mode": cfg.mode, "theta": cfg.theta_deg,
           "depth": cfg.depth}
    if cfg.delta is not None:
        out["delta"] = cfg.delta
    return out


def config_from_json(d: dict) -> TraceConfig:
    return TraceConfig(
        scheme=d.get("scheme", "rdc"),
        mode=d.get("mode", "uniform"),
        depth=int(d.get("depth", 4)),
        theta_deg=float(d.get("theta", 5.0)),
        delta=d.get("delta"),
    )


def spline_to_json(spline_or_polygon, config: TraceConfig | None = None) -> dict:
    """Serialize a single polygon or a full editing spline."""
    if isinstance(spline_or_polygon, ControlPolygon):
        poly = spline_or_polygon
        cfg = config or TraceConfig()
        return {
            "degree": poly.degree,
            "control_points": [point_to_json(p) for p in poly.points],
            **config_to_json(cfg),
        }
    spline: Spline = spline_or_polygon
    return {
        "degree": 3,
        "segments": [[point_to_json(p) for p in seg.points] for seg in spline.segments],
        "continuity": list(spline.continuity),
        **config_to_json(spline.config),
    }


def spline_from_json(engine: GeodesicEngine, d: dict):
    """Returns (list of ControlPolygon, TraceConfig, continuity or None)."""
    cfg = config_from_json(d)
    if "segments" in d:
        polys = [
            ControlPolygon.from_points(engine, [point_from_json(p) for p in seg])
            for seg in d["segments"]
        ]
        cont = d.get("continuity", [CORNER] * (len(polys) + 1))
        return polys, cfg, cont
    pts = [point_from_json(p) for p in d["control_points"]]
    return [ControlPolygon.from_points(engine, pts)], cfg, None


def curve_to_json(curve: TracedCurve) -> dict:
    return {
        "scheme": curve.scheme,
        "mode": curve.mode,
        "meta": curve.meta,
        "nodes": [point_to_json(p) for p in curve.nodes],
        "segments": [path_to_json(s) for s in curve.segments],
        "length": curve.length,
        "segment_count": curve.segment_count,
    }


def curve_from_json(engine: GeodesicEngine, d: dict) -> TracedCurve:
    nodes = [point_from_json(p) for p in d["nodes"]]
    segs = [path_from_json(engine, s) for s in d["segments"]]
    return TracedCurve(nodes, segs, d.get("scheme", "rdc"), d.get("mode", "uniform"),
                       d.get("meta", {}))


def curve_to_obj(curve: TracedCurve) -> str:
    """Polyline overlay: one OBJ line segment per triangle crossed."""
    flat = curve.flat_polyline()
    lines = [f"v {p[0]:.17g} {p[1]:.17g} {p[2]:.17g}" for p in flat]
    for i in range(1, len(flat)):
        lines.append(f"l {i} {i + 1}")
    return "\n".join(lines) + "\n"


def write_json(path, payload) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)
