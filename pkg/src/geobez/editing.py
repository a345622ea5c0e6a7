"""Spline-level editing: anchors, handles, chart transforms.

Mirrors the interaction semantics of 2D vector editors: anchors interpolate
the spline, handles define tangent segments, smooth anchors keep their two
tangent segments on one geodesic line. Whole-spline transforms run through
polar normal coordinates about a chart center.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SplineError
from .geodesics import GeodesicEngine, TangentVector
from .mesh import MeshPoint
from .splines import ControlPolygon, TraceConfig

CORNER = "corner"
SMOOTH = "smooth"


@dataclass
class Spline:
    """Chain of cubic segments sharing junction anchors."""

    segments: list[ControlPolygon]
    continuity: list[str]  # one flag per anchor (endpoints included)
    config: TraceConfig = field(default_factory=TraceConfig)

    def __post_init__(self):
        if len(self.continuity) != len(self.segments) + 1:
            raise SplineError("need one continuity flag per anchor")
        for seg in self.segments:
            if seg.degree != 3:
                raise SplineError("editing operates on cubic segments")
        for a, b in zip(self.segments[:-1], self.segments[1:]):
            if a.points[-1] != b.points[0]:
                raise SplineError("segments must chain through shared anchors")

    @property
    def anchor_count(self) -> int:
        return len(self.segments) + 1

    def anchor(self, i: int) -> MeshPoint:
        return self.segments[i].points[0] if i < len(self.segments) else self.segments[-1].points[-1]

    def handles_of(self, i: int) -> tuple[MeshPoint | None, MeshPoint | None]:
        before = self.segments[i - 1].points[2] if i > 0 else None
        after = self.segments[i].points[1] if i < len(self.segments) else None
        return before, after

    def control_points(self) -> list[MeshPoint]:
        pts = list(self.segments[0].points)
        for seg in self.segments[1:]:
            pts.extend(seg.points[1:])
        return pts


def make_spline(engine: GeodesicEngine, control_points: list[MeshPoint],
                config: TraceConfig | None = None) -> Spline:
    """Build a spline from 3n+1 cubic control points."""
    if len(control_points) < 4 or (len(control_points) - 1) % 3 != 0:
        raise SplineError("cubic spline needs 3n+1 control points")
    segs = []
    for i in range(0, len(control_points) - 1, 3):
        segs.append(ControlPolygon.from_points(engine, control_points[i : i + 4]))
    flags = [CORNER] * (len(segs) + 1)
    return Spline(segs, flags, config or TraceConfig())


def _replace_polygon(engine: GeodesicEngine, poly: ControlPolygon,
                     replacements: dict[int, MeshPoint]) -> ControlPolygon:
    pts = list(poly.points)
    for i, p in replacements.items():
        pts[i] = p
    return ControlPolygon.from_points(engine, pts)


def _handle_tangent(engine: GeodesicEngine, anchor: MeshPoint, handle: MeshPoint):
    """Direction (at the anchor) and length of one tangent segment."""
    path = engine.shortest_path(anchor, handle)
    tang = engine.tangent_at_start(path)
    return tang, path.length


def move_anchor(engine: GeodesicEngine, spline: Spline, i: int, new_pos: MeshPoint) -> Spline:
    """Move an anchor; its two tangent segments travel with it.

    Tangent directions are parallel-transported from the old to the new
    anchor position and the handles re-traced as straightest geodesics of
    their original lengths.
    """
    old = spline.anchor(i)
    if old == new_pos:
        return spline
    before, after = spline.handles_of(i)
    carry = engine.shortest_path(old, new_pos)
    segs = list(spline.segments)

    def retrace(handle: MeshPoint) -> MeshPoint:
        tang, length = _handle_tangent(engine, old, handle)
        if tang is None or length == 0.0:
            return new_pos
        moved = engine.transport_along(carry, tang)
        return engine.straightest(new_pos, moved, length).end

    if before is not None:
        nb = retrace(before)
        segs[i - 1] = _replace_polygon(engine, segs[i - 1], {2: nb, 3: new_pos})
    if after is not None:
        na = retrace(after)
        segs[i] = _replace_polygon(engine, segs[i], {0: new_pos, 1: na})
    return Spline(segs, list(spline.continuity), spline.config)


def move_handle(engine: GeodesicEngine, spline: Spline, anchor: int, side: str,
                new_pos: MeshPoint) -> Spline:
    """Move one handle; at a smooth anchor the opposite handle mirrors it."""
    if side not in ("before", "after"):
        raise SplineError("side must be 'before' or 'after'")
    segs = list(spline.segments)
    a_pt = spline.anchor(anchor)
    if side == "after":
        if anchor >= len(segs):
            raise SplineError("last anchor has no outgoing handle")
        segs[anchor] = _replace_polygon(engine, segs[anchor], {1: new_pos})
    else:
        if anchor == 0:
            raise SplineError("first anchor has no incoming handle")
        segs[anchor - 1] = _replace_polygon(engine, segs[anchor - 1], {2: new_pos})

    if spline.continuity[anchor] == SMOOTH:
        other_before = side == "after"
        opp = spline.handles_of(anchor)[0 if other_before else 1]
        if opp is not None:
            # continue the moved tangent segment straight through the anchor
            inbound = engine.shortest_path(new_pos, a_pt)
            tang = engine.tangent_at_end(inbound)
            opp_len = engine.shortest_path(a_pt, opp).length
            if tang is not None and opp_len > 0.0:
                mirrored = engine.straightest(a_pt, tang, opp_len).end
                if other_before:
                    segs[anchor - 1] = _replace_polygon(engine, segs[anchor - 1], {2: mirrored})
                else:
                    segs[anchor] = _replace_polygon(engine, segs[anchor], {1: mirrored})
    return Spline(segs, list(spline.continuity), spline.config)


def set_continuity(engine: GeodesicEngine, spline: Spline, anchor: int, flag: str) -> Spline:
    """Set an anchor's continuity; switching to smooth re-mirrors the incoming handle."""
    if flag not in (CORNER, SMOOTH):
        raise SplineError(f"unknown continuity flag {flag!r}")
    flags = list(spline.continuity)
    flags[anchor] = flag
    out = Spline(list(spline.segments), flags, spline.config)
    if flag == SMOOTH and 0 < anchor < len(spline.segments):
        after = spline.handles_of(anchor)[1]
        if after is not None:
            out = move_handle(engine, out, anchor, "after", after)
    return out


def delete_anchor(engine: GeodesicEngine, spline: Spline, i: int) -> Spline:
    """Merge the two segments at an interior anchor, keeping outer handles."""
    if not 0 < i < len(spline.segments):
        raise SplineError("can only delete interior anchors")
    left = spline.segments[i - 1]
    right = spline.segments[i]
    merged = ControlPolygon.from_points(
        engine, [left.points[0], left.points[1], right.points[2], right.points[3]]
    )
    segs = spline.segments[: i - 1] + [merged] + spline.segments[i + 1 :]
    flags = spline.continuity[:i] + spline.continuity[i + 1 :]
    return Spline(segs, flags, spline.config)


def insert_anchor(engine: GeodesicEngine, spline: Spline, seg_index: int, t: float) -> Spline:
    """Split one segment at parameter t; the new anchor is smooth."""
    from .splines import insert as spline_insert

    left, right = spline_insert(engine, spline.segments[seg_index], t, spline.config)
    segs = spline.segments[:seg_index] + [left, right] + spline.segments[seg_index + 1 :]
    flags = (spline.continuity[: seg_index + 1] + [SMOOTH]
             + spline.continuity[seg_index + 1 :])
    return Spline(segs, flags, spline.config)


# ---------------------------------------------------------------------------
# normal-coordinate charts and whole-spline transforms
# ---------------------------------------------------------------------------


@dataclass
class NormalChart:
    """Polar (angle, radius) coordinates of points about a chart center."""

    center: MeshPoint
    angles: list[float]
    radii: list[float]


def log_chart(engine: GeodesicEngine, center: MeshPoint, points: list[MeshPoint]) -> NormalChart:
    angles, radii = [], []
    for p in points:
        if p == center:
            angles.append(0.0)
            radii.append(0.0)
            continue
        path = engine.shortest_path(center, p)
        tang = engine.tangent_at_start(path)
        angles.append(0.0 if tang is None else tang.angle)
        radii.append(path.length)
    return NormalChart(center, angles, radii)


def exp_chart(engine: GeodesicEngine, chart: NormalChart) -> list[MeshPoint]:
    out = []
    for ang, rad in zip(chart.angles, chart.radii):
        if rad == 0.0:
            out.append(chart.center)
            continue
        d = TangentVector(chart.center, math.cos(ang), math.sin(ang))
        out.append(engine.straightest(chart.center, d, rad).end)
    return out


def _transport_angle(engine: GeodesicEngine, a: MeshPoint, b: MeshPoint) -> float:
    """Angle of the transported x-axis of a's frame, seen in b's frame."""
    if a.face == b.face:
        return 0.0
    moved = engine.parallel_transport(TangentVector(a, 1.0, 0.0), b)
    return moved.angle


def transform_spline(engine: GeodesicEngine, spline: Spline, center: MeshPoint,
                     op: str, *, angle: float = 0.0, scale: float = 1.0,
                     new_center: MeshPoint | None = None) -> Spline:
    """Rotate / scale / translate a spline through its normal coordinates."""
    points = spline.control_points()
    unique: list[MeshPoint] = []
    index: dict[int, int] = {}
    for p in points:
        if id(p) not in index:
            index[id(p)] = len(unique)
            unique.append(p)
    chart = log_chart(engine, center, unique)
    if op == "rotate":
        chart = NormalChart(chart.center, [a + angle for a in chart.angles], chart.radii)
    elif op == "scale":
        if scale <= 0.0:
            raise SplineError("scale must be positive")
        chart = NormalChart(chart.center, chart.angles, [r * scale for r in chart.radii])
    elif op == "translate":
        if new_center is None:
            raise SplineError("translate needs a new center")
        rho = _transport_angle(engine, center, new_center)
        chart = NormalChart(new_center, [a + rho for a in chart.angles], chart.radii)
    else:
        raise SplineError(f"unknown transform {op!r}")
    moved = exp_chart(engine, chart)
    new_pts = [moved[index[id(p)]] for p in points]
    segs = []
    for i in range(0, len(new_pts) - 1, 3):
        segs.append(ControlPolygon.from_points(engine, new_pts[i : i + 4]))
    return Spline(segs, list(spline.continuity), spline.config)
