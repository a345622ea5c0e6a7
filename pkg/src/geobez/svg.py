"""SVG path import: map 2D drawings onto the mesh via normal coordinates.

Only path data is honored (M, L, C, Q, Z, their relative forms, plus H/V
lines). Quadratic segments are degree-elevated to cubics so the editor stays
cubic-centric. Anything else (arcs, text, gradients) is skipped with an
:class:`SvgUnsupportedFeature` warning, never fatally.
"""

from __future__ import annotations

import math
import re
import warnings
import xml.etree.ElementTree as ET
from dataclasses import dataclass

import numpy as np

from .editing import CORNER, Spline, make_spline
from .errors import SvgUnsupportedFeature
from .geodesics import GeodesicEngine, TangentVector
from .mesh import MeshPoint
from .splines import ControlPolygon, TraceConfig

_NUM = re.compile(r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?")


@dataclass
class SvgPath:
    """One subpath as a list of cubic spans (4 control points each, 2D)."""

    cubics: list[np.ndarray]
    closed: bool


def _tokenize(d: str):
    for m in re.finditer(r"([MmLlHhVvCcQqZzAaSsTt])|" + _NUM.pattern, d):
        yield m.group(0)


def parse_path_data(d: str) -> list[SvgPath]:
    """Parse an SVG `d` attribute into cubic subpaths."""
    tokens = list(_tokenize(d))
    out: list[SvgPath] = []
    cur = np.zeros(2)
    start = np.zeros(2)
    cubics: list[np.ndarray] = []
    closed = False
    i = 0
    cmd = None

    def flush():
        nonlocal cubics, closed
        if cubics:
            out.append(SvgPath(cubics, closed))
        cubics = []
        closed = False

    def take(n: int) -> list[float]:
        nonlocal i
        vals = [float(tokens[i + k]) for k in range(n)]
        i += n
        return vals

    def line_to(p: np.ndarray):
        nonlocal cur
        a = cur.copy()
        cubics.append(np.array([a, a + (p - a) / 3.0, a + 2.0 * (p - a) / 3.0, p]))
        cur = p

    while i < len(tokens):
        tok = tokens[i]
        if tok.isalpha():
            cmd = tok
            i += 1
            if cmd in "Zz":
                if np.linalg.norm(cur - start) > 1e-12:
                    line_to(start.copy())
                else:
                    cur = start.copy()
                closed = True
                flush()
                cmd = None
            continue
        if cmd is None:
            break
        rel = cmd.islower()
        c = cmd.upper()
        if c == "M":
            x, y = take(2)
            p = cur + [x, y] if rel else np.array([x, y])
            flush()
            cur = np.asarray(p, dtype=float)
            start = cur.copy()
            cmd = "l" if rel else "L"  # subsequent pairs are implicit line-tos
        elif c == "L":
            x, y = take(2)
            p = cur + [x, y] if rel else np.array([x, y])
            line_to(np.asarray(p, dtype=float))
        elif c == "H":
            (x,) = take(1)
            p = cur + [x, 0.0] if rel else np.array([x, cur[1]])
            line_to(np.asarray(p, dtype=float))
        elif c == "V":
            (y,) = take(1)
            p = cur + [0.0, y] if rel else np.array([cur[0], y])
            line_to(np.asarray(p, dtype=float))
        elif c == "C":
            vals = take(6)
            pts = np.array(vals, dtype=float).reshape(3, 2)
            if rel:
                pts = pts + cur
            cubics.append(np.vstack([cur[None, :], pts]))
            cur = pts[2].copy()
        elif c == "Q":
            vals = take(4)
            pts = np.array(vals, dtype=float).reshape(2, 2)
            if rel:
                pts = pts + cur
            q1, q2 = pts
            # exact degree elevation of the quadratic span
            c1 = cur + 2.0 / 3.0 * (q1 - cur)
            c2 = q2 + 2.0 / 3.0 * (q1 - q2)
            cubics.append(np.array([cur, c1, c2, q2]))
            cur = q2.copy()
        else:
            warnings.warn(f"svg command {cmd!r} skipped", SvgUnsupportedFeature)
            # consume this command's numbers blindly until the next letter
            while i < len(tokens) and not tokens[i].isalpha():
                i += 1
            cmd = None
    flush()
    return out


def parse_svg(text: str) -> list[SvgPath]:
    """Extract all path elements of an SVG document."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError:
        # maybe a bare path-data string
        return parse_path_data(text)
    paths: list[SvgPath] = []
    for el in root.iter():
        tag = el.tag.rsplit("}", 1)[-1]
        if tag == "path":
            paths.extend(parse_path_data(el.attrib.get("d", "")))
        elif tag in ("text", "image", "linearGradient", "radialGradient"):
            warnings.warn(f"svg element <{tag}> skipped", SvgUnsupportedFeature)
    return paths


def drawing_bbox(paths: list[SvgPath]) -> tuple[np.ndarray, float]:
    pts = np.vstack([np.vstack(p.cubics) for p in paths])
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    return (lo + hi) / 2.0, float(np.linalg.norm(hi - lo))


def svg_import(engine: GeodesicEngine, svg_text: str, center: MeshPoint,
               scale: float = 0.3, rotation: float = 0.0,
               config: TraceConfig | None = None) -> list[Spline]:
    """Map an SVG drawing onto the mesh about a center point.

    Control points are taken to polar coordinates about the drawing's bbox
    center (y flipped: SVG is y-down) and re-traced on the surface as
    straightest geodesics; the drawing's bbox diagonal maps to
    ``scale * bbox_diag`` of the mesh.
    """
    paths = parse_svg(svg_text)
    if not paths:
        return []
    c2d, diag = drawing_bbox(paths)
    unit = (scale * engine.mesh.bbox_diag) / max(diag, 1e-30)
    cache: dict[tuple[float, float], MeshPoint] = {}

    def lift(p2d: np.ndarray) -> MeshPoint:
        key = (round(float(p2d[0]), 12), round(float(p2d[1]), 12))
        hit = cache.get(key)
        if hit is not None:
            return hit
        rel = p2d - c2d
        rel = np.array([rel[0], -rel[1]])  # y-down to y-up
        r = float(np.linalg.norm(rel)) * unit
        if r == 0.0:
            pt = center
        else:
            ang = math.atan2(rel[1], rel[0]) + rotation
            d = TangentVector(center, math.cos(ang), math.sin(ang))
            pt = engine.straightest(center, d, r).end
        cache[key] = pt
        return pt

    out: list[Spline] = []
    for path in paths:
        cps: list[MeshPoint] = []
        for span in path.cubics:
            lifted = [lift(span[i]) for i in range(4)]
            if cps:
                lifted[0] = cps[-1]  # share the junction anchor exactly
                cps.extend(lifted[1:])
            else:
                cps.extend(lifted)
        if path.closed and len(cps) > 4:
            cps[-1] = cps[0]
        out.append(make_spline(engine, cps, config))
    return out
