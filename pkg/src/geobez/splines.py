"""Bezier machinery on meshes: RDC bisection and open-uniform LR subdivision.

Both schemes are built exclusively from pairwise weighted averages realized
as points along shortest geodesic paths. RDC supports any degree >= 1; the
LR scheme is implemented for quadratic and cubic curves, whose boundary
stencils are hardcoded below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ExtensionUnstable, SplineError
from .geodesics import GeodesicEngine, GeodesicPath, TangentVector
from .mesh import MeshPoint


@dataclass
class TraceConfig:
    scheme: str = "rdc"  # "rdc" | "olr"
    mode: str = "uniform"  # "uniform" | "adaptive"
    depth: int = 4  # recursion depth (rdc) or subdivision level (olr)
    theta_deg: float = 5.0  # adaptive stop angle
    delta: float | None = None  # target segment length; overrides depth if set

    def resolved_depth(self, total_length: float) -> int:
        if self.delta is not None and self.delta > 0 and total_length > 0:
            return max(0, math.ceil(math.log2(total_length / self.delta)))
        return self.depth


class ControlPolygon:
    """Ordered mesh points joined by cached shortest geodesic segments."""

    def __init__(self, points: list[MeshPoint], segments: list[GeodesicPath]):
        if len(segments) != len(points) - 1:
            raise SplineError("need one segment per consecutive point pair")
        self.points = points
        self.segments = segments

    @classmethod
    def from_points(cls, engine: GeodesicEngine, points: list[MeshPoint]) -> "ControlPolygon":
        segs = [engine.shortest_path(points[i], points[i + 1]) for i in range(len(points) - 1)]
        return cls(list(points), segs)

    @property
    def degree(self) -> int:
        return len(self.points) - 1

    @property
    def total_length(self) -> float:
        return float(sum(s.length for s in self.segments))

    @property
    def max_segment_length(self) -> float:
        return float(max((s.length for s in self.segments), default=0.0))

    def midpoint(self, engine: GeodesicEngine) -> MeshPoint:
        """Point at half the total length walking along the polygon."""
        target = 0.5 * self.total_length
        acc = 0.0
        for seg in self.segments:
            if acc + seg.length >= target or seg is self.segments[-1]:
                w = 0.0 if seg.length == 0 else (target - acc) / seg.length
                return engine.point_at(seg, min(max(w, 0.0), 1.0))
            acc += seg.length
        return self.points[-1]


@dataclass
class TracedCurve:
    """Geodesic polygon approximating a curve, plus its flattened polyline."""

    nodes: list[MeshPoint]
    segments: list[GeodesicPath]
    scheme: str
    mode: str
    meta: dict = field(default_factory=dict)

    @property
    def segment_count(self) -> int:
        return len(self.segments)

    @property
    def length(self) -> float:
        return float(sum(s.length for s in self.segments))

    def flat_polyline(self) -> np.ndarray:
        """One chained polyline, one segment per triangle crossed."""
        pts = [self.segments[0].points3d] if self.segments else []
        for seg in self.segments[1:]:
            pts.append(seg.points3d[1:])
        return np.vstack(pts) if pts else np.zeros((0, 3))


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------


def _avg_on(engine, path: GeodesicPath, w: float) -> MeshPoint:
    return engine.point_at(path, w)


def _chain_angles(engine: GeodesicEngine, segments: list[GeodesicPath]) -> list[float]:
    out = []
    for i in range(len(segments) - 1):
        tin = engine.tangent_at_end(segments[i])
        tout = engine.tangent_at_start(segments[i + 1])
        if tin is None or tout is None:
            out.append(0.0)
        else:
            out.append(engine.angle_between(tin, tout))
    return out


def polygon_angles(engine: GeodesicEngine, polygon: ControlPolygon) -> list[float]:
    """Turn angles at the interior nodes, transported to the shared face."""
    return _chain_angles(engine, polygon.segments)


def _flat_enough(engine, polygon: ControlPolygon, theta_rad: float) -> bool:
    return all(a < theta_rad for a in polygon_angles(engine, polygon))


# ---------------------------------------------------------------------------
# direct De Casteljau evaluation (leaf evaluation only)
# ---------------------------------------------------------------------------


def decasteljau_eval(engine: GeodesicEngine, polygon: ControlPolygon, t: float) -> MeshPoint:
    """Triangular recursion of pairwise averages. Safe on small polygons only."""
    if t <= 0.0:
        return polygon.points[0]
    if t >= 1.0:
        return polygon.points[-1]
    pts = list(polygon.points)
    paths = list(polygon.segments)
    while len(pts) > 1:
        nxt = [engine.point_at(paths[i], t) for i in range(len(paths))]
        pts = nxt
        paths = [engine.shortest_path(pts[i], pts[i + 1]) for i in range(len(pts) - 1)]
    return pts[0]


def decasteljau_split(
    engine: GeodesicEngine, polygon: ControlPolygon, t: float = 0.5
) -> tuple[ControlPolygon, ControlPolygon]:
    """One De Casteljau subdivision step at parameter t.

    Reuses the polygon's cached segments: the two output polygons are made of
    sub-paths of the intermediate polygons' segments, so a split of a
    degree-k polygon computes k(k-1)/2 new geodesic paths.
    """
    left_pts = [polygon.points[0]]
    left_segs: list[GeodesicPath] = []
    right_pts = [polygon.points[-1]]
    right_segs: list[GeodesicPath] = []
    pts = list(polygon.points)
    paths = list(polygon.segments)
    while paths:
        first_cut, _ = engine.split_path(paths[0], t)
        _, last_cut = engine.split_path(paths[-1], t)
        left_pts.append(first_cut.end)
        left_segs.append(first_cut)
        right_pts.append(last_cut.start)
        right_segs.append(last_cut)
        mids = [engine.point_at(p, t) for p in paths]
        paths = [engine.shortest_path(mids[i], mids[i + 1]) for i in range(len(mids) - 1)]
        pts = mids
    right_pts.reverse()
    right_segs.reverse()
    # both halves share the apex point exactly
    right_pts[0] = left_pts[-1]
    left = ControlPolygon(left_pts, left_segs)
    right = ControlPolygon(right_pts, right_segs)
    return left, right


# ---------------------------------------------------------------------------
# RDC tracing / evaluation / insertion
# ---------------------------------------------------------------------------


def rdc_trace(engine: GeodesicEngine, polygon: ControlPolygon, config: TraceConfig) -> TracedCurve:
    theta = math.radians(config.theta_deg)
    leaves: list[ControlPolygon] = []
    depth = config.resolved_depth(polygon.total_length)

    def recurse(poly: ControlPolygon, level: int):
        if config.mode == "uniform":
            stop = level >= depth
        else:
            stop = _flat_enough(engine, poly, theta)
        if stop:
            leaves.append(poly)
            return
        left, right = decasteljau_split(engine, poly, 0.5)
        recurse(left, level + 1)
        recurse(right, level + 1)

    recurse(polygon, 0)
    nodes = list(leaves[0].points)
    segs = list(leaves[0].segments)
    for leaf in leaves[1:]:
        nodes.extend(leaf.points[1:])
        segs.extend(leaf.segments)
    meta = {"depth": depth} if config.mode == "uniform" else {"theta_deg": config.theta_deg}
    meta["leaves"] = len(leaves)
    return TracedCurve(nodes, segs, "rdc", config.mode, meta)


def _rdc_descend(engine, polygon, t, config, record_siblings=False, left_tie=True):
    """Descend the bisection tree to the leaf containing t.

    ``left_tie`` picks the left child when t falls exactly on a midpoint.
    Returns (leaf, a, b, left_siblings, right_siblings); the sibling lists
    hold (polygon, junction parameter) of the untaken halves.
    """
    theta = math.radians(config.theta_deg)
    depth = config.resolved_depth(polygon.total_length)
    poly = polygon
    a, b = 0.0, 1.0
    level = 0
    lsibs: list[tuple[ControlPolygon, float]] = []
    rsibs: list[tuple[ControlPolygon, float]] = []

    def stopped() -> bool:
        if config.mode == "uniform":
            return level >= depth
        return _flat_enough(engine, poly, theta)

    while True:
        if stopped():
            s = (t - a) / (b - a)
            if 0.25 <= s <= 0.75 or s in (0.0, 1.0) or level > 60:
                return poly, a, b, lsibs, rsibs
        left, right = decasteljau_split(engine, poly, 0.5)
        mid = 0.5 * (a + b)
        go_left = t <= mid if left_tie else t < mid
        if go_left:
            poly, b = left, mid
            if record_siblings:
                rsibs.append((right, mid))
        else:
            poly, a = right, mid
            if record_siblings:
                lsibs.append((left, mid))
        level += 1


def rdc_point_eval(
    engine: GeodesicEngine, polygon: ControlPolygon, t: float, config: TraceConfig
) -> MeshPoint:
    """Evaluate the curve at t by descending only the containing half."""
    if t <= 0.0:
        return polygon.points[0]
    if t >= 1.0:
        return polygon.points[-1]
    theta = math.radians(config.theta_deg)
    depth = config.resolved_depth(polygon.total_length)
    poly = polygon
    a, b = 0.0, 1.0
    level = 0
    while True:
        if config.mode == "uniform":
            if level >= depth:
                break
        elif _flat_enough(engine, poly, theta):
            break
        left, right = decasteljau_split(engine, poly, 0.5)
        mid = 0.5 * (a + b)
        if t <= mid:
            poly, b = left, mid
        else:
            poly, a = right, mid
        level += 1
    s = (t - a) / (b - a)
    return decasteljau_eval(engine, poly, s)


def _extend_segment(engine, path: GeodesicPath, length: float, budget: float) -> MeshPoint:
    """Continue a geodesic segment past its end for an extra length."""
    if length > budget:
        raise ExtensionUnstable(
            f"required extension {length:.3g} exceeds 10x the polygon length"
        )
    if length <= 0.0:
        return path.end
    tang = engine.tangent_at_end(path)
    if tang is None:
        raise ExtensionUnstable("cannot extend a degenerate segment")
    return engine.straightest(path.end, tang, length).end


def _insert_quadratic(engine, polygon, t):
    p0, p1, p2 = polygon.points
    s0, s1 = polygon.segments
    l1 = engine.point_at(s0, t)
    r1 = engine.point_at(s1, t)
    bridge = engine.shortest_path(l1, r1)
    pt = engine.point_at(bridge, t)
    return (
        ControlPolygon.from_points(engine, [p0, l1, pt]),
        ControlPolygon.from_points(engine, [pt, r1, p2]),
    )


def _continue_past_start(engine, path: GeodesicPath, length: float, budget: float) -> MeshPoint:
    """Continue the geodesic line of a segment past its *start* point."""
    if length > budget:
        raise ExtensionUnstable(
            f"required extension {length:.3g} exceeds 10x the polygon length"
        )
    if length <= 0.0:
        return path.start
    tang = engine.tangent_at_start(path)
    if tang is None:
        raise ExtensionUnstable("cannot extend a degenerate segment")
    return engine.straightest(path.start, TangentVector(path.start, -tang.dx, -tang.dy),
                              length).end


def _complete_left(engine, root, leaf_left, t, t_prime, budget):
    """Degree-k polygon for [0, t] from the leaf's left half (Pi_L)."""
    k = root.degree
    if t_prime <= 0.0:
        return leaf_left
    pts = [None] * (k + 1)
    pts[0] = root.points[0]
    pts[1] = engine.point_at(root.segments[0], t)
    pts[k] = leaf_left.points[-1]
    # extend the geodesic line of the leaf's last side past its start point
    last = leaf_left.segments[-1]
    ext = last.length * t_prime / (t - t_prime)
    pts[k - 1] = _continue_past_start(engine, last, ext, budget)
    return pts


def _complete_right(engine, root, leaf_right, t, t_second, budget):
    """Degree-k polygon for [t, 1] from the leaf's right half (Pi_R)."""
    k = root.degree
    if t_second >= 1.0:
        return leaf_right
    pts = [None] * (k + 1)
    pts[0] = leaf_right.points[0]
    pts[k] = root.points[-1]
    pts[k - 1] = engine.point_at(root.segments[-1], t)
    first = leaf_right.segments[0]
    ext = first.length * (1.0 - t_second) / (t_second - t)
    pts[1] = _extend_segment(engine, first, ext, budget)
    return pts


def rdc_insert(
    engine: GeodesicEngine, polygon: ControlPolygon, t: float, config: TraceConfig | None = None
) -> tuple[ControlPolygon, ControlPolygon]:
    """Split the curve at parameter t into two degree-k polygons.

    Exact in the Euclidean setting for k <= 3; the generic-degree variant
    fills interior points by geodesic extensions of recorded sibling
    polygons' sides.
    """
    config = config or TraceConfig()
    k = polygon.degree
    if not 0.0 < t < 1.0:
        raise SplineError("insertion parameter must be strictly inside (0, 1)")
    if k < 2:
        raise SplineError("insertion needs degree >= 2")
    if k == 2:
        return _insert_quadratic(engine, polygon, t)
    budget = 10.0 * max(polygon.total_length, 1e-30)
    record = k > 3
    leaf, a, b, lsibs, rsibs = _rdc_descend(engine, polygon, t, config,
                                            record_siblings=record, left_tie=True)
    if b > t:
        # t strictly inside the leaf span: one split serves both sides
        s = (t - a) / (b - a)
        leaf_left, leaf_right = decasteljau_split(engine, leaf, s)
        b_right = b
    else:
        # t is exactly a dyadic node: the leaf ends at t; descend again with
        # the other tie-break for the right-hand leaf starting at t
        leaf_left = leaf
        leaf_right, _, b_right, _, rsibs = _rdc_descend(
            engine, polygon, t, config, record_siblings=record, left_tie=False
        )

    left = _complete_left(engine, polygon, leaf_left, t, a, budget)
    if not isinstance(left, ControlPolygon):
        if k > 3:
            _fill_generic(engine, left, lsibs, t, a, budget, side="left")
        left = ControlPolygon.from_points(engine, left)
    right = _complete_right(engine, polygon, leaf_right, t, b_right, budget)
    if not isinstance(right, ControlPolygon):
        if k > 3:
            _fill_generic(engine, right, rsibs, t, b_right, budget, side="right")
        right = ControlPolygon.from_points(engine, right)
    return left, right


def _fill_generic(engine, pts, sibs, t, t_prime, budget, side):
    """Appendix-style interior points for degree > 3 via sibling extensions."""
    k = len(pts) - 1
    if not sibs:
        raise SplineError("generic insertion needs a recorded sibling")
    sib, _ = sibs[-1]
    if side == "left":
        for i in range(1, k - 2):
            seg = sib.segments[i]
            delta = seg.length * (t - t_prime) / t_prime
            pts[i + 1] = _extend_segment(engine, seg, delta, budget)
    else:
        for i in range(1, k - 2):
            seg = engine.shortest_path(sib.points[k - i], sib.points[k - i - 1])
            delta = seg.length * (t_prime - t) / (1.0 - t_prime)
            pts[k - 1 - i] = _extend_segment(engine, seg, delta, budget)


# ---------------------------------------------------------------------------
# open-uniform Lane-Riesenfeld subdivision
# ---------------------------------------------------------------------------

OLR_DEGREES = (2, 3)


class _AvgCache:
    """Per-operation cache of shortest paths between point objects."""

    def __init__(self, engine: GeodesicEngine):
        self.engine = engine
        self.paths: dict[tuple[int, int], GeodesicPath] = {}

    def path(self, p: MeshPoint, q: MeshPoint) -> GeodesicPath:
        key = (id(p), id(q))
        hit = self.paths.get(key)
        if hit is None:
            hit = self.engine.shortest_path(p, q)
            self.paths[key] = hit
        return hit

    def avg(self, p: MeshPoint, q: MeshPoint, w: float) -> MeshPoint:
        if w <= 0.0:
            return p
        if w >= 1.0:
            return q
        return self.engine.point_at(self.path(p, q), w)


def _check_olr_degree(k: int) -> None:
    if k not in OLR_DEGREES:
        raise SplineError(f"OLR stencils are implemented for degrees {OLR_DEGREES}")


def _olr_new_point(cache: _AvgCache, k: int, level_next: int, m: int, pts, base: int):
    """Level-(level_next) control point with global index m.

    ``pts`` holds the k+1 parent points with global indices base..base+k at
    the previous level. Every stencil is realized as a chain of pairwise
    averages.
    """
    M = 2**level_next
    n_prev = 2 ** (level_next - 1)

    def P(q: int) -> MeshPoint:
        i = q - base
        if not 0 <= i < len(pts):
            raise SplineError("stencil referenced a point outside the node window")
        return pts[i]

    A = cache.avg
    if level_next == 1:
        # plain midpoint knot insertion
        if m == 0:
            return P(0)
        if m == k + 1:
            return P(k)
        return A(P(m - 1), P(m), 0.5)

    if k == 2:
        if m == 0:
            return P(0)
        if m == 1:
            return A(P(0), P(1), 0.5)
        if m == M + 1:
            return P(n_prev + 1)
        if m == M:
            return A(P(n_prev), P(n_prev + 1), 0.5)
        j = m // 2
        if m % 2 == 0:
            return A(P(j), P(j + 1), 0.25)
        return A(P(j), P(j + 1), 0.75)

    # cubic
    last = n_prev + 2  # last parent index
    if m == 0:
        return P(0)
    if m == 1:
        return A(P(0), P(1), 0.5)
    if m == 2:
        return A(P(1), P(2), 0.25)
    if m == M + 2:
        return P(last)
    if m == M + 1:
        return A(P(last - 1), P(last), 0.5)
    if m == M:
        return A(P(last - 1), P(last - 2), 0.25)
    if m == 3:
        if level_next == 2:
            q = A(P(1), P(2), 10.0 / 13.0)
            return A(q, P(3), 3.0 / 16.0)
        r = A(P(1), P(2), 11.0 / 14.0)
        return A(r, P(3), 2.0 / 16.0)
    if m == M - 1:
        if level_next == 2:
            q = A(P(last - 1), P(last - 2), 10.0 / 13.0)
            return A(q, P(last - 3), 3.0 / 16.0)
        r = A(P(last - 1), P(last - 2), 11.0 / 14.0)
        return A(r, P(last - 3), 2.0 / 16.0)
    j = m // 2
    if m % 2 == 0:
        return A(P(j), P(j + 1), 0.5)
    # midpoint step plus two smoothing passes, factorized pairwise
    q1 = A(P(j), P(j + 1), 0.75)
    q2 = A(P(j + 1), P(j + 2), 0.25)
    return A(q1, q2, 0.5)


def olr_subdivide(engine: GeodesicEngine, points: list[MeshPoint], k: int,
                  level_next: int, cache: _AvgCache | None = None) -> list[MeshPoint]:
    """One full refinement round: level n-1 polygon -> level n polygon."""
    _check_olr_degree(k)
    cache = cache or _AvgCache(engine)
    M = 2**level_next
    return [
        _olr_new_point(cache, k, level_next, m, points, 0) for m in range(M + k)
    ]


def olr_polygon_at_level(engine: GeodesicEngine, polygon: ControlPolygon,
                         levels: int) -> list[MeshPoint]:
    pts = list(polygon.points)
    for lvl in range(1, levels + 1):
        pts = olr_subdivide(engine, pts, polygon.degree, lvl)
    return pts


@dataclass
class _OlrNode:
    level: int
    j: int  # knot-span index at this level: covers [j, j+1] / 2**level
    points: list[MeshPoint]

    @property
    def interval(self) -> tuple[float, float]:
        w = 0.5**self.level
        return self.j * w, (self.j + 1) * w


def _olr_root(polygon: ControlPolygon) -> _OlrNode:
    return _OlrNode(0, 0, list(polygon.points))


def _olr_split(engine: GeodesicEngine, node: _OlrNode, k: int) -> tuple[_OlrNode, _OlrNode]:
    """Expand one node of the expansion tree into its two children."""
    cache = _AvgCache(engine)
    nl = node.level + 1
    new = [
        _olr_new_point(cache, k, nl, m, node.points, node.j)
        for m in range(2 * node.j, 2 * node.j + k + 2)
    ]
    return (_OlrNode(nl, 2 * node.j, new[: k + 1]),
            _OlrNode(nl, 2 * node.j + 1, new[1:]))


def _node_polygon(engine: GeodesicEngine, node: _OlrNode) -> ControlPolygon:
    return ControlPolygon.from_points(engine, node.points)


def greville(k: int, level: int, index: int) -> float:
    """Greville abscissa of one level-n open-uniform control point."""
    top = 2**level
    return sum(min(max(index + 1 + r - k, 0), top) for r in range(k)) / (k * top)


def olr_trace(engine: GeodesicEngine, polygon: ControlPolygon, config: TraceConfig) -> TracedCurve:
    k = polygon.degree
    _check_olr_degree(k)
    theta = math.radians(config.theta_deg)
    min_level = max(2, math.ceil(math.log2(k + 1)))

    if config.mode == "uniform":
        levels = config.resolved_depth(polygon.total_length)
        pts = olr_polygon_at_level(engine, polygon, levels)
        segs = [engine.shortest_path(pts[i], pts[i + 1]) for i in range(len(pts) - 1)]
        meta = {"levels": levels, "nodes": len(pts)}
        return TracedCurve(pts, segs, "olr", config.mode, meta)

    # Adaptive: depth-first expansion-tree visit storing only the root-to-node
    # path. Emitting raw B-spline control points mixes refinement levels in
    # one polygon and breaks the angle bound this mode must guarantee (coarse
    # points sit farther off the curve than their fine neighbours' segment
    # lengths), so each leaf span is converted to its Bezier polygon instead:
    # leaf endpoints interpolate the curve and consecutive leaves join with
    # matching tangents, exactly as in the RDC output.
    nodes: list[MeshPoint] = []
    segs = []

    def leaf_polygon(node: _OlrNode) -> ControlPolygon:
        return _leaf_bezier(engine, node)

    def visit(node: _OlrNode) -> None:
        if node.level >= min_level:
            top = 2**node.level
            convertible = k == 2 or node.j not in (1, top - 2)
            if convertible:
                leaf = leaf_polygon(node)
                if node.level >= 40 or _flat_enough(engine, leaf, theta):
                    if nodes:
                        # share the junction point with the previous leaf
                        first = engine.shortest_path(nodes[-1], leaf.points[1])
                        nodes.extend(leaf.points[1:])
                        segs.append(first)
                        segs.extend(leaf.segments[1:])
                    else:
                        nodes.extend(leaf.points)
                        segs.extend(leaf.segments)
                    return
        l, r = _olr_split(engine, node, k)
        visit(l)
        visit(r)

    visit(_olr_root(polygon))
    meta = {"theta_deg": config.theta_deg, "nodes": len(nodes)}
    return TracedCurve(nodes, segs, "olr", config.mode, meta)


def local_knots(k: int, level: int, j: int) -> np.ndarray:
    """The 2k knots around span [j, j+1] of the level-n open-uniform vector."""
    top = 2**level
    return np.array(
        [min(max(j + 1 + m - k, 0), top) / top for m in range(2 * k)]
    )


def deboor_eval(engine: GeodesicEngine, points: list[MeshPoint], knots, t: float) -> MeshPoint:
    """Manifold de Boor: triangular recursion of pairwise averages."""
    d = list(points)
    k = len(d) - 1
    u = np.asarray(knots, dtype=float)
    if len(u) != 2 * k:
        raise SplineError("expected 2k local knots")
    cache = _AvgCache(engine)
    for r in range(1, k + 1):
        for i in range(k, r - 1, -1):
            den = u[i + k - r] - u[i - 1]
            alpha = 0.0 if den == 0.0 else (t - u[i - 1]) / den
            d[i] = cache.avg(d[i - 1], d[i], min(max(alpha, 0.0), 1.0))
    return d[k]


def _olr_descend(engine, polygon, t, config, want_convertible=False, left_tie=True):
    """Descend the expansion tree to the node whose span contains t."""
    k = polygon.degree
    theta = math.radians(config.theta_deg)
    min_level = max(2, math.ceil(math.log2(k + 1)))
    levels = config.resolved_depth(polygon.total_length)
    node = _olr_root(polygon)

    def stopped(n: _OlrNode) -> bool:
        if n.level < min_level:
            return False
        if config.mode == "uniform":
            return n.level >= max(levels, min_level)
        return _flat_enough(engine, _node_polygon(engine, n), theta)

    while True:
        if stopped(node):
            top = 2**node.level
            a, b = node.interval
            s = (t - a) / (b - a)
            interior_ok = 0.25 <= s <= 0.75 or s in (0.0, 1.0)
            convertible = k == 2 or node.j not in (1, top - 2)
            if (interior_ok or node.level > 50) and (not want_convertible or convertible):
                return node
        l, r = _olr_split(engine, node, k)
        go_left = t <= l.interval[1] if left_tie else t < l.interval[1]
        node = l if go_left else r


def olr_point_eval(engine: GeodesicEngine, polygon: ControlPolygon, t: float,
                   config: TraceConfig) -> MeshPoint:
    """Evaluate by descending the containing child, then manifold de Boor."""
    k = polygon.degree
    _check_olr_degree(k)
    if t <= 0.0:
        return polygon.points[0]
    if t >= 1.0:
        return polygon.points[-1]
    node = _olr_descend(engine, polygon, t, config)
    return deboor_eval(engine, node.points, local_knots(k, node.level, node.j), t)


# ---------------------------------------------------------------------------
# B-spline -> Bezier conversion (cubic)
# ---------------------------------------------------------------------------


def bspline_to_bezier(engine: GeodesicEngine, points: list[MeshPoint],
                      case: str = "uniform") -> list[MeshPoint]:
    """Control points of the Bezier curve coincident with one cubic span.

    ``uniform`` expects the four points of a uniform interior span;
    ``open_nonuniform`` the first four points of an open-uniform vector
    (00001234...). Mirror the input for the right end.
    """
    if len(points) != 4:
        raise SplineError("cubic conversion needs 4 control points")
    cache = _AvgCache(engine)
    A = cache.avg
    p0, p1, p2, p3 = points
    if case == "uniform":
        q0 = A(A(p0, p1, 2.0 / 3.0), A(p1, p2, 1.0 / 3.0), 0.5)
        q1 = A(p1, p2, 1.0 / 3.0)
        q2 = A(p1, p2, 2.0 / 3.0)
        q3 = A(A(p1, p2, 2.0 / 3.0), A(p2, p3, 1.0 / 3.0), 0.5)
        return [q0, q1, q2, q3]
    if case == "open_nonuniform":
        q2 = A(p1, p2, 0.5)
        q3 = A(A(p1, p2, 0.5), A(p2, p3, 1.0 / 3.0), 0.5)
        return [p0, p1, q2, q3]
    raise SplineError(f"unknown conversion case {case!r}")


def _leaf_bezier(engine: GeodesicEngine, node: _OlrNode) -> ControlPolygon:
    top = 2**node.level
    if len(node.points) == 3:  # quadratic spans convert with midpoints
        a, b, c = node.points
        cache = _AvgCache(engine)
        q0 = a if node.j == 0 else cache.avg(a, b, 0.5)
        q2 = c if node.j == top - 1 else cache.avg(b, c, 0.5)
        pts = [q0, b, q2]
    elif node.j == 0:
        pts = bspline_to_bezier(engine, node.points, "open_nonuniform")
    elif node.j == top - 1:
        rev = bspline_to_bezier(engine, node.points[::-1], "open_nonuniform")
        pts = rev[::-1]
    else:
        pts = bspline_to_bezier(engine, node.points, "uniform")
    return ControlPolygon.from_points(engine, pts)


def olr_insert(engine: GeodesicEngine, polygon: ControlPolygon, t: float,
               config: TraceConfig | None = None) -> tuple[ControlPolygon, ControlPolygon]:
    """Split an OLR-defined curve at t; leaf spans convert to Bezier first."""
    config = config or TraceConfig(scheme="olr")
    k = polygon.degree
    _check_olr_degree(k)
    if not 0.0 < t < 1.0:
        raise SplineError("insertion parameter must be strictly inside (0, 1)")
    if k == 2:
        # the quadratic construction needs no tree descent and applies to the
        # same curve regardless of the tracing scheme
        return _insert_quadratic(engine, polygon, t)
    budget = 10.0 * max(polygon.total_length, 1e-30)
    node = _olr_descend(engine, polygon, t, config, want_convertible=True)
    a, b = node.interval
    if b > t:
        leaf = _leaf_bezier(engine, node)
        s = (t - a) / (b - a)
        leaf_left, leaf_right = decasteljau_split(engine, leaf, s)
        b_right = b
    else:
        # t sits exactly on a knot: the left leaf ends at t, the right-hand
        # leaf starts there; both convert separately and share the junction
        leaf_left = _leaf_bezier(engine, node)
        node_r = _olr_descend(engine, polygon, t, config,
                              want_convertible=True, left_tie=False)
        b_right = node_r.interval[1]
        raw = _leaf_bezier(engine, node_r)
        leaf_right = ControlPolygon.from_points(
            engine, [leaf_left.points[-1]] + raw.points[1:]
        )
    left = _complete_left(engine, polygon, leaf_left, t, a, budget)
    if not isinstance(left, ControlPolygon):
        left = ControlPolygon.from_points(engine, left)
    right = _complete_right(engine, polygon, leaf_right, t, b_right, budget)
    if not isinstance(right, ControlPolygon):
        right = ControlPolygon.from_points(engine, right)
    return left, right


# ---------------------------------------------------------------------------
# degree elevation
# ---------------------------------------------------------------------------


def degree_elevate(engine: GeodesicEngine, polygon: ControlPolygon) -> ControlPolygon:
    """Rewrite a degree-k polygon as the equivalent degree-(k+1) polygon."""
    k = polygon.degree
    if k < 1:
        raise SplineError("degree elevation needs degree >= 1")
    pts = [polygon.points[0]]
    for i in range(1, k + 1):
        w = 1.0 - i / (k + 1)
        pts.append(engine.point_at(polygon.segments[i - 1], w))
    pts.append(polygon.points[-1])
    return ControlPolygon.from_points(engine, pts)


# ---------------------------------------------------------------------------
# dispatcher
# ---------------------------------------------------------------------------


def trace(engine: GeodesicEngine, polygon: ControlPolygon, config: TraceConfig) -> TracedCurve:
    if config.scheme == "rdc":
        return rdc_trace(engine, polygon, config)
    if config.scheme == "olr":
        return olr_trace(engine, polygon, config)
    raise SplineError(f"unknown scheme {config.scheme!r}")


def point_eval(engine: GeodesicEngine, polygon: ControlPolygon, t: float,
               config: TraceConfig) -> MeshPoint:
    if config.scheme == "rdc":
        return rdc_point_eval(engine, polygon, t, config)
    if config.scheme == "olr":
        return olr_point_eval(engine, polygon, t, config)
    raise SplineError(f"unknown scheme {config.scheme!r}")


def insert(engine: GeodesicEngine, polygon: ControlPolygon, t: float,
           config: TraceConfig) -> tuple[ControlPolygon, ControlPolygon]:
    if config.scheme == "rdc":
        return rdc_insert(engine, polygon, t, config)
    if config.scheme == "olr":
        return olr_insert(engine, polygon, t, config)
    raise SplineError(f"unknown scheme {config.scheme!r}")
