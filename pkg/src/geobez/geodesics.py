"""Geodesic primitives: locally shortest paths, straightest tracing, transport.

Point-to-point paths run in three phases: (i) an initial triangle strip from
a deque label-correcting search on the dual graph, (ii) the funnel algorithm
inside the unfolded strip, (iii) iterative strip straightening that removes
reflex vertices, largest turn first.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .dualgraph import DualGraph, build_dual_graph
from .errors import DegenerateStrip, IterationCap, Unreachable
from .mesh import MeshPoint, TriangleMesh

_DEGEN = 1e-300


@dataclass(frozen=True)
class TangentVector:
    """Direction at a mesh point, in the containing face's 2D frame."""

    at: MeshPoint
    dx: float
    dy: float

    @property
    def norm(self) -> float:
        return float(np.hypot(self.dx, self.dy))

    @property
    def angle(self) -> float:
        return float(np.arctan2(self.dy, self.dx))

    def normalized(self) -> "TangentVector":
        n = self.norm
        if n == 0.0:
            return self
        return TangentVector(self.at, self.dx / n, self.dy / n)


@dataclass(frozen=True)
class PathCorner:
    """A pseudo-source: vertex where the funnel collapsed."""

    vertex: int
    portal: int
    side: int  # +1 left, -1 right
    turn: float  # turn angle of the polyline at this corner, radians


@dataclass
class GeodesicPath:
    """Surface polyline: triangle strip plus edge intercepts.

    ``shared[i]`` is the local edge of ``strip[i]`` crossed into
    ``strip[i+1]`` and ``intercepts[i]`` the crossing parameter along that
    directed edge. ``points3d`` is the flattened polyline (start, crossings,
    end); segment ``j`` of it lies inside ``strip[j]``.
    """

    start: MeshPoint
    end: MeshPoint
    strip: np.ndarray
    shared: np.ndarray
    intercepts: np.ndarray
    points3d: np.ndarray
    corners: list[PathCorner] = field(default_factory=list)

    def __post_init__(self):
        seg = np.linalg.norm(np.diff(self.points3d, axis=0), axis=1)
        self.cum = np.concatenate([[0.0], np.cumsum(seg)])
        self.length = float(self.cum[-1])


class GeodesicEngine:
    """All metric queries over one immutable mesh plus its dual graph.

    Thread-safe for concurrent queries: search workspaces are per-thread.
    """

    def __init__(self, mesh: TriangleMesh, graph: DualGraph | None = None,
                 split_fraction: float = 0.05):
        self.mesh = mesh
        self.graph = graph if graph is not None else build_dual_graph(mesh, split_fraction)
        self._local = threading.local()

    # -- workspace -----------------------------------------------------------

    def _ws(self):
        ws = getattr(self._local, "ws", None)
        n = self.graph.node_count
        if ws is None or ws["n"] != n:
            ws = {
                "n": n,
                "dist": np.empty(n),
                "parent": np.empty(n, dtype=np.int64),
                "stamp": np.zeros(n, dtype=np.int64),
                "tstamp": np.zeros(n, dtype=np.int64),
                "inq": np.zeros(n, dtype=np.int8),
                "ring": np.empty(n + 1, dtype=np.int64),
                "gen": 0,
            }
            self._local.ws = ws
        return ws

    # -- phase (i): initial strip ---------------------------------------------

    def initial_strip(self, p: MeshPoint, q: MeshPoint) -> np.ndarray:
        strip, _ = self._initial_strip_cost(p, q)
        return strip

    def _initial_strip_cost(self, p: MeshPoint, q: MeshPoint):
        mesh, graph = self.mesh, self.graph
        mesh.check_face(p.face)
        mesh.check_face(q.face)
        if p.face == q.face:
            return np.array([p.face], dtype=np.int64), 0.0
        ws = self._ws()
        ws["gen"] += 1
        p3 = mesh.embed(p)
        q3 = mesh.embed(q)
        src = graph.nodes_of(p.face).astype(np.int64)
        tgt = graph.nodes_of(q.face).astype(np.int64)
        src_costs = np.linalg.norm(graph.refpoints[src] - p3, axis=1)
        node, cost = _kernels.dual_search(
            graph.indptr, graph.nbrs, graph.weights, graph.refpoints,
            src, src_costs, tgt,
            float(q3[0]), float(q3[1]), float(q3[2]),
            ws["dist"], ws["parent"], ws["stamp"], ws["gen"], ws["inq"],
            ws["tstamp"], ws["ring"],
        )
        if node < 0:
            raise Unreachable(f"no strip from face {p.face} to face {q.face}")
        chain = []
        u = node
        parent = ws["parent"]
        while u >= 0:
            chain.append(u)
            u = parent[u]
        chain.reverse()
        tris = graph.provenance[np.array(chain, dtype=np.int64)]
        keep = np.concatenate([[True], tris[1:] != tris[:-1]])
        return tris[keep].astype(np.int64), float(cost)

    # -- phase (ii): funnel ----------------------------------------------------

    def _shared_edges(self, strip: np.ndarray) -> np.ndarray:
        adj = self.mesh.adjacency
        if len(strip) < 2:
            return np.empty(0, dtype=np.int64)
        match = adj[strip[:-1]] == strip[1:, None]
        if not match.any(axis=1).all():
            raise DegenerateStrip("strip triangles are not consecutively adjacent")
        return np.argmax(match, axis=1).astype(np.int64)

    def funnel_shortest(self, strip: np.ndarray, p: MeshPoint, q: MeshPoint) -> GeodesicPath:
        """Shortest path constrained inside the strip (linear time)."""
        mesh = self.mesh
        strip = np.asarray(strip, dtype=np.int64)
        p = p.clamped()
        q = q.clamped()
        if len(strip) == 1:
            pts = np.stack([mesh.embed(p), mesh.embed(q)])
            return GeodesicPath(p, q, strip, np.empty(0, dtype=np.int64),
                                np.empty(0), pts)
        # run the funnel on nudged endpoints: points exactly on edges or
        # vertices (common for subdivision midpoints) degenerate every
        # orientation test
        pb = np.array(p.nudged_inside().bary)
        qb = np.array(q.nudged_inside().bary)
        ok, shared, lvals, pts3, ox, oy, oid, opi = _kernels.funnel_pipeline(
            strip, pb, qb, mesh.tri2d, mesh.unfold, mesh.triangles,
            mesh.adjacency, mesh.vertices,
        )
        if not ok:
            raise DegenerateStrip("strip triangles are not consecutively adjacent")
        corners = []
        h = len(strip)
        for j in range(1, len(ox) - 1):
            if oid[j] < 0:
                continue
            dinx, diny = ox[j] - ox[j - 1], oy[j] - oy[j - 1]
            doutx, douty = ox[j + 1] - ox[j], oy[j + 1] - oy[j]
            ni = math.hypot(dinx, diny)
            no = math.hypot(doutx, douty)
            if ni < _DEGEN or no < _DEGEN:
                turn = 0.0
            else:
                cosv = (dinx * doutx + diny * douty) / (ni * no)
                turn = math.acos(min(max(cosv, -1.0), 1.0))
            pi = int(opi[j])
            e = int(shared[min(pi, h - 2)])
            left_vid = int(mesh.triangles[strip[min(pi, h - 2)], (e + 1) % 3])
            side = 1 if int(oid[j]) == left_vid else -1
            corners.append(PathCorner(int(oid[j]), pi, side, turn))
        return GeodesicPath(p, q, strip, shared, lvals, pts3, corners)

    def _points3d(self, strip, shared, intercepts, p, q):
        mesh = self.mesh
        tris = mesh.triangles
        v = mesh.vertices
        tis = strip[:-1]
        a = tris[tis, shared]
        b = tris[tis, (shared + 1) % 3]
        l = intercepts[:, None]
        cross = v[a] * (1.0 - l) + v[b] * l
        return np.vstack([mesh.embed(p)[None, :], cross, mesh.embed(q)[None, :]])

    # -- phase (iii): straightening ---------------------------------------------

    def straighten(self, path: GeodesicPath) -> GeodesicPath:
        """Remove reflex vertices, largest turn first; freeze persistent ones.

        Each pass swaps the selected vertex's in-strip semi-star for the
        opposite one and re-runs the funnel. The swap is always adopted (the
        path may lengthen transiently); a vertex that survives its own swap,
        or gets swapped repeatedly, is frozen. Returns the shortest path seen,
        so the result never exceeds the input length.
        """
        frozen: set[int] = set()
        swaps: dict[int, int] = {}
        best = path
        cap = max(100 * len(path.strip), 100)
        for _ in range(cap):
            cands = [c for c in path.corners
                     if c.vertex not in frozen and c.turn > 1e-12]
            if not cands:
                return best if best.length <= path.length else path
            c = max(cands, key=lambda c: (c.turn, -c.vertex))
            new_strip = self._swap_semistar(path.strip, c)
            if new_strip is None:
                frozen.add(c.vertex)
                continue
            try:
                new_path = self.funnel_shortest(new_strip, path.start, path.end)
            except DegenerateStrip:
                frozen.add(c.vertex)
                continue
            swaps[c.vertex] = swaps.get(c.vertex, 0) + 1
            if swaps[c.vertex] >= 3 or any(k.vertex == c.vertex for k in new_path.corners):
                frozen.add(c.vertex)
            path = new_path
            if path.length < best.length:
                best = path
        raise IterationCap("straightening exceeded 100 * strip length iterations")

    def _ring_step(self, t: int, v: int, avoid: int) -> int:
        """Neighbour of t around vertex v that is not `avoid`."""
        tri = self.mesh.triangles[t]
        i = int(np.where(tri == v)[0][0])
        for e in (i, (i + 2) % 3):
            n = int(self.mesh.adjacency[t, e])
            if n != avoid:
                return n
        return int(self.mesh.adjacency[t, i])

    def _swap_semistar(self, strip: np.ndarray, corner: PathCorner):
        mesh = self.mesh
        tris = mesh.triangles
        v = corner.vertex
        pi = corner.portal
        a = pi
        while a > 0 and v in tris[strip[a - 1]]:
            a -= 1
        b = pi + 1
        while b < len(strip) - 1 and v in tris[strip[b + 1]]:
            b += 1
        entry = int(strip[a])
        exit_ = int(strip[b])
        inner_next = int(strip[a + 1])
        # walk the vertex ring from entry away from the current chain
        walk = [entry]
        prev = inner_next
        cur = entry
        ring_cap = int(mesh.vertex_tri_ptr[v + 1] - mesh.vertex_tri_ptr[v]) + 2
        for _ in range(ring_cap):
            nxt = self._ring_step(cur, v, prev)
            walk.append(nxt)
            if nxt == exit_:
                break
            prev, cur = cur, nxt
        else:
            return None
        if len(walk) < 2 or walk[-1] != exit_:
            return None
        new_strip = np.concatenate([
            strip[:a], np.array(walk, dtype=np.int64), strip[b + 1:],
        ])
        return new_strip

    # -- composed shortest path ---------------------------------------------------

    def shortest_path(self, p: MeshPoint, q: MeshPoint) -> GeodesicPath:
        """Locally shortest path from p to q (strip search + funnel + straighten)."""
        p = p.clamped()
        q = q.clamped()
        if p.face == q.face:
            return self.funnel_shortest(np.array([p.face], dtype=np.int64), p, q)
        strip = self.initial_strip(p, q)
        path = self.funnel_shortest(strip, p, q)
        return self.straighten(path)

    # -- path queries ---------------------------------------------------------------

    def point_at(self, path: GeodesicPath, w: float) -> MeshPoint:
        """Point at fractional arc length w along the path (constant speed)."""
        if w <= 0.0:
            return path.start
        if w >= 1.0:
            return path.end
        if path.length <= 0.0:
            return path.start
        s = w * path.length
        j = int(np.searchsorted(path.cum, s, side="right") - 1)
        j = min(max(j, 0), len(path.cum) - 2)
        seg = path.cum[j + 1] - path.cum[j]
        t = 0.0 if seg <= 0.0 else (s - path.cum[j]) / seg
        x = path.points3d[j] * (1.0 - t) + path.points3d[j + 1] * t
        face = int(path.strip[min(j, len(path.strip) - 1)])
        al, be = self.mesh.bary_from_3d(face, x)
        return MeshPoint(face, al, be).clamped()

    def split_path(self, path: GeodesicPath, w: float) -> tuple[GeodesicPath, GeodesicPath]:
        """Cut a path at fractional arc length w into two sub-paths."""
        mid = self.point_at(path, w)
        if w <= 0.0 or path.length <= 0.0:
            zero = GeodesicPath(path.start, path.start,
                                np.array([path.start.face], dtype=np.int64),
                                np.empty(0, dtype=np.int64), np.empty(0),
                                np.stack([self.mesh.embed(path.start)] * 2))
            return zero, path
        if w >= 1.0:
            zero = GeodesicPath(path.end, path.end,
                                np.array([path.end.face], dtype=np.int64),
                                np.empty(0, dtype=np.int64), np.empty(0),
                                np.stack([self.mesh.embed(path.end)] * 2))
            return path, zero
        s = w * path.length
        j = int(np.searchsorted(path.cum, s, side="right") - 1)
        j = min(max(j, 0), len(path.strip) - 1)
        m3 = self.mesh.embed(mid)[None, :]
        left = GeodesicPath(
            path.start, mid,
            path.strip[: j + 1], path.shared[:j], path.intercepts[:j],
            np.vstack([path.points3d[: j + 1], m3]),
            [c for c in path.corners if c.portal < j],
        )
        right = GeodesicPath(
            mid, path.end,
            path.strip[j:], path.shared[j:], path.intercepts[j:],
            np.vstack([m3, path.points3d[j + 1 :]]),
            [PathCorner(c.vertex, c.portal - j, c.side, c.turn)
             for c in path.corners if c.portal >= j],
        )
        return left, right

    def manifold_average(self, p: MeshPoint, q: MeshPoint, w: float) -> MeshPoint:
        """Binary weighted average: the point at fraction w along the shortest path."""
        if w <= 0.0 or p == q:
            return p
        if w >= 1.0:
            return q
        return self.point_at(self.shortest_path(p, q), w)

    # -- tangents --------------------------------------------------------------------

    def tangent_at_start(self, path: GeodesicPath) -> TangentVector | None:
        """Unit direction of the path leaving its start, in the start face frame."""
        pts = path.points3d
        for j in range(1, len(pts)):
            d3 = pts[j] - pts[0]
            n = np.linalg.norm(d3)
            if n > 1e-14:
                fr = self.mesh.frames[path.strip[0]]
                return TangentVector(path.start, float(fr[0] @ d3 / n), float(fr[1] @ d3 / n))
        return None

    def tangent_at_end(self, path: GeodesicPath) -> TangentVector | None:
        """Unit direction of the path arriving at its end, in the end face frame."""
        pts = path.points3d
        for j in range(len(pts) - 2, -1, -1):
            d3 = pts[-1] - pts[j]
            n = np.linalg.norm(d3)
            if n > 1e-14:
                fr = self.mesh.frames[path.strip[-1]]
                return TangentVector(path.end, float(fr[0] @ d3 / n), float(fr[1] @ d3 / n))
        return None

    def angle_between(self, incoming: TangentVector, outgoing: TangentVector) -> float:
        """Unsigned angle between two tangents anchored at the same node."""
        fa, fb = incoming.at.face, outgoing.at.face
        da = np.array([incoming.dx, incoming.dy])
        db = np.array([outgoing.dx, outgoing.dy])
        if fa != fb:
            da = self._rotate_across(fa, fb, da)
        c = float(np.dot(da, db))
        s = float(da[0] * db[1] - da[1] * db[0])
        return abs(float(np.arctan2(s, c)))

    def _rotate_across(self, fa: int, fb: int, d: np.ndarray) -> np.ndarray:
        """Express a direction in face fa's frame in face fb's frame."""
        mesh = self.mesh
        for e in range(3):
            if mesh.adjacency[fb, e] == fa:
                c, s = mesh.unfold[fb, e, 0], mesh.unfold[fb, e, 1]
                return np.array([c * d[0] - s * d[1], s * d[0] + c * d[1]])
        pa = MeshPoint(fa, 1 / 3, 1 / 3)
        pb = MeshPoint(fb, 1 / 3, 1 / 3)
        path = self.shortest_path(pa, pb)
        out = self.transport_along(path, TangentVector(pa, float(d[0]), float(d[1])))
        return np.array([out.dx, out.dy])

    # -- straightest geodesics and transport --------------------------------------------

    def straightest(self, origin: MeshPoint, direction, length: float) -> GeodesicPath:
        """Trace a straightest geodesic from a point along a tangent direction."""
        mesh = self.mesh
        origin = origin.clamped()
        if isinstance(direction, TangentVector):
            d = np.array([direction.dx, direction.dy], dtype=float)
        else:
            d = np.asarray(direction, dtype=float)
        n = np.linalg.norm(d)
        if n == 0.0:
            raise ValueError("direction must be non-zero")
        d = d / n
        if length <= 0.0:
            pts = np.stack([mesh.embed(origin)] * 2)
            return GeodesicPath(origin, origin,
                                np.array([origin.face], dtype=np.int64),
                                np.empty(0, dtype=np.int64), np.empty(0), pts)
        x0 = mesh.point2d(origin)
        max_steps = int(min(
            8 * len(mesh.triangles) + 64,
            64 + 16 * length / max(mesh.edge_lengths.min(), 1e-12),
        ))
        strip, xedge, xpar, steps, x, y, dx, dy, rem = _kernels.trace_straightest(
            origin.face, float(x0[0]), float(x0[1]), float(d[0]), float(d[1]),
            float(length), mesh.triangles, mesh.adjacency, mesh.adjacent_edge,
            mesh.tri2d, mesh.unfold, mesh.corner_angles, mesh.vertex_angles,
            max_steps,
        )
        if rem > 1e-9 * length:
            raise IterationCap("straightest trace stalled before consuming its length")
        strip = strip[: steps + 1].copy()
        shared = xedge[:steps].copy()
        lvals = xpar[:steps].copy()
        endf = int(strip[-1])
        al, be = self.mesh.bary_from_2d(endf, np.array([x, y]))
        end = MeshPoint(endf, al, be).clamped()
        pts3 = self._points3d(strip, shared, lvals, origin, end)
        return GeodesicPath(origin, end, strip, shared, lvals, pts3)

    def transport_along(self, path: GeodesicPath, vec: TangentVector) -> TangentVector:
        """Parallel transport a tangent along a path (rotation only)."""
        if len(path.strip) == 1:
            return TangentVector(path.end, vec.dx, vec.dy)
        _, rot = _kernels.develop_strip(path.strip, path.shared,
                                        self.mesh.tri2d, self.mesh.unfold)
        c, s = rot[-1]
        # plane -> end-frame is the inverse of the accumulated rotation
        dx = c * vec.dx + s * vec.dy
        dy = -s * vec.dx + c * vec.dy
        return TangentVector(path.end, float(dx), float(dy))

    def parallel_transport(self, vec: TangentVector, to: MeshPoint) -> TangentVector:
        """Transport a tangent vector to another point along the shortest path."""
        if vec.at.face == to.face and vec.at == to:
            return TangentVector(to, vec.dx, vec.dy)
        path = self.shortest_path(vec.at, to)
        return self.transport_along(path, vec)
