"""Indexed triangle mesh with adjacency, per-face frames, and mesh points.

The mesh is immutable after construction. All metric machinery (unfolding,
funnels, tangent frames) reads the arrays precomputed here.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidBarycentric, InvalidFace, NonManifold, NotWatertight, ParseError

BARY_EPS = 1e-9


@dataclass(frozen=True)
class MeshPoint:
    """A point on the surface: triangle index plus two barycentric weights.

    The weights ``(alpha, beta)`` multiply the first two vertices of the face;
    the implicit third weight is ``1 - alpha - beta``.
    """

    face: int
    alpha: float
    beta: float

    @property
    def bary(self) -> tuple[float, float, float]:
        return (self.alpha, self.beta, 1.0 - self.alpha - self.beta)

    def clamped(self) -> "MeshPoint":
        """Clamp tiny negative weights; reject anything past the tolerance."""
        a, b = self.alpha, self.beta
        g = 1.0 - a - b
        if a < -BARY_EPS or b < -BARY_EPS or g < -BARY_EPS:
            raise InvalidBarycentric(
                f"barycentric ({a}, {b}) outside face {self.face} beyond {BARY_EPS}"
            )
        a = min(max(a, 0.0), 1.0)
        b = min(max(b, 0.0), 1.0)
        if a + b > 1.0:
            s = a + b
            a, b = a / s, b / s
        return MeshPoint(self.face, a, b)

    def nudged_inside(self, eps: float = 1e-10) -> "MeshPoint":
        """Pull the point towards the face centroid by a relative epsilon.

        Points exactly on an edge or vertex make orientation predicates
        degenerate; the funnel works on a nudged copy while exact endpoints
        are kept everywhere else.
        """
        a, b = self.alpha, self.beta
        return MeshPoint(self.face, a + eps * (1.0 / 3.0 - a), b + eps * (1.0 / 3.0 - b))


class TriangleMesh:
    """Triangle-only indexed mesh with precomputed adjacency and frames.

    Attributes
    ----------
    vertices : (nv, 3) float array
    triangles : (nt, 3) int array
    adjacency : (nt, 3) int array
        ``adjacency[t, e]`` is the triangle across edge ``e`` of ``t``, where
        edge ``e`` joins local vertices ``e`` and ``(e + 1) % 3``.
    adjacent_edge : (nt, 3) int array
        Local edge index of the shared edge inside the neighbouring triangle.
    frames : (nt, 2, 3) float array
        Orthonormal in-plane tangent frame of each face; the x axis lies along
        the face's first edge.
    tri2d : (nt, 3, 2) float array
        Vertex coordinates of each face in its own frame.
    unfold : (nt, 3, 4) float array
        Rigid 2D transform (cos, sin, tx, ty) mapping neighbour-frame
        coordinates into this face's frame when the neighbour is unfolded
        across the shared edge.
    """

    def __init__(self, vertices: np.ndarray, triangles: np.ndarray):
        vertices = np.ascontiguousarray(vertices, dtype=np.float64)
        triangles = np.ascontiguousarray(triangles, dtype=np.int64)
        if vertices.ndim != 2 or vertices.shape[1] != 3:
            raise ParseError("vertices must be (nv, 3)")
        if triangles.ndim != 2 or triangles.shape[1] != 3:
            raise ParseError("triangles must be (nt, 3)")
        if triangles.size and (triangles.min() < 0 or triangles.max() >= len(vertices)):
            raise ParseError("triangle index out of range")
        self.vertices = vertices
        self.triangles = triangles
        self.adjacency, self.adjacent_edge = self._build_adjacency()
        self._build_geometry()

    # -- construction -------------------------------------------------------

    def _build_adjacency(self) -> tuple[np.ndarray, np.ndarray]:
        tris = self.triangles
        nt = len(tris)
        a = tris[:, [0, 1, 2]].ravel()
        b = tris[:, [1, 2, 0]].ravel()
        # directed edges; a manifold watertight coherently-wound mesh has each
        # undirected edge exactly once in each direction
        order = np.lexsort((np.maximum(a, b), np.minimum(a, b)))
        key = np.stack([np.minimum(a, b), np.maximum(a, b)], axis=1)[order]
        same = np.all(key[1:] == key[:-1], axis=1)
        starts = np.flatnonzero(np.concatenate([[True], ~same]))
        counts = np.diff(np.concatenate([starts, [len(key)]]))
        if np.any(counts > 2):
            raise NonManifold("an edge is shared by more than two triangles")
        if np.any(counts < 2):
            raise NotWatertight("mesh has boundary edges")
        # every group has exactly two entries, so pairs sit at (0,1), (2,3), ...
        tri_of = order // 3
        edge_of = order % 3
        dirs = a[order] < b[order]
        if np.any(dirs[0::2] == dirs[1::2]):
            raise NonManifold("incoherent winding across a shared edge")
        adj = np.full((nt, 3), -1, dtype=np.int64)
        adj_e = np.full((nt, 3), -1, dtype=np.int64)
        t0, e0 = tri_of[0::2], edge_of[0::2]
        t1, e1 = tri_of[1::2], edge_of[1::2]
        adj[t0, e0] = t1
        adj_e[t0, e0] = e1
        adj[t1, e1] = t0
        adj_e[t1, e1] = e0
        return adj, adj_e

    def _build_geometry(self) -> None:
        v = self.vertices
        tris = self.triangles
        nt = len(tris)
        p0, p1, p2 = v[tris[:, 0]], v[tris[:, 1]], v[tris[:, 2]]
        e01 = p1 - p0
        e02 = p2 - p0
        l01 = np.linalg.norm(e01, axis=1)
        x = e01 / np.maximum(l01, 1e-300)[:, None]
        y = e02 - np.einsum("ij,ij->i", e02, x)[:, None] * x
        ly = np.linalg.norm(y, axis=1)
        # degenerate faces keep a usable (arbitrary) frame
        bad = ly < 1e-300
        if np.any(bad):
            alt = np.cross(x[bad], np.where(np.abs(x[bad, 0:1]) < 0.9, [[1, 0, 0]], [[0, 1, 0]]))
            y[bad] = alt
            ly[bad] = np.maximum(np.linalg.norm(alt, axis=1), 1e-300)
        y = y / ly[:, None]
        self.frames = np.stack([x, y], axis=1)

        tri2d = np.zeros((nt, 3, 2))
        tri2d[:, 1, 0] = l01
        tri2d[:, 2, 0] = np.einsum("ij,ij->i", e02, x)
        tri2d[:, 2, 1] = np.einsum("ij,ij->i", e02, y)
        self.tri2d = tri2d

        self.edge_lengths = np.stack(
            [
                np.linalg.norm(p1 - p0, axis=1),
                np.linalg.norm(p2 - p1, axis=1),
                np.linalg.norm(p0 - p2, axis=1),
            ],
            axis=1,
        )
        self.areas = 0.5 * np.linalg.norm(np.cross(e01, e02), axis=1)
        lo = v.min(axis=0) if len(v) else np.zeros(3)
        hi = v.max(axis=0) if len(v) else np.zeros(3)
        self.bbox_diag = float(np.linalg.norm(hi - lo))
        self.max_edge_length = float(self.edge_lengths.max()) if nt else 0.0

        # barycentric solve: inverse of [v1-v0, v2-v0] in face coordinates,
        # stored transposed so that `rel @ inv2d[face]` yields (beta, gamma)
        m00 = tri2d[:, 1, 0]
        m10 = tri2d[:, 2, 0]
        m11 = tri2d[:, 2, 1]
        det = np.where(np.abs(m00 * m11) < 1e-300, 1e-300, m00 * m11)
        inv = np.zeros((nt, 2, 2))
        inv[:, 0, 0] = m11 / det
        inv[:, 1, 0] = -m10 / det
        inv[:, 1, 1] = m00 / det
        self.inv2d = inv

        self.unfold = self._build_unfold()
        self.corner_angles = self._build_corner_angles()
        self._build_vertex_rings()

    def _build_unfold(self) -> np.ndarray:
        nt = len(self.triangles)
        unf = np.zeros((nt, 3, 4))
        t2 = self.tri2d
        adj = self.adjacency
        adje = self.adjacent_edge
        for e in range(3):
            u = adj[:, e]
            eu = adje[:, e]
            # shared edge runs a->b in this face and b->a in the neighbour
            at = t2[np.arange(nt), e]
            bt = t2[np.arange(nt), (e + 1) % 3]
            au = t2[u, eu]
            bu = t2[u, (eu + 1) % 3]
            # complex rotation r mapping (bu - au) onto (at - bt): the shared
            # edge runs in opposite directions in the two faces
            zt = (at[:, 0] - bt[:, 0]) + 1j * (at[:, 1] - bt[:, 1])
            zu = (bu[:, 0] - au[:, 0]) + 1j * (bu[:, 1] - au[:, 1])
            zu = np.where(np.abs(zu) < 1e-300, 1e-300, zu)
            r = zt / zu
            mag = np.abs(r)
            r = r / np.where(mag < 1e-300, 1e-300, mag)
            tr = (bt[:, 0] + 1j * bt[:, 1]) - r * (au[:, 0] + 1j * au[:, 1])
            unf[:, e, 0] = r.real
            unf[:, e, 1] = r.imag
            unf[:, e, 2] = tr.real
            unf[:, e, 3] = tr.imag
        return unf

    def _build_corner_angles(self) -> np.ndarray:
        t2 = self.tri2d
        ang = np.zeros((len(self.triangles), 3))
        for i in range(3):
            a = t2[:, (i + 1) % 3] - t2[:, i]
            b = t2[:, (i + 2) % 3] - t2[:, i]
            dots = np.einsum("ij,ij->i", a, b)
            crosses = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
            ang[:, i] = np.abs(np.arctan2(crosses, dots))
        return ang

    def _build_vertex_rings(self) -> None:
        tris = self.triangles
        nv = len(self.vertices)
        counts = np.bincount(tris.ravel(), minlength=nv)
        ptr = np.zeros(nv + 1, dtype=np.int64)
        np.cumsum(counts, out=ptr[1:])
        order = np.argsort(tris.ravel(), kind="stable")
        self.vertex_tri_ptr = ptr
        self.vertex_tris = (order // 3).astype(np.int64)
        self.vertex_angles = np.zeros(nv)
        np.add.at(self.vertex_angles, tris.ravel(), self.corner_angles.ravel())

    # -- queries -------------------------------------------------------------

    def check_face(self, face: int) -> None:
        if not 0 <= face < len(self.triangles):
            raise InvalidFace(f"face {face} out of range")

    def point(self, face: int, alpha: float, beta: float) -> MeshPoint:
        self.check_face(face)
        return MeshPoint(face, alpha, beta).clamped()

    def embed(self, p: MeshPoint) -> np.ndarray:
        """3D position of a mesh point (barycentric interpolation)."""
        self.check_face(p.face)
        a, b, g = p.bary
        tri = self.triangles[p.face]
        v = self.vertices
        return a * v[tri[0]] + b * v[tri[1]] + g * v[tri[2]]

    def point2d(self, p: MeshPoint) -> np.ndarray:
        """Position of a mesh point in its face's own 2D frame."""
        a, b, g = p.bary
        t2 = self.tri2d[p.face]
        return a * t2[0] + b * t2[1] + g * t2[2]

    def bary_from_2d(self, face: int, xy: np.ndarray) -> tuple[float, float]:
        """Barycentric (alpha, beta) of a 2D point in the face frame."""
        rel = np.asarray(xy, dtype=float)
        bg = rel @ self.inv2d[face]
        return float(1.0 - bg[0] - bg[1]), float(bg[0])

    def bary_from_3d(self, face: int, x: np.ndarray) -> tuple[float, float]:
        v0 = self.vertices[self.triangles[face, 0]]
        rel3 = np.asarray(x, dtype=float) - v0
        xy = self.frames[face] @ rel3
        return self.bary_from_2d(face, xy)

    def locate(self, x: np.ndarray) -> MeshPoint:
        """Mesh point nearest to an arbitrary 3D point (exhaustive)."""
        x = np.asarray(x, dtype=float)
        tris = self.triangles
        v = self.vertices
        best = None
        best_d = np.inf
        cent = (v[tris[:, 0]] + v[tris[:, 1]] + v[tris[:, 2]]) / 3.0
        order = np.argsort(np.linalg.norm(cent - x, axis=1))
        for t in order[: min(64, len(order))]:
            a, b = self.bary_from_3d(int(t), x)
            g = 1.0 - a - b
            a2, b2, g2 = max(a, 0.0), max(b, 0.0), max(g, 0.0)
            s = a2 + b2 + g2
            a2, b2 = a2 / s, b2 / s
            p = MeshPoint(int(t), a2, b2)
            d = np.linalg.norm(self.embed(p) - x)
            if d < best_d:
                best_d = d
                best = p
        return best

    def vertex_point(self, vid: int) -> MeshPoint:
        """Encode a mesh vertex as a MeshPoint on one incident face."""
        t = int(self.vertex_tris[self.vertex_tri_ptr[vid]])
        i = int(np.where(self.triangles[t] == vid)[0][0])
        ab = [(1.0, 0.0), (0.0, 1.0), (0.0, 0.0)][i]
        return MeshPoint(t, *ab)

    def stats(self) -> dict:
        return {
            "vertices": int(len(self.vertices)),
            "triangles": int(len(self.triangles)),
            "bbox_diag": self.bbox_diag,
            "max_edge_length": self.max_edge_length,
            "total_area": float(self.areas.sum()),
        }


def load_mesh(source, fmt: str = "obj") -> TriangleMesh:
    """Load a mesh from an OBJ path, byte stream, or text.

    Polygonal faces are fan-triangulated; normals and UVs are ignored.
    """
    if fmt.lower() != "obj":
        raise ParseError(f"unsupported format {fmt!r}")
    if isinstance(source, (str, Path)) and "\n" not in str(source):
        text = Path(source).read_text()
    elif isinstance(source, bytes):
        text = source.decode("utf-8", errors="replace")
    elif isinstance(source, io.IOBase):
        raw = source.read()
        text = raw.decode("utf-8", errors="replace") if isinstance(raw, bytes) else raw
    else:
        text = str(source)

    verts: list[list[float]] = []
    faces: list[list[int]] = []
    for ln, line in enumerate(text.splitlines(), 1):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        tag = parts[0]
        if tag == "v":
            if len(parts) < 4:
                raise ParseError(f"line {ln}: vertex needs 3 coordinates")
            try:
                verts.append([float(parts[1]), float(parts[2]), float(parts[3])])
            except ValueError as exc:
                raise ParseError(f"line {ln}: bad vertex: {exc}") from exc
        elif tag == "f":
            idx = []
            for tok in parts[1:]:
                head = tok.split("/")[0]
                try:
                    i = int(head)
                except ValueError as exc:
                    raise ParseError(f"line {ln}: bad face index {tok!r}") from exc
                idx.append(i - 1 if i > 0 else len(verts) + i)
            if len(idx) < 3:
                raise ParseError(f"line {ln}: face needs at least 3 vertices")
            for j in range(1, len(idx) - 1):
                faces.append([idx[0], idx[j], idx[j + 1]])
        # vn / vt / o / g / s / usemtl etc. are ignored
    if not faces:
        raise ParseError("no faces found")
    return TriangleMesh(np.array(verts), np.array(faces))


def save_obj(mesh: TriangleMesh, path) -> None:
    with open(path, "w") as fh:
        for v in mesh.vertices:
            fh.write(f"v {v[0]:.17g} {v[1]:.17g} {v[2]:.17g}\n")
        for t in mesh.triangles:
            fh.write(f"f {t[0] + 1} {t[1] + 1} {t[2] + 1}\n")
