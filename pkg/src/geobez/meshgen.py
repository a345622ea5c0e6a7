"""Procedural test meshes: flat grids, platonic solids, tori, noisy spheres.

All generators return watertight, coherently wound meshes so they pass the
loader's validation. Sizes are kept desk-scale unless asked otherwise.
"""

from __future__ import annotations

import numpy as np

from .mesh import TriangleMesh


def flat_square(n: int = 16, size: float = 1.0) -> TriangleMesh:
    """Planar triangulated square with 2*n*n triangles, closed by a back sheet.

    A raw planar grid has a boundary and would be rejected, so the square is
    extruded into a thin closed slab; all front-sheet faces come first and the
    helper :func:`flat_square_open` below hands out points on that sheet only.
    """
    front_v, front_f = _grid(n, size)
    nv = len(front_v)
    back_v = front_v.copy()
    back_v[:, 2] -= size * 1e3  # far away so the back never interferes
    verts = np.vstack([front_v, back_v])
    back_f = front_f[:, ::-1] + nv
    side_f = []
    # stitch the two boundary loops
    loop = _grid_boundary(n)
    for i in range(len(loop)):
        a, b = loop[i], loop[(i + 1) % len(loop)]
        side_f.append([a, nv + a, b])
        side_f.append([b, nv + a, nv + b])
    faces = np.vstack([front_f, back_f, np.array(side_f)])
    return TriangleMesh(verts, faces)


def _grid(n: int, size: float) -> tuple[np.ndarray, np.ndarray]:
    xs = np.linspace(0.0, size, n + 1)
    xv, yv = np.meshgrid(xs, xs, indexing="ij")
    verts = np.stack([xv.ravel(), yv.ravel(), np.zeros(xv.size)], axis=1)
    faces = []
    for i in range(n):
        for j in range(n):
            a = i * (n + 1) + j
            b = (i + 1) * (n + 1) + j
            faces.append([a, b, a + 1])
            faces.append([a + 1, b, b + 1])
    return verts, np.array(faces)


def _grid_boundary(n: int) -> list[int]:
    idx = lambda i, j: i * (n + 1) + j
    loop = [idx(i, 0) for i in range(n)]
    loop += [idx(n, j) for j in range(n)]
    loop += [idx(n - i, n) for i in range(n)]
    loop += [idx(0, n - j) for j in range(n)]
    return loop


def flat_front_faces(n: int) -> int:
    """Number of faces in the front sheet of :func:`flat_square`."""
    return 2 * n * n


def tetrahedron(scale: float = 1.0) -> TriangleMesh:
    v = scale * np.array(
        [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]]
    )
    f = np.array([[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]])
    return TriangleMesh(v, f)


def unit_cube() -> TriangleMesh:
    v = np.array(
        [
            [0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0],
            [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1],
        ],
        dtype=float,
    )
    quads = [
        [0, 3, 2, 1],  # z = 0
        [4, 5, 6, 7],  # z = 1
        [0, 1, 5, 4],  # y = 0
        [2, 3, 7, 6],  # y = 1
        [1, 2, 6, 5],  # x = 1
        [0, 4, 7, 3],  # x = 0
    ]
    faces = []
    for q in quads:
        faces.append([q[0], q[1], q[2]])
        faces.append([q[0], q[2], q[3]])
    return TriangleMesh(v, np.array(faces))


def icosphere(subdiv: int = 3, radius: float = 1.0) -> TriangleMesh:
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    v = np.array(
        [
            [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
            [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
            [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
        ],
        dtype=float,
    )
    f = np.array(
        [
            [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
            [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
            [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
            [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
        ]
    )
    verts = [row for row in v]
    cache: dict[tuple[int, int], int] = {}

    def midpoint(a: int, b: int) -> int:
        key = (min(a, b), max(a, b))
        if key not in cache:
            cache[key] = len(verts)
            verts.append((verts[a] + verts[b]) / 2.0)
        return cache[key]

    faces = f.tolist()
    for _ in range(subdiv):
        nxt = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            nxt += [[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]
        faces = nxt
    pts = np.array(verts)
    pts = radius * pts / np.linalg.norm(pts, axis=1)[:, None]
    return TriangleMesh(pts, np.array(faces))


def noisy_sphere(subdiv: int = 3, radius: float = 1.0, amp: float = 0.05, seed: int = 7) -> TriangleMesh:
    base = icosphere(subdiv, radius)
    rng = np.random.default_rng(seed)
    r = radius * (1.0 + amp * (rng.random(len(base.vertices)) * 2.0 - 1.0))
    v = base.vertices / np.linalg.norm(base.vertices, axis=1)[:, None] * r[:, None]
    return TriangleMesh(v, base.triangles)


def torus(nu: int = 48, nv: int = 24, R: float = 1.0, r: float = 0.35) -> TriangleMesh:
    us = 2 * np.pi * np.arange(nu) / nu
    vs = 2 * np.pi * np.arange(nv) / nv
    verts = np.zeros((nu * nv, 3))
    for i, u in enumerate(us):
        for j, v in enumerate(vs):
            w = R + r * np.cos(v)
            verts[i * nv + j] = [w * np.cos(u), w * np.sin(u), r * np.sin(v)]
    faces = []
    for i in range(nu):
        for j in range(nv):
            a = i * nv + j
            b = ((i + 1) % nu) * nv + j
            a2 = i * nv + (j + 1) % nv
            b2 = ((i + 1) % nu) * nv + (j + 1) % nv
            faces.append([a, b, a2])
            faces.append([a2, b, b2])
    return TriangleMesh(verts, np.array(faces))


def double_torus(res: int = 48) -> TriangleMesh:
    """Genus-2 surface: marching cubes over a smooth union of two torus fields."""
    from skimage import measure

    def torus_field(x, y, z, cx):
        q = np.sqrt((x - cx) ** 2 + y**2) - 0.55
        return np.sqrt(q**2 + z**2) - 0.22

    lin = np.linspace(-1.6, 1.6, res)
    x, y, z = np.meshgrid(lin, lin, lin, indexing="ij")
    f1 = torus_field(x, y, z, -0.52)
    f2 = torus_field(x, y, z, 0.52)
    k = 8.0  # smooth-min blend
    field = -np.log(np.exp(-k * f1) + np.exp(-k * f2)) / k
    spacing = lin[1] - lin[0]
    verts, faces, _, _ = measure.marching_cubes(field, level=0.0, spacing=(spacing,) * 3)
    verts = verts + np.array([lin[0]] * 3)
    return TriangleMesh(verts, faces[:, ::-1].astype(np.int64))


def capped_cylinder(n_around: int = 64, n_height: int = 8, radius: float = 1.0, height: float = 2.0) -> TriangleMesh:
    ring = 2 * np.pi * np.arange(n_around) / n_around
    verts = []
    for j in range(n_height + 1):
        z = height * j / n_height
        for u in ring:
            verts.append([radius * np.cos(u), radius * np.sin(u), z])
    bot = len(verts)
    verts.append([0.0, 0.0, 0.0])
    top = len(verts)
    verts.append([0.0, 0.0, height])
    faces = []
    for j in range(n_height):
        for i in range(n_around):
            a = j * n_around + i
            b = j * n_around + (i + 1) % n_around
            c = a + n_around
            d = b + n_around
            faces.append([a, b, c])
            faces.append([c, b, d])
    for i in range(n_around):
        a, b = i, (i + 1) % n_around
        faces.append([bot, b, a])
        ta, tb = n_height * n_around + i, n_height * n_around + (i + 1) % n_around
        faces.append([top, ta, tb])
    return TriangleMesh(np.array(verts, dtype=float), np.array(faces))
