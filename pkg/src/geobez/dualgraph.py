"""Dual graph of a mesh, optionally densified by virtual edge splitting.

Long mesh edges are bisected (recursively, until below a threshold) and the
incident triangles symbolically fan-subdivided, *for graph purposes only*.
Every node remembers the original triangle it came from, so strips recovered
from a search are valid triangle strips on the untouched mesh.
"""

from __future__ import annotations

import math

import numpy as np

from .mesh import TriangleMesh

ARC_MIN = 1e-12


class DualGraph:
    """CSR adjacency over (sub-)triangle nodes with provenance.

    Attributes
    ----------
    indptr, nbrs, weights : CSR arrays of the arc structure.
    refpoints : (n, 3) reference point (centroid) of each node.
    provenance : (n,) original triangle index of each node.
    tri_ptr, tri_nodes : CSR from original triangle to its node ids.
    """

    def __init__(self, indptr, nbrs, weights, refpoints, provenance, tri_ptr, tri_nodes):
        self.indptr = indptr
        self.nbrs = nbrs
        self.weights = weights
        self.refpoints = refpoints
        self.provenance = provenance
        self.tri_ptr = tri_ptr
        self.tri_nodes = tri_nodes

    @property
    def node_count(self) -> int:
        return len(self.provenance)

    def nodes_of(self, tri: int) -> np.ndarray:
        return self.tri_nodes[self.tri_ptr[tri] : self.tri_ptr[tri + 1]]


def _csr_from_arcs(n_nodes: int, arcs_a, arcs_b, arc_w):
    a = np.concatenate([arcs_a, arcs_b])
    b = np.concatenate([arcs_b, arcs_a])
    w = np.concatenate([arc_w, arc_w])
    order = np.lexsort((b, a))
    a, b, w = a[order], b[order], w[order]
    indptr = np.zeros(n_nodes + 1, dtype=np.int64)
    np.add.at(indptr, a + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, b.astype(np.int64), w


def build_dual_graph(mesh: TriangleMesh, split_fraction: float = 0.05) -> DualGraph:
    """Build the (augmented) dual graph.

    Edges longer than ``split_fraction * bbox_diag`` are virtually bisected
    until all sub-edges fall below the threshold; incident triangles are
    fan-subdivided into graph nodes. Pass ``math.inf`` to disable splitting.
    """
    if split_fraction is not None and split_fraction <= 0:
        raise ValueError("split_fraction must be positive")
    thr = math.inf if split_fraction is None else split_fraction * mesh.bbox_diag
    tris = mesh.triangles
    nt = len(tris)
    v = mesh.vertices

    # segment count per undirected edge (power-of-two midpoint bisection)
    nseg: dict[tuple[int, int], int] = {}
    need_split = False
    if math.isfinite(thr) and thr > 0:
        el = mesh.edge_lengths
        for t in range(nt):
            for e in range(3):
                a, b = int(tris[t, e]), int(tris[t, (e + 1) % 3])
                key = (a, b) if a < b else (b, a)
                if key in nseg:
                    continue
                length = el[t, e]
                if length <= thr or thr <= 0:
                    nseg[key] = 1
                else:
                    nseg[key] = 2 ** max(1, math.ceil(math.log2(length / thr)))
                    need_split = True

    if not need_split:
        cent = (v[tris[:, 0]] + v[tris[:, 1]] + v[tris[:, 2]]) / 3.0
        aa, bb = [], []
        for e in range(3):
            nb = mesh.adjacency[:, e]
            keep = nb > np.arange(nt)
            aa.append(np.flatnonzero(keep))
            bb.append(nb[keep])
        arcs_a = np.concatenate(aa)
        arcs_b = np.concatenate(bb)
        w = np.maximum(np.linalg.norm(cent[arcs_a] - cent[arcs_b], axis=1), ARC_MIN)
        indptr, nbrs, weights = _csr_from_arcs(nt, arcs_a, arcs_b, w)
        tri_ptr = np.arange(nt + 1, dtype=np.int64)
        return DualGraph(
            indptr, nbrs, weights, cent, np.arange(nt, dtype=np.int64), tri_ptr,
            np.arange(nt, dtype=np.int64),
        )

    # --- virtual subdivision path -----------------------------------------
    def edge_points(a: int, b: int) -> np.ndarray:
        key = (a, b) if a < b else (b, a)
        n = nseg[key]
        fr = np.arange(1, n) / n
        lo, hi = v[key[0]], v[key[1]]
        pts = lo[None, :] * (1 - fr[:, None]) + hi[None, :] * fr[:, None]
        return pts if (a, b) == key else pts[::-1]

    node_of_tri: list[list[int]] = []
    refpts: list[np.ndarray] = []
    prov: list[int] = []
    arcs_a: list[int] = []
    arcs_b: list[int] = []
    # per (t, e): list of (fan node id, sub-edge 3D midpoint) along the edge
    side_nodes: dict[tuple[int, int], list[tuple[int, np.ndarray]]] = {}

    for t in range(nt):
        corners = [v[tris[t, 0]], v[tris[t, 1]], v[tris[t, 2]]]
        pts: list[np.ndarray] = []
        edge_first: list[int] = []
        edge_count: list[int] = []
        for e in range(3):
            a, b = int(tris[t, e]), int(tris[t, (e + 1) % 3])
            edge_first.append(len(pts))
            pts.append(corners[e])
            mids = edge_points(a, b)
            for row in mids:
                pts.append(row)
            key = (a, b) if a < b else (b, a)
            edge_count.append(nseg[key])
        m = len(pts)
        pts_arr = np.array(pts)
        nf = m - 2
        base = len(prov)
        for fi in range(nf):
            tri_pts = pts_arr[[0, fi + 1, fi + 2]]
            refpts.append(tri_pts.mean(axis=0))
            prov.append(t)
        node_of_tri.append(list(range(base, base + nf)))
        for fi in range(nf - 1):
            arcs_a.append(base + fi)
            arcs_b.append(base + fi + 1)
        # boundary sub-edge j (pts j -> j+1 mod m) belongs to one fan triangle
        for e in range(3):
            lst = []
            for s in range(edge_count[e]):
                j = edge_first[e] + s
                fi = 0 if j == 0 else (nf - 1 if j == m - 1 else j - 1)
                mid = (pts_arr[j] + pts_arr[(j + 1) % m]) / 2.0
                lst.append((base + fi, mid))
            side_nodes[(t, e)] = lst

    for t in range(nt):
        for e in range(3):
            u = int(mesh.adjacency[t, e])
            if u < t:
                continue
            eu = int(mesh.adjacent_edge[t, e])
            here = side_nodes[(t, e)]
            there = side_nodes[(u, eu)]
            # shared edge runs in opposite directions in the two triangles
            for s, (na, _) in enumerate(here):
                nb_node, _ = there[len(there) - 1 - s]
                arcs_a.append(na)
                arcs_b.append(nb_node)

    refpoints = np.array(refpts)
    arcs_a = np.array(arcs_a, dtype=np.int64)
    arcs_b = np.array(arcs_b, dtype=np.int64)
    w = np.maximum(np.linalg.norm(refpoints[arcs_a] - refpoints[arcs_b], axis=1), ARC_MIN)
    indptr, nbrs, weights = _csr_from_arcs(len(prov), arcs_a, arcs_b, w)
    counts = [len(nodes) for nodes in node_of_tri]
    tri_ptr = np.zeros(nt + 1, dtype=np.int64)
    np.cumsum(counts, out=tri_ptr[1:])
    tri_nodes = np.concatenate([np.array(nodes, dtype=np.int64) for nodes in node_of_tri])
    return DualGraph(
        indptr, nbrs, weights, refpoints, np.array(prov, dtype=np.int64), tri_ptr, tri_nodes
    )
