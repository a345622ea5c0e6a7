"""Numba kernels for the geodesic primitives.

Everything in here is deliberately array-oriented and allocation-light; the
object layer in :mod:`geobez.geodesics` owns all the bookkeeping.
"""

from __future__ import annotations

import numpy as np
from numba import njit

INF = 1e300


# ---------------------------------------------------------------------------
# dual graph search: deque label-correcting (SLF insertion / LLL extraction)
# with A*-style labels dist + euclidean-distance-to-target
# ---------------------------------------------------------------------------


@njit(cache=True)
def dual_search(
    indptr,
    nbrs,
    wts,
    refs,
    src_nodes,
    src_costs,
    tgt_nodes,
    qx,
    qy,
    qz,
    dist,
    parent,
    stamp,
    cur,
    inq,
    tgt_stamp,
    ring,
):
    """Label-correcting search over the dual graph.

    Workspace arrays (``dist``, ``parent``, ``stamp``, ``inq``, ``tgt_stamp``,
    ``ring``) are reused between calls through the ``cur`` generation stamp.
    Returns the best target node and its completed cost (graph distance plus
    the Euclidean hop from that node's reference point to the query point),
    or (-1, inf) when unreachable.
    """
    cap = ring.shape[0]
    head = 0
    count = 0
    qsum = 0.0
    best = INF
    best_node = -1

    for i in range(tgt_nodes.shape[0]):
        tgt_stamp[tgt_nodes[i]] = cur

    for i in range(src_nodes.shape[0]):
        u = src_nodes[i]
        stamp[u] = cur
        dist[u] = src_costs[i]
        parent[u] = -1
        inq[u] = 1
        ring[(head + count) % cap] = u
        count += 1
        dx = refs[u, 0] - qx
        dy = refs[u, 1] - qy
        dz = refs[u, 2] - qz
        h = (dx * dx + dy * dy + dz * dz) ** 0.5
        qsum += dist[u] + h
        if tgt_stamp[u] == cur and dist[u] + h < best:
            best = dist[u] + h
            best_node = u

    while count > 0:
        # LLL: rotate the queue while the front label exceeds the average
        rotations = 0
        while count > 1 and rotations < count:
            u = ring[head]
            dx = refs[u, 0] - qx
            dy = refs[u, 1] - qy
            dz = refs[u, 2] - qz
            lu = dist[u] + (dx * dx + dy * dy + dz * dz) ** 0.5
            if lu * count > qsum:
                head = (head + 1) % cap
                ring[(head + count - 1) % cap] = u
                rotations += 1
            else:
                break
        u = ring[head]
        head = (head + 1) % cap
        count -= 1
        inq[u] = 0
        dxu = refs[u, 0] - qx
        dyu = refs[u, 1] - qy
        dzu = refs[u, 2] - qz
        lu = dist[u] + (dxu * dxu + dyu * dyu + dzu * dzu) ** 0.5
        qsum -= lu
        if lu >= best:
            continue
        du = dist[u]
        for j in range(indptr[u], indptr[u + 1]):
            v = nbrs[j]
            nd = du + wts[j]
            if stamp[v] == cur and nd >= dist[v]:
                continue
            dxv = refs[v, 0] - qx
            dyv = refs[v, 1] - qy
            dzv = refs[v, 2] - qz
            hv = (dxv * dxv + dyv * dyv + dzv * dzv) ** 0.5
            if inq[v] == 1:
                qsum += nd - dist[v]
            dist[v] = nd
            parent[v] = u
            stamp[v] = cur
            lv = nd + hv
            if tgt_stamp[v] == cur and lv < best:
                best = lv
                best_node = v
            if inq[v] == 0 and lv < best:
                # SLF: to the front when the label undercuts the current front
                if count > 0:
                    f = ring[head]
                    dxf = refs[f, 0] - qx
                    dyf = refs[f, 1] - qy
                    dzf = refs[f, 2] - qz
                    lf = dist[f] + (dxf * dxf + dyf * dyf + dzf * dzf) ** 0.5
                    if lv <= lf:
                        head = (head - 1) % cap
                        ring[head] = v
                    else:
                        ring[(head + count) % cap] = v
                else:
                    ring[(head + count) % cap] = v
                inq[v] = 1
                count += 1
                qsum += lv
    return best_node, best


# ---------------------------------------------------------------------------
# strip development (isometric unfolding into the first triangle's frame)
# ---------------------------------------------------------------------------


@njit(cache=True)
def develop_strip(strip, shared, tri2d, unfold):
    """Unfold a triangle strip into the plane of its first triangle.

    ``shared[i]`` is the local edge index in ``strip[i]`` crossing to
    ``strip[i+1]``. Returns per-triangle unfolded vertex coordinates and the
    accumulated rotation (cos, sin) of each triangle's frame in the plane.
    """
    h = strip.shape[0]
    unf = np.empty((h, 3, 2))
    rot = np.empty((h, 2))
    rc, rs, tx, ty = 1.0, 0.0, 0.0, 0.0
    for k in range(3):
        unf[0, k, 0] = tri2d[strip[0], k, 0]
        unf[0, k, 1] = tri2d[strip[0], k, 1]
    rot[0, 0] = 1.0
    rot[0, 1] = 0.0
    for i in range(1, h):
        tp = strip[i - 1]
        e = shared[i - 1]
        c2 = unfold[tp, e, 0]
        s2 = unfold[tp, e, 1]
        u2 = unfold[tp, e, 2]
        v2 = unfold[tp, e, 3]
        ntx = rc * u2 - rs * v2 + tx
        nty = rs * u2 + rc * v2 + ty
        nc = rc * c2 - rs * s2
        ns = rs * c2 + rc * s2
        rc, rs, tx, ty = nc, ns, ntx, nty
        t = strip[i]
        for k in range(3):
            x = tri2d[t, k, 0]
            y = tri2d[t, k, 1]
            unf[i, k, 0] = rc * x - rs * y + tx
            unf[i, k, 1] = rs * x + rc * y + ty
        rot[i, 0] = rc
        rot[i, 1] = rs
    return unf, rot


# ---------------------------------------------------------------------------
# funnel (string pulling) through the unfolded strip
# ---------------------------------------------------------------------------


@njit(cache=True)
def _turn(ax, ay, bx, by, cx, cy):
    """+1 if c is left of a->b (ccw), -1 if right (cw), 0 if collinear."""
    v = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    if v > 0.0:
        return 1
    if v < 0.0:
        return -1
    return 0


@njit(cache=True)
def funnel(portals, vl, vr, px, py, qx, qy):
    """Shortest polyline from p to q through ordered portals.

    Deque funnel with an explicit cusp. ``portals`` is (m, 4) holding the 2D
    left then right endpoint of each crossed edge, ``vl``/``vr`` the matching
    vertex ids. Returns the path points (n, 2), the vertex id of each path
    point (-1 start, -2 end), and the portal index at which each point
    entered (-1 for the start, m for the end).
    """
    m = portals.shape[0]
    size = 2 * m + 8
    fx = np.empty(size)
    fy = np.empty(size)
    fid = np.empty(size, dtype=np.int64)
    fpi = np.empty(size, dtype=np.int64)
    # path output
    ox = np.empty(m + 4)
    oy = np.empty(m + 4)
    oid = np.empty(m + 4, dtype=np.int64)
    opi = np.empty(m + 4, dtype=np.int64)
    nout = 0

    mid = m + 3
    lo = mid - 1
    hi = mid + 1
    # seed [L0, p, R0], flipped so the funnel's lo end turns clockwise
    if _turn(px, py, portals[0, 0], portals[0, 1], portals[0, 2], portals[0, 3]) == 1:
        fx[lo], fy[lo] = portals[0, 2], portals[0, 3]
        fid[lo], fpi[lo] = vr[0], 0
        fx[hi], fy[hi] = portals[0, 0], portals[0, 1]
        fid[hi], fpi[hi] = vl[0], 0
    else:
        fx[lo], fy[lo] = portals[0, 0], portals[0, 1]
        fid[lo], fpi[lo] = vl[0], 0
        fx[hi], fy[hi] = portals[0, 2], portals[0, 3]
        fid[hi], fpi[hi] = vr[0], 0
    fx[mid], fy[mid] = px, py
    fid[mid], fpi[mid] = -1, -1
    ci = mid  # cusp buffer index

    for i in range(1, m + 1):
        if i < m:
            alx, aly, aid = portals[i, 0], portals[i, 1], vl[i]
            arx, ary, aid2 = portals[i, 2], portals[i, 3], vr[i]
        else:
            alx, aly, aid = portals[m - 1, 0], portals[m - 1, 1], vl[m - 1]
            arx, ary, aid2 = qx, qy, -2
        lid = fid[lo]
        rid = fid[hi]
        l_shared = aid == lid or aid == rid
        r_shared = aid2 == lid or aid2 == rid
        if l_shared and r_shared:
            continue  # portal identical to the funnel mouth
        if l_shared:
            shared = aid
            nx, ny, nid = arx, ary, aid2
        elif r_shared:
            shared = aid2
            nx, ny, nid = alx, aly, aid
        else:
            # strip degeneracy: assume the left endpoint persists
            shared = aid
            nx, ny, nid = arx, ary, aid2
        npi = i
        attach_hi = fid[lo] == shared
        if attach_hi:
            while hi > ci and _turn(fx[hi - 1], fy[hi - 1], fx[hi], fy[hi], nx, ny) == 1:
                hi -= 1
            if hi == ci:
                while hi > lo and _turn(fx[hi], fy[hi], fx[hi - 1], fy[hi - 1], nx, ny) == 1:
                    ox[nout] = fx[hi]
                    oy[nout] = fy[hi]
                    oid[nout] = fid[hi]
                    opi[nout] = fpi[hi]
                    nout += 1
                    hi -= 1
                ci = hi
            hi += 1
            fx[hi], fy[hi] = nx, ny
            fid[hi], fpi[hi] = nid, npi
        else:
            while lo < ci and _turn(fx[lo + 1], fy[lo + 1], fx[lo], fy[lo], nx, ny) == -1:
                lo += 1
            if lo == ci:
                while lo < hi and _turn(fx[lo], fy[lo], fx[lo + 1], fy[lo + 1], nx, ny) == -1:
                    ox[nout] = fx[lo]
                    oy[nout] = fy[lo]
                    oid[nout] = fid[lo]
                    opi[nout] = fpi[lo]
                    nout += 1
                    lo += 1
                ci = lo
            lo -= 1
            fx[lo], fy[lo] = nx, ny
            fid[lo], fpi[lo] = nid, npi

    # walk from the cusp to q along whichever chain ends at q
    if fid[hi] == -2:
        for idx in range(ci, hi + 1):
            ox[nout] = fx[idx]
            oy[nout] = fy[idx]
            oid[nout] = fid[idx]
            opi[nout] = fpi[idx]
            nout += 1
    else:
        for idx in range(ci, lo - 1, -1):
            ox[nout] = fx[idx]
            oy[nout] = fy[idx]
            oid[nout] = fid[idx]
            opi[nout] = fpi[idx]
            nout += 1
    return ox[:nout], oy[:nout], oid[:nout], opi[:nout]


@njit(cache=True)
def portal_intercepts(portals, path_pts, path_portal_idx):
    """Intersect the funnel polyline with every portal.

    ``path_pts`` is the corner polyline (n, 2) including both endpoints and
    ``path_portal_idx[j]`` the portal index at which point j pivots (-1 for
    the start, m for the end). Returns the crossing parameter of each portal
    along the directed mesh edge, which runs from the right portal endpoint
    (0) to the left one (1); clamped to [0, 1].
    """
    m = portals.shape[0]
    n = path_pts.shape[0]
    out = np.empty(m)
    seg = 0
    for i in range(m):
        while seg + 1 < n - 1 and path_portal_idx[seg + 1] <= i:
            seg += 1
        ax, ay = path_pts[seg, 0], path_pts[seg, 1]
        bx, by = path_pts[seg + 1, 0], path_pts[seg + 1, 1]
        lx, ly = portals[i, 0], portals[i, 1]
        rx, ry = portals[i, 2], portals[i, 3]
        if path_portal_idx[seg] == i:
            # the path pivots exactly on one endpoint of this portal
            dl = (ax - lx) ** 2 + (ay - ly) ** 2
            dr = (ax - rx) ** 2 + (ay - ry) ** 2
            out[i] = 1.0 if dl <= dr else 0.0
            continue
        dx, dy = bx - ax, by - ay
        ex, ey = lx - rx, ly - ry
        den = ey * dx - ex * dy
        if den == 0.0:
            out[i] = 0.5
            continue
        s = ((rx - ax) * dy - (ry - ay) * dx) / den
        out[i] = min(max(s, 0.0), 1.0)
    return out


@njit(cache=True)
def funnel_pipeline(strip, pbary, qbary, tri2d, unfold, triangles, adjacency, vertices):
    """Whole point-to-point phase (ii) in one call.

    Finds the shared edges, unfolds the strip, runs the funnel, intersects
    the result with every portal, and maps the crossings back to 3D.
    Returns (ok, shared, intercepts, pts3, ox, oy, oid, opi); ok is False
    when consecutive strip triangles are not adjacent.
    """
    h = strip.shape[0]
    shared = np.empty(h - 1, dtype=np.int64)
    for i in range(h - 1):
        e = -1
        t = strip[i]
        for c in range(3):
            if adjacency[t, c] == strip[i + 1]:
                e = c
                break
        if e < 0:
            return (False, shared, np.empty(0), np.empty((0, 3)),
                    np.empty(0), np.empty(0),
                    np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64))
        shared[i] = e
    unf, _ = develop_strip(strip, shared, tri2d, unfold)
    p2x = pbary[0] * unf[0, 0, 0] + pbary[1] * unf[0, 1, 0] + pbary[2] * unf[0, 2, 0]
    p2y = pbary[0] * unf[0, 0, 1] + pbary[1] * unf[0, 1, 1] + pbary[2] * unf[0, 2, 1]
    q2x = qbary[0] * unf[h - 1, 0, 0] + qbary[1] * unf[h - 1, 1, 0] + qbary[2] * unf[h - 1, 2, 0]
    q2y = qbary[0] * unf[h - 1, 0, 1] + qbary[1] * unf[h - 1, 1, 1] + qbary[2] * unf[h - 1, 2, 1]
    m = h - 1
    portals = np.empty((m, 4))
    vl = np.empty(m, dtype=np.int64)
    vr = np.empty(m, dtype=np.int64)
    for i in range(m):
        e = shared[i]
        portals[i, 0] = unf[i, (e + 1) % 3, 0]
        portals[i, 1] = unf[i, (e + 1) % 3, 1]
        portals[i, 2] = unf[i, e, 0]
        portals[i, 3] = unf[i, e, 1]
        vl[i] = triangles[strip[i], (e + 1) % 3]
        vr[i] = triangles[strip[i], e]
    ox, oy, oid, opi = funnel(portals, vl, vr, p2x, p2y, q2x, q2y)
    pts2 = np.stack((ox, oy), axis=1)
    lvals = portal_intercepts(portals, pts2, opi)
    pts3 = np.empty((h + 1, 3))
    for c in range(3):
        pts3[0, c] = (pbary[0] * vertices[triangles[strip[0], 0], c]
                      + pbary[1] * vertices[triangles[strip[0], 1], c]
                      + pbary[2] * vertices[triangles[strip[0], 2], c])
        pts3[h, c] = (qbary[0] * vertices[triangles[strip[h - 1], 0], c]
                      + qbary[1] * vertices[triangles[strip[h - 1], 1], c]
                      + qbary[2] * vertices[triangles[strip[h - 1], 2], c])
    for i in range(m):
        e = shared[i]
        a = triangles[strip[i], e]
        b = triangles[strip[i], (e + 1) % 3]
        l = lvals[i]
        for c in range(3):
            pts3[i + 1, c] = (1.0 - l) * vertices[a, c] + l * vertices[b, c]
    return True, shared, lvals, pts3, ox, oy, oid, opi


# ---------------------------------------------------------------------------
# straightest geodesic tracing
# ---------------------------------------------------------------------------


@njit(cache=True)
def trace_straightest(
    face0,
    x0,
    y0,
    dx0,
    dy0,
    total_len,
    triangles,
    adjacency,
    adjacent_edge,
    tri2d,
    unfold,
    corner_angles,
    vertex_angles,
    max_steps,
):
    """Trace a straight line through successively unfolded triangles.

    Positions and directions live in the current triangle's own frame;
    crossing an edge applies the precomputed frame-to-frame rigid transform.
    A vertex hit continues along the direction bisecting the total vertex
    angle. Returns (strip, crossing local-edge ids, crossing parameters,
    steps, end x, end y, end dir x, end dir y, unused length).
    """
    strip = np.empty(max_steps + 1, dtype=np.int64)
    xedge = np.empty(max_steps, dtype=np.int64)
    xpar = np.empty(max_steps)
    t = face0
    x, y = x0, y0
    dx, dy = dx0, dy0
    remaining = total_len
    entry = -1
    steps = 0
    strip[0] = t
    eps = 1e-12
    while steps < max_steps and remaining > 0.0:
        best_s = INF
        best_e = -1
        best_u = 0.0
        relax = 0
        while relax < 2:
            s_floor = eps if relax == 0 else -1e-9
            u_tol = 1e-9 if relax == 0 else 1e-6
            for e in range(3):
                if relax == 0 and e == entry:
                    continue
                ax = tri2d[t, e, 0]
                ay = tri2d[t, e, 1]
                bx = tri2d[t, (e + 1) % 3, 0]
                by = tri2d[t, (e + 1) % 3, 1]
                ex = bx - ax
                ey = by - ay
                den = dx * ey - dy * ex
                if den == 0.0:
                    continue
                s = ((ax - x) * ey - (ay - y) * ex) / den
                u = ((ax - x) * dy - (ay - y) * dx) / den
                if s > s_floor and -u_tol <= u <= 1.0 + u_tol:
                    if s < best_s:
                        best_s = s
                        best_e = e
                        best_u = min(max(u, 0.0), 1.0)
            if best_e != -1:
                break
            relax += 1
        if best_e == -1:
            break
        if best_s >= remaining:
            x += remaining * dx
            y += remaining * dy
            remaining = 0.0
            break
        # vertex hit?
        vertex_local = -1
        if best_u < 1e-9:
            vertex_local = best_e
        elif best_u > 1.0 - 1e-9:
            vertex_local = (best_e + 1) % 3
        if vertex_local >= 0:
            vx = tri2d[t, vertex_local, 0]
            vy = tri2d[t, vertex_local, 1]
            step_len = ((vx - x) ** 2 + (vy - y) ** 2) ** 0.5
            if step_len >= remaining:
                x += remaining * dx
                y += remaining * dy
                remaining = 0.0
                break
            remaining -= step_len
            vid = triangles[t, vertex_local]
            budget = 0.5 * vertex_angles[vid]
            # back direction measured CCW from this wedge's first edge
            e1x = tri2d[t, (vertex_local + 1) % 3, 0] - vx
            e1y = tri2d[t, (vertex_local + 1) % 3, 1] - vy
            beta = np.arctan2(-dy, -dx) - np.arctan2(e1y, e1x)
            while beta < 0.0:
                beta += 2 * np.pi
            while beta >= 2 * np.pi:
                beta -= 2 * np.pi
            cur_v = vertex_local
            wedge_left = corner_angles[t, cur_v] - beta
            first = True
            while budget > wedge_left and steps < max_steps - 1:
                budget -= wedge_left
                ecross = (cur_v + 2) % 3  # the edge joining v to the previous vertex
                nt = adjacency[t, ecross]
                ne = adjacent_edge[t, ecross]
                xedge[steps] = ecross
                # edge runs (prev -> v): the crossing sits at the v endpoint
                xpar[steps] = 1.0
                steps += 1
                strip[steps] = nt
                t = nt
                cur_v = ne  # v is the start vertex of the shared edge in nt
                wedge_left = corner_angles[t, cur_v]
                first = False
            vx = tri2d[t, cur_v, 0]
            vy = tri2d[t, cur_v, 1]
            if first:
                e1x = tri2d[t, (cur_v + 1) % 3, 0] - vx
                e1y = tri2d[t, (cur_v + 1) % 3, 1] - vy
                base = np.arctan2(e1y, e1x) + beta
            else:
                e1x = tri2d[t, (cur_v + 1) % 3, 0] - vx
                e1y = tri2d[t, (cur_v + 1) % 3, 1] - vy
                base = np.arctan2(e1y, e1x)
            ang = base + budget
            dx = np.cos(ang)
            dy = np.sin(ang)
            x, y = vx, vy
            entry = -1
            continue
        # ordinary edge crossing
        nx = x + best_s * dx
        ny = y + best_s * dy
        remaining -= best_s
        nt = adjacency[t, best_e]
        ne = adjacent_edge[t, best_e]
        c = unfold[nt, ne, 0]
        s_ = unfold[nt, ne, 1]
        u_ = unfold[nt, ne, 2]
        v_ = unfold[nt, ne, 3]
        px = c * nx - s_ * ny + u_
        py = s_ * nx + c * ny + v_
        ddx = c * dx - s_ * dy
        ddy = s_ * dx + c * dy
        xedge[steps] = best_e
        xpar[steps] = best_u
        steps += 1
        strip[steps] = nt
        x, y = px, py
        dx, dy = ddx, ddy
        t = nt
        entry = ne
    return strip, xedge, xpar, steps, x, y, dx, dy, remaining
