"""Compiled inner loops shared by the geometry and sensor modules.

Every function here works on raw float64 arrays; the public wrappers in
:mod:`scannav.geometry` and :mod:`scannav.sensor` do argument handling.
"""

import math

import numpy as np
from numba import njit

# Absolute slack (meters) used for boundary-inclusive comparisons.
TOL = 1e-12
# Angular slack (radians) used when locating the fan sector of a query.
ANG_TOL = 1e-9

TWO_PI = 2.0 * math.pi


@njit(cache=True)
def point_segment_distance(px, py, ax, ay, bx, by):
    dx = bx - ax
    dy = by - ay
    l2 = dx * dx + dy * dy
    if l2 == 0.0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * dx + (py - ay) * dy) / l2
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


@njit(cache=True)
def _orient(ax, ay, bx, by, cx, cy):
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


@njit(cache=True)
def proper_crossing(ax, ay, bx, by, cx, cy, dx, dy):
    """True iff the open segments (a,b) and (c,d) cross transversally."""
    o1 = _orient(ax, ay, bx, by, cx, cy)
    o2 = _orient(ax, ay, bx, by, dx, dy)
    if not ((o1 > 0.0 and o2 < 0.0) or (o1 < 0.0 and o2 > 0.0)):
        return False
    o3 = _orient(cx, cy, dx, dy, ax, ay)
    o4 = _orient(cx, cy, dx, dy, bx, by)
    return (o3 > 0.0 and o4 < 0.0) or (o3 < 0.0 and o4 > 0.0)


@njit(cache=True)
def segment_segment_distance(ax, ay, bx, by, cx, cy, dx, dy):
    if proper_crossing(ax, ay, bx, by, cx, cy, dx, dy):
        return 0.0
    d = point_segment_distance(ax, ay, cx, cy, dx, dy)
    d = min(d, point_segment_distance(bx, by, cx, cy, dx, dy))
    d = min(d, point_segment_distance(cx, cy, ax, ay, bx, by))
    d = min(d, point_segment_distance(dx, dy, ax, ay, bx, by))
    return d


@njit(cache=True)
def min_distance_to_segments(q, seg_a, seg_b):
    """Minimum distance from each row of ``q`` to the segment set."""
    k = q.shape[0]
    m = seg_a.shape[0]
    out = np.empty(k)
    for i in range(k):
        best = np.inf
        px = q[i, 0]
        py = q[i, 1]
        for j in range(m):
            d = point_segment_distance(px, py, seg_a[j, 0], seg_a[j, 1], seg_b[j, 0], seg_b[j, 1])
            if d < best:
                best = d
        out[i] = best
    return out


@njit(cache=True)
def segments_clear(p0, p1, seg_a, seg_b, r):
    """Per query segment [p0[k], p1[k]]: no transversal crossing with any
    boundary segment and, for r > 0, clearance of at least r from all of them."""
    k = p0.shape[0]
    m = seg_a.shape[0]
    out = np.ones(k, dtype=np.bool_)
    reach = max(r, 0.0) + TOL
    for i in range(k):
        ax = p0[i, 0]
        ay = p0[i, 1]
        bx = p1[i, 0]
        by = p1[i, 1]
        qxmin = min(ax, bx) - reach
        qxmax = max(ax, bx) + reach
        qymin = min(ay, by) - reach
        qymax = max(ay, by) + reach
        for j in range(m):
            cx = seg_a[j, 0]
            cy = seg_a[j, 1]
            dx = seg_b[j, 0]
            dy = seg_b[j, 1]
            if max(cx, dx) < qxmin or min(cx, dx) > qxmax:
                continue
            if max(cy, dy) < qymin or min(cy, dy) > qymax:
                continue
            if r > 0.0:
                if segment_segment_distance(ax, ay, bx, by, cx, cy, dx, dy) < r - TOL:
                    out[i] = False
                    break
            elif proper_crossing(ax, ay, bx, by, cx, cy, dx, dy):
                out[i] = False
                break
    return out


@njit(cache=True)
def _in_triangle(px, py, ax, ay, bx, by, cx, cy):
    """Closed-triangle membership with TOL slack; degenerate triangles
    reduce to distance-to-edges."""
    area2 = _orient(ax, ay, bx, by, cx, cy)
    scale = max(abs(bx - ax), abs(by - ay), abs(cx - ax), abs(cy - ay), 1.0)
    if abs(area2) <= 1e-14 * scale * scale:
        d = point_segment_distance(px, py, ax, ay, bx, by)
        d = min(d, point_segment_distance(px, py, bx, by, cx, cy))
        d = min(d, point_segment_distance(px, py, cx, cy, ax, ay))
        return d <= TOL
    s = 1.0 if area2 > 0.0 else -1.0
    lab = math.hypot(bx - ax, by - ay)
    lbc = math.hypot(cx - bx, cy - by)
    lca = math.hypot(ax - cx, ay - cy)
    if s * _orient(ax, ay, bx, by, px, py) < -TOL * lab:
        return False
    if s * _orient(bx, by, cx, cy, px, py) < -TOL * lbc:
        return False
    if s * _orient(cx, cy, ax, ay, px, py) < -TOL * lca:
        return False
    return True


@njit(cache=True)
def points_in_fan(cx, cy, pts, phis, q):
    """Membership of each query in the union of fan triangles (c, p[i-1], p[i]).

    ``phis`` holds the unwrapped, non-decreasing polar angles of ``pts`` about
    the center (phis[-1] == phis[0] + 2*pi), so only the triangles whose
    sector brackets the query angle need testing.
    """
    k = q.shape[0]
    n = pts.shape[0] - 1
    phi0 = phis[0]
    out = np.zeros(k, dtype=np.bool_)
    for i in range(k):
        px = q[i, 0]
        py = q[i, 1]
        if math.hypot(px - cx, py - cy) <= TOL:
            out[i] = True
            continue
        psi = math.atan2(py - cy, px - cx)
        psi = phi0 + ((psi - phi0) % TWO_PI)
        lo = np.searchsorted(phis, psi - ANG_TOL)
        if lo < 1:
            lo = 1
        hit = False
        t = lo
        while t <= n and phis[t - 1] <= psi + ANG_TOL:
            if _in_triangle(px, py, cx, cy, pts[t - 1, 0], pts[t - 1, 1], pts[t, 0], pts[t, 1]):
                hit = True
                break
            t += 1
        if not hit and (psi - phi0 <= ANG_TOL or phis[n] - psi <= ANG_TOL):
            for t in (1, n):
                if _in_triangle(px, py, cx, cy, pts[t - 1, 0], pts[t - 1, 1], pts[t, 0], pts[t, 1]):
                    hit = True
                    break
        out[i] = hit
    return out


@njit(cache=True)
def points_in_polygon(q, verts):
    """Crossing-number test against a closed vertex ring (no repeat of the
    first vertex). Points exactly on an edge may land on either side."""
    k = q.shape[0]
    n = verts.shape[0]
    out = np.zeros(k, dtype=np.bool_)
    for i in range(k):
        px = q[i, 0]
        py = q[i, 1]
        inside = False
        j = n - 1
        for t in range(n):
            xi = verts[t, 0]
            yi = verts[t, 1]
            xj = verts[j, 0]
            yj = verts[j, 1]
            if (yi > py) != (yj > py):
                xcross = xi + (py - yi) * (xj - xi) / (yj - yi)
                if px < xcross:
                    inside = not inside
            j = t
        out[i] = inside
    return out


@njit(cache=True)
def ray_cast_many(ox, oy, angles, r_max, seg_a, seg_b):
    """Range along each ray to the first boundary hit, clamped to r_max.
    Hits with parameter t in (1e-12, r_max] count; the smallest wins."""
    k = angles.shape[0]
    m = seg_a.shape[0]
    out = np.empty(k)
    for i in range(k):
        ux = math.cos(angles[i])
        uy = math.sin(angles[i])
        best = r_max
        for j in range(m):
            ax = seg_a[j, 0]
            ay = seg_a[j, 1]
            ex = seg_b[j, 0] - ax
            ey = seg_b[j, 1] - ay
            den = ux * ey - uy * ex
            if den == 0.0:
                continue
            wx = ax - ox
            wy = ay - oy
            t = (wx * ey - wy * ex) / den
            s = (wx * uy - wy * ux) / den
            if s < 0.0 or s > 1.0:
                continue
            if t > 1e-12 and t < best:
                best = t
        out[i] = best
    return out
