"""Scan polygons, erosion by the robot radius, and star-convex safe regions.

A scan is a center ``c`` plus counter-clockwise range points ``p_0..p_n``
with ``p_0 == p_n``. Its polygon is the fan of triangles ``(c, p_{i-1}, p_i)``.
Erosion is never built explicitly; membership is decided with
distance-to-boundary predicates, which is exact for the closed sets involved.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.spatial import cKDTree

from scannav import _kernels as K

#: default angular resolution of a discretized safe-polygon boundary
DEFAULT_ANGULAR_SAMPLES = 720
#: bisection tolerance (meters) for safe-polygon boundary radii
BOUNDARY_BISECTION_TOL = 1e-4
#: default safer-polygon margin (meters)
DEFAULT_MARGIN_EPS = 1e-3
#: relative slack for "strictly within r_max"
RANGE_REL_TOL = 1e-6


class InvalidScan(ValueError):
    pass


class EmptySafeRegion(ValueError):
    """The eroded, center-visible region of a scan is empty."""


class Segment(NamedTuple):
    a: np.ndarray
    b: np.ndarray


def as_point(q) -> np.ndarray:
    p = np.asarray(q, dtype=float).reshape(2)
    if not np.all(np.isfinite(p)):
        raise ValueError(f"non-finite point {q!r}")
    return p


def as_points(qs) -> np.ndarray:
    arr = np.asarray(qs, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, 2)
    return np.ascontiguousarray(arr.reshape(-1, 2))


@dataclass(frozen=True, eq=False)
class Scan:
    """One 360-degree range scan.

    ``robot_radius`` is the radius of the robot that took the scan; when
    positive, every range must exceed it (clearance of the center).
    Instances hash by identity so derived regions can be cached per scan.
    """

    id: int
    center: np.ndarray
    points: np.ndarray
    r_max: float
    robot_radius: float = 0.0

    phis: np.ndarray = field(init=False, repr=False)
    seg_a: np.ndarray = field(init=False, repr=False)
    seg_b: np.ndarray = field(init=False, repr=False)
    obstacle_points: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        c = as_point(self.center)
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=float))
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
            raise InvalidScan("scan needs at least two distinct readings plus closure")
        if not np.all(np.isfinite(pts)):
            raise InvalidScan("non-finite scan point")
        if not np.array_equal(pts[0], pts[-1]):
            raise InvalidScan("scan is not closed: first and last points differ")
        r_max = float(self.r_max)
        if not r_max > 0:
            raise InvalidScan("r_max must be positive")
        rel = pts - c
        ranges = np.hypot(rel[:, 0], rel[:, 1])
        if np.any(ranges <= 0.0):
            raise InvalidScan("scan point coincides with the center")
        if np.any(ranges > r_max * (1 + 1e-9) + K.TOL):
            raise InvalidScan("scan point beyond maximum range")
        if self.robot_radius > 0 and np.any(ranges <= self.robot_radius):
            raise InvalidScan("scan point within robot radius of the center")

        theta = np.arctan2(rel[:, 1], rel[:, 0])
        steps = np.mod(np.diff(theta), 2 * math.pi)
        # a step of exactly 2*pi - tiny is a clockwise wiggle, not a revolution
        if abs(steps.sum() - 2 * math.pi) > 1e-6:
            raise InvalidScan("scan points are not counter-clockwise over one revolution")
        phis = np.concatenate(([theta[0]], theta[0] + np.cumsum(steps)))
        phis[-1] = theta[0] + 2 * math.pi

        a, b = pts[:-1], pts[1:]
        keep = np.any(a != b, axis=1)
        obst = pts[:-1][ranges[:-1] < r_max - RANGE_REL_TOL * r_max]

        c.flags.writeable = False
        pts.flags.writeable = False
        set_ = object.__setattr__
        set_(self, "center", c)
        set_(self, "points", pts)
        set_(self, "r_max", r_max)
        set_(self, "robot_radius", float(self.robot_radius))
        set_(self, "phis", phis)
        set_(self, "seg_a", np.ascontiguousarray(a[keep]))
        set_(self, "seg_b", np.ascontiguousarray(b[keep]))
        set_(self, "obstacle_points", np.ascontiguousarray(obst))

    @property
    def ranges(self) -> np.ndarray:
        rel = self.points - self.center
        return np.hypot(rel[:, 0], rel[:, 1])

    def __len__(self):
        return self.points.shape[0] - 1


def scan_polygon_triangles(scan: Scan) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Fan triangles ``(c, p_{i-1}, p_i)`` for i = 1..n, degenerate ones included."""
    c, p = scan.center, scan.points
    return [(c, p[i - 1], p[i]) for i in range(1, p.shape[0])]


def points_in_scan_polygon(scan: Scan, qs) -> np.ndarray:
    q = as_points(qs)
    return K.points_in_fan(scan.center[0], scan.center[1], scan.points, scan.phis, q)


def point_in_scan_polygon(scan: Scan, q) -> bool:
    return bool(points_in_scan_polygon(scan, as_point(q))[0])


def boundary_polyline(scan: Scan) -> list[Segment]:
    """Boundary segments ``[p_{i-1}, p_i]`` with zero-length ones dropped."""
    return [Segment(a, b) for a, b in zip(scan.seg_a, scan.seg_b)]


def distance_to_scan_boundary(scan: Scan, qs) -> np.ndarray:
    return K.min_distance_to_segments(as_points(qs), scan.seg_a, scan.seg_b)


def eroded_contains_many(scan: Scan, qs, inflation: float) -> np.ndarray:
    q = as_points(qs)
    inside = points_in_scan_polygon(scan, q)
    if inflation <= 0:
        return inside
    d = K.min_distance_to_segments(q, scan.seg_a, scan.seg_b)
    return inside & (d >= inflation - K.TOL)


def eroded_contains(scan: Scan, q, inflation: float) -> bool:
    """Whether the disk of radius ``inflation`` about ``q`` fits in the scan polygon."""
    if inflation < 0:
        raise ValueError("inflation must be non-negative")
    return bool(eroded_contains_many(scan, as_point(q), inflation)[0])


def safe_segments(scan: Scan, a, b, inflation: float) -> np.ndarray:
    """Vectorized :func:`safe_segment`; ``a`` and ``b`` broadcast against each other."""
    pa, pb = np.broadcast_arrays(as_points(a), as_points(b))
    pa = np.ascontiguousarray(pa)
    pb = np.ascontiguousarray(pb)
    ok = eroded_contains_many(scan, pa, inflation) & eroded_contains_many(scan, pb, inflation)
    idx = np.flatnonzero(ok)
    if idx.size:
        clear = K.segments_clear(
            np.ascontiguousarray(pa[idx]), np.ascontiguousarray(pb[idx]),
            scan.seg_a, scan.seg_b, float(inflation),
        )
        ok[idx] = clear
    return ok


def safe_segment(scan: Scan, a, b, inflation: float) -> bool:
    """Whether the segment [a, b] lies in the scan polygon eroded by ``inflation``.

    Checked as: both endpoints in the eroded polygon, no transversal crossing
    with the boundary, and segment-to-boundary clearance >= inflation.
    """
    if inflation < 0:
        raise ValueError("inflation must be non-negative")
    return bool(safe_segments(scan, as_point(a), as_point(b), inflation)[0])


def safepoly_contains_many(scan: Scan, qs, inflation: float) -> np.ndarray:
    return safe_segments(scan, scan.center, as_points(qs), inflation)


def safepoly_contains(scan: Scan, q, inflation: float) -> bool:
    """Membership in the star-convex safe polygon: the whole segment from the
    scan center to ``q`` must stay inside the eroded polygon."""
    return safe_segment(scan, scan.center, q, inflation)


@dataclass(frozen=True, eq=False)
class SafePolygonView:
    """Radially discretized boundary of a safe (or safer) polygon."""

    scan: Scan
    inflation: float
    boundary: np.ndarray
    angular_samples: int
    radii: np.ndarray

    @property
    def seg_a(self) -> np.ndarray:
        return self.boundary

    @property
    def seg_b(self) -> np.ndarray:
        return np.roll(self.boundary, -1, axis=0)

    def contains(self, q) -> bool:
        return safepoly_contains(self.scan, q, self.inflation)


@functools.lru_cache(maxsize=4096)
def safepoly_boundary(
    scan: Scan, inflation: float, angular_samples: int = DEFAULT_ANGULAR_SAMPLES
) -> SafePolygonView:
    """Boundary of the safe polygon sampled at ``angular_samples`` directions.

    Along each direction the largest safe radius is bracketed by bisection to
    ``BOUNDARY_BISECTION_TOL``; the feasible radii form an interval starting
    at zero because the region is star-convex about the center.
    """
    if angular_samples < 16:
        raise ValueError("angular_samples must be at least 16")
    c = scan.center
    theta = 2 * math.pi * np.arange(angular_samples) / angular_samples
    u = np.column_stack((np.cos(theta), np.sin(theta)))
    if not eroded_contains(scan, c, inflation):
        raise EmptySafeRegion(f"scan {scan.id}: center has no clearance {inflation}")
    lo = np.zeros(angular_samples)
    hi = np.full(angular_samples, float(scan.ranges.max()) + 1e-9)
    while np.max(hi - lo) > BOUNDARY_BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        ok = safe_segments(scan, c, c + mid[:, None] * u, inflation)
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
    if np.all(lo < 1e-6):
        raise EmptySafeRegion(f"scan {scan.id}: empty safe region at inflation {inflation}")
    boundary = c + lo[:, None] * u
    boundary.flags.writeable = False
    return SafePolygonView(scan, float(inflation), boundary, int(angular_samples), lo)


def dist2bnd_many(view: SafePolygonView, qs) -> np.ndarray:
    return K.min_distance_to_segments(as_points(qs), view.seg_a, np.ascontiguousarray(view.seg_b))


def dist2bnd(view: SafePolygonView, q) -> float:
    """Distance from ``q`` to the discretized safer-polygon boundary."""
    return float(dist2bnd_many(view, as_point(q))[0])


@functools.lru_cache(maxsize=4096)
def _obstacle_tree(scan: Scan) -> cKDTree:
    return cKDTree(scan.obstacle_points)


def dist2obst_many(scan: Scan, qs) -> np.ndarray:
    q = as_points(qs)
    if scan.obstacle_points.shape[0] == 0:
        return np.full(q.shape[0], np.inf)
    return _obstacle_tree(scan).query(q)[0]


def dist2obst(scan: Scan, q) -> float:
    """Distance to the sensed obstacle points (ranges strictly below r_max);
    +inf when the scan saw nothing within range."""
    return float(dist2obst_many(scan, as_point(q))[0])
