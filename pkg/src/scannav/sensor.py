"""Polygonal worlds and a ray-cast 360-degree range sensor."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from scannav import _kernels as K
from scannav.geometry import Scan, as_point, as_points


class InvalidScanCenter(ValueError):
    """Scan requested at a position without robot-body clearance."""


def _ring(verts) -> np.ndarray:
    v = np.asarray(verts, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
        raise ValueError("polygon needs at least three [x, y] vertices")
    if not np.all(np.isfinite(v)):
        raise ValueError("non-finite polygon vertex")
    if np.array_equal(v[0], v[-1]):
        v = v[:-1]
    return np.ascontiguousarray(v)


def signed_area(verts) -> float:
    v = np.asarray(verts, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def is_simple(verts) -> bool:
    v = _ring(verts)
    n = v.shape[0]
    a, b = v, np.roll(v, -1, axis=0)
    if np.any(np.all(a == b, axis=1)):
        return False
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            d = K.segment_segment_distance(*a[i], *b[i], *a[j], *b[j])
            if d == 0.0:
                return False
    return abs(signed_area(v)) > 0.0


@dataclass(frozen=True, eq=False)
class World:
    """Bounded workspace polygon with polygonal obstacles and a disk robot.

    The workspace interior is the free side; its boundary acts as an
    inward-facing wall.
    """

    workspace: np.ndarray
    obstacles: tuple = ()
    robot_radius: float = 0.25

    seg_a: np.ndarray = field(init=False, repr=False)
    seg_b: np.ndarray = field(init=False, repr=False)
    vertices: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        ws = _ring(self.workspace)
        if signed_area(ws) < 0:
            ws = ws[::-1].copy()
        obstacles = tuple(_ring(o) for o in self.obstacles)
        if not self.robot_radius > 0:
            raise ValueError("robot_radius must be positive")
        for poly in (ws, *obstacles):
            if not is_simple(poly):
                raise ValueError("world polygons must be simple")
        rings = (ws, *obstacles)
        seg_a = np.concatenate(rings)
        seg_b = np.concatenate([np.roll(r, -1, axis=0) for r in rings])
        set_ = object.__setattr__
        set_(self, "workspace", ws)
        set_(self, "obstacles", obstacles)
        set_(self, "robot_radius", float(self.robot_radius))
        set_(self, "seg_a", np.ascontiguousarray(seg_a))
        set_(self, "seg_b", np.ascontiguousarray(seg_b))
        set_(self, "vertices", np.ascontiguousarray(seg_a))

    def clearance(self, qs) -> np.ndarray:
        """Distance from each point to the nearest wall or obstacle edge."""
        return K.min_distance_to_segments(as_points(qs), self.seg_a, self.seg_b)


@dataclass(frozen=True)
class SensorConfig:
    num_rays: int = 1081
    r_max: float = 3.0

    def __post_init__(self):
        if self.num_rays < 16:
            raise ValueError("num_rays must be at least 16")
        if not self.r_max > 0:
            raise ValueError("r_max must be positive")


def free_space_contains_many(world: World, qs) -> np.ndarray:
    q = as_points(qs)
    ok = K.points_in_polygon(q, world.workspace)
    for obst in world.obstacles:
        ok &= ~K.points_in_polygon(q, obst)
    idx = np.flatnonzero(ok)
    if idx.size:
        d = K.min_distance_to_segments(np.ascontiguousarray(q[idx]), world.seg_a, world.seg_b)
        ok[idx] = d >= world.robot_radius
    return ok


def free_space_contains(world: World, q) -> bool:
    """Whether the robot disk centered at ``q`` fits in the workspace clear of obstacles."""
    return bool(free_space_contains_many(world, as_point(q))[0])


def ray_cast_many(world: World, origin, angles, r_max: float) -> np.ndarray:
    o = as_point(origin)
    ang = np.ascontiguousarray(np.asarray(angles, dtype=float).reshape(-1))
    return K.ray_cast_many(o[0], o[1], ang, float(r_max), world.seg_a, world.seg_b)


def ray_cast(world: World, origin, angle: float, r_max: float) -> float:
    """Range to the first wall or obstacle hit along ``angle``, clamped to ``r_max``."""
    return float(ray_cast_many(world, origin, [angle], r_max)[0])


def ray_angles(num_rays: int) -> np.ndarray:
    return 2 * math.pi * np.arange(num_rays) / num_rays


def _corner_clip_factors(world: World, c: np.ndarray, pts: np.ndarray, r_max: float) -> np.ndarray:
    """Per-ray range scale factors (<= 1) that push every world vertex out of
    the open fan triangles between consecutive rays.

    A vertex between two rays means an obstacle corner was cut by the chord
    joining their hits. Writing ``v - c = a (p_k - c) + b (p_{k+1} - c)``,
    scaling ``p_k`` by ``a / (1 - b)`` (or ``p_{k+1}`` by ``b / (1 - a)``)
    puts the chord through the vertex; the endpoint whose shortened range
    stays longer is the one moved. A boundary edge cannot enter such a
    triangle without a vertex inside it, since both radial sides are clear.
    """
    n = pts.shape[0]
    scale = np.ones(n)
    rel = world.vertices - c
    dist = np.hypot(rel[:, 0], rel[:, 1])
    near = dist < r_max
    if not np.any(near):
        return scale
    rel = rel[near]
    rng = np.hypot(*(pts - c).T)
    dtheta = 2 * math.pi / n
    sector = np.floor(np.mod(np.arctan2(rel[:, 1], rel[:, 0]), 2 * math.pi) / dtheta).astype(int) % n
    for k_off in (0, -1):
        k0 = (sector + k_off) % n
        k1 = (k0 + 1) % n
        P = pts[k0] - c
        Q = pts[k1] - c
        det = P[:, 0] * Q[:, 1] - P[:, 1] * Q[:, 0]
        good = det != 0.0
        a = np.where(good, (rel[:, 0] * Q[:, 1] - rel[:, 1] * Q[:, 0]) / np.where(good, det, 1.0), -1.0)
        b = np.where(good, (P[:, 0] * rel[:, 1] - P[:, 1] * rel[:, 0]) / np.where(good, det, 1.0), -1.0)
        inside = good & (a > 1e-12) & (b > 1e-12) & (a + b < 1.0 - 1e-12)
        for idx in np.flatnonzero(inside):
            i0, i1 = k0[idx], k1[idx]
            f0 = a[idx] / (1.0 - b[idx]) * (1.0 - 1e-9)
            f1 = b[idx] / (1.0 - a[idx]) * (1.0 - 1e-9)
            if f0 * rng[i0] >= f1 * rng[i1]:
                scale[i0] = min(scale[i0], f0)
            else:
                scale[i1] = min(scale[i1], f1)
    return scale


def take_scan(world: World, center, cfg: SensorConfig, id: int = 1) -> Scan:
    """Simulated scan at ``center`` with the sensor heading fixed to zero.

    Rays are cast at ``2*pi*k/num_rays``; hits that would leave an obstacle
    corner inside the scan polygon are pulled in (see
    :func:`_corner_clip_factors`), so the polygon interior stays obstacle-free.
    """
    c = as_point(center)
    if not free_space_contains(world, c):
        raise InvalidScanCenter(f"no robot clearance at {tuple(c)}")
    theta = ray_angles(cfg.num_rays)
    ranges = ray_cast_many(world, c, theta, cfg.r_max)
    u = np.column_stack((np.cos(theta), np.sin(theta)))
    pts = c + ranges[:, None] * u
    ranges = ranges * _corner_clip_factors(world, c, pts, cfg.r_max)
    if np.min(ranges) <= world.robot_radius:
        raise InvalidScanCenter(f"range reading within robot radius at {tuple(c)}")
    pts = c + ranges[:, None] * u
    pts = np.vstack((pts, pts[:1]))
    return Scan(id, c, pts, cfg.r_max, world.robot_radius)
