"""Plain SVG renderings of worlds, safe polygons, graphs and trajectories."""

from __future__ import annotations

import colorsys

import numpy as np

from scannav.geometry import EmptySafeRegion, safepoly_boundary
from scannav.graph import MotionGraph, ScanCollection
from scannav.sensor import World

RENDER_SAMPLES = 180


def scan_color(k: int) -> str:
    r, g, b = colorsys.hsv_to_rgb((k * 0.618034) % 1.0, 0.65, 0.85)
    return f"#{int(r * 255):02x}{int(g * 255):02x}{int(b * 255):02x}"


class Canvas:
    """SVG document in world coordinates (y up), scaled to ``px_per_m``."""

    def __init__(self, bounds, px_per_m: float = 60.0, pad: float = 0.3):
        x0, y0, x1, y1 = bounds
        self.x0, self.y1 = x0 - pad, y1 + pad
        self.s = px_per_m
        self.w = (x1 - x0 + 2 * pad) * px_per_m
        self.h = (y1 - y0 + 2 * pad) * px_per_m
        self.items: list[str] = []

    def _pt(self, p) -> str:
        return f"{(p[0] - self.x0) * self.s:.2f},{(self.y1 - p[1]) * self.s:.2f}"

    def polygon(self, pts, fill="none", stroke="#000", width=1.0, opacity=1.0):
        path = " ".join(self._pt(p) for p in pts)
        self.items.append(
            f'<polygon points="{path}" fill="{fill}" fill-opacity="{opacity:.2f}" '
            f'stroke="{stroke}" stroke-width="{width:.2f}"/>'
        )

    def polyline(self, pts, stroke="#000", width=1.0, dash=None):
        path = " ".join(self._pt(p) for p in pts)
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self.items.append(f'<polyline points="{path}" fill="none" stroke="{stroke}" stroke-width="{width:.2f}"{extra}/>')

    def circle(self, p, r_px=3.0, fill="#000"):
        x, y = self._pt(p).split(",")
        self.items.append(f'<circle cx="{x}" cy="{y}" r="{r_px:.2f}" fill="{fill}"/>')

    def arrow(self, p, v, scale=0.3, stroke="#000"):
        q = np.asarray(p) + scale * np.asarray(v)
        self.polyline([p, q], stroke=stroke, width=1.0)
        self.circle(q, 1.2, stroke)

    def text(self, p, s, size=10):
        x, y = self._pt(p).split(",")
        self.items.append(f'<text x="{x}" y="{y}" font-size="{size}" font-family="sans-serif">{s}</text>')

    def svg(self) -> str:
        head = (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.w:.0f}" height="{self.h:.0f}" '
            f'viewBox="0 0 {self.w:.2f} {self.h:.2f}">'
        )
        return "\n".join([head, '<rect width="100%" height="100%" fill="#fff"/>', *self.items, "</svg>"]) + "\n"


def world_canvas(world: World, px_per_m: float = 60.0) -> Canvas:
    lo = world.workspace.min(axis=0)
    hi = world.workspace.max(axis=0)
    cv = Canvas((lo[0], lo[1], hi[0], hi[1]), px_per_m)
    cv.polygon(world.workspace, fill="#f4f4f4", stroke="#222", width=2)
    for o in world.obstacles:
        cv.polygon(o, fill="#555", stroke="#222")
    return cv


def draw_scans(cv: Canvas, scans: ScanCollection, graph: MotionGraph | None = None):
    R = scans.robot_radius
    for k, s in enumerate(scans):
        try:
            b = safepoly_boundary(s, R, RENDER_SAMPLES).boundary
        except EmptySafeRegion:
            continue
        cv.polygon(b, fill=scan_color(k), stroke=scan_color(k), width=0.8, opacity=0.15)
    if graph is not None:
        for i, j in sorted(graph.edges):
            cv.polyline([scans[i].center, scans[j].center], stroke="#1a4fa0", width=1.5)
    for k, s in enumerate(scans):
        cv.circle(s.center, 3.5, "#1a4fa0")
        cv.text(s.center + np.array([0.08, 0.08]), str(s.id), 9)


def draw_path(cv: Canvas, positions, stroke="#d0342c"):
    if len(positions) > 1:
        cv.polyline(positions, stroke=stroke, width=2.0)


def scene_svg(world: World, scans: ScanCollection, graph=None, paths=(), marks=()) -> str:
    cv = world_canvas(world)
    draw_scans(cv, scans, graph)
    for p in paths:
        draw_path(cv, p)
    for p, color in marks:
        cv.circle(p, 5.0, color)
    return cv.svg()


def field_svg(world: World, scans: ScanCollection, samples, goal) -> str:
    """Arrows (unit length scaled) colored by active scan."""
    cv = world_canvas(world)
    draw_scans(cv, scans)
    for x, y, vx, vy, sid in samples:
        n = float(np.hypot(vx, vy))
        v = np.array([vx, vy]) / n if n > 0 else np.zeros(2)
        cv.arrow((x, y), v, 0.12, scan_color(sid - 1))
    cv.circle(goal, 5.0, "#d0342c")
    return cv.svg()
