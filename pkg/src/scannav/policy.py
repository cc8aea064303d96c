"""Local feedback laws on a single safe scan polygon and their costs."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from scannav.geometry import (
    DEFAULT_MARGIN_EPS,
    Scan,
    as_point,
    safe_segment,
    safe_segments,
    safepoly_contains,
)

#: relative bracket width at which the projected-goal search stops
PROJECTION_REL_TOL = 1e-9
PROJECTION_MAX_ITER = 60


class OutOfDomain(ValueError):
    """Robot or goal position outside the domain of a local policy."""


class PolicyKind(enum.Enum):
    MoveThroughCenter = "MoveThroughCenter"
    MoveToProjectedGoal = "MoveToProjectedGoal"


class LocalCostKind(enum.Enum):
    UniformConstant = "UniformConstant"
    DistanceToGoal = "DistanceToGoal"
    CentroidalDistance = "CentroidalDistance"
    ProjectedGoalDistance = "ProjectedGoalDistance"
    CentroidalPerimeter = "CentroidalPerimeter"
    ProjectedPerimeter = "ProjectedPerimeter"
    SymmetricProjectedGoalDistance = "SymmetricProjectedGoalDistance"


@dataclass(frozen=True)
class ControlParams:
    gain: float = 1.8
    max_speed: float = 0.5
    margin_eps: float = DEFAULT_MARGIN_EPS

    def __post_init__(self):
        if not (self.gain > 0 and self.max_speed > 0 and self.margin_eps > 0):
            raise ValueError("gain, max_speed and margin_eps must be positive")


def _check_domain(scan: Scan, x, y, margin_eps: float):
    R = scan.robot_radius
    ok = safe_segments(scan, scan.center, np.vstack((x, y)), 0.0)
    if not safepoly_contains(scan, x, R):
        raise OutOfDomain(f"robot position {tuple(x)} outside safe polygon of scan {scan.id}")
    if not ok[1] or not safepoly_contains(scan, y, R + margin_eps):
        raise OutOfDomain(f"goal {tuple(y)} outside safer polygon of scan {scan.id}")


def clamp_speed(v: np.ndarray, max_speed: float) -> np.ndarray:
    speed = float(np.hypot(v[0], v[1]))
    if speed > max_speed:
        return v * (max_speed / speed)
    return v


def move_through_center(scan: Scan, x, y, params: ControlParams, *, check: bool = True) -> np.ndarray:
    """Head straight for ``y`` when the segment to it is safe, otherwise for the scan center."""
    x = as_point(x)
    y = as_point(y)
    if check:
        _check_domain(scan, x, y, params.margin_eps)
    if safe_segment(scan, x, y, scan.robot_radius):
        v = -params.gain * (x - y)
    else:
        v = -params.gain * (x - scan.center)
    return clamp_speed(v, params.max_speed)


def projected_scan_goal(
    scan: Scan, x, y, *, margin_eps: float = DEFAULT_MARGIN_EPS, check: bool = True,
    rel_tol: float = PROJECTION_REL_TOL,
) -> np.ndarray:
    """Point of [c, y] closest to ``y`` that ``x`` sees inside the safe polygon.

    The admissible points form a sub-segment of [c, y] that contains c, so
    the far end is found by bisection on the segment parameter.
    """
    x = as_point(x)
    y = as_point(y)
    if check:
        _check_domain(scan, x, y, margin_eps)
    c = scan.center
    R = scan.robot_radius
    if safe_segment(scan, x, y, R):
        return y
    length = float(np.hypot(*(y - c)))
    lo, hi = 0.0, 1.0
    for _ in range(PROJECTION_MAX_ITER):
        if (hi - lo) * length <= rel_tol * length:
            break
        mid = 0.5 * (lo + hi)
        if safe_segment(scan, x, c + mid * (y - c), R):
            lo = mid
        else:
            hi = mid
    return c + lo * (y - c)


def move_to_projected_goal(scan: Scan, x, y, params: ControlParams, *, check: bool = True) -> np.ndarray:
    x = as_point(x)
    target = projected_scan_goal(scan, x, y, margin_eps=params.margin_eps, check=check)
    return clamp_speed(-params.gain * (x - target), params.max_speed)


def navcost_center(scan: Scan, x, y) -> float:
    """Perimeter of the triangle (x, c, y)."""
    x, y, c = as_point(x), as_point(y), scan.center
    return float(np.hypot(*(x - c)) + np.hypot(*(c - y)) + np.hypot(*(x - y)))


def navcost_projected(scan: Scan, x, y, *, margin_eps: float = DEFAULT_MARGIN_EPS, check: bool = True) -> float:
    """Length of the path x -> projected goal -> y."""
    x, y = as_point(x), as_point(y)
    yb = projected_scan_goal(scan, x, y, margin_eps=margin_eps, check=check)
    return float(np.hypot(*(x - yb)) + np.hypot(*(yb - y)))


def local_cost(
    kind: LocalCostKind, scan: Scan, x, y, *, margin_eps: float = DEFAULT_MARGIN_EPS, check: bool = True
) -> float:
    """Local transition cost of moving from ``x`` to ``y`` through ``scan``."""
    x, y, c = as_point(x), as_point(y), scan.center
    d = lambda p, q: float(np.hypot(*(p - q)))  # noqa: E731
    if kind is LocalCostKind.UniformConstant:
        return 1.0
    if kind is LocalCostKind.DistanceToGoal:
        return d(x, y)
    if kind is LocalCostKind.CentroidalDistance:
        return d(x, c) + d(c, y)
    if kind is LocalCostKind.CentroidalPerimeter:
        return d(x, y) + d(x, c) + d(c, y)
    proj = lambda a, b: projected_scan_goal(scan, a, b, margin_eps=margin_eps, check=check)  # noqa: E731
    if kind is LocalCostKind.ProjectedGoalDistance:
        yb = proj(x, y)
        return d(x, yb) + d(yb, y)
    if kind is LocalCostKind.ProjectedPerimeter:
        yb = proj(x, y)
        return d(x, y) + d(x, yb) + d(yb, y)
    if kind is LocalCostKind.SymmetricProjectedGoalDistance:
        if check:
            _check_domain(scan, y, x, margin_eps)
        return d(x, proj(x, y)) + d(y, proj(y, x))
    raise ValueError(f"unknown local cost {kind!r}")


@dataclass
class LocalRun:
    positions: np.ndarray
    navcost: np.ndarray
    converged: bool


def simulate_local(
    scan: Scan, x0, y, kind: PolicyKind, params: ControlParams = ControlParams(),
    dt: float = 1.0 / 30.0, t_max: float = 120.0, goal_tol: float = 0.02,
) -> LocalRun:
    """Forward-Euler run of one local law toward a fixed goal ``y``."""
    x = as_point(x0).copy()
    y = as_point(y)
    _check_domain(scan, x, y, params.margin_eps)
    xs, costs = [x.copy()], []
    n_max = int(np.ceil(t_max / dt))
    for _ in range(n_max):
        if kind is PolicyKind.MoveThroughCenter:
            costs.append(navcost_center(scan, x, y))
            v = move_through_center(scan, x, y, params, check=False)
        else:
            costs.append(navcost_projected(scan, x, y, check=False))
            v = move_to_projected_goal(scan, x, y, params, check=False)
        if np.hypot(*(x - y)) <= goal_tol:
            return LocalRun(np.array(xs), np.array(costs), True)
        x = x + dt * v
        xs.append(x.copy())
    return LocalRun(np.array(xs), np.array(costs), bool(np.hypot(*(x - y)) <= goal_tol))
