"""Optimal cost-to-go over the motion graph and the composed global policy."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from scannav.geometry import as_point, safepoly_contains
from scannav.graph import MotionGraph, ScanCollection
from scannav.policy import (
    ControlParams,
    LocalCostKind,
    PolicyKind,
    local_cost,
    move_through_center,
    move_to_projected_goal,
    navcost_center,
    navcost_projected,
)

DEFAULT_DT = 1.0 / 30.0
DEFAULT_GOAL_TOL = 0.02
DEFAULT_T_MAX = 300.0
BELLMAN_TOL = 1e-9


class GoalUnreachable(ValueError):
    """No scan's safer polygon contains the goal."""


class NoActiveScan(RuntimeError):
    """The position is not covered by any safe polygon with finite cost."""


@dataclass
class PlanResult:
    """Per-scan optimal travel cost and local goal (0-based scan positions)."""

    goal: np.ndarray
    scancost: np.ndarray
    scangoal: np.ndarray
    cost_kind: LocalCostKind

    def reachable(self) -> np.ndarray:
        return np.isfinite(self.scancost)


def plan(
    scans: ScanCollection,
    graph: MotionGraph,
    goal,
    cost_kind: LocalCostKind = LocalCostKind.CentroidalDistance,
    *,
    mode: str = "heap",
) -> PlanResult:
    """Label-correcting search for optimal cost and goal assignment.

    Goal scans are seeded with ``localcost(c_i, g)``; a popped scan ``i``
    relaxes each neighbor ``j`` with ``localcost_i(c_j, scangoal(i))`` and
    hands it ``c_i`` as local goal on improvement. Extraction takes the
    lowest cost, ties to the smallest index. ``mode="linear"`` does the
    extraction by a plain scan of the open list instead of a heap.
    """
    if mode not in ("heap", "linear"):
        raise ValueError(f"unknown mode {mode!r}")
    g = as_point(goal)
    m = len(scans)
    r = scans.safer_inflation
    cost = np.full(m, np.inf)
    sgoal = np.array([s.center for s in scans], dtype=float).reshape(m, 2)
    open_set = set()
    heap = []
    for i in range(m):
        if safepoly_contains(scans[i], g, r):
            cost[i] = local_cost(cost_kind, scans[i], scans[i].center, g, check=False)
            sgoal[i] = g
            open_set.add(i)
            heap.append((cost[i], i))
    if not open_set:
        raise GoalUnreachable(f"goal {tuple(g)} is outside every safer polygon")
    heapq.heapify(heap)
    adj = graph.adjacency()

    while open_set:
        if mode == "heap":
            c_i, i = heapq.heappop(heap)
            if i not in open_set or c_i != cost[i]:
                continue
        else:
            i = min(open_set, key=lambda k: (cost[k], k))
        open_set.discard(i)
        si = scans[i]
        for j in adj[i]:
            temp = local_cost(cost_kind, si, scans[j].center, sgoal[i], check=False)
            if cost[j] > cost[i] + temp:
                cost[j] = cost[i] + temp
                sgoal[j] = si.center
                open_set.add(j)
                if mode == "heap":
                    heapq.heappush(heap, (cost[j], j))
    return PlanResult(g, cost, sgoal, cost_kind)


def check_bellman(result: PlanResult, scans: ScanCollection, graph: MotionGraph, tol: float = BELLMAN_TOL) -> bool:
    """Optimality check on every edge with finite costs at both ends.

    Scans whose safer polygon holds the goal must beat every neighbor route
    strictly.
    """
    r = scans.safer_inflation
    cost, sgoal = result.scancost, result.scangoal
    terminal = [safepoly_contains(s, result.goal, r) for s in scans]
    for a, b in graph.edges:
        for i, j in ((a, b), (b, a)):
            if not (math.isfinite(cost[i]) and math.isfinite(cost[j])):
                continue
            via = cost[j] + local_cost(result.cost_kind, scans[j], scans[i].center, sgoal[j], check=False)
            if terminal[i]:
                if not cost[i] < via:
                    return False
            elif cost[i] > via + tol:
                return False
    return True


def active_scan(scans: ScanCollection, result: PlanResult, x) -> int:
    """Lowest-cost scan whose safe polygon holds ``x``; ties to the smallest index."""
    x = as_point(x)
    R = scans.robot_radius
    best, best_cost = -1, math.inf
    for i, s in enumerate(scans):
        ci = result.scancost[i]
        if not ci < best_cost:
            continue
        if np.hypot(*(x - s.center)) > s.r_max:
            continue
        if safepoly_contains(s, x, R):
            best, best_cost = i, ci
    if best < 0:
        raise NoActiveScan(f"no finite-cost safe polygon contains {tuple(x)}")
    return best


@dataclass
class GlobalPolicy:
    scans: ScanCollection
    graph: MotionGraph
    plan: PlanResult
    policy_kind: PolicyKind = PolicyKind.MoveThroughCenter
    params: ControlParams = field(default_factory=ControlParams)


def evaluate_policy(policy: GlobalPolicy, x: np.ndarray):
    """Velocity, active scan index and local navigation cost at ``x``."""
    i = active_scan(policy.scans, policy.plan, x)
    scan = policy.scans[i]
    y = policy.plan.scangoal[i]
    if policy.policy_kind is PolicyKind.MoveThroughCenter:
        v = move_through_center(scan, x, y, policy.params, check=False)
        nc = navcost_center(scan, x, y)
    else:
        v = move_to_projected_goal(scan, x, y, policy.params, check=False)
        nc = navcost_projected(scan, x, y, check=False)
    return v, i, nc


def global_velocity(policy: GlobalPolicy, x) -> np.ndarray:
    """Velocity of the active scan's local law toward its assigned local goal."""
    return evaluate_policy(policy, as_point(x))[0]


@dataclass
class Trajectory:
    """Sampled closed-loop run. Row k holds the state at ``t[k]`` and the
    velocity applied from there; the last row is the terminal state."""

    t: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    active: np.ndarray
    navcost: np.ndarray
    outcome: str
    goal: np.ndarray

    @property
    def steps(self) -> int:
        return max(len(self.t) - 1, 0)

    @property
    def success(self) -> bool:
        return self.outcome == "success"

    @property
    def final_position(self) -> np.ndarray:
        return self.positions[-1]

    def path_length(self) -> float:
        if len(self.positions) < 2:
            return 0.0
        return float(np.sum(np.hypot(*np.diff(self.positions, axis=0).T)))

    def switches(self) -> int:
        return int(np.count_nonzero(np.diff(self.active) != 0)) if len(self.active) > 1 else 0


def simulate_navigation(
    policy: GlobalPolicy,
    x0,
    dt: float = DEFAULT_DT,
    t_max: float = DEFAULT_T_MAX,
    goal_tol: float = DEFAULT_GOAL_TOL,
) -> Trajectory:
    """Forward-Euler integration of the global policy.

    Outcome is ``success`` once within ``goal_tol`` of the goal, ``timeout``
    at ``t_max``, or ``no_active_scan`` if the position leaves the domain.
    """
    x = as_point(x0).copy()
    g = policy.plan.goal
    ts, xs, vs, act, ncs = [], [], [], [], []
    n_max = int(math.ceil(t_max / dt))
    outcome = "timeout"
    for k in range(n_max + 1):
        try:
            v, i, nc = evaluate_policy(policy, x)
        except NoActiveScan:
            outcome = "no_active_scan"
            break
        ts.append(k * dt)
        xs.append(x.copy())
        vs.append(v)
        act.append(i)
        ncs.append(nc)
        if np.hypot(*(x - g)) <= goal_tol:
            outcome = "success"
            break
        if k == n_max:
            break
        x = x + dt * v
    return Trajectory(
        np.array(ts), np.array(xs).reshape(-1, 2), np.array(vs).reshape(-1, 2),
        np.array(act, dtype=int), np.array(ncs), outcome, g,
    )
