"""Autonomous exploration with frontier and bridging (loop-closing) scans."""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

from scannav.geometry import (
    EmptySafeRegion,
    Scan,
    as_point,
    dist2bnd_many,
    dist2obst_many,
    safepoly_boundary,
    safepoly_contains_many,
)
from scannav.graph import (
    MotionGraph,
    ScanCollection,
    build_motion_graph,
    is_connected,
    position_constrained_subgraph,
    scan_constrained_subgraph,
)
from scannav.planner import (
    DEFAULT_DT,
    DEFAULT_GOAL_TOL,
    GlobalPolicy,
    GoalUnreachable,
    plan,
    simulate_navigation,
)
from scannav.policy import ControlParams, LocalCostKind, PolicyKind, local_cost
from scannav.sensor import InvalidScanCenter, SensorConfig, World, free_space_contains, take_scan

log = logging.getLogger(__name__)

DEDUP_TOL = 1e-3


class IterationCapExceeded(RuntimeError):
    pass


class CandidateKind(enum.Enum):
    Frontier = "frontier"
    Bridging = "bridging"


class Status(enum.Enum):
    FrontierPhase = "FrontierPhase"
    BridgingPhase = "BridgingPhase"
    Complete = "Complete"


@dataclass(frozen=True)
class ExploreParams:
    frontier_eps: float = 0.05
    frontier_delta: float = 0.5
    boundary_samples: int = 72
    cluster_link_radius: float | None = None  # None: twice the mean sample spacing
    visited_radius: float = 0.1
    approach_margin: float = 0.05
    iteration_cap: int = 200
    cost_kind: LocalCostKind = LocalCostKind.CentroidalDistance
    frontier_only: bool = False
    dt: float = DEFAULT_DT
    t_max: float = 300.0
    goal_tol: float = DEFAULT_GOAL_TOL

    def __post_init__(self):
        if not (self.frontier_delta > self.frontier_eps > 0):
            raise ValueError("need frontier_delta > frontier_eps > 0")
        if self.boundary_samples < 16:
            raise ValueError("boundary_samples must be at least 16")
        if self.cluster_link_radius is not None and not self.cluster_link_radius > 0:
            raise ValueError("cluster_link_radius must be positive")


@dataclass(frozen=True)
class Candidate:
    position: np.ndarray
    kind: CandidateKind
    source_scan: int


@dataclass(frozen=True)
class Cluster:
    members: tuple
    medoid: np.ndarray

    @property
    def kind(self) -> CandidateKind:
        return self.members[0].kind

    @property
    def source_scan(self) -> int:
        """Scan whose boundary produced the medoid."""
        for c in self.members:
            if np.array_equal(c.position, self.medoid):
                return c.source_scan
        return self.members[0].source_scan


@dataclass
class ExplorationState:
    scans: ScanCollection
    graph: MotionGraph
    position: np.ndarray
    visited_observation_points: list = field(default_factory=list)
    excluded_points: list = field(default_factory=list)
    trajectory_log: list = field(default_factory=list)
    report: list = field(default_factory=list)
    status: Status = Status.FrontierPhase
    iterations: int = 0


# ---------------------------------------------------------------- candidates

def _boundary_samples(scans: ScanCollection, params: ExploreParams):
    r = scans.safer_inflation
    pts, src = [], []
    for i, s in enumerate(scans):
        try:
            view = safepoly_boundary(s, r, params.boundary_samples)
        except EmptySafeRegion:
            continue
        pts.append(view.boundary)
        src.append(np.full(view.boundary.shape[0], i))
    if not pts:
        return np.zeros((0, 2)), np.zeros(0, dtype=int)
    pts = np.vstack(pts)
    src = np.concatenate(src)
    _, first = np.unique(np.round(pts / DEDUP_TOL).astype(np.int64), axis=0, return_index=True)
    keep = np.sort(first)
    pts, src = pts[keep], src[keep]
    inside = containment_matrix(scans, pts)
    ok = inside.any(axis=1)
    return np.ascontiguousarray(pts[ok]), src[ok]


def boundary_candidates(scans: ScanCollection, params: ExploreParams) -> np.ndarray:
    """Safer-polygon boundary samples of every scan, deduplicated, as an (k, 2) array."""
    if len(scans) == 0:
        raise ValueError("no scans")
    return _boundary_samples(scans, params)[0]


def containment_matrix(scans: ScanCollection, pts) -> np.ndarray:
    """Boolean (points x scans) safer-polygon membership."""
    r = scans.safer_inflation
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    out = np.zeros((pts.shape[0], len(scans)), dtype=bool)
    for i, s in enumerate(scans):
        near = np.hypot(*(pts - s.center).T) <= s.r_max
        if np.any(near):
            out[near, i] = safepoly_contains_many(s, pts[near], r)
    return out


def _frontier_mask(scans: ScanCollection, pts: np.ndarray, inside: np.ndarray, params: ExploreParams):
    r = scans.safer_inflation
    k = pts.shape[0]
    max_bnd = np.full(k, -np.inf)
    min_obst = np.full(k, np.inf)
    for i, s in enumerate(scans):
        rows = np.flatnonzero(inside[:, i])
        if rows.size == 0:
            continue
        view = safepoly_boundary(s, r)
        max_bnd[rows] = np.maximum(max_bnd[rows], dist2bnd_many(view, pts[rows]))
        min_obst[rows] = np.minimum(min_obst[rows], dist2obst_many(s, pts[rows]))
    covered = inside.any(axis=1)
    return covered & (max_bnd <= params.frontier_eps) & (min_obst >= params.frontier_delta)


def is_frontier(scans: ScanCollection, q, params: ExploreParams) -> bool:
    """Near the explored boundary of every covering scan, and clear of sensed obstacles."""
    q = as_point(q).reshape(1, 2)
    return bool(_frontier_mask(scans, q, containment_matrix(scans, q), params)[0])


def is_bridging_position(scans: ScanCollection, graph: MotionGraph, q) -> bool:
    sub = position_constrained_subgraph(scans, graph, q)
    return len(sub.vertices) >= 2 and not is_connected(sub)


def is_bridging_scan(scans: ScanCollection, graph: MotionGraph, probe: Scan) -> bool:
    sub = scan_constrained_subgraph(scans, graph, probe)
    return len(sub.vertices) >= 2 and not is_connected(sub)


def _bridging_mask(scans: ScanCollection, graph: MotionGraph, pts: np.ndarray, inside: np.ndarray) -> np.ndarray:
    out = np.zeros(pts.shape[0], dtype=bool)
    for k in np.flatnonzero(inside.sum(axis=1) >= 2):
        out[k] = is_bridging_position(scans, graph, pts[k])
    return out


def classify_candidates(
    scans: ScanCollection, graph: MotionGraph, params: ExploreParams, *, bridging: bool = True
) -> tuple[list[Candidate], list[Candidate]]:
    """Frontier and bridging candidates; a frontier point is never also bridging."""
    pts, src = _boundary_samples(scans, params)
    if pts.shape[0] == 0:
        return [], []
    inside = containment_matrix(scans, pts)
    fr = _frontier_mask(scans, pts, inside, params)
    br = np.zeros_like(fr)
    if bridging:
        rest = ~fr
        br[rest] = _bridging_mask(scans, graph, pts[rest], inside[rest])
    make = lambda mask, kind: [Candidate(pts[k], kind, int(src[k])) for k in np.flatnonzero(mask)]  # noqa: E731
    return make(fr, CandidateKind.Frontier), make(br, CandidateKind.Bridging)


# ---------------------------------------------------------------- clustering

def mean_sample_spacing(scans: ScanCollection, params: ExploreParams) -> float:
    r = scans.safer_inflation
    gaps = []
    for s in scans:
        try:
            b = safepoly_boundary(s, r, params.boundary_samples).boundary
        except EmptySafeRegion:
            continue
        gaps.append(np.hypot(*(np.roll(b, -1, axis=0) - b).T))
    return float(np.mean(np.concatenate(gaps))) if gaps else 0.0


def medoid_index(points: np.ndarray) -> int:
    d = cdist(points, points)
    return int(np.argmin(d.sum(axis=1)))


def cluster_candidates(points: list[Candidate], link_radius: float) -> list[Cluster]:
    """Single-linkage groups (pairs within ``link_radius``) with exact medoids.

    Clusters come out ordered by their first member.
    """
    if not points:
        return []
    kinds = {c.kind for c in points}
    if len(kinds) > 1:
        raise ValueError("candidates of mixed kinds")
    xy = np.array([c.position for c in points])
    pairs = cKDTree(xy).query_pairs(link_radius, output_type="ndarray")
    n = xy.shape[0]
    adj = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    _, labels = connected_components(adj, directed=False)
    order = []
    for lab in labels:
        if lab not in order:
            order.append(lab)
    out = []
    for lab in order:
        idx = np.flatnonzero(labels == lab)
        members = tuple(points[k] for k in idx)
        m = medoid_index(xy[idx])
        out.append(Cluster(members, xy[idx[m]].copy()))
    return out


# ---------------------------------------------------------------- selection

def travel_cost(scans: ScanCollection, graph: MotionGraph, x, goal, cost_kind: LocalCostKind) -> float:
    """Planned cost from position ``x`` to ``goal``: the best over scans whose
    safe polygon holds ``x`` of scancost plus the local cost from ``x``."""
    x = as_point(x)
    res = plan(scans, graph, goal, cost_kind)
    R = scans.robot_radius
    best = math.inf
    for i, s in enumerate(scans):
        if not math.isfinite(res.scancost[i]):
            continue
        if safepoly_contains_many(s, x, R)[0]:
            best = min(best, res.scancost[i] + local_cost(cost_kind, s, x, res.scangoal[i], check=False))
    return best


def _near_any(q, points, radius) -> bool:
    return any(np.hypot(*(q - p)) < radius for p in points)


def eligible_clusters(state: ExplorationState, clusters: list[Cluster], params: ExploreParams) -> list[Cluster]:
    blocked = list(state.visited_observation_points) + list(state.excluded_points)
    return [c for c in clusters if not _near_any(c.medoid, blocked, params.visited_radius)]


def select_observation_point(
    state: ExplorationState, clusters_frontier, clusters_bridging, params: ExploreParams = ExploreParams()
):
    """Cheapest reachable medoid, frontier clusters first; ``None`` when nothing is left.

    Returns ``(medoid, kind, cluster)``.
    """
    for group in (clusters_frontier, clusters_bridging):
        best, best_cost = None, math.inf
        for cl in eligible_clusters(state, group, params):
            try:
                cost = travel_cost(state.scans, state.graph, state.position, cl.medoid, params.cost_kind)
            except GoalUnreachable:
                continue
            if cost < best_cost:
                best, best_cost = cl, cost
        if best is not None:
            return best.medoid, best.kind, best
    return None


def observation_target(scans: ScanCollection, cluster: Cluster, margin: float) -> np.ndarray:
    """Medoid pulled toward its source scan center by ``margin`` so the robot
    stops strictly inside that scan's safer polygon."""
    c = scans[cluster.source_scan].center
    d = cluster.medoid - c
    n = float(np.hypot(*d))
    if n <= margin:
        return cluster.medoid.copy()
    return cluster.medoid - d * (margin / n)


# ---------------------------------------------------------------- loop

def start_exploration(world: World, start, sensor_cfg: SensorConfig, margin_eps: float = 1e-3) -> ExplorationState:
    start = as_point(start)
    if not free_space_contains(world, start):
        raise InvalidScanCenter(f"start {tuple(start)} has no robot clearance")
    scans = ScanCollection([take_scan(world, start, sensor_cfg, 1)], margin_eps)
    return ExplorationState(scans, build_motion_graph(scans), start.copy(), [start.copy()])


def explore_step(
    state: ExplorationState,
    world: World,
    sensor_cfg: SensorConfig,
    params: ExploreParams = ExploreParams(),
    control: ControlParams = ControlParams(),
    policy_kind: PolicyKind = PolicyKind.MoveThroughCenter,
) -> ExplorationState:
    """One round: find candidates, pick an observation point, drive there, scan."""
    state.iterations += 1
    scans, graph = state.scans, state.graph
    link = params.cluster_link_radius or 2.0 * mean_sample_spacing(scans, params)
    fr, _ = classify_candidates(scans, graph, params, bridging=False)
    fr_cl = cluster_candidates(fr, link)
    br_cl = []
    choice = select_observation_point(state, fr_cl, [], params)
    if choice is None and not params.frontier_only:
        _, br = classify_candidates(scans, graph, params, bridging=True)
        br_cl = cluster_candidates(br, link)
        choice = select_observation_point(state, [], br_cl, params)
    entry = {
        "step": state.iterations,
        "frontier_clusters": len(eligible_clusters(state, fr_cl, params)),
        "bridging_clusters": len(eligible_clusters(state, br_cl, params)),
    }
    if choice is None:
        state.status = Status.Complete
        entry.update(selected_point=None, kind=None, scan_id=None, outcome="complete")
        entry.update(graph_edge_count=len(graph.edges), graph_cycle_rank=graph.cycle_rank, path_length=0.0)
        state.report.append(entry)
        return state

    medoid, kind, cluster = choice
    state.status = Status.FrontierPhase if kind is CandidateKind.Frontier else Status.BridgingPhase
    target = observation_target(scans, cluster, params.approach_margin)
    entry.update(selected_point=[float(medoid[0]), float(medoid[1])], kind=kind.value)
    res = plan(scans, graph, target, params.cost_kind)
    policy = GlobalPolicy(scans, graph, res, policy_kind, control)
    traj = simulate_navigation(policy, state.position, params.dt, params.t_max, params.goal_tol)
    state.trajectory_log.append(traj)
    entry["path_length"] = traj.path_length()
    if len(traj.positions):
        state.position = traj.final_position.copy()
    if not traj.success:
        log.warning("navigation to %s failed (%s); excluding it", tuple(medoid), traj.outcome)
        state.excluded_points.append(medoid.copy())
        entry.update(scan_id=None, outcome=traj.outcome)
    else:
        try:
            scan = take_scan(world, state.position, sensor_cfg, len(scans) + 1)
        except InvalidScanCenter as exc:
            log.warning("cannot scan at %s: %s", tuple(state.position), exc)
            state.excluded_points.append(medoid.copy())
            entry.update(scan_id=None, outcome="invalid_scan_center")
        else:
            scans.append(scan)
            state.graph = build_motion_graph(scans)
            state.visited_observation_points.append(medoid.copy())
            entry.update(scan_id=scan.id, outcome="scanned")
    entry.update(graph_edge_count=len(state.graph.edges), graph_cycle_rank=state.graph.cycle_rank)
    state.report.append(entry)
    return state


def explore(
    world: World,
    start,
    sensor_cfg: SensorConfig = SensorConfig(),
    params: ExploreParams = ExploreParams(),
    control: ControlParams = ControlParams(),
    policy_kind: PolicyKind = PolicyKind.MoveThroughCenter,
    *,
    raise_on_cap: bool = True,
    callback=None,
) -> ExplorationState:
    """Explore from ``start`` until no frontier or bridging position is left."""
    state = start_exploration(world, start, sensor_cfg, control.margin_eps)
    while state.status is not Status.Complete:
        if state.iterations >= params.iteration_cap:
            if raise_on_cap:
                raise IterationCapExceeded(f"not complete after {state.iterations} iterations")
            break
        explore_step(state, world, sensor_cfg, params, control, policy_kind)
        if callback is not None:
            callback(state)
    return state
