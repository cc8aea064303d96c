"""Command line entry point: ``scannav navigate|explore|field --config run.json``.

Config file (JSON), paths relative to the config file::

    {
      "world": "world.json",            # or an inline world object
      "sensor": {"num_rays": 1081, "r_max": 3.0},
      "control": {"gain": 1.8, "max_speed": 0.5, "margin_eps": 0.001},
      "explore": {"frontier_eps": 0.05, "frontier_delta": 0.5, ...},
      "cost_kind": "CentroidalDistance",
      "policy_kind": "MoveThroughCenter",
      "dt": 0.0333, "t_max": 300.0, "goal_tol": 0.02, "seed": 0,
      "start": [x, y], "goal": [x, y],
      "scan_centers": [[x, y], ...],    # or "scans": "scans.json"
      "grid_step": 0.2
    }
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from scannav import io as sio
from scannav.explore import ExploreParams, Status, explore, start_exploration
from scannav.geometry import as_point
from scannav.graph import ScanCollection, build_motion_graph
from scannav.planner import (
    DEFAULT_DT,
    DEFAULT_GOAL_TOL,
    DEFAULT_T_MAX,
    GlobalPolicy,
    GoalUnreachable,
    NoActiveScan,
    evaluate_policy,
    plan,
    simulate_navigation,
)
from scannav.policy import ControlParams, LocalCostKind, PolicyKind
from scannav.render import field_svg, scene_svg
from scannav.sensor import InvalidScanCenter, SensorConfig, World, take_scan

log = logging.getLogger("scannav")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_PLANNER = 2
EXIT_TIMEOUT = 3
EXIT_CAP = 4


@dataclass
class RunConfig:
    world: World
    sensor: SensorConfig = field(default_factory=SensorConfig)
    control: ControlParams = field(default_factory=ControlParams)
    explore: ExploreParams = field(default_factory=ExploreParams)
    cost_kind: LocalCostKind = LocalCostKind.CentroidalDistance
    policy_kind: PolicyKind = PolicyKind.MoveThroughCenter
    seed: int = 0
    dt: float = DEFAULT_DT
    t_max: float = DEFAULT_T_MAX
    goal_tol: float = DEFAULT_GOAL_TOL
    start: np.ndarray | None = None
    goal: np.ndarray | None = None
    scan_centers: list | None = None
    scans_path: Path | None = None
    grid_step: float = 0.2


def _sub(cls, doc):
    names = {f.name for f in fields(cls)}
    unknown = set(doc) - names
    if unknown:
        raise sio.ConfigError(f"unknown {cls.__name__} keys: {sorted(unknown)}")
    return cls(**doc)


def load_config(path) -> RunConfig:
    path = Path(path)
    doc = sio.read_json(path)
    base = path.parent
    try:
        w = doc["world"]
        world = sio.load_world(base / w) if isinstance(w, str) else sio.world_from_json(w)
        cost_kind = LocalCostKind(doc.get("cost_kind", "CentroidalDistance"))
        explore_doc = dict(doc.get("explore", {}))
        explore_doc.setdefault("cost_kind", cost_kind.value)
        explore_doc["cost_kind"] = LocalCostKind(explore_doc["cost_kind"])
        cfg = RunConfig(
            world=world,
            sensor=_sub(SensorConfig, doc.get("sensor", {})),
            control=_sub(ControlParams, doc.get("control", {})),
            explore=_sub(ExploreParams, explore_doc),
            cost_kind=cost_kind,
            policy_kind=PolicyKind(doc.get("policy_kind", "MoveThroughCenter")),
            seed=int(doc.get("seed", 0)),
            dt=float(doc.get("dt", DEFAULT_DT)),
            t_max=float(doc.get("t_max", DEFAULT_T_MAX)),
            goal_tol=float(doc.get("goal_tol", DEFAULT_GOAL_TOL)),
            start=as_point(doc["start"]) if "start" in doc else None,
            goal=as_point(doc["goal"]) if "goal" in doc else None,
            scan_centers=[as_point(c) for c in doc["scan_centers"]] if "scan_centers" in doc else None,
            scans_path=base / doc["scans"] if "scans" in doc else None,
            grid_step=float(doc.get("grid_step", 0.2)),
        )
    except sio.ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise sio.ConfigError(f"bad config {path}: {exc!r}") from exc
    if cfg.sensor.r_max <= cfg.world.robot_radius:
        raise sio.ConfigError("sensor r_max must exceed the robot radius")
    if not (cfg.dt > 0 and cfg.t_max > 0 and cfg.goal_tol > 0 and cfg.grid_step > 0):
        raise sio.ConfigError("dt, t_max, goal_tol and grid_step must be positive")
    return cfg


def collect_scans(cfg: RunConfig) -> ScanCollection:
    """Scan set from a saved file, or fresh scans at the configured centers."""
    if cfg.scans_path is not None:
        return sio.scans_from_json(sio.read_json(cfg.scans_path))
    if not cfg.scan_centers:
        raise sio.ConfigError("config needs 'scan_centers' or 'scans'")
    try:
        scans = [take_scan(cfg.world, c, cfg.sensor, k + 1) for k, c in enumerate(cfg.scan_centers)]
    except InvalidScanCenter as exc:
        raise sio.ConfigError(str(exc)) from exc
    return ScanCollection(scans, cfg.control.margin_eps)


def cmd_navigate(cfg: RunConfig, out: Path) -> int:
    if cfg.start is None or cfg.goal is None:
        raise sio.ConfigError("navigate needs 'start' and 'goal'")
    scans = collect_scans(cfg)
    graph = build_motion_graph(scans)
    sio.write_json(out / "scans.json", sio.scans_to_json(scans))
    sio.write_json(out / "graph.json", sio.graph_to_json(scans, graph))
    try:
        result = plan(scans, graph, cfg.goal, cfg.cost_kind)
    except GoalUnreachable as exc:
        log.error("%s", exc)
        return EXIT_PLANNER
    sio.write_json(out / "plan.json", sio.plan_to_json(scans, result))
    policy = GlobalPolicy(scans, graph, result, cfg.policy_kind, cfg.control)
    traj = simulate_navigation(policy, cfg.start, cfg.dt, cfg.t_max, cfg.goal_tol)
    (out / "trajectory.csv").write_text(sio.trajectory_csv(traj, scans))
    marks = [(cfg.start, "#2a9d3a"), (cfg.goal, "#d0342c")]
    (out / "navigate.svg").write_text(scene_svg(cfg.world, scans, graph, [traj.positions], marks))
    log.info("navigate: %s after %d steps", traj.outcome, traj.steps)
    if traj.outcome == "success":
        return EXIT_OK
    if traj.outcome == "no_active_scan":
        return EXIT_PLANNER
    return EXIT_TIMEOUT


def cmd_explore(cfg: RunConfig, out: Path, frontier_only: bool = False) -> int:
    if cfg.start is None:
        raise sio.ConfigError("explore needs 'start'")
    params = cfg.explore
    if frontier_only:
        params = replace(params, frontier_only=True)
    frames = out / "frames"
    frames.mkdir(parents=True, exist_ok=True)

    def dump(state):
        k = state.iterations
        paths = [t.positions for t in state.trajectory_log]
        svg = scene_svg(cfg.world, state.scans, state.graph, paths, [(state.position, "#d0342c")])
        (frames / f"step_{k:03d}.svg").write_text(svg)

    try:
        start_exploration(cfg.world, cfg.start, cfg.sensor, cfg.control.margin_eps)
    except InvalidScanCenter as exc:
        raise sio.ConfigError(str(exc)) from exc
    state = explore(cfg.world, cfg.start, cfg.sensor, params, cfg.control, cfg.policy_kind,
                    raise_on_cap=False, callback=dump)
    sio.write_json(out / "scans.json", sio.scans_to_json(state.scans))
    sio.write_json(out / "graph.json", sio.graph_to_json(state.scans, state.graph))
    sio.write_json(out / "report.json", {
        "status": state.status.value,
        "frontier_only": params.frontier_only,
        "scan_count": len(state.scans),
        "steps": state.report,
    })
    log.info("explore: %s with %d scans, cycle rank %d", state.status.value, len(state.scans), state.graph.cycle_rank)
    return EXIT_OK if state.status is Status.Complete else EXIT_CAP


def rasterize_field(policy: GlobalPolicy, bounds, step: float):
    """Global velocity at grid points covered by a finite-cost safe polygon."""
    x0, y0, x1, y1 = bounds
    xs = np.arange(x0, x1 + 1e-9, step)
    ys = np.arange(y0, y1 + 1e-9, step)
    out = []
    for y in ys:
        for x in xs:
            try:
                v, i, _ = evaluate_policy(policy, np.array([x, y]))
            except NoActiveScan:
                continue
            out.append((float(x), float(y), float(v[0]), float(v[1]), policy.scans[i].id))
    return out


def cmd_field(cfg: RunConfig, out: Path) -> int:
    if cfg.goal is None:
        raise sio.ConfigError("field needs 'goal'")
    scans = collect_scans(cfg)
    graph = build_motion_graph(scans)
    try:
        result = plan(scans, graph, cfg.goal, cfg.cost_kind)
    except GoalUnreachable as exc:
        raise sio.ConfigError(str(exc)) from exc
    policy = GlobalPolicy(scans, graph, result, cfg.policy_kind, cfg.control)
    lo = cfg.world.workspace.min(axis=0)
    hi = cfg.world.workspace.max(axis=0)
    samples = rasterize_field(policy, (lo[0], lo[1], hi[0], hi[1]), cfg.grid_step)
    (out / "field.csv").write_text(sio.field_csv(samples))
    (out / "field.svg").write_text(field_svg(cfg.world, scans, samples, cfg.goal))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="scannav", description="Navigation and exploration over lidar scan polygons.")
    p.add_argument("command", choices=["navigate", "explore", "field"])
    p.add_argument("--config", required=True, help="run configuration JSON")
    p.add_argument("--out", default="out", help="artifact directory (default: ./out)")
    p.add_argument("--frontier-only", action="store_true", help="explore without bridging scans")
    p.add_argument("--start", nargs=2, type=float, metavar=("X", "Y"))
    p.add_argument("--goal", nargs=2, type=float, metavar=("X", "Y"))
    p.add_argument("--grid-step", type=float)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
        if args.start is not None:
            cfg.start = as_point(args.start)
        if args.goal is not None:
            cfg.goal = as_point(args.goal)
        if args.grid_step is not None:
            cfg.grid_step = args.grid_step
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "navigate":
            return cmd_navigate(cfg, out)
        if args.command == "explore":
            return cmd_explore(cfg, out, args.frontier_only)
        return cmd_field(cfg, out)
    except sio.ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
