"""JSON and CSV (de)serialization of worlds, scans, graphs, plans and runs.

Floats go through ``repr`` (the json module's default), so every value
reloads bit-identically.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from scannav.geometry import Scan
from scannav.graph import MotionGraph, ScanCollection
from scannav.planner import PlanResult, Trajectory
from scannav.policy import LocalCostKind
from scannav.sensor import World


class ConfigError(ValueError):
    """Unreadable or malformed input file."""


def _xy(p) -> list[float]:
    return [float(p[0]), float(p[1])]


def dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=False, allow_nan=False) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps(obj))


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc


# ---------------------------------------------------------------- world

def world_to_json(world: World) -> dict:
    return {
        "workspace": [_xy(p) for p in world.workspace],
        "obstacles": [[_xy(p) for p in o] for o in world.obstacles],
        "robot_radius": world.robot_radius,
    }


def world_from_json(doc) -> World:
    try:
        return World(
            np.asarray(doc["workspace"], dtype=float),
            tuple(np.asarray(o, dtype=float) for o in doc.get("obstacles", [])),
            float(doc["robot_radius"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad world document: {exc}") from exc


def load_world(path) -> World:
    return world_from_json(read_json(path))


# ---------------------------------------------------------------- scans

def scans_to_json(scans: ScanCollection) -> dict:
    return {
        "margin_eps": scans.margin_eps,
        "scans": [
            {
                "id": s.id,
                "center": _xy(s.center),
                "r_max": s.r_max,
                "robot_radius": s.robot_radius,
                "points": [_xy(p) for p in s.points],
            }
            for s in scans
        ],
    }


def scans_from_json(doc) -> ScanCollection:
    try:
        scans = [
            Scan(int(d["id"]), np.asarray(d["center"], dtype=float), np.asarray(d["points"], dtype=float),
                 float(d["r_max"]), float(d.get("robot_radius", 0.0)))
            for d in doc["scans"]
        ]
        return ScanCollection(scans, float(doc["margin_eps"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad scan set document: {exc}") from exc


# ---------------------------------------------------------------- graph

def graph_to_json(scans: ScanCollection, graph: MotionGraph) -> dict:
    return {
        "vertices": [{"id": scans[i].id, "center": _xy(scans[i].center)} for i in graph.vertices],
        "edges": [
            {"i": scans[i].id, "j": scans[j].id, "weight": graph.weights[(i, j)]}
            for i, j in sorted(graph.edges)
        ],
    }


def graph_from_json(doc) -> MotionGraph:
    try:
        verts = [int(v["id"]) - 1 for v in doc["vertices"]]
        weights = {(int(e["i"]) - 1, int(e["j"]) - 1): float(e["weight"]) for e in doc["edges"]}
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad graph document: {exc}") from exc
    return MotionGraph(len(verts), frozenset(weights), weights)


# ---------------------------------------------------------------- plan

def plan_to_json(scans: ScanCollection, result: PlanResult) -> dict:
    """``scans`` maps scan id to its cost (null when unreachable) and local goal."""
    return {
        "goal": _xy(result.goal),
        "cost_kind": result.cost_kind.value,
        "scans": {
            str(s.id): {
                "cost": float(result.scancost[k]) if math.isfinite(result.scancost[k]) else None,
                "goal": _xy(result.scangoal[k]),
            }
            for k, s in enumerate(scans)
        },
    }


def plan_from_json(doc) -> PlanResult:
    try:
        entries = sorted(doc["scans"].items(), key=lambda kv: int(kv[0]))
        cost = np.array([np.inf if e["cost"] is None else float(e["cost"]) for _, e in entries])
        goals = np.array([e["goal"] for _, e in entries], dtype=float).reshape(-1, 2)
        return PlanResult(np.asarray(doc["goal"], dtype=float), cost, goals, LocalCostKind(doc["cost_kind"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad plan document: {exc}") from exc


# ---------------------------------------------------------------- CSV

def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def trajectory_csv(traj: Trajectory, scans: ScanCollection) -> str:
    rows = (
        [repr(float(t)), repr(float(p[0])), repr(float(p[1])), repr(float(v[0])), repr(float(v[1])),
         scans[a].id, repr(float(c))]
        for t, p, v, a, c in zip(traj.t, traj.positions, traj.velocities, traj.active, traj.navcost)
    )
    return _csv(["t", "x", "y", "vx", "vy", "active_scan", "navcost"], rows)


def field_csv(samples) -> str:
    """``samples``: iterable of (x, y, vx, vy, scan_id)."""
    rows = ([repr(float(x)), repr(float(y)), repr(float(vx)), repr(float(vy)), sid] for x, y, vx, vy, sid in samples)
    return _csv(["x", "y", "vx", "vy", "active_scan"], rows)
