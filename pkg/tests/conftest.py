import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from scannav.geometry import Scan  # noqa: E402
from scannav.graph import ScanCollection, build_motion_graph  # noqa: E402
from scannav.sensor import SensorConfig, World, take_scan  # noqa: E402
from scannav.worlds import OFFICE_SCAN_CENTERS, office_world, rectangle  # noqa: E402

R = 0.25

L_ROOM = np.array([(0, 0), (4, 0), (4, 1.5), (1.5, 1.5), (1.5, 4), (0, 4)], float)


def make_diamond(robot_radius=R) -> Scan:
    pts = [(1, 0), (0, 1), (-1, 0), (0, -1), (1, 0)]
    return Scan(1, (0.0, 0.0), pts, 3.0, robot_radius)


def make_disk(n=360, radius=2.0, center=(0.0, 0.0), id=1) -> Scan:
    th = 2 * math.pi * np.arange(n) / n
    c = np.asarray(center, float)
    pts = c + radius * np.column_stack((np.cos(th), np.sin(th)))
    return Scan(id, c, np.vstack((pts, pts[:1])), radius, R)


@pytest.fixture
def diamond():
    return make_diamond()


@pytest.fixture
def disk():
    return make_disk()


@pytest.fixture(scope="session")
def l_world():
    return World(L_ROOM)


@pytest.fixture(scope="session")
def l_scan(l_world):
    """Non-convex scan: both arms of an L-shaped room seen from the corner."""
    return take_scan(l_world, (0.75, 0.75), SensorConfig(720, 3.0))


@pytest.fixture(scope="session")
def room_world():
    return World(rectangle(-1, -1, 1, 1))


@pytest.fixture(scope="session")
def office():
    return office_world()


@pytest.fixture(scope="session")
def office_scans(office):
    scans = [take_scan(office, c, SensorConfig(), k + 1) for k, c in enumerate(OFFICE_SCAN_CENTERS)]
    return ScanCollection(scans)


@pytest.fixture(scope="session")
def office_graph(office_scans):
    return build_motion_graph(office_scans)


@pytest.fixture(scope="session")
def chain():
    """Three scans in a corridor world: 1-2-3 linked in a row, plus scan 4
    in a sealed side room. The goal (9.5, 1) lies in scan 3 only."""
    ws = rectangle(0, 0, 14, 2)
    wall = rectangle(11.9, 0, 12.1, 2)
    world = World(ws, (wall,), R)
    cfg = SensorConfig(720, 3.0)
    centers = [(2.5, 1.0), (5.0, 1.0), (7.5, 1.0), (13.0, 1.0)]
    scans = ScanCollection([take_scan(world, c, cfg, k + 1) for k, c in enumerate(centers)])
    return world, scans, build_motion_graph(scans), np.array([9.5, 1.0])


def sample_in_safepoly(scan, r, n, rng, max_tries=200):
    """``n`` uniform points of the box around the scan accepted by
    ``safepoly_contains(scan, ., r)``."""
    from scannav.geometry import safepoly_contains_many

    lo = scan.points.min(axis=0)
    hi = scan.points.max(axis=0)
    out = []
    for _ in range(max_tries):
        q = rng.uniform(lo, hi, size=(4 * n, 2))
        out.extend(q[safepoly_contains_many(scan, q, r)])
        if len(out) >= n:
            return np.array(out[:n])
    raise RuntimeError("safe polygon too small to sample")


def random_scan_set(world, rng, m, spread=2.5, cfg=None):
    """``m`` scans at random free positions within ``spread`` of a random
    anchor, plus a goal drawn from one scan's safer polygon."""
    from scannav.sensor import free_space_contains

    cfg = cfg or SensorConfig()
    lo = world.workspace.min(axis=0)
    hi = world.workspace.max(axis=0)
    while True:
        anchor = rng.uniform(lo, hi)
        if free_space_contains(world, anchor):
            break
    centers = []
    while len(centers) < m:
        q = anchor + rng.uniform(-spread, spread, 2)
        if free_space_contains(world, q) and world.clearance(q)[0] > R + 0.02:
            centers.append(q)
    scans = ScanCollection([take_scan(world, c, cfg, k + 1) for k, c in enumerate(centers)])
    k = int(rng.integers(m))
    goal = sample_in_safepoly(scans[k], scans.safer_inflation + 1e-6, 1, rng)[0]
    return scans, build_motion_graph(scans), goal


@dataclass
class ExploreRun:
    world: object
    state: object
    params: object
    seconds: float


def _run_explore(world, start, cfg, params):
    from scannav.explore import explore

    t0 = time.perf_counter()
    state = explore(world, start, cfg, params)
    return ExploreRun(world, state, params, time.perf_counter() - t0)


@pytest.fixture(scope="session")
def room_run():
    """4 m x 4 m empty room explored from its center with a 2 m sensor."""
    from scannav.explore import ExploreParams
    from scannav.worlds import square_room

    return _run_explore(square_room(4.0, R), (2.0, 2.0), SensorConfig(r_max=2.0), ExploreParams())


@pytest.fixture(scope="session")
def loop_full_run():
    from scannav.explore import ExploreParams
    from scannav.worlds import LOOP_START, loop_world

    return _run_explore(loop_world(R), LOOP_START, SensorConfig(), ExploreParams())


@pytest.fixture(scope="session")
def loop_frontier_run():
    from scannav.explore import ExploreParams
    from scannav.worlds import LOOP_START, loop_world

    return _run_explore(loop_world(R), LOOP_START, SensorConfig(), ExploreParams(frontier_only=True))


#: (criterion number, passed, detail) lines collected by the acceptance suite
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n, ok, detail in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
