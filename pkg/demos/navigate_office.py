"""Plan and drive through the office map from the stored key scans.

Usage: python demos/navigate_office.py [out_dir]
"""

import sys
from pathlib import Path

from scannav import io as sio
from scannav.graph import ScanCollection, build_motion_graph
from scannav.planner import GlobalPolicy, plan, simulate_navigation
from scannav.policy import LocalCostKind
from scannav.render import scene_svg
from scannav.sensor import SensorConfig, take_scan
from scannav.worlds import OFFICE_SCAN_CENTERS, office_world

START, GOAL = (1.0, 1.0), (15.0, 5.0)


def main(out="demo_office"):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    world = office_world()
    scans = ScanCollection([take_scan(world, c, SensorConfig(), k + 1) for k, c in enumerate(OFFICE_SCAN_CENTERS)])
    graph = build_motion_graph(scans)
    print(f"{len(scans)} scans, {len(graph.edges)} edges, cycle rank {graph.cycle_rank}")
    for kind in (LocalCostKind.UniformConstant, LocalCostKind.CentroidalDistance):
        res = plan(scans, graph, GOAL, kind)
        tr = simulate_navigation(GlobalPolicy(scans, graph, res), START)
        print(f"{kind.value:>20}: {tr.outcome}, {tr.t[-1]:.1f} s, {tr.switches()} scan switches")
        (out / f"{kind.value}.svg").write_text(scene_svg(world, scans, graph, [tr.positions], [(START, "#1b7837"), (GOAL, "#d0342c")]))
        (out / f"{kind.value}.csv").write_text(sio.trajectory_csv(tr, scans))
    print(f"artifacts in {out}/")


if __name__ == "__main__":
    main(*sys.argv[1:])
