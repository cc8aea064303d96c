"""Explore the loop map with and without bridging scans and compare the graphs.

Usage: python demos/explore_loop.py [out_dir]
"""

import sys
from pathlib import Path

from scannav.explore import ExploreParams, explore
from scannav.render import scene_svg
from scannav.sensor import SensorConfig
from scannav.worlds import LOOP_START, loop_world


def main(out="demo_loop"):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    world = loop_world()
    for name, frontier_only in (("frontier_only", True), ("full", False)):
        st = explore(world, LOOP_START, SensorConfig(), ExploreParams(frontier_only=frontier_only))
        g = st.graph
        print(f"{name:>13}: {st.status.value}, {len(st.scans)} scans, {len(g.edges)} edges, cycle rank {g.cycle_rank}")
        paths = [tr.positions for tr in st.trajectory_log]
        (out / f"{name}.svg").write_text(scene_svg(world, st.scans, g, paths, [(LOOP_START, "#1b7837")]))
    print(f"artifacts in {out}/")


if __name__ == "__main__":
    main(*sys.argv[1:])
