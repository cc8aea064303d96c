"""Navigation and exploration over graphs of star-convex lidar scan polygons."""

from scannav.explore import ExploreParams, explore
from scannav.geometry import Scan, safepoly_boundary, safepoly_contains
from scannav.graph import MotionGraph, ScanCollection, build_motion_graph
from scannav.planner import GlobalPolicy, plan, simulate_navigation
from scannav.policy import ControlParams, LocalCostKind, PolicyKind
from scannav.sensor import SensorConfig, World, take_scan

__version__ = "0.1.0"

__all__ = [
    "ControlParams",
    "ExploreParams",
    "GlobalPolicy",
    "LocalCostKind",
    "MotionGraph",
    "PolicyKind",
    "Scan",
    "ScanCollection",
    "SensorConfig",
    "World",
    "build_motion_graph",
    "explore",
    "plan",
    "safepoly_boundary",
    "safepoly_contains",
    "simulate_navigation",
    "take_scan",
]
