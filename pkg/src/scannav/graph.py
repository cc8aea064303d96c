"""Motion graph over scans, constrained subgraphs and connectivity."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from scannav.geometry import (
    DEFAULT_MARGIN_EPS,
    Scan,
    Segment,
    as_point,
    safe_segment,
    safepoly_contains,
)


class HypothesisViolated(ValueError):
    """Scan centers too far apart for the convex-hull safety check."""


@dataclass
class ScanCollection:
    """Ordered scans with ids 1..m sharing one sensor range and robot radius."""

    scans: list = field(default_factory=list)
    margin_eps: float = DEFAULT_MARGIN_EPS

    def __post_init__(self):
        self.scans = list(self.scans)
        for k, s in enumerate(self.scans, start=1):
            self._check(s, k)

    def _check(self, scan: Scan, expected_id: int):
        if scan.id != expected_id:
            raise ValueError(f"scan id {scan.id} at position {expected_id}")
        if self.scans and self.scans[0] is not scan:
            ref = self.scans[0]
            if scan.r_max != ref.r_max or scan.robot_radius != ref.robot_radius:
                raise ValueError("scans must share r_max and robot radius")

    def append(self, scan: Scan):
        self._check(scan, len(self.scans) + 1)
        self.scans.append(scan)

    def __len__(self):
        return len(self.scans)

    def __iter__(self):
        return iter(self.scans)

    def __getitem__(self, i) -> Scan:
        """Scan by 0-based position."""
        return self.scans[i]

    @property
    def robot_radius(self) -> float:
        return self.scans[0].robot_radius if self.scans else 0.0

    @property
    def safer_inflation(self) -> float:
        return self.robot_radius + self.margin_eps

    @property
    def centers(self) -> np.ndarray:
        if not self.scans:
            return np.zeros((0, 2))
        return np.array([s.center for s in self.scans])


@dataclass(frozen=True)
class MotionGraph:
    """Undirected graph on 0-based scan positions; edges are sorted pairs."""

    vertex_count: int
    edges: frozenset = frozenset()
    weights: dict = field(default_factory=dict, compare=False)
    vertices: tuple | None = None

    def __post_init__(self):
        verts = tuple(range(self.vertex_count)) if self.vertices is None else tuple(sorted(self.vertices))
        object.__setattr__(self, "vertices", verts)
        vs = set(verts)
        for i, j in self.edges:
            if i == j or i not in vs or j not in vs or i > j:
                raise ValueError(f"bad edge {(i, j)}")

    def neighbors(self, i: int) -> list[int]:
        return sorted(b if a == i else a for a, b in self.edges if i in (a, b))

    def adjacency(self) -> dict[int, list[int]]:
        adj = {v: [] for v in self.vertices}
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        for v in adj:
            adj[v].sort()
        return adj

    @property
    def cycle_rank(self) -> int:
        """Independent cycles: |E| - |V| + number of components."""
        return len(self.edges) - len(self.vertices) + len(components(self))


def build_motion_graph(scans: ScanCollection) -> MotionGraph:
    """Edge (i, j) iff each scan center lies in the other's safer polygon."""
    r = scans.safer_inflation
    edges = set()
    weights = {}
    for i, j in combinations(range(len(scans)), 2):
        si, sj = scans[i], scans[j]
        if safepoly_contains(sj, si.center, r) and safepoly_contains(si, sj.center, r):
            edges.add((i, j))
            weights[(i, j)] = float(np.hypot(*(si.center - sj.center)))
    return MotionGraph(len(scans), frozenset(edges), weights)


def embedding_segments(scans: ScanCollection, graph: MotionGraph) -> list[Segment]:
    return [Segment(scans[i].center, scans[j].center) for i, j in sorted(graph.edges)]


def components(graph: MotionGraph, restrict_to=None) -> list[list[int]]:
    verts = graph.vertices if restrict_to is None else sorted(set(restrict_to) & set(graph.vertices))
    allowed = set(verts)
    adj = graph.adjacency()
    seen = set()
    out = []
    for v in verts:
        if v in seen:
            continue
        comp = []
        queue = deque([v])
        seen.add(v)
        while queue:
            u = queue.popleft()
            comp.append(u)
            for w in adj[u]:
                if w in allowed and w not in seen:
                    seen.add(w)
                    queue.append(w)
        out.append(sorted(comp))
    return out


def is_connected(graph: MotionGraph, restrict_to=None) -> bool:
    """Breadth-first reachability; empty and single-vertex sets count as connected."""
    return len(components(graph, restrict_to)) <= 1


def scan_constrained_subgraph(scans: ScanCollection, graph: MotionGraph, probe: Scan) -> MotionGraph:
    """Scans mutually visible with ``probe``, linked by edges that stay inside
    the probe's safer polygon and are seen from the probe center by both ends."""
    r = scans.safer_inflation
    p = probe.center
    verts = [
        i for i in range(len(scans))
        if safepoly_contains(probe, scans[i].center, r) and safepoly_contains(scans[i], p, r)
    ]
    vs = set(verts)
    edges = {}
    for i, j in graph.edges:
        if i not in vs or j not in vs:
            continue
        ci, cj = scans[i].center, scans[j].center
        if (safe_segment(probe, ci, cj, r) and safe_segment(scans[j], p, ci, r)
                and safe_segment(scans[i], p, cj, r)):
            edges[(i, j)] = graph.weights.get((i, j))
    return MotionGraph(len(scans), frozenset(edges), edges, tuple(verts))


def position_constrained_subgraph(scans: ScanCollection, graph: MotionGraph, q) -> MotionGraph:
    r = scans.safer_inflation
    q = as_point(q)
    verts = [i for i in range(len(scans)) if safepoly_contains(scans[i], q, r)]
    vs = set(verts)
    edges = {}
    for i, j in graph.edges:
        if i in vs and j in vs:
            if safe_segment(scans[j], q, scans[i].center, r) and safe_segment(scans[i], q, scans[j].center, r):
                edges[(i, j)] = graph.weights.get((i, j))
    return MotionGraph(len(scans), frozenset(edges), edges, tuple(verts))


def segment_in_safepoly(scan: Scan, a, b, inflation: float) -> bool:
    """Whether [a, b] lies in the safe polygon: both ends seen from the
    center and the segment itself inside the eroded scan polygon."""
    return (
        safepoly_contains(scan, a, inflation)
        and safepoly_contains(scan, b, inflation)
        and safe_segment(scan, a, b, inflation)
    )


def lemma1_checks(scan_i: Scan, scan_j: Scan, scan_k: Scan) -> tuple[bool, bool, bool]:
    """Each pair of centers checked against the safe polygon of the third scan.

    Valid only when the centers are pairwise within ``r_max - R``; then all
    three answers coincide with safety of the triangle of centers.
    """
    R = scan_i.robot_radius
    limit = min(s.r_max for s in (scan_i, scan_j, scan_k)) - R
    ci, cj, ck = scan_i.center, scan_j.center, scan_k.center
    dmax = max(np.hypot(*(ci - cj)), np.hypot(*(ci - ck)), np.hypot(*(cj - ck)))
    if dmax > limit:
        raise HypothesisViolated(f"center spread {dmax:.4f} exceeds r_max - R = {limit:.4f}")
    return (
        segment_in_safepoly(scan_k, ci, cj, R),
        segment_in_safepoly(scan_j, ci, ck, R),
        segment_in_safepoly(scan_i, cj, ck, R),
    )
