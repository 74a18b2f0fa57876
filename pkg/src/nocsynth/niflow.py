"""Network-interface placement by min-cost max-flow.

Each core needs one NI in a free whitespace grid near it.  Candidate grids
are those intersecting the core's rectangle inflated by a margin l; arcs
cost the Manhattan distance from the grid to the core's switch.  Unit
capacities everywhere make the optimal flow an optimal assignment.  If some
margin leaves the instance infeasible, l doubles and the whole network is
rebuilt, up to a configured cap.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .errors import NiInfeasibleError
from .floorplan import Floorplan
from .model import Partition, Rect, manhattan
from .placement import Grid, SwitchPlacement


class MinCostMaxFlow:
    """Successive shortest paths with potentials; costs must be >= 0."""

    def __init__(self, n: int):
        self.n = n
        self.adj: list[list[int]] = [[] for _ in range(n)]
        self.to: list[int] = []
        self.cap: list[int] = []
        self.cost: list[float] = []

    def add_edge(self, u: int, v: int, cap: int, cost: float) -> int:
        """Returns the edge index; the paired reverse edge is index + 1."""
        idx = len(self.to)
        self.adj[u].append(idx)
        self.to.append(v)
        self.cap.append(cap)
        self.cost.append(cost)
        self.adj[v].append(idx + 1)
        self.to.append(u)
        self.cap.append(0)
        self.cost.append(-cost)
        return idx

    def solve(self, s: int, t: int) -> tuple[int, float]:
        """Push augmenting unit flows along cheapest paths until t is cut off."""
        flow = 0
        total = 0.0
        potential = [0.0] * self.n
        while True:
            dist = [math.inf] * self.n
            parent_edge = [-1] * self.n
            dist[s] = 0.0
            pq = [(0.0, s)]
            while pq:
                d, u = heapq.heappop(pq)
                if d > dist[u] + 1e-12:
                    continue
                for idx in self.adj[u]:
                    if self.cap[idx] <= 0:
                        continue
                    v = self.to[idx]
                    # Reduced cost; clamp float dust so Dijkstra stays valid.
                    rc = self.cost[idx] + potential[u] - potential[v]
                    if rc < 0.0:
                        rc = 0.0
                    if d + rc < dist[v] - 1e-12:
                        dist[v] = d + rc
                        parent_edge[v] = idx
                        heapq.heappush(pq, (dist[v], v))
            if math.isinf(dist[t]):
                return flow, total
            for v in range(self.n):
                if not math.isinf(dist[v]):
                    potential[v] += dist[v]
            # Unit capacities on every s-arc: each augmentation moves 1 unit.
            v = t
            while v != s:
                idx = parent_edge[v]
                self.cap[idx] -= 1
                self.cap[idx ^ 1] += 1
                total += self.cost[idx]
                v = self.to[idx ^ 1]
            flow += 1


def candidate_grids(core_rect: Rect, grids: list[Grid], l: float) -> list[int]:
    """Ids of free grids intersecting the core's l-bounding box.

    The box shares the core's center and is wider/taller by 2*l.  Only
    positive-area intersections count, so with l -> 0+ a core surrounded by
    other cores has no candidates.
    """
    box = core_rect.inflate(l)
    return [gr.id for gr in grids if gr.free and gr.rect.overlaps(box)]


@dataclass(frozen=True)
class NiPlacement:
    """Chosen grid per core; injective by construction."""

    grid_of: dict[int, int]
    total_cost: float
    l_used: float

    def center(self, grids: list[Grid], core: int) -> tuple[float, float]:
        gid = self.grid_of[core]
        return next(gr for gr in grids if gr.id == gid).center


def assign_nis(
    fp: Floorplan,
    part: Partition,
    grids: list[Grid],
    switches: SwitchPlacement,
    l: float,
    max_doublings: int = 6,
) -> NiPlacement:
    """Place one NI per core, minimizing total NI-to-switch wire distance."""
    n = len(fp.placements)
    sw_center = {k: switches.center(grids, k) for k in range(part.m)}
    free = [gr for gr in grids if gr.free]
    by_id = {gr.id: gr for gr in grids}

    attempt_l = l
    for _ in range(max_doublings + 1):
        grid_ids = [gr.id for gr in free]
        col = {gid: i for i, gid in enumerate(grid_ids)}
        # Nodes: source, n NI nodes, len(free) grid nodes, sink.
        net = MinCostMaxFlow(2 + n + len(free))
        src, snk = 0, 1 + n + len(free)
        ni_arc: dict[tuple[int, int], int] = {}
        for core in range(n):
            net.add_edge(src, 1 + core, 1, 0.0)
            target = sw_center[part.assign[core]]
            for gid in candidate_grids(fp.placements[core], free, attempt_l):
                fkj = manhattan(by_id[gid].center, target)
                ni_arc[(core, gid)] = net.add_edge(1 + core, 1 + n + col[gid], 1, fkj)
        for gid in grid_ids:
            net.add_edge(1 + n + col[gid], snk, 1, 0.0)
        flow, total = net.solve(src, snk)
        if flow == n:
            grid_of: dict[int, int] = {}
            for (core, gid), idx in ni_arc.items():
                if net.cap[idx] == 0:  # saturated arc = chosen assignment
                    grid_of[core] = gid
            assert len(grid_of) == n
            for core, gid in grid_of.items():
                by_id[gid].occupied_by = ("ni", core)
            return NiPlacement(grid_of, total, attempt_l)
        attempt_l *= 2
    raise NiInfeasibleError(
        f"only {flow} of {n} NIs placeable even with margin {attempt_l / 2}"
    )
