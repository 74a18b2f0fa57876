"""Inter-switch demand graph and energy-minimal route allocation.

Switches are numbered so that edges only run from lower to higher index;
one edge serves both traffic directions.  For a destination d, a table of
edge/node distances is filled by a single backward sweep (O(|E|)), and when
one edge cost changes the table is repaired by a worklist walk instead of a
fresh solve.  Routes are allocated heaviest demand first while edge costs
track the marginal bit-energy of the growing topology.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass, field

from .errors import NegativeCostError, UnreachableError
from .model import CoreCommGraph, Partition, manhattan

INF = math.inf


class SwitchCommGraph:
    """Index-DAG over switches: edge (i, j) exists only for i < j.

    ``ws`` holds aggregated demands (Mbit/s), ``t`` per-edge connection
    costs (pJ/bit).  Both are keyed by the (i, j) tuple.
    """

    def __init__(
        self,
        m: int,
        t: dict[tuple[int, int], float],
        ws: dict[tuple[int, int], float] | None = None,
    ):
        self.m = m
        for i, j in t:
            if not (0 <= i < j < m):
                raise ValueError(f"edge ({i},{j}) is not lower-to-higher in 0..{m - 1}")
        self.t = dict(t)
        self.ws = {k: v for k, v in (ws or {}).items() if v > 0}
        self.pre: list[list[int]] = [[] for _ in range(m)]
        self.post: list[list[int]] = [[] for _ in range(m)]
        for i, j in sorted(self.t):
            self.post[i].append(j)
            self.pre[j].append(i)

    def edges(self) -> list[tuple[int, int]]:
        return sorted(self.t)

    def set_cost(self, i: int, j: int, value: float) -> None:
        if (i, j) not in self.t:
            raise KeyError(f"no edge ({i},{j})")
        if value < 0:
            raise NegativeCostError(f"edge ({i},{j}) cost would become {value}")
        self.t[(i, j)] = value


def build_scg(g: CoreCommGraph, part: Partition) -> SwitchCommGraph:
    """Aggregate core demands into switch demands.

    Every switch pair is a candidate edge (routes may pass through quiet
    switches); the demand on (i, j) sums both directions of traffic between
    the two clusters.
    """
    m = part.m
    ws: dict[tuple[int, int], float] = {}
    for s, d, w in g.edges:
        ci, cj = part.assign[s], part.assign[d]
        if ci != cj:
            key = (min(ci, cj), max(ci, cj))
            ws[key] = ws.get(key, 0.0) + w
    t = {(i, j): 0.0 for i in range(m) for j in range(i + 1, m)}
    return SwitchCommGraph(m, t, ws)


@dataclass
class PathTable:
    """Distances toward one destination plus successor pointers.

    Invariants (away from the INF sentinel): dis_n[d] == 0, every edge has
    dis_e[(i, j)] == t_ij + dis_n[j], and dis_n[i] is the minimum dis_e over
    i's outgoing edges, achieved at path[i].
    """

    d: int
    dis_n: list[float]
    dis_e: dict[tuple[int, int], float]
    path: list[int | None]

    def route_from(self, i: int) -> list[int]:
        """Follow successor pointers from i to the destination."""
        seq = [i]
        cur = i
        while cur != self.d:
            nxt = self.path[cur]
            if nxt is None:
                raise UnreachableError(f"switch {i} cannot reach {self.d}")
            assert nxt > cur, "route indices must increase"
            seq.append(nxt)
            cur = nxt
        return seq

    def equal_distances(self, other: "PathTable") -> bool:
        return self.d == other.d and self.dis_n == other.dis_n and self.dis_e == other.dis_e

    def check_consistency(self, scg: SwitchCommGraph) -> None:
        assert self.dis_n[self.d] == 0.0
        for (i, j), v in self.dis_e.items():
            expect = scg.t[(i, j)] + self.dis_n[j] if j <= self.d else INF
            assert v == expect or (math.isinf(v) and math.isinf(expect)), (i, j, v, expect)
        for i in range(self.d):
            best = INF
            for j in scg.post[i]:
                best = min(best, self.dis_e[(i, j)])
            if math.isinf(best):
                assert math.isinf(self.dis_n[i]) and self.path[i] is None
            else:
                assert self.dis_n[i] == best
                assert self.dis_e[(i, self.path[i])] == best


def init_solve(scg: SwitchCommGraph, d: int) -> PathTable:
    """Fill the whole table for destination d in one backward index sweep."""
    m = scg.m
    dis_n = [INF] * m
    dis_e = {e: INF for e in scg.t}
    path: list[int | None] = [None] * m
    dis_n[d] = 0.0
    for i in range(d - 1, -1, -1):
        best = INF
        arg = None
        for j in scg.post[i]:
            if j > d:
                continue
            v = scg.t[(i, j)] + dis_n[j]
            dis_e[(i, j)] = v
            if v < best:
                best = v
                arg = j
        dis_n[i] = best
        path[i] = arg
    return PathTable(d, dis_n, dis_e, path)


def decrease_update(table: PathTable, scg: SwitchCommGraph, i: int, j: int, delta_t: float) -> PathTable:
    """Drop t_ij by delta_t and repair the table by forward improvement."""
    if delta_t < 0:
        raise NegativeCostError(f"delta_t must be >= 0, got {delta_t}")
    new_t = scg.t[(i, j)] - delta_t
    if new_t < 0:
        raise NegativeCostError(f"edge ({i},{j}) cost would become {new_t}")
    scg.set_cost(i, j, new_t)
    propagate_decrease(table, scg, i, j)
    return table


def increase_update(table: PathTable, scg: SwitchCommGraph, i: int, j: int, delta_t: float) -> PathTable:
    """Raise t_ij by delta_t and repair the table by re-minimizing."""
    if delta_t < 0:
        raise NegativeCostError(f"delta_t must be >= 0, got {delta_t}")
    scg.set_cost(i, j, scg.t[(i, j)] + delta_t)
    propagate_increase(table, scg, i, j)
    return table


def propagate_decrease(table: PathTable, scg: SwitchCommGraph, i: int, j: int) -> int:
    """Worklist repair after t_ij decreased; returns edges touched."""
    if j > table.d:
        # The edge cannot lie on any route to d; nothing can improve.
        return 0
    touched = 0
    q = deque([(i, j)])
    while q:
        a, b = q.popleft()
        touched += 1
        v = scg.t[(a, b)] + table.dis_n[b]
        table.dis_e[(a, b)] = v
        if v < table.dis_n[a]:
            table.dis_n[a] = v
            table.path[a] = b
            for p in scg.pre[a]:
                q.append((p, a))
    return touched


def propagate_increase(table: PathTable, scg: SwitchCommGraph, i: int, j: int) -> int:
    """Worklist repair after t_ij increased; returns edges touched."""
    if j > table.d:
        return 0
    touched = 0
    q = deque([(i, j)])
    while q:
        a, b = q.popleft()
        touched += 1
        table.dis_e[(a, b)] = scg.t[(a, b)] + table.dis_n[b]
        if table.path[a] == b:
            best = INF
            arg = None
            for k in scg.post[a]:
                if k > table.d:
                    continue
                v = table.dis_n[k] + scg.t[(a, k)]
                if v < best:
                    best = v
                    arg = k
            table.dis_n[a] = best
            table.path[a] = arg
            for p in scg.pre[a]:
                q.append((p, a))
    return touched


def dijkstra_to(scg: SwitchCommGraph, d: int) -> list[float]:
    """Distance from every node to d over the same edges (oracle/baseline)."""
    dist = [INF] * scg.m
    dist[d] = 0.0
    pq = [(0.0, d)]
    while pq:
        dv, v = heapq.heappop(pq)
        if dv > dist[v]:
            continue
        for p in scg.pre[v]:
            nd = dv + scg.t[(p, v)]
            if nd < dist[p]:
                dist[p] = nd
                heapq.heappush(pq, (nd, p))
    return dist


# ---------------------------------------------------------------------------
# Route allocation over the live topology
# ---------------------------------------------------------------------------

@dataclass
class RouteSet:
    """Switch sequences per core flow plus per-edge usage of the topology."""

    routes: dict[tuple[int, int], tuple[int, ...]]          # CCG edge -> switches
    demand_routes: dict[tuple[int, int], tuple[int, ...]]   # SCG pair -> switches
    edge_load: dict[tuple[int, int], float]                 # opened edge -> Mbit/s
    ports: dict[int, int]                                   # switch -> final ports

    def used_edges(self) -> set[tuple[int, int]]:
        return set(self.edge_load)

    def format_routes(self) -> str:
        lines = []
        for (a, b), seq in sorted(self.routes.items()):
            hops = " -> ".join(f"sw{k}" for k in seq)
            lines.append(f"flow {a} {b} : {hops}")
        return "\n".join(lines) + ("\n" if lines else "")


def _marginal_cost(link_e: float, deg_a: int, deg_b: int, switch_energy) -> float:
    sa = switch_energy(max(deg_a, 2))
    sb = switch_energy(max(deg_b, 2))
    return (
        link_e
        + switch_energy(max(deg_a + 1, 2))
        + switch_energy(max(deg_b + 1, 2))
        - sa
        - sb
    )


def _opened_cost(link_e: float, deg_a: int, deg_b: int, switch_energy) -> float:
    return link_e + switch_energy(max(deg_a, 2)) + switch_energy(max(deg_b, 2))


def allocate_paths(
    scg: SwitchCommGraph,
    g: CoreCommGraph,
    part: Partition,
    switch_centers: dict[int, tuple[float, float]],
    power_model,
) -> RouteSet:
    """Route every demand pair, heaviest first, over energy-marginal costs.

    An unopened candidate edge costs its link bit-energy plus the increment
    of adding one port at each end switch; once opened it costs link plus
    the traversal energy of both switches at their current port counts.
    Each opening bumps the end switches' degrees, so incident edge costs are
    refreshed through the incremental table updates.
    """
    m = scg.m
    deg = {k: len(part.cluster(k)) for k in range(m)}  # NI ports to start
    link_e = power_model.link_bit_energy
    switch_e = power_model.switch_bit_energy
    link_of = {
        (i, j): link_e(manhattan(switch_centers[i], switch_centers[j]))
        for (i, j) in scg.edges()
    }
    opened: set[tuple[int, int]] = set()

    for (i, j) in scg.edges():
        scg.set_cost(i, j, _marginal_cost(link_of[(i, j)], deg[i], deg[j], switch_e))

    tables: dict[int, PathTable] = {}

    def table_for(d: int) -> PathTable:
        tbl = tables.get(d)
        if tbl is None:
            tbl = init_solve(scg, d)
            tables[d] = tbl
        return tbl

    def refresh_edge(a: int, b: int) -> None:
        old = scg.t[(a, b)]
        if (a, b) in opened:
            new = _opened_cost(link_of[(a, b)], deg[a], deg[b], switch_e)
        else:
            new = _marginal_cost(link_of[(a, b)], deg[a], deg[b], switch_e)
        if new == old:
            return
        scg.set_cost(a, b, new)
        for tbl in tables.values():
            if new < old:
                propagate_decrease(tbl, scg, a, b)
            else:
                propagate_increase(tbl, scg, a, b)

    demands = sorted(scg.ws.items(), key=lambda kv: (-kv[1], kv[0]))
    demand_routes: dict[tuple[int, int], tuple[int, ...]] = {}
    edge_load: dict[tuple[int, int], float] = {}
    for (i, j), ws in demands:
        tbl = table_for(j)
        if math.isinf(tbl.dis_n[i]):
            raise UnreachableError(f"no route from switch {i} to {j}")
        seq = tuple(tbl.route_from(i))
        demand_routes[(i, j)] = seq
        newly = []
        for u, v in zip(seq, seq[1:]):
            edge_load[(u, v)] = edge_load.get((u, v), 0.0) + ws
            if (u, v) not in opened:
                opened.add((u, v))
                deg[u] += 1
                deg[v] += 1
                newly.append((u, v))
        if newly:
            ends = {k for uv in newly for k in uv}
            for (a, b) in scg.edges():
                if a in ends or b in ends:
                    refresh_edge(a, b)

    routes: dict[tuple[int, int], tuple[int, ...]] = {}
    for s, d, _ in g.edges:
        ci, cj = part.assign[s], part.assign[d]
        if ci == cj:
            routes[(s, d)] = (ci,)
        else:
            seq = demand_routes[(min(ci, cj), max(ci, cj))]
            routes[(s, d)] = seq if ci < cj else tuple(reversed(seq))

    ports = {k: len(part.cluster(k)) for k in range(m)}
    for (u, v) in opened:
        ports[u] += 1
        ports[v] += 1
    return RouteSet(routes, demand_routes, edge_load, ports)
