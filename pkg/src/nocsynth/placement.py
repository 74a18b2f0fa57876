"""Whitespace grids and switch insertion.

Dead space is carved into rectangular grids by slicing the chip at every
core x-boundary and stacking the free y-intervals of each slab.  Each grid
can host exactly one network component.  Switches are then placed one per
cluster, heaviest cross-traffic first, into the free grid that minimizes the
demand-weighted distance to the endpoints of that cluster's cut edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import NoWhitespaceError
from .model import (
    CoreCommGraph,
    Partition,
    Rect,
    cluster_bounding_box,
    manhattan,
)
from .floorplan import Floorplan

Occupant = tuple[str, int]  # ("switch", cluster) or ("ni", core)


@dataclass
class Grid:
    """One whitespace cell; holds at most one switch or network interface."""

    id: int
    rect: Rect
    occupied_by: Occupant | None = None

    @property
    def center(self) -> tuple[float, float]:
        return self.rect.center

    @property
    def free(self) -> bool:
        return self.occupied_by is None


def extract_grids(fp: Floorplan) -> list[Grid]:
    """Decompose whitespace into grids; their areas tile it exactly.

    Slabs come from sorted distinct core/chip x-boundaries; inside a slab the
    free y-intervals are the complement of the covering cores, so vertically
    adjacent free cells are already merged.
    """
    chip = fp.chip
    xs = {chip.x, chip.x2}
    for r in fp.placements:
        xs.add(r.x)
        xs.add(r.x2)
    cuts = sorted(xs)
    grids: list[Grid] = []
    next_id = 0
    for x1, x2 in zip(cuts, cuts[1:]):
        if x2 <= x1:
            continue
        # Cores overlapping the slab span it fully (cuts include all edges).
        covered = sorted(
            (r.y, r.y2) for r in fp.placements if r.x <= x1 and r.x2 >= x2
        )
        cursor = chip.y
        for y1, y2 in covered:
            if y1 > cursor:
                grids.append(Grid(next_id, Rect(x1, cursor, x2 - x1, y1 - cursor)))
                next_id += 1
            cursor = max(cursor, y2)
        if chip.y2 > cursor:
            grids.append(Grid(next_id, Rect(x1, cursor, x2 - x1, chip.y2 - cursor)))
            next_id += 1
    if not grids:
        raise NoWhitespaceError("floorplan has no whitespace")
    return grids


def ensure_grid_capacity(grids: list[Grid], need: int) -> list[Grid]:
    """Split the largest cells in half until at least ``need`` cells exist.

    The plain decomposition yields one tall cell per whitespace column, so a
    packing with few distinct core x-edges can have fewer cells than the
    components that must live in them (one grid hosts at most one).  Halving
    w or h is exact in binary floating point, so the area identity survives.
    """
    if len(grids) >= need:
        return grids
    cells = [gr.rect for gr in grids]
    while len(cells) < need:
        idx = max(range(len(cells)), key=lambda i: (cells[i].area, -i))
        r = cells.pop(idx)
        if r.w >= r.h:
            half = r.w / 2.0
            cells.append(Rect(r.x, r.y, half, r.h))
            cells.append(Rect(r.x + half, r.y, r.w - half, r.h))
        else:
            half = r.h / 2.0
            cells.append(Rect(r.x, r.y, r.w, half))
            cells.append(Rect(r.x, r.y + half, r.w, r.h - half))
    cells.sort(key=lambda r: (r.x, r.y))
    return [Grid(i, r) for i, r in enumerate(cells)]


def switch_flow(g: CoreCommGraph, part: Partition, k: int) -> float:
    """Total demand crossing cluster k's boundary, both directions."""
    total = 0.0
    for s, d, w in g.edges:
        if (part.assign[s] == k) != (part.assign[d] == k):
            total += w
    return total


def cross_edges(g: CoreCommGraph, part: Partition, k: int) -> list[tuple[int, int, float]]:
    """Directed demand edges with exactly one endpoint in cluster k.

    Both orientations are included: traffic into the cluster loads its switch
    just like traffic out of it.
    """
    return [
        (s, d, w)
        for s, d, w in g.edges
        if (part.assign[s] == k) != (part.assign[d] == k)
    ]


def insertion_cost(
    grid: Grid, edges: list[tuple[int, int, float]], centers: list[tuple[float, float]]
) -> float:
    """Demand-weighted sum of grid-to-endpoint Manhattan distances."""
    gc = grid.center
    return sum(
        w * (manhattan(gc, centers[s]) + manhattan(gc, centers[d]))
        for s, d, w in edges
    )


@dataclass(frozen=True)
class SwitchDecision:
    """Record of one insertion, kept so choices can be re-audited later."""

    cluster: int
    grid_id: int
    cost: float
    candidate_ids: tuple[int, ...]  # free grids considered, this one included
    fallback: bool                  # True when no free grid center was in B_k


@dataclass
class SwitchPlacement:
    """Chosen grid per cluster plus each cluster's boundary-crossing demand."""

    grid_of: dict[int, int]
    flow: dict[int, float]
    decisions: list[SwitchDecision] = field(default_factory=list)

    def center(self, grids: list[Grid], k: int) -> tuple[float, float]:
        gid = self.grid_of[k]
        return next(gr for gr in grids if gr.id == gid).center


def insert_switches(
    fp: Floorplan, grids: list[Grid], g: CoreCommGraph, part: Partition
) -> SwitchPlacement:
    """Place one switch per cluster into the whitespace grids.

    Clusters go in decreasing boundary-demand order (ties: lower index).
    Candidates are the free grids whose center falls in the cluster bounding
    box; if there are none the search widens to every free grid.
    """
    centers = fp.centers()
    flows = {k: switch_flow(g, part, k) for k in range(part.m)}
    order = sorted(range(part.m), key=lambda k: (-flows[k], k))
    by_id = {gr.id: gr for gr in grids}
    placement = SwitchPlacement({}, flows)
    for k in order:
        bbox = cluster_bounding_box(fp, part, k)
        free = [gr for gr in grids if gr.free]
        if not free:
            raise NoWhitespaceError(
                f"no free grid left for switch {k} ({len(grids)} grids total)"
            )
        candidates = [gr for gr in free if bbox.contains_point(*gr.center)]
        fallback = not candidates
        if fallback:
            candidates = free
        edges = cross_edges(g, part, k)
        best = min(candidates, key=lambda gr: (insertion_cost(gr, edges, centers), gr.id))
        cost = insertion_cost(best, edges, centers)
        by_id[best.id].occupied_by = ("switch", k)
        placement.grid_of[k] = best.id
        placement.decisions.append(
            SwitchDecision(k, best.id, cost, tuple(gr.id for gr in candidates), fallback)
        )
    return placement
