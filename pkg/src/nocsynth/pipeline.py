"""End-to-end synthesis: floorplan, cluster, place switches and NIs, route,
and report.

The post-floorplan stages need whitespace; a packing that leaves too little
gets its chip outline inflated by 5% (cores stay put) and the placement
stages run again.  Every stage's output is re-checked against its own
invariants before the next stage consumes it.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

from . import floorplan as floorplan_mod
from . import niflow as niflow_mod
from . import pathalloc as pathalloc_mod
from . import placement as placement_mod
from . import power as power_mod
from .errors import NiInfeasibleError, NoWhitespaceError, SynthesisError
from .floorplan import AnnealResult, Floorplan, inflate_chip
from .model import CoreCommGraph, Partition, SynthesisConfig, validate_ccg
from .niflow import NiPlacement
from .placement import Grid, SwitchPlacement
from .pathalloc import RouteSet, SwitchCommGraph
from .power import PowerModel, SynthesisReport

INFLATE_FACTOR = 1.05
MAX_INFLATIONS = 20


@dataclass
class SynthesisOutcome:
    """Everything one seeded run produced, for reporting and rendering."""

    g: CoreCommGraph
    cfg: SynthesisConfig
    m: int
    anneal: AnnealResult
    floorplan: Floorplan          # final chip outline (possibly inflated)
    grids: list[Grid]
    partition: Partition
    switches: SwitchPlacement
    nis: NiPlacement
    scg: SwitchCommGraph
    routes: RouteSet
    report: SynthesisReport
    inflations: int

    def switch_centers(self) -> dict[int, tuple[float, float]]:
        return {k: self.switches.center(self.grids, k) for k in range(self.m)}

    def ni_centers(self) -> dict[int, tuple[float, float]]:
        return {c: self.nis.center(self.grids, c) for c in range(self.g.n)}


def _check_grids(fp: Floorplan, grids: list[Grid]) -> None:
    free_area = sum(gr.rect.area for gr in grids)
    expect = fp.area - fp.core_area()
    if expect > 0 and abs(free_area - expect) > 1e-9 * max(expect, 1.0):
        raise SynthesisError(f"grid area {free_area} != whitespace {expect}")
    for i, a in enumerate(grids):
        for r in fp.placements:
            if a.rect.overlaps(r, eps=1e-9):
                raise SynthesisError(f"grid {a.id} overlaps a core")
        for b in grids[i + 1 :]:
            if a.rect.overlaps(b.rect, eps=1e-9):
                raise SynthesisError(f"grids {a.id} and {b.id} overlap")


def _check_switches(sw: SwitchPlacement, grids: list[Grid], m: int) -> None:
    if sorted(sw.grid_of) != list(range(m)):
        raise SynthesisError("not every cluster got a switch")
    gids = list(sw.grid_of.values())
    if len(set(gids)) != len(gids):
        raise SynthesisError("two switches share a grid")
    by_id = {gr.id: gr for gr in grids}
    for k, gid in sw.grid_of.items():
        if by_id[gid].occupied_by != ("switch", k):
            raise SynthesisError(f"grid {gid} not marked for switch {k}")


def _check_nis(nis: NiPlacement, n: int) -> None:
    if sorted(nis.grid_of) != list(range(n)):
        raise SynthesisError("not every core got an NI")
    gids = list(nis.grid_of.values())
    if len(set(gids)) != len(gids):
        raise SynthesisError("two NIs share a grid")


def _check_routes(routes: RouteSet, g: CoreCommGraph, part: Partition) -> None:
    for s, d, _ in g.edges:
        seq = routes.routes.get((s, d))
        if not seq:
            raise SynthesisError(f"flow ({s},{d}) unrouted")
        if seq[0] != part.assign[s] or seq[-1] != part.assign[d]:
            raise SynthesisError(f"route for ({s},{d}) has wrong endpoints")
        for u, v in zip(seq, seq[1:]):
            if (min(u, v), max(u, v)) not in routes.edge_load:
                raise SynthesisError(f"route for ({s},{d}) uses unopened link {u}-{v}")


def synthesize(
    g: CoreCommGraph,
    cfg: SynthesisConfig,
    power_model: PowerModel | None = None,
) -> SynthesisOutcome:
    """Run the whole two-phase flow for one seed."""
    start = time.perf_counter()
    validate_ccg(g)
    pm = power_model or PowerModel()
    m = min(cfg.m, g.n)  # degenerate inputs get fewer clusters than asked

    result = floorplan_mod.anneal(g, cfg, m=m)
    part = result.partition
    part.validate(cfg.balance_slack)
    fp = result.floorplan.check()

    min_side = min(min(c.width, c.height) for c in g.cores)
    l0 = cfg.l if cfg.l is not None else min_side

    grids: list[Grid] = []
    switches: SwitchPlacement | None = None
    nis: NiPlacement | None = None
    inflations = 0
    last_err: SynthesisError | None = None
    for _ in range(MAX_INFLATIONS + 1):
        try:
            grids = placement_mod.extract_grids(fp)
            grids = placement_mod.ensure_grid_capacity(grids, m + g.n)
            _check_grids(fp, grids)
            switches = placement_mod.insert_switches(fp, grids, g, part)
            _check_switches(switches, grids, m)
            nis = niflow_mod.assign_nis(
                fp, part, grids, switches, l0, max_doublings=cfg.ni_l_doublings
            )
            _check_nis(nis, g.n)
            break
        except (NoWhitespaceError, NiInfeasibleError) as err:
            last_err = err
            fp = inflate_chip(fp, INFLATE_FACTOR)
            inflations += 1
    else:
        raise NiInfeasibleError(
            f"placement still infeasible after {MAX_INFLATIONS} chip inflations"
            f" ({last_err.message if last_err else 'unknown'})"
        )
    assert switches is not None and nis is not None

    scg = pathalloc_mod.build_scg(g, part)
    sw_centers = {k: switches.center(grids, k) for k in range(m)}
    routes = pathalloc_mod.allocate_paths(scg, g, part, sw_centers, pm)
    _check_routes(routes, g, part)

    ni_centers = {c: nis.center(grids, c) for c in range(g.n)}
    runtime = time.perf_counter() - start
    report = power_mod.evaluate(
        fp,
        part,
        routes,
        ni_centers,
        sw_centers,
        g,
        pm,
        runtime_s=runtime,
        seed=cfg.seed,
        mode=cfg.mode,
    )
    return SynthesisOutcome(
        g=g,
        cfg=cfg,
        m=m,
        anneal=result,
        floorplan=fp,
        grids=grids,
        partition=part,
        switches=switches,
        nis=nis,
        scg=scg,
        routes=routes,
        report=report,
        inflations=inflations,
    )
