"""Experiment drivers.

Incremental-update benchmark: generates a random index-DAG with integer
edge costs and a set of random flows, then applies random single-edge cost
changes.  Each change is applied to per-destination tables with the worklist
updates, and independently re-solved from scratch with Dijkstra (the
baseline).  The tables are checked for exact equality against a fresh solve
after every change.

Mode comparison sweep: runs full synthesis over a benchmark list in both
partitioning modes across seeds and collects per-cell power medians.
"""

from __future__ import annotations

import random
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import pathalloc
from .model import MODE_PBF, MODE_PDF, SynthesisConfig, read_ccg
from .pathalloc import PathTable, SwitchCommGraph


def random_index_dag(
    nodes: int, edges: int, rng: random.Random, max_cost: int = 100
) -> SwitchCommGraph:
    """Random DAG on 0..nodes-1 with ``edges`` distinct (i<j) edges."""
    all_pairs = [(i, j) for i in range(nodes) for j in range(i + 1, nodes)]
    chosen = rng.sample(all_pairs, min(edges, len(all_pairs)))
    t = {e: float(rng.randint(0, max_cost)) for e in chosen}
    return SwitchCommGraph(nodes, t)


def random_flows(scg: SwitchCommGraph, count: int, rng: random.Random) -> list[tuple[int, int]]:
    pairs = [(i, j) for i in range(scg.m) for j in range(i + 1, scg.m)]
    return rng.sample(pairs, min(count, len(pairs)))


@dataclass
class UpdateBenchResult:
    nodes: int
    n_edges: int
    n_flows: int
    n_destinations: int
    updates: int
    dsp_time_s: float
    incremental_time_s: float
    equal_after_every_update: bool
    incremental_edges_touched: int
    dsp_edges_scanned: int

    @property
    def reduction_pct(self) -> float | None:
        """Runtime saved by incremental maintenance, or None if unmeasured."""
        if self.updates == 0 or self.dsp_time_s <= 0:
            return None
        return 100.0 * (1.0 - self.incremental_time_s / self.dsp_time_s)

    def format_text(self) -> str:
        red = self.reduction_pct
        return (
            f"nodes={self.nodes} edges={self.n_edges} flows={self.n_flows} "
            f"destinations={self.n_destinations} updates={self.updates}\n"
            f"dijkstra re-solve : {self.dsp_time_s:.4f} s "
            f"({self.dsp_edges_scanned} edge scans)\n"
            f"incremental       : {self.incremental_time_s:.4f} s "
            f"({self.incremental_edges_touched} edge touches)\n"
            f"reduction         : "
            + (f"{red:.1f}%" if red is not None else "n/a")
            + "\n"
            f"tables equal      : {self.equal_after_every_update}\n"
        )


def bench_updates(
    nodes: int,
    flows: int,
    updates: int,
    seed: int = 1,
    edges: int | None = None,
) -> UpdateBenchResult:
    """Run the update experiment; returns timings and the equality verdict."""
    if nodes < 2:
        raise ValueError("need at least 2 nodes")
    rng = random.Random(seed)
    n_edges = edges if edges is not None else min(3 * nodes, nodes * (nodes - 1) // 2)
    scg = random_index_dag(nodes, n_edges, rng)
    flow_pairs = random_flows(scg, flows, rng)
    destinations = sorted({j for _, j in flow_pairs})

    tables: dict[int, PathTable] = {d: pathalloc.init_solve(scg, d) for d in destinations}

    edge_list = scg.edges()
    all_equal = True
    t_incr = 0.0
    t_dsp = 0.0
    touched = 0
    scanned = 0
    for _ in range(updates):
        i, j = edge_list[rng.randrange(len(edge_list))]
        delta = float(rng.randint(1, 20))
        decrease = rng.random() < 0.5 and scg.t[(i, j)] >= delta

        start = time.perf_counter()
        if decrease:
            scg.set_cost(i, j, scg.t[(i, j)] - delta)
            for tbl in tables.values():
                touched += pathalloc.propagate_decrease(tbl, scg, i, j)
        else:
            scg.set_cost(i, j, scg.t[(i, j)] + delta)
            for tbl in tables.values():
                touched += pathalloc.propagate_increase(tbl, scg, i, j)
        t_incr += time.perf_counter() - start

        # Baseline: full Dijkstra re-solve of every destination of interest.
        start = time.perf_counter()
        dsp = {d: pathalloc.dijkstra_to(scg, d) for d in destinations}
        scanned += len(destinations) * len(edge_list)
        t_dsp += time.perf_counter() - start

        for d in destinations:
            fresh = pathalloc.init_solve(scg, d)
            if not tables[d].equal_distances(fresh):
                all_equal = False
            if tables[d].dis_n != dsp[d]:
                all_equal = False

    return UpdateBenchResult(
        nodes=nodes,
        n_edges=len(edge_list),
        n_flows=len(flow_pairs),
        n_destinations=len(destinations),
        updates=updates,
        dsp_time_s=t_dsp,
        incremental_time_s=t_incr,
        equal_after_every_update=all_equal,
        incremental_edges_touched=touched,
        dsp_edges_scanned=scanned,
    )


# ---------------------------------------------------------------------------
# Mode comparison sweep (partition-in-the-loop vs partition-up-front)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepCell:
    benchmark: str
    m: int
    pdf_powers: tuple[float, ...]
    pbf_powers: tuple[float, ...]

    @property
    def pdf_median(self) -> float:
        return statistics.median(self.pdf_powers)

    @property
    def pbf_median(self) -> float:
        return statistics.median(self.pbf_powers)


def _sweep_one(args: tuple) -> tuple[str, int, str, int, float]:
    from .pipeline import synthesize  # local import keeps workers light

    name, path, m, mode, seed, schedule = args
    g = read_ccg(path)
    cfg = SynthesisConfig(
        m=m,
        seed=seed,
        mode=mode,
        moves_per_temp=schedule["moves_per_core"] * g.n,
        cooling=schedule["cooling"],
        stop_ratio=schedule["stop_ratio"],
    )
    outcome = synthesize(g, cfg)
    return (name, m, mode, seed, outcome.report.power_mw)


# Lighter-than-default schedule so a full sweep stays within its time budget;
# both modes anneal with the same settings, so the comparison is like for like.
SWEEP_SCHEDULE = {"moves_per_core": 8, "cooling": 0.90, "stop_ratio": 1e-3}


def pdf_vs_pbf_sweep(
    benchmarks: list[tuple[str, str]],
    ms: list[int],
    seeds: list[int],
    jobs: int = 1,
    schedule: dict | None = None,
) -> list[SweepCell]:
    """Synthesize every (benchmark, m, mode, seed) cell; group powers."""
    schedule = schedule or SWEEP_SCHEDULE
    tasks = [
        (name, path, m, mode, seed, schedule)
        for name, path in benchmarks
        for m in ms
        for mode in (MODE_PDF, MODE_PBF)
        for seed in seeds
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_one, tasks, chunksize=1))
    else:
        results = [_sweep_one(t) for t in tasks]
    powers: dict[tuple[str, int, str], dict[int, float]] = {}
    for name, m, mode, seed, p in results:
        powers.setdefault((name, m, mode), {})[seed] = p
    cells = []
    for name, _ in benchmarks:
        for m in ms:
            pdf = powers[(name, m, MODE_PDF)]
            pbf = powers[(name, m, MODE_PBF)]
            cells.append(
                SweepCell(
                    benchmark=name,
                    m=m,
                    pdf_powers=tuple(pdf[s] for s in seeds),
                    pbf_powers=tuple(pbf[s] for s in seeds),
                )
            )
    return cells
