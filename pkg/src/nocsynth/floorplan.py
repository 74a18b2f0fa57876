"""Simulated-annealing floorplanner.

A packing is encoded as a sequence pair plus per-core rotation flags; every
such state decodes to a legal (overlap-free) placement.  The annealer either
re-clusters on every candidate packing so that partitioning sees live core
positions (the default, demand- and distance-driven), or freezes a
demand-only clustering up front and just packs around it (baseline mode).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace

from . import partition as partition_mod
from .errors import SynthesisError
from .model import (
    MODE_PBF,
    CoreCommGraph,
    Partition,
    Rect,
    SynthesisConfig,
    cluster_bounding_resource,
)


@dataclass(frozen=True)
class Floorplan:
    """Placed core rectangles inside a chip bounding box."""

    placements: tuple[Rect, ...]
    chip: Rect

    @property
    def area(self) -> float:
        return self.chip.w * self.chip.h

    def centers(self) -> list[tuple[float, float]]:
        return [r.center for r in self.placements]

    def core_area(self) -> float:
        return sum(r.area for r in self.placements)

    def whitespace_pct(self) -> float:
        return 100.0 * (1.0 - self.core_area() / self.area)

    def check(self) -> "Floorplan":
        for i, a in enumerate(self.placements):
            if not (
                self.chip.x <= a.x
                and self.chip.y <= a.y
                and a.x2 <= self.chip.x2 + 1e-9
                and a.y2 <= self.chip.y2 + 1e-9
            ):
                raise SynthesisError(f"core {i} outside chip")
            for j in range(i + 1, len(self.placements)):
                if a.overlaps(self.placements[j]):
                    raise SynthesisError(f"cores {i} and {j} overlap")
        return self


@dataclass(frozen=True)
class FloorplanCost:
    """Composite annealing cost phi = la*area + lf*flow_cut + lr*bounding."""

    area: float
    flow_cut: float
    bounding: float
    phi: float


@dataclass
class SeqPair:
    """Sequence-pair state: two permutations of core ids + rotation flags."""

    plus: list[int]
    minus: list[int]
    rotated: list[bool]

    @classmethod
    def initial(cls, n: int, rng: random.Random | None = None) -> "SeqPair":
        plus = list(range(n))
        minus = list(range(n))
        if rng is not None:
            rng.shuffle(plus)
            rng.shuffle(minus)
        return cls(plus, minus, [False] * n)

    def copy(self) -> "SeqPair":
        return SeqPair(list(self.plus), list(self.minus), list(self.rotated))

    def perturb(self, rng: random.Random) -> tuple:
        """Apply one random move in place; returns the undo token."""
        n = len(self.plus)
        move = rng.randrange(3) if n > 1 else 2
        if move == 0:  # swap two entries of the plus sequence
            a, b = rng.sample(range(n), 2)
            self.plus[a], self.plus[b] = self.plus[b], self.plus[a]
            return (0, a, b)
        if move == 1:  # swap the same two cores in both sequences
            a, b = rng.sample(range(n), 2)
            self.plus[a], self.plus[b] = self.plus[b], self.plus[a]
            pa = self.minus.index(self.plus[b])
            pb = self.minus.index(self.plus[a])
            self.minus[pa], self.minus[pb] = self.minus[pb], self.minus[pa]
            return (1, a, b, pa, pb)
        c = rng.randrange(n)  # rotate one core
        self.rotated[c] = not self.rotated[c]
        return (2, c)

    def undo(self, token: tuple) -> None:
        if token[0] == 0:
            _, a, b = token
            self.plus[a], self.plus[b] = self.plus[b], self.plus[a]
        elif token[0] == 1:
            _, a, b, pa, pb = token
            self.minus[pa], self.minus[pb] = self.minus[pb], self.minus[pa]
            self.plus[a], self.plus[b] = self.plus[b], self.plus[a]
        else:
            self.rotated[token[1]] = not self.rotated[token[1]]


def pack(state: SeqPair, g: CoreCommGraph) -> Floorplan:
    """Decode a sequence pair into a placement (longest-path packing).

    Core b sits right of core a when a precedes b in both sequences, and
    above a when a follows b in plus but precedes it in minus.  Packing to
    the lower-left against those constraints can never overlap.
    """
    n = g.n
    w = [0.0] * n
    h = [0.0] * n
    for c in g.cores:
        if state.rotated[c.id]:
            w[c.id], h[c.id] = c.height, c.width
        else:
            w[c.id], h[c.id] = c.width, c.height
    pp = [0] * n
    for idx, c in enumerate(state.plus):
        pp[c] = idx
    x = [0.0] * n
    y = [0.0] * n
    order = state.minus
    for bi in range(n):
        b = order[bi]
        bx = 0.0
        by = 0.0
        for ai in range(bi):
            a = order[ai]
            if pp[a] < pp[b]:
                if x[a] + w[a] > bx:
                    bx = x[a] + w[a]
            else:
                if y[a] + h[a] > by:
                    by = y[a] + h[a]
        x[b] = bx
        y[b] = by
    chip_w = max(x[i] + w[i] for i in range(n))
    chip_h = max(y[i] + h[i] for i in range(n))
    rects = tuple(Rect(x[i], y[i], w[i], h[i]) for i in range(n))
    return Floorplan(rects, Rect(0.0, 0.0, chip_w, chip_h))


def inflate_chip(fp: Floorplan, factor: float) -> Floorplan:
    """Grow the chip outline by ``factor`` in both dimensions; cores stay put."""
    c = fp.chip
    return Floorplan(fp.placements, Rect(c.x, c.y, c.w * factor, c.h * factor))


def _min_core_side(g: CoreCommGraph) -> float:
    return min(min(c.width, c.height) for c in g.cores)


def compute_partition(
    fp: Floorplan,
    g: CoreCommGraph,
    cfg: SynthesisConfig,
    m: int | None = None,
    cache: dict | None = None,
    stats: "AnnealStats | None" = None,
    restarts: int = 8,
) -> Partition:
    """Cluster cores given their current placement (demand + distance)."""
    m = cfg.m if m is None else m
    centers = fp.centers()
    key = None
    if cache is not None:
        key = (tuple(centers), m)
        hit = cache.get(key)
        if hit is not None:
            if stats is not None:
                stats.partition_cache_hits += 1
            return hit
    rg = partition_mod.reweight(
        g, centers, cfg.alpha_w, cfg.alpha_d, zero_dist_clamp=_min_core_side(g)
    )
    if stats is not None:
        stats.reweight_position_calls += 1
        stats.partition_calls += 1
    part = partition_mod.min_cut_partition(
        rg, m, cfg.balance_slack, seed=cfg.seed, restarts=restarts
    )
    if cache is not None:
        if len(cache) > 200_000:
            cache.clear()
        cache[key] = part
    return part


def demand_only_partition(g: CoreCommGraph, cfg: SynthesisConfig, m: int | None = None) -> Partition:
    """Cluster from the demand graph alone; placement never enters."""
    m = cfg.m if m is None else m
    rg = partition_mod.reweight(g, None, 1.0, 0.0)
    return partition_mod.min_cut_partition(rg, m, cfg.balance_slack, seed=cfg.seed)


def measure(fp: Floorplan, g: CoreCommGraph, part: Partition) -> tuple[float, float, float]:
    """Raw cost components: chip area, cut demand, summed cluster boundings."""
    cut = 0.0
    for s, d, w in g.edges:
        if part.assign[s] != part.assign[d]:
            cut += w
    bounding = sum(cluster_bounding_resource(fp, part, k) for k in range(part.m))
    return fp.area, cut, bounding


def evaluate(
    fp: Floorplan,
    g: CoreCommGraph,
    cfg: SynthesisConfig,
    part: Partition | None = None,
    m: int | None = None,
    cache: dict | None = None,
    stats: "AnnealStats | None" = None,
    restarts: int = 8,
) -> tuple[Partition, FloorplanCost]:
    """Cluster (unless a frozen partition is given) and price a packing."""
    if part is None:
        part = compute_partition(fp, g, cfg, m=m, cache=cache, stats=stats, restarts=restarts)
    area, cut, bounding = measure(fp, g, part)
    la = 1.0 if cfg.lambda_a is None else cfg.lambda_a
    lf = 1.0 if cfg.lambda_f is None else cfg.lambda_f
    lr = 1.0 if cfg.lambda_r is None else cfg.lambda_r
    phi = la * area + lf * cut + lr * bounding
    return part, FloorplanCost(area, cut, bounding, phi)


# FM restarts used for the per-move partitions inside annealing; the final
# best packing is re-partitioned at full strength before returning.
ANNEAL_FM_RESTARTS = 3


@dataclass
class AnnealStats:
    evaluations: int = 0
    accepted: int = 0
    partition_calls: int = 0
    partition_cache_hits: int = 0
    reweight_position_calls: int = 0
    t0: float = 0.0
    temps: int = 0
    best_phi_trace: list[float] = field(default_factory=list)


@dataclass(frozen=True)
class AnnealResult:
    floorplan: Floorplan
    partition: Partition
    cost: FloorplanCost
    config: SynthesisConfig  # schedule and lambdas actually used
    stats: AnnealStats


def resolve_lambdas(
    fp0: Floorplan, g: CoreCommGraph, cfg: SynthesisConfig, part0: Partition
) -> SynthesisConfig:
    """Fill in None lambdas as 1/<component of the initial packing>."""
    area, cut, bounding = measure(fp0, g, part0)
    updates = {}
    if cfg.lambda_a is None:
        updates["lambda_a"] = 1.0 / area if area > 0 else 1.0
    if cfg.lambda_f is None:
        updates["lambda_f"] = 1.0 / cut if cut > 0 else 1.0
    if cfg.lambda_r is None:
        updates["lambda_r"] = 1.0 / bounding if bounding > 0 else 1.0
    return replace(cfg, **updates) if updates else cfg


def anneal(g: CoreCommGraph, cfg: SynthesisConfig, m: int | None = None) -> AnnealResult:
    """Search packings by simulated annealing; returns the best state seen.

    Default mode re-clusters every candidate packing (cached by the tuple of
    core centers).  In baseline mode ("pbf") the clustering is computed once
    from demands only and held fixed for the whole run.
    """
    m = cfg.m if m is None else m
    n = g.n
    rng = random.Random(cfg.seed)
    stats = AnnealStats()
    cache: dict = {}

    frozen: Partition | None = None
    if cfg.mode == MODE_PBF:
        frozen = demand_only_partition(g, cfg, m=m)

    state = SeqPair.initial(n, rng)
    fp0 = pack(state, g)
    part0 = frozen if frozen is not None else compute_partition(fp0, g, cfg, m=m, cache=cache, stats=stats)
    cfg = resolve_lambdas(fp0, g, cfg, part0)

    def price(fp: Floorplan) -> tuple[Partition, FloorplanCost]:
        stats.evaluations += 1
        return evaluate(
            fp, g, cfg, part=frozen, m=m, cache=cache, stats=stats,
            restarts=ANNEAL_FM_RESTARTS,
        )

    cur_part, cur_cost = price(fp0)
    best = (cur_cost.phi, state.copy(), fp0, cur_part, cur_cost)
    stats.best_phi_trace.append(cur_cost.phi)

    if n == 1:
        stats.t0 = 0.0
        return AnnealResult(fp0, cur_part, cur_cost, cfg, stats)

    # Initial temperature: probe uphill moves for ~0.9 acceptance.
    if cfg.t0 is not None:
        t0 = cfg.t0
    else:
        uphill = []
        for _ in range(100):
            token = state.perturb(rng)
            _, c = price(pack(state, g))
            delta = c.phi - cur_cost.phi
            if delta > 0:
                uphill.append(delta)
            state.undo(token)
        t0 = (sum(uphill) / len(uphill)) / math.log(1.0 / 0.9) if uphill else 1.0
    stats.t0 = t0

    moves_per_temp = cfg.moves_per_temp if cfg.moves_per_temp is not None else 30 * n
    t = t0
    t_stop = t0 * cfg.stop_ratio
    while t > t_stop:
        stats.temps += 1
        for _ in range(moves_per_temp):
            token = state.perturb(rng)
            fp = pack(state, g)
            new_part, new_cost = price(fp)
            delta = new_cost.phi - cur_cost.phi
            if delta <= 0 or rng.random() < math.exp(-delta / t):
                stats.accepted += 1
                cur_part, cur_cost = new_part, new_cost
                if new_cost.phi < best[0]:
                    best = (new_cost.phi, state.copy(), fp, new_part, new_cost)
            else:
                state.undo(token)
            stats.best_phi_trace.append(best[0])
        t *= cfg.cooling
    _, _, fp, part, cost = best
    if frozen is None:
        # Re-partition the winning packing at full FM strength.
        refined_part, refined_cost = evaluate(fp, g, cfg, m=m, restarts=8)
        if refined_cost.phi < cost.phi:
            part, cost = refined_part, refined_cost
            stats.best_phi_trace.append(cost.phi)
    return AnnealResult(fp, part, cost, cfg, stats)
