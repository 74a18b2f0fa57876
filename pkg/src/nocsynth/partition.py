"""Balance-constrained min-cut clustering of cores onto switches.

The demand graph is first reweighted so that pairs that talk a lot *and* sit
close together get heavy edges, then split into m clusters by recursive
Fiduccia-Mattheyses bisection with per-pass best-prefix rollback.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .errors import InfeasibleBalanceError, ZeroDistanceError
from .model import CoreCommGraph, Partition


@dataclass(frozen=True)
class ReweightedGraph:
    """Undirected graph over cores; one positive weight per communicating pair."""

    n: int
    weights: dict[tuple[int, int], float]  # keys (i, j) with i < j

    def adjacency(self) -> list[list[tuple[int, float]]]:
        adj: list[list[tuple[int, float]]] = [[] for _ in range(self.n)]
        for (i, j), w in self.weights.items():
            adj[i].append((j, w))
            adj[j].append((i, w))
        return adj


def reweight(
    g: CoreCommGraph,
    positions: list[tuple[float, float]] | None,
    alpha_w: float,
    alpha_d: float,
    zero_dist_clamp: float | None = None,
) -> ReweightedGraph:
    """Combine normalized demand and inverse distance into partitioning weights.

    For each communicating pair {i, j}:
        w' = alpha_w * (w_ij + w_ji) / max_w + alpha_d * (mean_dis / dis_ij)
    with dis_ij the Manhattan distance between core centers and mean_dis the
    mean distance over communicating pairs.  With alpha_d == 0 the positions
    are not touched at all, so ``positions`` may be None.

    ``zero_dist_clamp`` is a lower bound applied to every pair distance;
    without it, coincident centers raise ZeroDistanceError.
    """
    pairs = g.comm_pairs()
    max_w = g.max_w
    weights: dict[tuple[int, int], float] = {}

    if alpha_d == 0.0:
        for i, j in pairs:
            weights[(i, j)] = alpha_w * g.sym_weight(i, j) / max_w
        return ReweightedGraph(g.n, weights)

    if positions is None:
        raise ValueError("positions are required when alpha_d != 0")
    dists = []
    for i, j in pairs:
        d = abs(positions[i][0] - positions[j][0]) + abs(positions[i][1] - positions[j][1])
        if zero_dist_clamp is not None:
            d = max(d, zero_dist_clamp)
        elif d <= 0.0:
            raise ZeroDistanceError(f"cores {i} and {j} have coincident centers")
        dists.append(d)
    mean_dis = sum(dists) / len(dists) if dists else 0.0
    for (i, j), d in zip(pairs, dists):
        weights[(i, j)] = alpha_w * g.sym_weight(i, j) / max_w + alpha_d * mean_dis / d
    return ReweightedGraph(g.n, weights)


def min_cut_partition(
    rg: ReweightedGraph,
    m: int,
    balance_slack: int = 1,
    seed: int = 0,
    restarts: int = 8,
) -> Partition:
    """Split nodes into m balanced clusters minimizing total cut weight.

    Recursive FM bisection; each bisection runs ``restarts`` independent
    seeded starts and keeps the best cut.  Deterministic for a given seed:
    all ties fall back to the lower node index.
    """
    n = rg.n
    if n < m:
        raise InfeasibleBalanceError(f"{n} cores cannot fill {m} clusters")
    if m < 1:
        raise InfeasibleBalanceError(f"cluster count must be >= 1, got {m}")
    target = math.ceil(n / m)
    lo = max(1, target - balance_slack)
    hi = target + balance_slack
    if m * lo > n or m * hi < n:
        raise InfeasibleBalanceError(
            f"no cluster sizes in [{lo},{hi}] can sum to {n} over {m} clusters"
        )

    adj = rg.adjacency()
    rng = random.Random(seed)
    assign = [0] * n

    def bisect(nodes: list[int], k: int, first_label: int) -> None:
        if k == 1:
            for v in nodes:
                assign[v] = first_label
            return
        k1 = k // 2
        k2 = k - k1
        size = len(nodes)
        s1_lo = max(k1 * lo, size - k2 * hi)
        s1_hi = min(k1 * hi, size - k2 * lo)
        s1_init = min(max(round(size * k1 / k), s1_lo), s1_hi)
        side = _fm_bisect(nodes, adj, s1_init, s1_lo, s1_hi, rng, restarts)
        left = [v for v, s in zip(nodes, side) if s == 0]
        right = [v for v, s in zip(nodes, side) if s == 1]
        bisect(left, k1, first_label)
        bisect(right, k2, first_label + k1)

    bisect(list(range(n)), m, 0)
    return Partition(m, tuple(assign)).validate(balance_slack)


def _fm_bisect(
    nodes: list[int],
    adj: list[list[tuple[int, float]]],
    s1_init: int,
    s1_lo: int,
    s1_hi: int,
    rng: random.Random,
    restarts: int,
) -> list[int]:
    """FM bisection of ``nodes``; side-0 size must land in [s1_lo, s1_hi].

    Returns the side (0/1) of each node, aligned with ``nodes``.
    """
    size = len(nodes)
    local = {v: i for i, v in enumerate(nodes)}
    # Adjacency restricted to the node subset, in local indices.
    ladj: list[list[tuple[int, float]]] = [[] for _ in range(size)]
    for v in nodes:
        lv = local[v]
        for u, w in adj[v]:
            lu = local.get(u)
            if lu is not None:
                ladj[lv].append((lu, w))

    def cut_weight(side: list[int]) -> float:
        total = 0.0
        for v in range(size):
            for u, w in ladj[v]:
                if u > v and side[u] != side[v]:
                    total += w
        return total

    best_side: list[int] | None = None
    best_cut = math.inf
    for _ in range(max(1, restarts)):
        order = list(range(size))
        rng.shuffle(order)
        side = [1] * size
        for v in order[:s1_init]:
            side[v] = 0
        side = _fm_refine(side, ladj, s1_lo, s1_hi)
        cut = cut_weight(side)
        if cut < best_cut:
            best_cut = cut
            best_side = side
    assert best_side is not None
    return best_side


def _fm_refine(
    side: list[int],
    ladj: list[list[tuple[int, float]]],
    s1_lo: int,
    s1_hi: int,
    max_passes: int = 16,
) -> list[int]:
    """Run FM passes until a pass yields no positive gain."""
    size = len(side)
    for _ in range(max_passes):
        gain = [0.0] * size
        for v in range(size):
            for u, w in ladj[v]:
                gain[v] += w if side[u] != side[v] else -w
        locked = [False] * size
        s1 = side.count(0)
        moves: list[int] = []
        cum = 0.0
        best_cum = 0.0
        best_prefix = 0
        for step in range(size):
            best_v = -1
            best_g = -math.inf
            for v in range(size):
                if locked[v]:
                    continue
                # Moving v off side 0 shrinks s1; onto side 0 grows it.
                new_s1 = s1 - 1 if side[v] == 0 else s1 + 1
                if not (s1_lo <= new_s1 <= s1_hi):
                    continue
                if gain[v] > best_g:
                    best_g = gain[v]
                    best_v = v
            if best_v < 0:
                break
            v = best_v
            old = side[v]
            side[v] = 1 - old
            s1 = s1 - 1 if old == 0 else s1 + 1
            locked[v] = True
            moves.append(v)
            cum += best_g
            for u, w in ladj[v]:
                if locked[u]:
                    continue
                # v left u's side: u's cut exposure grew; or v joined it.
                gain[u] += 2 * w if side[u] == old else -2 * w
            gain[v] = -gain[v]
            if cum > best_cum:
                best_cum = cum
                best_prefix = step + 1
        # Roll back everything after the best prefix.
        for v in moves[best_prefix:]:
            side[v] = 1 - side[v]
        if best_cum <= 0.0:
            break
    return side
