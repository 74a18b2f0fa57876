"""Bit-energy power model and end-of-pipeline reporting.

Switch traversal energy is a per-port-count table (0.18um-class numbers);
link energy is linear in wire length.  A flow's power is its demand times
the bit energy of everything it crosses: the two NI links, every inter-
switch link, and every switch at its final port count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import BadPortsError, UnroutedFlowError
from .model import CoreCommGraph, Partition, manhattan

SWITCH_TABLE = {2: 0.22, 3: 0.33, 4: 0.44, 5: 0.55, 6: 0.66, 7: 0.78, 8: 0.90}
LINK_SLOPE = 0.6  # pJ/bit per mm
_EXTRA_PORT_SLOPE = 0.12  # pJ/bit per port past the table (the 7->8 step)


@dataclass(frozen=True)
class PowerModel:
    switch_table: dict[int, float] = field(default_factory=lambda: dict(SWITCH_TABLE))
    link_slope: float = LINK_SLOPE

    def switch_bit_energy(self, ports: int) -> float:
        """pJ/bit through a switch with the given port count."""
        if ports < 2:
            raise BadPortsError(f"a switch needs >= 2 ports, got {ports}")
        top = max(self.switch_table)
        if ports <= top:
            return self.switch_table[ports]
        return self.switch_table[top] + _EXTRA_PORT_SLOPE * (ports - top)

    def link_bit_energy(self, length: float) -> float:
        """pJ/bit over a wire of the given length in mm.

        Computed as (length * 10*slope) / 10 rather than length * slope so
        the published table points (multiples of 0.6) come out bit-exact.
        """
        return length * (self.link_slope * 10.0) / 10.0


@dataclass(frozen=True)
class SynthesisReport:
    power_mw: float
    avg_hops: float
    whitespace_pct: float
    runtime_s: float
    seed: int
    n_cores: int
    n_flows: int
    m: int
    mode: str

    def key_value_block(self) -> str:
        return (
            f"power_mw={self.power_mw!r}\n"
            f"avg_hops={self.avg_hops!r}\n"
            f"whitespace_pct={self.whitespace_pct!r}\n"
            f"runtime_s={self.runtime_s!r}\n"
            f"seed={self.seed}\n"
        )

    def format_text(self) -> str:
        lines = [
            f"cores            : {self.n_cores}",
            f"flows            : {self.n_flows}",
            f"switches         : {self.m}",
            f"mode             : {self.mode}",
            f"power (mW)       : {self.power_mw:.4f}",
            f"average hops     : {self.avg_hops:.4f}",
            f"whitespace (%)   : {self.whitespace_pct:.4f}",
            f"runtime (s)      : {self.runtime_s:.2f}",
            f"seed             : {self.seed}",
        ]
        return "\n".join(lines) + "\n\n" + self.key_value_block()


def flow_bit_energy(
    route: tuple[int, ...],
    ni_a: tuple[float, float],
    ni_b: tuple[float, float],
    switch_centers: dict[int, tuple[float, float]],
    ports: dict[int, int],
    pm: PowerModel,
) -> float:
    """pJ/bit for one flow: both NI links, route links, traversed switches."""
    e = pm.link_bit_energy(manhattan(ni_a, switch_centers[route[0]]))
    e += pm.link_bit_energy(manhattan(ni_b, switch_centers[route[-1]]))
    for u, v in zip(route, route[1:]):
        e += pm.link_bit_energy(manhattan(switch_centers[u], switch_centers[v]))
    for k in route:
        e += pm.switch_bit_energy(ports[k])
    return e


def evaluate(
    fp,
    part: Partition,
    routes,
    ni_centers: dict[int, tuple[float, float]],
    switch_centers: dict[int, tuple[float, float]],
    g: CoreCommGraph,
    pm: PowerModel,
    runtime_s: float = 0.0,
    seed: int = 0,
    mode: str = "pdf",
) -> SynthesisReport:
    """Accumulate power and hop statistics for a fully routed topology.

    Demand in Mbit/s times pJ/bit gives uW; the report divides by 1000 for
    mW.  Hops count switches on the route; the mean is unweighted over
    flows.
    """
    total_uw = 0.0
    total_hops = 0
    for s, d, w in g.edges:
        route = routes.routes.get((s, d))
        if route is None:
            raise UnroutedFlowError(f"flow ({s},{d}) has no route")
        e = flow_bit_energy(
            route, ni_centers[s], ni_centers[d], switch_centers, routes.ports, pm
        )
        total_uw += w * e
        total_hops += len(route)
    n_flows = len(g.edges)
    return SynthesisReport(
        power_mw=total_uw / 1000.0,
        avg_hops=(total_hops / n_flows) if n_flows else 0.0,
        whitespace_pct=fp.whitespace_pct(),
        runtime_s=runtime_s,
        seed=seed,
        n_cores=g.n,
        n_flows=n_flows,
        m=part.m,
        mode=mode,
    )
