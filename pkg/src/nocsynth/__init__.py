"""Application-specific NoC topology synthesis toolkit.

Pipeline: partition-aware floorplanning, whitespace grid extraction, switch
and network-interface placement, energy-minimizing route allocation, and
power/hops/whitespace reporting.
"""

from .errors import (
    BadPortsError,
    EmptyClusterError,
    InfeasibleBalanceError,
    InputError,
    MalformedGraphError,
    NegativeCostError,
    NiInfeasibleError,
    NoWhitespaceError,
    SynthesisError,
    UnreachableError,
    UnroutedFlowError,
    ZeroDistanceError,
)
from .model import (
    Core,
    CoreCommGraph,
    Partition,
    Rect,
    SynthesisConfig,
    cluster_bounding_resource,
    parse_ccg,
    read_ccg,
    read_config,
    validate_ccg,
)
from .partition import ReweightedGraph, min_cut_partition, reweight
from .floorplan import Floorplan, FloorplanCost, SeqPair, anneal, evaluate, pack
from .placement import Grid, SwitchPlacement, extract_grids, insert_switches, switch_flow
from .niflow import NiPlacement, assign_nis, candidate_grids
from .pathalloc import (
    PathTable,
    RouteSet,
    SwitchCommGraph,
    allocate_paths,
    build_scg,
    decrease_update,
    increase_update,
    init_solve,
)
from .power import PowerModel, SynthesisReport
from .pipeline import SynthesisOutcome, synthesize
from .bench import bench_updates

__version__ = "0.1.0"
