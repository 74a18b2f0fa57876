"""Shared domain types: cores, communication graphs, rectangles, clusters,
global configuration, and the line-oriented file formats for both.

Everything here is value-like and immutable after construction, so instances
can be shared freely between threads or worker processes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace

from .errors import (
    EmptyClusterError,
    InfeasibleBalanceError,
    InputError,
    MalformedGraphError,
)

MODE_PDF = "pdf"
MODE_PBF = "pbf"


@dataclass(frozen=True)
class Core:
    """A hard rectangular IP core, dimensions in mm."""

    id: int
    width: float
    height: float


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle: lower-left corner plus extents, in mm."""

    x: float
    y: float
    w: float
    h: float

    @property
    def x2(self) -> float:
        return self.x + self.w

    @property
    def y2(self) -> float:
        return self.y + self.h

    @property
    def area(self) -> float:
        return self.w * self.h

    @property
    def center(self) -> tuple[float, float]:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)

    def overlaps(self, other: "Rect", eps: float = 0.0) -> bool:
        """True when the two interiors intersect (shared edges are fine).

        ``eps`` ignores slivers thinner than that; rectangles whose extents
        were derived by subtracting coordinates can overshoot a shared
        boundary by one ulp when ``x + w`` is reconstructed.
        """
        return (
            self.x < other.x2 - eps
            and other.x < self.x2 - eps
            and self.y < other.y2 - eps
            and other.y < self.y2 - eps
        )

    def contains_point(self, px: float, py: float) -> bool:
        """Closed containment: boundary points count as inside."""
        return self.x <= px <= self.x2 and self.y <= py <= self.y2

    def inflate(self, margin: float) -> "Rect":
        """Same center, each side pushed out by ``margin``."""
        return Rect(self.x - margin, self.y - margin, self.w + 2 * margin, self.h + 2 * margin)


def manhattan(a: tuple[float, float], b: tuple[float, float]) -> float:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


class CoreCommGraph:
    """Directed graph of cores with bandwidth demands in Mbit/s.

    At most one edge per ordered pair, no self-loops, weights > 0.
    """

    def __init__(self, cores: list[Core], edges: list[tuple[int, int, float]]):
        self.cores = list(cores)
        self.edges = [(int(s), int(d), float(w)) for s, d, w in edges]
        self._w = {(s, d): w for s, d, w in self.edges}

    @property
    def n(self) -> int:
        return len(self.cores)

    def weight(self, src: int, dst: int) -> float:
        """Demand on the directed edge, 0.0 when absent."""
        return self._w.get((src, dst), 0.0)

    def sym_weight(self, i: int, j: int) -> float:
        """Demand in both directions combined."""
        return self._w.get((i, j), 0.0) + self._w.get((j, i), 0.0)

    @property
    def max_w(self) -> float:
        """Largest single-edge demand."""
        return max((w for _, _, w in self.edges), default=0.0)

    def comm_pairs(self) -> list[tuple[int, int]]:
        """Unordered pairs {i, j}, i < j, with demand in either direction."""
        seen = set()
        for s, d, _ in self.edges:
            seen.add((min(s, d), max(s, d)))
        return sorted(seen)

    def __repr__(self) -> str:
        return f"CoreCommGraph(n={self.n}, edges={len(self.edges)})"


def validate_ccg(g: CoreCommGraph) -> CoreCommGraph:
    """Check every graph invariant; return the graph unchanged if all hold."""
    n = g.n
    if n == 0:
        raise MalformedGraphError("graph has no cores")
    ids = [c.id for c in g.cores]
    if ids != list(range(n)):
        raise MalformedGraphError(f"core ids must be dense 0..{n - 1}, got {ids}")
    for c in g.cores:
        if not (c.width > 0 and c.height > 0):
            raise MalformedGraphError(f"core {c.id} has non-positive dimensions")
    seen = set()
    for s, d, w in g.edges:
        if s == d:
            raise MalformedGraphError(f"self-loop on core {s}")
        if not (0 <= s < n and 0 <= d < n):
            raise MalformedGraphError(f"edge ({s},{d}) references unknown core")
        if not (w > 0):
            raise MalformedGraphError(f"edge ({s},{d}) has non-positive weight {w}")
        if (s, d) in seen:
            raise MalformedGraphError(f"duplicate edge ({s},{d})")
        seen.add((s, d))
    return g


@dataclass(frozen=True)
class Partition:
    """Assignment of each core to one of ``m`` clusters."""

    m: int
    assign: tuple[int, ...]

    def cluster(self, k: int) -> list[int]:
        return [i for i, c in enumerate(self.assign) if c == k]

    def sizes(self) -> list[int]:
        counts = [0] * self.m
        for c in self.assign:
            counts[c] += 1
        return counts

    def validate(self, balance_slack: int = 1) -> "Partition":
        n = len(self.assign)
        if n < self.m:
            raise InfeasibleBalanceError(f"{n} cores cannot fill {self.m} clusters")
        sizes = self.sizes()
        if any(s == 0 for s in sizes):
            raise InfeasibleBalanceError(f"empty cluster in sizes {sizes}")
        target = math.ceil(n / self.m)
        for k, s in enumerate(sizes):
            if abs(s - target) > balance_slack:
                raise InfeasibleBalanceError(
                    f"cluster {k} has {s} cores, target {target} +/- {balance_slack}"
                )
        return self


@dataclass(frozen=True)
class SynthesisConfig:
    """Pipeline-wide knobs. ``None`` means derive the value at run time."""

    m: int = 4                       # switch count
    alpha_w: float = 0.5             # demand term weight in edge reweighting
    alpha_d: float = 0.5             # distance term weight in edge reweighting
    lambda_a: float | None = None    # area weight; None -> 1/A of initial packing
    lambda_f: float | None = None    # cut-flow weight; None -> 1/F of initial packing
    lambda_r: float | None = None    # bounding-resource weight; None -> 1/R initial
    l: float | None = None           # NI candidate margin (mm); None -> smallest core side
    seed: int = 1
    t0: float | None = None          # None -> probe for ~0.9 initial acceptance
    cooling: float = 0.95
    moves_per_temp: int | None = None  # None -> 30 * n
    stop_ratio: float = 1e-4         # anneal stops at t0 * stop_ratio
    mode: str = MODE_PDF
    balance_slack: int = 1
    ni_l_doublings: int = 6          # retry cap when NI assignment is infeasible

    def validate(self) -> "SynthesisConfig":
        if self.m < 2:
            raise InputError(f"m must be >= 2, got {self.m}")
        for name in ("lambda_a", "lambda_f", "lambda_r"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise InputError(f"{name} must be >= 0, got {v}")
        if self.l is not None and not (self.l > 0):
            raise InputError(f"l must be > 0, got {self.l}")
        if self.mode not in (MODE_PDF, MODE_PBF):
            raise InputError(f"mode must be '{MODE_PDF}' or '{MODE_PBF}', got {self.mode!r}")
        return self

    def with_overrides(self, **kwargs) -> "SynthesisConfig":
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


def cluster_bounding_resource(fp, part: Partition, k: int) -> float:
    """Half perimeter (W + H) of the smallest box enclosing cluster k's cores."""
    rects = [fp.placements[i] for i in part.cluster(k)]
    if not rects:
        raise EmptyClusterError(f"cluster {k} has no cores")
    x1 = min(r.x for r in rects)
    y1 = min(r.y for r in rects)
    x2 = max(r.x2 for r in rects)
    y2 = max(r.y2 for r in rects)
    return (x2 - x1) + (y2 - y1)


def cluster_bounding_box(fp, part: Partition, k: int) -> Rect:
    """Smallest axis-aligned box enclosing cluster k's placed cores."""
    rects = [fp.placements[i] for i in part.cluster(k)]
    if not rects:
        raise EmptyClusterError(f"cluster {k} has no cores")
    x1 = min(r.x for r in rects)
    y1 = min(r.y for r in rects)
    x2 = max(r.x2 for r in rects)
    y2 = max(r.y2 for r in rects)
    return Rect(x1, y1, x2 - x1, y2 - y1)


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------

def _content_lines(text: str) -> list[str]:
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(line)
    return out


def parse_ccg(text: str) -> CoreCommGraph:
    """Parse the line-oriented CCG format.

    ``cores <n>`` then n ``core <id> <width_mm> <height_mm>`` lines, then
    ``edges <e>`` then e ``edge <src> <dst> <w_mbps>`` lines.  ``#`` starts
    a comment.
    """
    lines = _content_lines(text)
    pos = 0

    def take() -> list[str]:
        nonlocal pos
        if pos >= len(lines):
            raise InputError("unexpected end of CCG file")
        tok = lines[pos].split()
        pos += 1
        return tok

    try:
        tok = take()
        if tok[0] != "cores" or len(tok) != 2:
            raise InputError(f"expected 'cores <n>', got {' '.join(tok)!r}")
        n = int(tok[1])
        cores = []
        for _ in range(n):
            tok = take()
            if tok[0] != "core" or len(tok) != 4:
                raise InputError(f"expected 'core <id> <w> <h>', got {' '.join(tok)!r}")
            cores.append(Core(int(tok[1]), float(tok[2]), float(tok[3])))
        tok = take()
        if tok[0] != "edges" or len(tok) != 2:
            raise InputError(f"expected 'edges <e>', got {' '.join(tok)!r}")
        e = int(tok[1])
        edges = []
        for _ in range(e):
            tok = take()
            if tok[0] != "edge" or len(tok) != 4:
                raise InputError(f"expected 'edge <src> <dst> <w>', got {' '.join(tok)!r}")
            edges.append((int(tok[1]), int(tok[2]), float(tok[3])))
    except (ValueError, IndexError) as exc:
        raise InputError(f"bad CCG file: {exc}") from exc
    if pos != len(lines):
        raise InputError(f"trailing content in CCG file: {lines[pos]!r}")
    return validate_ccg(CoreCommGraph(cores, edges))


def read_ccg(path) -> CoreCommGraph:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read CCG file {path}: {exc}") from exc
    return parse_ccg(text)


def format_ccg(g: CoreCommGraph, header: str = "") -> str:
    lines = []
    if header:
        lines.extend(f"# {h}" for h in header.splitlines())
    lines.append(f"cores {g.n}")
    for c in g.cores:
        lines.append(f"core {c.id} {c.width} {c.height}")
    lines.append(f"edges {len(g.edges)}")
    for s, d, w in g.edges:
        lines.append(f"edge {s} {d} {w}")
    return "\n".join(lines) + "\n"


def write_ccg(path, g: CoreCommGraph, header: str = "") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_ccg(g, header))


_CONFIG_FIELDS = {f.name: f.type for f in fields(SynthesisConfig)}
_INT_FIELDS = {"m", "seed", "moves_per_temp", "balance_slack", "ni_l_doublings"}


def parse_config(text: str, base: SynthesisConfig | None = None) -> SynthesisConfig:
    """Parse ``key = value`` lines into a SynthesisConfig, over a base config."""
    cfg = base or SynthesisConfig()
    overrides = {}
    for line in _content_lines(text):
        if "=" not in line:
            raise InputError(f"expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _CONFIG_FIELDS:
            raise InputError(f"unknown config key {key!r}")
        if key == "mode":
            overrides[key] = value.lower()
        elif key in _INT_FIELDS:
            try:
                overrides[key] = int(value)
            except ValueError as exc:
                raise InputError(f"config key {key!r} wants an integer, got {value!r}") from exc
        else:
            try:
                overrides[key] = float(value)
            except ValueError as exc:
                raise InputError(f"config key {key!r} wants a number, got {value!r}") from exc
    return replace(cfg, **overrides).validate()


def read_config(path, base: SynthesisConfig | None = None) -> SynthesisConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read config file {path}: {exc}") from exc
    return parse_config(text, base)
