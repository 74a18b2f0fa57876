"""Command-line front end.

    nocsynth synth --ccg design.ccg --partitions 4 --seeds 1 2 3 --out out/
    nocsynth bench-updates --nodes 300 --flows 457 --updates 50
    nocsynth dump-svg --ccg design.ccg --seed 1 --out plan.svg

``synth`` writes, per seed, a report (human text plus a key=value block), a
route dump, and a rendered floorplan figure, then picks the best seed by
power (ties: lower annealing cost).
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import figures
from .bench import bench_updates
from .errors import (
    InfeasibleBalanceError,
    InputError,
    MalformedGraphError,
    NiInfeasibleError,
    NoWhitespaceError,
    SynthesisError,
)
from .model import MODE_PBF, MODE_PDF, SynthesisConfig, read_ccg, read_config
from .pipeline import SynthesisOutcome, synthesize

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3

_INPUT_ERRORS = (InputError, MalformedGraphError)
_INFEASIBLE_ERRORS = (NiInfeasibleError, NoWhitespaceError, InfeasibleBalanceError)


@dataclass
class RunSpec:
    """One synth invocation: input files, mode, seeds, output directory."""

    ccg_path: str
    config_path: str | None = None
    mode: str | None = None
    seeds: list[int] = field(default_factory=lambda: [1])
    out_dir: str = "out"
    partitions: int | None = None
    jobs: int = 1

    def load_config(self) -> SynthesisConfig:
        cfg = SynthesisConfig()
        if self.config_path:
            cfg = read_config(self.config_path, cfg)
        cfg = cfg.with_overrides(mode=self.mode, m=self.partitions)
        if not self.seeds:
            raise InputError("at least one seed is required")
        return cfg.validate()


def _run_one(args: tuple) -> SynthesisOutcome:
    g, cfg = args
    return synthesize(g, cfg)


def write_outputs(outcome: SynthesisOutcome, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.txt").write_text(outcome.report.format_text(), encoding="utf-8")
    (out_dir / "routes.txt").write_text(outcome.routes.format_routes(), encoding="utf-8")
    figures.render_floorplan(outcome, out_dir / "floorplan.svg")


def synth(run: RunSpec) -> tuple[list[SynthesisOutcome], int]:
    """Run every seed; returns the outcomes and the index of the best one."""
    cfg = run.load_config()
    g = read_ccg(run.ccg_path)
    cfgs = [cfg.with_overrides(seed=s) for s in run.seeds]
    if run.jobs > 1 and len(cfgs) > 1:
        with ProcessPoolExecutor(max_workers=run.jobs) as pool:
            outcomes = list(pool.map(_run_one, [(g, c) for c in cfgs]))
    else:
        outcomes = [synthesize(g, c) for c in cfgs]

    out_root = Path(run.out_dir)
    for outcome in outcomes:
        write_outputs(outcome, out_root / f"seed_{outcome.cfg.seed}")
    best = min(
        range(len(outcomes)),
        key=lambda i: (outcomes[i].report.power_mw, outcomes[i].anneal.cost.phi),
    )
    lines = []
    for i, o in enumerate(outcomes):
        marker = " *" if i == best else ""
        lines.append(
            f"seed {o.cfg.seed}: power_mw={o.report.power_mw!r} "
            f"avg_hops={o.report.avg_hops!r} "
            f"whitespace_pct={o.report.whitespace_pct!r}{marker}"
        )
    lines.append(f"best_seed={outcomes[best].cfg.seed}")
    (out_root / "summary.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return outcomes, best


def _cmd_synth(args) -> int:
    run = RunSpec(
        ccg_path=args.ccg,
        config_path=args.config,
        mode=args.mode,
        seeds=args.seeds,
        out_dir=args.out,
        partitions=args.partitions,
        jobs=args.jobs,
    )
    outcomes, best = synth(run)
    for i, o in enumerate(outcomes):
        marker = " (best)" if i == best else ""
        print(
            f"seed {o.cfg.seed}: {o.report.power_mw:.4f} mW, "
            f"{o.report.avg_hops:.3f} hops, ws {o.report.whitespace_pct:.2f}%, "
            f"{o.report.runtime_s:.1f} s{marker}"
        )
    print(f"outputs in {run.out_dir}/")
    return EXIT_OK


def _cmd_bench_updates(args) -> int:
    result = bench_updates(args.nodes, args.flows, args.updates, seed=args.seed)
    print(result.format_text(), end="")
    return EXIT_OK if result.equal_after_every_update else 1


def _cmd_dump_svg(args) -> int:
    run = RunSpec(
        ccg_path=args.ccg,
        config_path=args.config,
        mode=args.mode,
        seeds=[args.seed],
        partitions=args.partitions,
    )
    cfg = run.load_config().with_overrides(seed=args.seed)
    g = read_ccg(run.ccg_path)
    outcome = synthesize(g, cfg)
    figures.render_floorplan(outcome, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nocsynth",
        description="Application-specific NoC topology synthesis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="run the full synthesis pipeline")
    p.add_argument("--ccg", required=True, help="core communication graph file")
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--mode", choices=[MODE_PDF, MODE_PBF])
    p.add_argument("--seeds", type=int, nargs="+", default=[1])
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--partitions", type=int, metavar="M", help="switch count")
    p.add_argument("--jobs", type=int, default=1, help="parallel seed runs")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("bench-updates", help="incremental-update timing experiment")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--flows", type=int, required=True)
    p.add_argument("--updates", type=int, required=True)
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(func=_cmd_bench_updates)

    p = sub.add_parser("dump-svg", help="render one seed's floorplan figure")
    p.add_argument("--ccg", required=True)
    p.add_argument("--config")
    p.add_argument("--mode", choices=[MODE_PDF, MODE_PBF])
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--partitions", type=int, metavar="M")
    p.add_argument("--out", default="floorplan.svg")
    p.set_defaults(func=_cmd_dump_svg)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _INPUT_ERRORS as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except _INFEASIBLE_ERRORS as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except SynthesisError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
