"""Command line entry point: ``rftopo <subcommand> --config ... --out ...``."""
from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

from . import pipeline
from .errors import RFTopoError


def _add_common(p):
    p.add_argument("--config", required=True,
                   help="JSON config path or the name of a shipped config")
    p.add_argument("--out", help="run directory (defaults to the config's output_dir)")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for per-snapshot work")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rftopo",
        description="Ricci flow snapshots -> curvature filtrations -> persistence diagrams.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("simulate", "evolve the model and write snapshots"),
                        ("topology", "build filtrations, diagrams and Betti tables"),
                        ("distances", "distances between adjacent snapshot diagrams"),
                        ("report", "lifespan tables for plotting"),
                        ("run", "all four stages in order")):
        _add_common(sub.add_parser(name, help=help_))
    cmp_ = sub.add_parser("compare", help="per-snapshot distances between two runs")
    cmp_.add_argument("run_a")
    cmp_.add_argument("run_b")
    cmp_.add_argument("--out", help="write the comparison CSV here instead of stdout")
    sub.add_parser("configs", help="list shipped configs")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "configs":
        print("\n".join(pipeline.shipped_configs()))
        return 0
    if args.command == "compare":
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            rows = pipeline.compare(args.run_a, args.run_b)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        text = pipeline.compare_csv(rows)
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        return 0

    try:
        cfg = pipeline.load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        out = Path(args.out or cfg.output_dir)
        stages = pipeline.STAGES if args.command == "run" else (args.command,)
        pipeline.run_stages(cfg, out, stages, jobs=max(1, args.jobs))
    except (RFTopoError, OSError, ValueError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    print(f"{args.command}: wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
