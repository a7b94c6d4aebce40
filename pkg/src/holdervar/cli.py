"""
holdervar command line: `holdervar <command> --config <path> [--out <dir>] [--seed <int>] [--levels a,b,c]`.
"""

import argparse
import logging
import sys
from typing import List, Optional

from .api import default_out_dir, load_experiment, run_experiment
from .models import Command

logger = logging.getLogger(__name__)


def _levels(text: str) -> List[int]:
    try:
        return [int(item) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"--levels expects comma-separated integers, got '{text}'.") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="holdervar",
        description="Verification experiments for variable-exponent Hölder spaces and parabolic Schauder estimates.",
    )
    parser.add_argument("command", choices=[c.value for c in Command], help="Experiment to run")
    parser.add_argument("--config", required=True, help="key=value configuration file")
    parser.add_argument("--out", default=None, help="Report directory (default: data/runs/<command>-seed<seed>)")
    parser.add_argument("--seed", type=int, default=None, help="Override the config seed")
    parser.add_argument("--levels", type=_levels, default=None, help="Override refinement levels, e.g. 9,17,33")
    parser.add_argument("--no-plots", action="store_true", help="Skip SVG plots")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(
        level=logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )
    args = build_parser().parse_args(argv)

    try:
        config = load_experiment(args.config, args.command, seed=args.seed, levels=args.levels, out_dir=args.out)
        formats = ("csv", "json") if args.no_plots else ("csv", "json", "svg")
        _, written = run_experiment(config, default_out_dir(config), formats=formats)
    except FileNotFoundError as exc:
        print(f"✗ {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"✗ Invalid input: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        logger.error(f"main: {args.command} failed", exc_info=True)
        print(f"✗ {args.command} failed: {exc}", file=sys.stderr)
        return 1

    for path in written:
        print(f"✓ Wrote report: {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
