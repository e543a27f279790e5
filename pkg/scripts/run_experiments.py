"""Run every CLI subcommand with one config, one output subdirectory each."""
import argparse
import sys
from pathlib import Path

from horolivsic.cli import run

COMMANDS = ["verify-lemmas", "ppo", "livsic", "gen", "reduce"]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", type=Path)
    ap.add_argument("--out", type=Path, default=Path("out"))
    ap.add_argument("--model", choices=["halfplane", "tree"])
    args = ap.parse_args(argv)
    worst = 0
    for cmd in COMMANDS:
        argv = [cmd, "--out", str(args.out / cmd)]
        if args.config:
            argv += ["--config", str(args.config)]
        if args.model:
            argv += ["--model", args.model]
        worst = max(worst, run(argv))
    return worst


if __name__ == "__main__":
    sys.exit(main())
