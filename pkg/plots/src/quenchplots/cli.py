"""Standalone figure renderer: quenchplots --in FILE [--in FILE2] --kind K --out IMG.

Exit codes: 0 success, 1 schema mismatch or bad arguments, 2 I/O failure.
"""

from __future__ import annotations

import argparse
import sys

from .readers import SchemaError
from .render import KINDS, FigureSpec, render


def cli_main(argv) -> int:
    parser = argparse.ArgumentParser(
        prog="quenchplots",
        description="Render figures from quench-simulator CSV/JSON outputs",
    )
    parser.add_argument("--in", dest="inputs", action="append", required=True,
                        help="input file (repeat to overlay trajectories)")
    parser.add_argument("--kind", choices=KINDS, required=True)
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--no-date", action="store_true",
                        help="suppress embedded timestamps (deterministic output)")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        spec = FigureSpec(inputs=args.inputs, kind=args.kind, out=args.out,
                          no_date=args.no_date)
        render(spec)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out}", file=sys.stderr)
    return 0


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))
