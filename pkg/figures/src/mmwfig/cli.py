"""Command line for batch figure rendering."""

import argparse
import sys

from .data import SchemaError
from .plots import KINDS, FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmwfig",
        description="Render figures from link-simulation CSV files.")
    sub = parser.add_subparsers(dest="command", required=True)
    cmd = sub.add_parser("render",
                         help="render one figure kind from one CSV")
    cmd.add_argument("--csv", required=True, help="input CSV path")
    cmd.add_argument("--kind", required=True, choices=KINDS,
                     help="figure kind")
    cmd.add_argument("--out", required=True,
                     help="output image path (extension picks the format)")
    cmd.add_argument("--title", default=None, help="optional figure title")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        render(FigureSpec(input_csv=args.csv, figure_kind=args.kind,
                          output_path=args.out, title=args.title))
    except SchemaError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
