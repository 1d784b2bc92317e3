"""Command line interface: one subcommand, render.

Exit codes match the simulation engine's convention: 0 success, 1 validation
error (bad kind, schema mismatch, empty data), 2 I/O error.
"""

from __future__ import annotations

import argparse
import sys

from .errors import FigureError
from .render import KINDS, FigureSpec, render


class _Parser(argparse.ArgumentParser):
    # Usage mistakes are validation errors (exit 1), not I/O errors.
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        raise FigureError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="ecl-figures", description="Render figures from simulation outputs")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure from CSV/JSON inputs")
    p.add_argument("--kind", required=True, choices=KINDS, help="figure kind")
    p.add_argument(
        "--in", dest="inputs", required=True, nargs="+", metavar="PATH",
        help="input CSV/JSON files, in the engine's documented schemas",
    )
    p.add_argument("--out", dest="output", required=True, help="output image path")
    p.add_argument("--xlabel", help="x axis label override")
    p.add_argument("--ylabel", help="y axis label override")
    p.add_argument("--title", help="figure title")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        spec = FigureSpec(
            kind=args.kind,
            inputs=tuple(args.inputs),
            output=args.output,
            xlabel=args.xlabel,
            ylabel=args.ylabel,
            title=args.title,
        )
        print(f"wrote {render(spec)}")
        return 0
    except FigureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
