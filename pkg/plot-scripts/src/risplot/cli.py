"""Command-line entry point: ``plot sweep|cdf --in results.csv --out fig.png``."""

import argparse
import sys

from .plots import PlotInputError, PlotSpec, plot_cdf, plot_sweep


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="plot",
        description="Render figures from simulation result CSVs.")
    sub = ap.add_subparsers(dest="kind", required=True)
    for kind, help_text in (
        ("sweep", "mean sum-rate vs. sweep value, one line per scheme"),
        ("cdf", "empirical CDF of per-group minimum rates"),
    ):
        p = sub.add_parser(kind, help=help_text)
        p.add_argument("--in", dest="input_csv", required=True,
                       metavar="results.csv")
        p.add_argument("--out", dest="out_path", required=True,
                       metavar="fig.png")
        p.add_argument("--style", choices=["default", "paper"],
                       default="default")
        p.add_argument("--x-label", default=None)
        p.add_argument("--y-label", default=None)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = PlotSpec(input_csv=args.input_csv, kind=args.kind,
                    out_path=args.out_path, style=args.style)
    if args.x_label:
        spec.x_label = args.x_label
    elif args.kind == "sweep":
        spec.x_label = "transmit power (dBm)"
    if args.y_label:
        spec.y_label = args.y_label
    try:
        path = plot_sweep(spec) if args.kind == "sweep" else plot_cdf(spec)
    except PlotInputError as exc:
        print(f"plot: error: {exc}", file=sys.stderr)
        return 2
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
