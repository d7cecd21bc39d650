import argparse
import sys
from pathlib import Path

from .io import VizError
from .plots import PlotJob, plot_diagnostics, plot_trajectory


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pursuitviz",
        description="Render pursuit run artifacts to figures.")
    sub = parser.add_subparsers(dest="command", required=True)

    plot = sub.add_parser("plot", help="plot one trajectory.csv")
    plot.add_argument("trajectory", type=Path)
    plot.add_argument("--report", type=Path, default=None,
                      help="report.json (default: sibling of the trajectory)")
    plot.add_argument("--style", default="static",
                      choices=["static", "animation", "diagnostics"])
    plot.add_argument("--projection", default="auto",
                      choices=["auto", "chart", "embedded"])
    plot.add_argument("--out", type=Path, default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = PlotJob(args.trajectory, report=args.report, style=args.style,
                      projection=args.projection, out=args.out)
        if args.style == "diagnostics":
            written = plot_diagnostics(job)
        else:
            written = plot_trajectory(job)
    except VizError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    print(written)
    return 0


if __name__ == "__main__":
    sys.exit(main())
