"""Command-line front end.

    geopursuit run <config.yaml | preset name> [--outdir DIR]
    geopursuit batch <dir | configs...> [--jobs N] [--outdir DIR]
    geopursuit presets list
    geopursuit presets emit <name> [-o FILE]

Exit codes: 0 verdict matched the scenario's expectation, 1 undecided or
mismatched, 2 configuration or solver error.
"""

import argparse
import sys
from pathlib import Path

from .errors import GeometryError
from .presets import preset_config, preset_names, preset_text
from .runner import run_batch, run_scenario, summary_table


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="geopursuit",
        description="cyclic pursuit on curved spaces: run scenarios, export "
                    "trajectories and verdicts")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario config or preset")
    p_run.add_argument("config", help="path to a scenario YAML, or a preset name")
    p_run.add_argument("--outdir", default=None,
                       help="base output directory (overrides config and "
                            "GEOPURSUIT_OUTDIR)")

    p_batch = sub.add_parser("batch", help="run many scenarios")
    p_batch.add_argument("configs", nargs="+",
                         help="scenario YAML files, or one directory of them")
    p_batch.add_argument("--jobs", type=int, default=1,
                         help="parallel worker processes (default 1)")
    p_batch.add_argument("--outdir", default=None, help="base output directory")

    p_presets = sub.add_parser("presets", help="list or emit shipped scenarios")
    psub = p_presets.add_subparsers(dest="presets_command", required=True)
    psub.add_parser("list", help="names of shipped presets")
    p_emit = psub.add_parser("emit", help="write a preset as a config file")
    p_emit.add_argument("name")
    p_emit.add_argument("-o", "--output", default=None,
                        help="destination file (default stdout)")
    return parser


def _cmd_run(args):
    path = Path(args.config)
    if path.exists():
        from .config import load_config
        config = load_config(path)
    else:
        config = preset_config(args.config)
    result = run_scenario(config, outdir=args.outdir)
    rep = result.report
    bits = [f"scenario={rep['scenario']}", f"verdict={rep['verdict']}"]
    for key in ("collapse_time", "conv_dist", "length_gap", "theta_max_final"):
        if rep.get(key) is not None:
            bits.append(f"{key}={rep[key]:.6g}")
    bits.append(f"outdir={result.outdir}")
    print("  ".join(bits))
    if rep["verdict"] == "error":
        print(f"error: {rep['error']}", file=sys.stderr)
    return result.exit_code


def _expand_batch(items):
    if len(items) == 1 and Path(items[0]).is_dir():
        found = sorted(Path(items[0]).glob("*.yaml")) + sorted(Path(items[0]).glob("*.yml"))
        return [str(p) for p in found]
    return list(items)


def _cmd_batch(args):
    paths = _expand_batch(args.configs)
    rows, code = run_batch(paths, jobs=max(1, args.jobs), outdir=args.outdir)
    print(summary_table(rows))
    for row in rows:
        if row.get("error"):
            print(f"error in {row['scenario']}: {row['error']}", file=sys.stderr)
    return code


def _cmd_presets(args):
    if args.presets_command == "list":
        for name in preset_names():
            print(name)
        return 0
    text = preset_text(args.name)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "batch":
            return _cmd_batch(args)
        return _cmd_presets(args)
    except GeometryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
