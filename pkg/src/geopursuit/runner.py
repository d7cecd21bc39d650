"""Scenario execution and artifact export.

A run produces three files in its output directory, all written atomically
and all carrying the scenario's config hash:

    trajectory.csv   one row per bug per recorded sample
    report.json      verdict and the numbers behind it
    metadata.json    resolved config echo, versions, wall time

Reruns of the same scenario produce byte-identical trajectory files.
"""

import json
import math
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .config import ScenarioConfig, load_config
from .diagnostics import convergence_report, image_distance_series, winding_class
from .engine import run_pursuit
from .errors import ConfigError, GeometryError, UsageError
from .spaces import Euclidean, FlatTorus, MobiusBand, ProjectivePlane, Sphere, \
    SurfaceOfRevolution
from .spaces.oracles import GreatCircleOracle, MobiusCenterlineOracle, \
    NeckCircleOracle, ProjectiveLineOracle, TorusLineOracle, oracle_from_selector

OUTDIR_ENV = "GEOPURSUIT_OUTDIR"

TRAJECTORY_FILE = "trajectory.csv"
REPORT_FILE = "report.json"
METADATA_FILE = "metadata.json"


class RunResult:
    """What one scenario run produced: verdict, artifacts, exit code."""

    def __init__(self, config, record, report, outdir, exit_code):
        self.config = config
        self.record = record
        self.report = report
        self.outdir = outdir
        self.exit_code = exit_code

    @property
    def verdict(self):
        return self.report["verdict"]


def resolve_outdir(config, outdir=None):
    """Output directory for a scenario: explicit arg, env base, or config."""
    if outdir is not None:
        return Path(outdir) / config.name
    env = os.environ.get(OUTDIR_ENV)
    if env:
        return Path(env) / config.name
    return Path(config.output_dir)


def run_scenario(config: ScenarioConfig, outdir=None) -> RunResult:
    """Run one scenario end to end and write its artifacts."""
    out = resolve_outdir(config, outdir)
    out.mkdir(parents=True, exist_ok=True)
    started = time.time()
    space = config.build_space()
    positions = config.build_initial(space)
    chash = config.config_hash()

    record = None
    try:
        record = run_pursuit(space, positions, config.integrator_config())
        report = _build_report(config, space, record, chash)
    except GeometryError as exc:
        report = {
            "scenario": config.name,
            "config_hash": chash,
            "space": _space_info(space, config.space_spec),
            "verdict": "error",
            "error": str(exc),
            "error_type": type(exc).__name__,
            "expected": config.expect,
            "expectation_met": False,
            "exit_code": 2,
            "events": [],
        }

    if record is not None:
        _atomic_write(out / TRAJECTORY_FILE, _trajectory_csv(record, chash))
    _atomic_write(out / REPORT_FILE, _json_text(report))
    meta = {
        "scenario": config.name,
        "config": config.resolved(),
        "config_hash": chash,
        "versions": _versions(),
        "wall_time_s": time.time() - started,
        "artifacts": {
            "trajectory": TRAJECTORY_FILE if record is not None else None,
            "report": REPORT_FILE,
        },
    }
    _atomic_write(out / METADATA_FILE, _json_text(meta))
    return RunResult(config, record, report, out, report["exit_code"])


# ------------------------------------------------------------------ verdicts


def _build_report(config, space, record, chash):
    verdict = "undecided"
    conv = None
    oracle = None
    winding = _safe_winding(space, record)

    if record.termination == "all_merged":
        verdict = "collapsed"
        if config.diagnostics["oracle"] not in ("auto", "none"):
            oracle = oracle_from_selector(space, config.diagnostics["oracle"])
    else:
        oracle = select_oracle(space, record, config.diagnostics["oracle"])

    if oracle is not None:
        conv = convergence_report(
            space, record, oracle,
            conv_fraction=config.diagnostics["conv_fraction"],
            gap_fraction=config.diagnostics["gap_fraction"])
        if record.termination != "all_merged":
            verdict = conv.verdict

    met = config.expect == "any" or verdict == config.expect
    exit_code = 0 if met and verdict != "error" else 1

    report = {
        "scenario": config.name,
        "config_hash": chash,
        "space": _space_info(space, config.space_spec),
        "verdict": verdict,
        "expected": config.expect,
        "expectation_met": bool(met),
        "exit_code": exit_code,
        "termination": record.termination,
        "t_final": float(record.t_final),
        "n_bugs": int(record.n_bugs),
        "live_final": int(record.live_count[-1]),
        "l_initial": float(record.l_total[0]),
        "l_final": float(record.l_total[-1]),
        "theta_max_final": float(record.theta_max[-1]),
        "rate_integral_final": float(record.rate_integral[-1]),
        "winding": winding,
        "events": [
            {"t": float(e.t), "kind": e.kind,
             "members": [int(m) for m in e.members], "rep": int(e.rep)}
            for e in record.events
        ],
    }
    if record.capture_time is not None:
        report["collapse_time"] = float(record.capture_time)
    if conv is not None:
        report["oracle"] = conv.oracle_name
        report["oracle_length"] = float(conv.oracle_length)
        report["loop_length"] = float(conv.loop_length)
        report["length_gap"] = float(conv.length_gap)
        report["conv_dist"] = float(conv.conv_dist)
        report["best_c"] = None if conv.best_c is None else float(conv.best_c)
        report["sup_dist_to_image"] = float(conv.sup_dist_to_image)
        stride = max(1, len(record.times) // 80)
        ts, sups = image_distance_series(space, record, oracle, stride=stride,
                                         samples_per_seg=16)
        report["conv_series"] = [[float(a), float(b)] for a, b in zip(ts, sups)]
    return report


def _safe_winding(space, record):
    reps = np.unique(record.groups[-1])
    if len(reps) < 2:
        return None
    verts = record.positions[-1][reps]
    try:
        w = winding_class(space, verts)
    except GeometryError:
        return None
    cls = w["class"]
    if isinstance(cls, tuple):
        cls = list(cls)
    return {"kind": w["kind"], "class": cls}


def select_oracle(space, record, selector):
    """Oracle instance for verdict evaluation, or None when there is no target.

    Explicit selectors are honored as written except that families with a
    positional modulus (torus lines, great circles, projective lines) are
    refitted to the final loop, since any member of the family is an equally
    valid limit.  "auto" detects the topological class of the final loop and
    picks the matching family; contractible or multiply covered loops give
    None (no convergence target; verdict stays undecided unless collapsed).
    """
    reps = np.unique(record.groups[-1])
    verts = record.positions[-1][reps]

    if selector == "none":
        return None
    if selector != "auto":
        oracle = oracle_from_selector(space, selector)
        if len(verts) >= 3:
            if isinstance(oracle, TorusLineOracle):
                oracle = TorusLineOracle.fit(space, *oracle.winding, verts)
            elif isinstance(oracle, ProjectiveLineOracle):
                oracle = ProjectiveLineOracle.fit(space, verts)
            elif isinstance(oracle, GreatCircleOracle):
                oracle = GreatCircleOracle.fit(space, verts)
        return oracle

    if len(verts) < 3:
        return None
    try:
        if isinstance(space, FlatTorus):
            w = winding_class(space, verts)["class"]
            if w == (0, 0) or math.gcd(abs(w[0]), abs(w[1])) != 1:
                return None
            return TorusLineOracle.fit(space, w[0], w[1], verts)
        if isinstance(space, MobiusBand):
            k = winding_class(space, verts)["class"]
            if abs(k) != 1:
                return None
            return MobiusCenterlineOracle(space, direction=k)
        if isinstance(space, SurfaceOfRevolution):
            k = winding_class(space, verts)["class"]
            if abs(k) != 1:
                return None
            return NeckCircleOracle(space, direction=k)
        if isinstance(space, ProjectivePlane):
            if winding_class(space, verts)["class"] != 1:
                return None
            return ProjectiveLineOracle.fit(space, verts)
        if isinstance(space, Sphere):
            return GreatCircleOracle.fit(space, verts)
    except GeometryError:
        return None
    return None


# ------------------------------------------------------------------- writers


def _trajectory_csv(record, chash):
    cd = record.positions.shape[2]
    cols = ["t", "bug_index", "live_group"]
    cols += [f"coord_{k}" for k in range(cd)]
    cols += ["l_total", "theta_max"]
    lines = [f"# config_hash={chash}", ",".join(cols)]
    for m in range(len(record.times)):
        t = repr(float(record.times[m]))
        l_tot = repr(float(record.l_total[m]))
        th = repr(float(record.theta_max[m]))
        for i in range(record.n_bugs):
            row = [t, str(i), str(int(record.groups[m, i]))]
            row += [repr(float(x)) for x in record.positions[m, i]]
            row.append(l_tot)
            row.append(th)
            lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def _space_info(space, spec):
    info = {"type": spec["type"], "name": space.name,
            "coord_dim": int(space.coord_dim)}
    inj = space.injectivity_radius
    info["injectivity_radius"] = None if math.isinf(inj) else float(inj)
    if isinstance(space, Euclidean):
        info["dim"] = int(space.dim)
    elif isinstance(space, MobiusBand):
        info["width"] = float(space.width)
    elif isinstance(space, SurfaceOfRevolution):
        info["depth"] = float(space.depth)
        info["profile_width"] = float(space.width)
        info["z_extent"] = float(space.z_extent)
        info["neck_radius"] = float(space.neck_radius)
    elif isinstance(space, Sphere):
        info["radius"] = float(space.radius)
    return info


def _jsonify(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _json_text(obj):
    return json.dumps(obj, indent=2, sort_keys=True, default=_jsonify) + "\n"


def _atomic_write(path, text):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _versions():
    import platform

    from . import __version__
    return {
        "geopursuit": __version__,
        "numpy": np.__version__,
        "python": platform.python_version(),
    }


# --------------------------------------------------------------------- batch


_SUMMARY_COLS = ("scenario", "verdict", "exit", "collapse_time", "conv_dist",
                 "length_gap", "theta_max_final", "outdir")


def _summarize(result: RunResult):
    rep = result.report
    return {
        "scenario": rep["scenario"],
        "verdict": rep["verdict"],
        "exit": result.exit_code,
        "collapse_time": rep.get("collapse_time"),
        "conv_dist": rep.get("conv_dist"),
        "length_gap": rep.get("length_gap"),
        "theta_max_final": rep.get("theta_max_final"),
        "outdir": str(result.outdir),
    }


def _batch_worker(path, outdir):
    try:
        config = load_config(path)
        return _summarize(run_scenario(config, outdir=outdir))
    except GeometryError as exc:
        return {
            "scenario": str(path),
            "verdict": "error",
            "exit": 2,
            "collapse_time": None,
            "conv_dist": None,
            "length_gap": None,
            "theta_max_final": None,
            "outdir": "",
            "error": str(exc),
        }


def run_batch(paths, jobs=1, outdir=None):
    """Run scenario files independently; returns (rows, max exit code).

    Scenario failures are isolated into their row; the batch exit code is
    the max of the children's.  A summary CSV lands next to the runs.
    """
    paths = [str(p) for p in paths]
    if not paths:
        raise UsageError("batch needs at least one scenario config")
    if jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_batch_worker, p, outdir) for p in paths]
            rows = [f.result() for f in futures]
    else:
        rows = [_batch_worker(p, outdir) for p in paths]

    base = Path(outdir) if outdir else Path(os.environ.get(OUTDIR_ENV) or "runs")
    base.mkdir(parents=True, exist_ok=True)
    _atomic_write(base / "batch_summary.csv", _summary_csv(rows))
    return rows, max(r["exit"] for r in rows)


def _summary_csv(rows):
    def cell(v):
        if v is None:
            return ""
        if isinstance(v, float):
            return repr(v)
        return str(v)

    lines = [",".join(_SUMMARY_COLS)]
    for r in rows:
        lines.append(",".join(cell(r.get(c)) for c in _SUMMARY_COLS))
    return "\n".join(lines) + "\n"


def summary_table(rows):
    """Pretty fixed-width text table of batch results."""
    headers = ["scenario", "verdict", "exit", "collapse_time", "conv_dist",
               "length_gap", "theta_max_final"]

    def fmt(r, h):
        v = r.get(h)
        if v is None:
            return "-"
        if isinstance(v, float):
            return f"{v:.6g}"
        return str(v)

    table = [[fmt(r, h) for h in headers] for r in rows]
    widths = [max(len(h), *(len(row[i]) for row in table)) if table else len(h)
              for i, h in enumerate(headers)]
    out = ["  ".join(h.ljust(w) for h, w in zip(headers, widths))]
    for row in table:
        out.append("  ".join(c.ljust(w) for c, w in zip(row, widths)))
    return "\n".join(out)
