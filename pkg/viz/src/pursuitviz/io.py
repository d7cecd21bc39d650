"""Readers for the simulator's output files.

Everything downstream works from two artifacts of a run directory:

    trajectory.csv   "# config_hash=..." comment, header, one row per bug
                     per recorded frame
    report.json      verdict, space description, optional conv_dist series

The readers validate the schema up front and raise VizError with a message
that names what was wrong, so a plot never half-renders from garbage.
"""

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

KNOWN_SPACES = ("euclidean", "torus", "mobius", "sphere", "rp2", "dumbbell")

_FIXED_HEAD = ("t", "bug_index", "live_group")
_FIXED_TAIL = ("l_total", "theta_max")


class VizError(Exception):
    """Input file missing, malformed, or from an unknown space."""


@dataclass
class Trajectory:
    """One run's recorded frames, frame-major."""

    times: np.ndarray      # (m,)
    positions: np.ndarray  # (m, n, k)
    groups: np.ndarray     # (m, n) live-group representative per bug
    l_total: np.ndarray    # (m,)
    theta_max: np.ndarray  # (m,)
    config_hash: str = ""

    @property
    def n_frames(self):
        return self.positions.shape[0]

    @property
    def n_bugs(self):
        return self.positions.shape[1]

    @property
    def coord_dim(self):
        return self.positions.shape[2]

    def live_reps(self, frame=-1):
        """Indices of the distinct live groups at a frame, in bug order."""
        seen = []
        for g in self.groups[frame]:
            if g not in seen:
                seen.append(int(g))
        return seen


def read_trajectory(path) -> Trajectory:
    path = Path(path)
    if not path.exists():
        raise VizError(f"trajectory file not found: {path}")
    chash = ""
    with open(path, newline="", encoding="utf-8") as fh:
        first = fh.readline()
        if first.startswith("#"):
            if "config_hash=" in first:
                chash = first.split("config_hash=", 1)[1].strip()
            header_line = fh.readline()
        else:
            header_line = first
        header = next(csv.reader([header_line])) if header_line.strip() else []
        _check_header(header, path)
        k = len(header) - len(_FIXED_HEAD) - len(_FIXED_TAIL)
        rows = []
        for lineno, row in enumerate(csv.reader(fh), start=3):
            if not row:
                continue
            if len(row) != len(header):
                raise VizError(f"{path}:{lineno}: expected {len(header)} "
                               f"columns, got {len(row)}")
            rows.append(row)
    if not rows:
        raise VizError(f"trajectory {path} has a header but no samples")

    try:
        data = np.array(rows, dtype=float)
    except ValueError as exc:
        raise VizError(f"trajectory {path} has a non-numeric cell: {exc}") from exc
    bug = data[:, 1].astype(int)
    n = int(bug.max()) + 1
    if len(rows) % n != 0:
        raise VizError(f"trajectory {path} has {len(rows)} rows, not a "
                       f"multiple of the bug count {n}")
    m = len(rows) // n
    if not np.array_equal(bug, np.tile(np.arange(n), m)):
        raise VizError(f"trajectory {path}: bug_index must cycle 0..{n - 1} "
                       "within each frame")
    t = data[:, 0].reshape(m, n)
    if np.any(t != t[:, :1]):
        raise VizError(f"trajectory {path}: t varies within a frame block")

    return Trajectory(
        times=t[:, 0],
        positions=data[:, 3:3 + k].reshape(m, n, k),
        groups=data[:, 2].astype(int).reshape(m, n),
        l_total=data[:, 3 + k].reshape(m, n)[:, 0],
        theta_max=data[:, 4 + k].reshape(m, n)[:, 0],
        config_hash=chash,
    )


def _check_header(header, path):
    k = len(header) - len(_FIXED_HEAD) - len(_FIXED_TAIL)
    want_coords = [f"coord_{i}" for i in range(max(k, 0))]
    want = list(_FIXED_HEAD) + want_coords + list(_FIXED_TAIL)
    if k < 1 or header != want:
        raise VizError(
            f"trajectory {path} has header {header!r}; expected "
            f"t,bug_index,live_group,coord_0..,l_total,theta_max")


def read_report(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise VizError(f"report file not found: {path}")
    try:
        with open(path, encoding="utf-8") as fh:
            rep = json.load(fh)
    except json.JSONDecodeError as exc:
        raise VizError(f"report {path} is not valid JSON: {exc}") from exc
    if not isinstance(rep, dict) or "space" not in rep or "verdict" not in rep:
        raise VizError(f"report {path} is missing the space/verdict fields")
    space = rep["space"]
    if not isinstance(space, dict) or "type" not in space:
        raise VizError(f"report {path}: space block has no type")
    if "coord_dim" not in space:
        raise VizError(f"report {path}: space block has no coord_dim")
    if space["type"] not in KNOWN_SPACES:
        raise VizError(f"report {path}: unknown space type {space['type']!r} "
                       f"(known: {', '.join(KNOWN_SPACES)})")
    return rep


def sibling_report(trajectory_path):
    """Default report location: report.json next to the trajectory."""
    p = Path(trajectory_path).parent / "report.json"
    return p if p.exists() else None
