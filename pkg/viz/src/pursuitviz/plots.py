"""Figure builders and the three rendering entry points.

plot_trajectory draws every bug's path and the final loop: flat spaces in
their chart (quotients inside one fundamental domain, seam crossings split),
curved spaces embedded in 3D.  plot_diagnostics draws the l(t), theta_max(t)
and convergence-distance panels.  render_run does both for a run directory.

Rendering is seedless and deterministic: the same inputs produce the same
bytes.
"""

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib import animation

from . import charts
from .io import Trajectory, VizError, read_report, read_trajectory, sibling_report

_STYLES = ("static", "animation", "diagnostics")
_PROJECTIONS = ("auto", "chart", "embedded")

_DPI = 130
_FRAME_CAP = 160  # animation length cap; frames are strided down to this


@dataclass
class PlotJob:
    """One rendering request: which files, which look, where to."""

    trajectory: Path
    report: Path = None
    style: str = "static"
    projection: str = "auto"
    out: Path = None

    def __post_init__(self):
        self.trajectory = Path(self.trajectory)
        if self.style not in _STYLES:
            raise VizError(f"unknown style {self.style!r} (one of {_STYLES})")
        if self.projection not in _PROJECTIONS:
            raise VizError(
                f"unknown projection {self.projection!r} (one of {_PROJECTIONS})")
        if self.report is None:
            self.report = sibling_report(self.trajectory)
        if self.report is None:
            raise VizError(
                "no report given and no report.json next to the trajectory; "
                "the report names the space the coordinates live in")
        self.report = Path(self.report)

    def load(self):
        traj = read_trajectory(self.trajectory)
        rep = read_report(self.report)
        if rep["space"]["coord_dim"] != traj.coord_dim:
            raise VizError(
                f"report says {rep['space']['coord_dim']} coordinates, "
                f"trajectory has {traj.coord_dim}")
        return traj, rep


def plot_trajectory(job: PlotJob) -> Path:
    """Render the bug paths and final loop; returns the written file."""
    traj, rep = job.load()
    if job.style == "animation":
        return _animate(job, traj, rep)
    fig = trajectory_figure(traj, rep, projection=job.projection)
    out = job.out or job.trajectory.with_suffix(".png")
    return _save(fig, out)


def plot_diagnostics(job: PlotJob) -> Path:
    """Render the l(t) / theta_max(t) / convergence panels."""
    traj, rep = job.load()
    fig = diagnostics_figure(traj, rep)
    out = job.out or job.trajectory.parent / "diagnostics.png"
    return _save(fig, out)


def render_run(trajectory, report=None, out_dir=None, style="static"):
    """Trajectory figure plus diagnostics for one run; returns written paths."""
    trajectory = Path(trajectory)
    out_dir = Path(out_dir) if out_dir is not None else trajectory.parent
    out_dir.mkdir(parents=True, exist_ok=True)
    suffix = ".gif" if style == "animation" else ".png"
    written = [
        plot_trajectory(PlotJob(trajectory, report=report, style=style,
                                out=out_dir / ("trajectory" + suffix))),
        plot_diagnostics(PlotJob(trajectory, report=report,
                                 out=out_dir / "diagnostics.png")),
    ]
    return written


def _save(fig, out):
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=_DPI)
    plt.close(fig)
    return out


# ------------------------------------------------------------ still figures


def _resolve_projection(projection, space_type):
    if projection != "auto":
        return projection
    return "embedded" if space_type in ("sphere", "rp2", "dumbbell") else "chart"


def trajectory_figure(traj: Trajectory, rep: dict, projection="auto"):
    """The still trajectory figure; exposed separately so tests can inspect
    the drawn artists."""
    space = rep["space"]
    kind = space["type"]
    mode = _resolve_projection(projection, kind)
    if mode == "embedded":
        if kind not in ("sphere", "rp2", "dumbbell"):
            raise VizError(f"no 3D embedding for {kind}")
        return _figure_3d(traj, rep)
    if kind in ("sphere", "rp2"):
        raise VizError(f"{kind} has no 2D chart rendering; use embedded")
    return _figure_chart(traj, rep)


def _bug_colors(n):
    cmap = plt.get_cmap("viridis")
    return [cmap(i / max(n - 1, 1)) for i in range(n)]


def _title(rep):
    t = f"{rep.get('scenario', 'run')}: {rep['verdict']}"
    if rep.get("collapse_time") is not None:
        t += f" at t={rep['collapse_time']:.3g}"
    return t


def _chart_paths(traj, kind, width):
    """Per-bug list of drawable pieces in the chart."""
    out = []
    for i in range(traj.n_bugs):
        path = traj.positions[:, i, :]
        if kind == "torus":
            out.append(charts.split_torus_path(path))
        elif kind == "mobius":
            out.append(charts.split_mobius_path(path, width))
        else:
            out.append([path])
    return out


def _final_loop_chart(traj, kind, width):
    reps = traj.live_reps(-1)
    loop = traj.positions[-1][reps + reps[:1]]
    if kind == "torus":
        return charts.split_torus_path(loop)
    if kind == "mobius":
        return charts.split_mobius_path(loop, width)
    return [loop]


def _figure_chart(traj, rep):
    space = rep["space"]
    kind = space["type"]
    width = space.get("width", 0.0)
    if kind == "euclidean" and traj.coord_dim == 3:
        return _figure_euclid3(traj, rep)
    if traj.coord_dim != 2:
        raise VizError(f"chart rendering needs 2 coordinates, "
                       f"trajectory has {traj.coord_dim}")

    fig, ax = plt.subplots(figsize=(6.4, 6.4))
    colors = _bug_colors(traj.n_bugs)
    for i, pieces in enumerate(_chart_paths(traj, kind, width)):
        for piece in pieces:
            ax.plot(piece[:, 0], piece[:, 1], color=colors[i], lw=0.9)
        ax.plot(*traj.positions[0, i], marker="o", ms=4, color=colors[i])
    for piece in _final_loop_chart(traj, kind, width):
        ax.plot(piece[:, 0], piece[:, 1], color="black", lw=1.6)

    if kind == "torus":
        ax.set_xlim(0.0, 1.0), ax.set_ylim(0.0, 1.0)
        ax.set_xticks([0, 1]), ax.set_yticks([0, 1])
    elif kind == "mobius":
        # axes frame doubles as the band boundary
        ax.set_xlim(0.0, 1.0), ax.set_ylim(-width, width)
    ax.set_aspect("equal")
    ax.set_title(_title(rep))
    fig.tight_layout()
    return fig


def _figure_euclid3(traj, rep):
    fig = plt.figure(figsize=(7.0, 6.0))
    ax = fig.add_subplot(projection="3d")
    colors = _bug_colors(traj.n_bugs)
    for i in range(traj.n_bugs):
        p = traj.positions[:, i, :]
        ax.plot(p[:, 0], p[:, 1], p[:, 2], color=colors[i], lw=0.9)
        ax.scatter(*traj.positions[0, i], s=14, color=colors[i])
    reps = traj.live_reps(-1)
    loop = traj.positions[-1][reps + reps[:1]]
    ax.plot(loop[:, 0], loop[:, 1], loop[:, 2], color="black", lw=1.6)
    ax.set_title(_title(rep))
    fig.tight_layout()
    return fig


def _embed(points, space):
    kind = space["type"]
    if kind == "sphere":
        return charts.embed_sphere(points, space["radius"])
    if kind == "rp2":
        return charts.embed_sphere(charts.align_signs(points), space["radius"])
    return charts.embed_dumbbell(points, space["depth"], space["profile_width"])


def _figure_3d(traj, rep):
    space = rep["space"]
    fig = plt.figure(figsize=(7.0, 6.0))
    ax = fig.add_subplot(projection="3d")
    if space["type"] == "dumbbell":
        X, Y, Z = charts.dumbbell_mesh(space["depth"], space["profile_width"],
                                       space["z_extent"])
    else:
        X, Y, Z = charts.sphere_mesh(space["radius"])
    ax.plot_surface(X, Y, Z, color="lightgray", alpha=0.25, linewidth=0,
                    antialiased=False, shade=False)

    colors = _bug_colors(traj.n_bugs)
    for i in range(traj.n_bugs):
        e = _embed(traj.positions[:, i, :], space)
        ax.plot(e[:, 0], e[:, 1], e[:, 2], color=colors[i], lw=0.9)
        ax.scatter(*e[0], s=14, color=colors[i])
    reps = traj.live_reps(-1)
    loop = _embed(traj.positions[-1][reps + reps[:1]], space)
    ax.plot(loop[:, 0], loop[:, 1], loop[:, 2], color="black", lw=1.8)
    ax.set_box_aspect((1, 1, 1))
    ax.set_title(_title(rep))
    fig.tight_layout()
    return fig


# -------------------------------------------------------------- diagnostics


def diagnostics_figure(traj: Trajectory, rep: dict):
    fig, axes = plt.subplots(3, 1, figsize=(6.4, 8.0), sharex=True)
    t = traj.times

    ax = axes[0]
    ax.plot(t, traj.l_total, color="tab:blue")
    if rep.get("oracle_length") is not None:
        ax.axhline(rep["oracle_length"], color="gray", ls="--", lw=0.9,
                   label=f"target length {rep['oracle_length']:.4g}")
        ax.legend(loc="best", fontsize=8)
    if rep.get("collapse_time") is not None:
        ax.axvline(rep["collapse_time"], color="tab:red", ls=":", lw=0.9)
    ax.set_ylabel("loop length")
    ax.set_title(_title(rep))

    ax = axes[1]
    th = traj.theta_max
    pos = th > 0
    if pos.any():
        ax.semilogy(t[pos], th[pos], color="tab:orange")
    else:
        ax.plot(t, th, color="tab:orange")
    ax.set_ylabel("max exterior angle")

    ax = axes[2]
    series = rep.get("conv_series") or []
    if series:
        arr = np.asarray(series, float)
        ax.semilogy(arr[:, 0], np.maximum(arr[:, 1], 1e-17), color="tab:green")
        ax.set_ylabel("dist to target loop")
    else:
        ax.text(0.5, 0.5, "no convergence target", ha="center", va="center",
                transform=ax.transAxes, color="gray")
        ax.set_ylabel("dist to target loop")
    ax.set_xlabel("t")
    fig.tight_layout()
    return fig


# ---------------------------------------------------------------- animation


def _frame_stride(n):
    return max(1, -(-n // _FRAME_CAP))


def _animate(job, traj, rep):
    space = rep["space"]
    kind = space["type"]
    mode = _resolve_projection(job.projection, kind)
    if mode == "embedded" or (kind == "euclidean" and traj.coord_dim == 3):
        # 3D animation: redraw stills per frame is slow; fall back to a grid
        return _animation_fallback(job, traj, rep)
    try:
        from matplotlib.animation import PillowWriter
        writer = PillowWriter(fps=24)
    except Exception:
        return _animation_fallback(job, traj, rep)

    width = space.get("width", 0.0)
    stride = _frame_stride(traj.n_frames)
    frames = list(range(0, traj.n_frames, stride))
    if frames[-1] != traj.n_frames - 1:
        frames.append(traj.n_frames - 1)

    fig, ax = plt.subplots(figsize=(5.2, 5.2))
    colors = _bug_colors(traj.n_bugs)
    if kind == "torus":
        ax.set_xlim(0.0, 1.0), ax.set_ylim(0.0, 1.0)
    elif kind == "mobius":
        ax.set_xlim(0.0, 1.0), ax.set_ylim(-width, width)
    else:
        pad = 0.05 * max(np.ptp(traj.positions[..., 0]),
                         np.ptp(traj.positions[..., 1]), 1e-9)
        ax.set_xlim(traj.positions[..., 0].min() - pad,
                    traj.positions[..., 0].max() + pad)
        ax.set_ylim(traj.positions[..., 1].min() - pad,
                    traj.positions[..., 1].max() + pad)
    ax.set_aspect("equal")
    dots, = ax.plot([], [], "o", ms=4, color="black")
    trail_lines = []

    def draw(frame):
        for ln in trail_lines:
            ln.remove()
        trail_lines.clear()
        upto = traj.positions[:frame + 1]
        for i in range(traj.n_bugs):
            path = upto[:, i, :]
            if kind == "torus":
                pieces = charts.split_torus_path(path) if len(path) > 1 else []
            elif kind == "mobius":
                pieces = charts.split_mobius_path(path, width) if len(path) > 1 else []
            else:
                pieces = [path]
            for piece in pieces:
                ln, = ax.plot(piece[:, 0], piece[:, 1], color=colors[i], lw=0.8)
                trail_lines.append(ln)
        P = traj.positions[frame]
        if kind in ("torus",):
            P = P % 1.0
        dots.set_data(P[:, 0], P[:, 1])
        ax.set_title(f"t = {traj.times[frame]:.2f}")
        return [dots]

    anim = animation.FuncAnimation(fig, draw, frames=frames, blit=False)
    out = Path(job.out or job.trajectory.with_suffix(".gif"))
    out.parent.mkdir(parents=True, exist_ok=True)
    anim.save(out, writer=writer, dpi=80)
    plt.close(fig)
    return out


def _animation_fallback(job, traj, rep):
    """Static multi-frame contact sheet when a video writer is unavailable
    or the scene is 3D."""
    picks = np.unique(np.linspace(0, traj.n_frames - 1, 6).astype(int))
    fig = plt.figure(figsize=(10.5, 7.0))
    space = rep["space"]
    for slot, frame in enumerate(picks, start=1):
        sub = Trajectory(times=traj.times[:frame + 1],
                         positions=traj.positions[:frame + 1],
                         groups=traj.groups[:frame + 1],
                         l_total=traj.l_total[:frame + 1],
                         theta_max=traj.theta_max[:frame + 1],
                         config_hash=traj.config_hash)
        mode = _resolve_projection(job.projection, space["type"])
        if mode == "embedded" or (space["type"] == "euclidean"
                                  and traj.coord_dim == 3):
            ax = fig.add_subplot(2, 3, slot, projection="3d")
            _draw_3d_axes(ax, sub, rep)
        else:
            ax = fig.add_subplot(2, 3, slot)
            _draw_chart_axes(ax, sub, rep)
        ax.set_title(f"t = {traj.times[frame]:.2f}", fontsize=9)
    out = Path(job.out or job.trajectory.with_suffix(".png"))
    if out.suffix == ".gif":
        out = out.with_suffix(".png")
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(out, dpi=100)
    plt.close(fig)
    return out


def _draw_chart_axes(ax, traj, rep):
    space = rep["space"]
    kind = space["type"]
    width = space.get("width", 0.0)
    colors = _bug_colors(traj.n_bugs)
    for i, pieces in enumerate(_chart_paths(traj, kind, width)):
        for piece in pieces:
            ax.plot(piece[:, 0], piece[:, 1], color=colors[i], lw=0.7)
    P = traj.positions[-1]
    if kind == "torus":
        P = P % 1.0
        ax.set_xlim(0.0, 1.0), ax.set_ylim(0.0, 1.0)
    elif kind == "mobius":
        ax.set_xlim(0.0, 1.0), ax.set_ylim(-width, width)
    ax.plot(P[:, 0], P[:, 1], "o", ms=3, color="black")
    ax.set_aspect("equal")


def _draw_3d_axes(ax, traj, rep):
    space = rep["space"]
    if space["type"] == "dumbbell":
        X, Y, Z = charts.dumbbell_mesh(space["depth"], space["profile_width"],
                                       space["z_extent"], n=30)
    elif space["type"] in ("sphere", "rp2"):
        X, Y, Z = charts.sphere_mesh(space["radius"], n=20)
    else:
        X = None
    if X is not None:
        ax.plot_surface(X, Y, Z, color="lightgray", alpha=0.2, linewidth=0,
                        antialiased=False, shade=False)
    colors = _bug_colors(traj.n_bugs)
    for i in range(traj.n_bugs):
        p = traj.positions[:, i, :]
        e = _embed(p, space) if space["type"] != "euclidean" else p
        ax.plot(e[:, 0], e[:, 1], e[:, 2], color=colors[i], lw=0.7)
    ax.set_box_aspect((1, 1, 1))
