"""Rendering for cyclic pursuit run artifacts.

Reads the trajectory.csv / report.json pair a run directory contains and
draws still figures, diagnostics panels, and animations.  This package only
consumes the files; it never imports the engine that produced them.
"""

from .charts import (
    align_signs,
    dumbbell_radius,
    embed_dumbbell,
    embed_sphere,
    split_mobius_path,
    split_torus_path,
)
from .io import Trajectory, VizError, read_report, read_trajectory, sibling_report
from .plots import (
    PlotJob,
    diagnostics_figure,
    plot_diagnostics,
    plot_trajectory,
    render_run,
    trajectory_figure,
)

__version__ = "0.1.0"

__all__ = [
    "PlotJob",
    "Trajectory",
    "VizError",
    "align_signs",
    "diagnostics_figure",
    "dumbbell_radius",
    "embed_dumbbell",
    "embed_sphere",
    "plot_diagnostics",
    "plot_trajectory",
    "read_report",
    "read_trajectory",
    "render_run",
    "sibling_report",
    "split_mobius_path",
    "split_torus_path",
    "trajectory_figure",
]
