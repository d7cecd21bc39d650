"""Cyclic pursuit on curved surfaces.

n agents ("bugs") sit on a Riemannian surface; bug i moves at unit speed
straight toward bug i+1 (indices mod n) along the minimizing geodesic. The
package provides the geometry kernel for several concrete surfaces, a
pursuit integrator with capture handling, and diagnostics for the loop
quantities (total length, corner angles, convergence measures) that govern
when pursuit ends in finite time.
"""

from .config import ScenarioConfig, load_config, parse_config
from .diagnostics import (
    ConvergenceReport,
    LoopPath,
    angle_chart_comparison,
    borsuk_check,
    conv_distance,
    convergence_report,
    convex_trap_check,
    finite_time_bounds,
    image_distance_series,
    lambda_min_check,
    loop_from_record,
    loop_metrics,
    neck_trap_check,
    rate_identity_gaps,
    theta_max_series,
    winding_class,
)
from .engine import IntegratorConfig, PursuitLoop, TrajectoryRecord, run_pursuit
from .errors import (
    ConfigError,
    DegenerateLogError,
    DomainExitError,
    GeometryError,
    IntegrationError,
    OutOfInjectivityError,
    SolverError,
    UsageError,
)
from .presets import preset_config, preset_names
from .runner import run_batch, run_scenario
from .geometry import (
    GeodesicSegment,
    ManifoldPoint,
    Space,
    TangentVec,
    angle,
    dist,
    end_tangent,
    exp,
    geodesic,
    geodesic_eval,
    log,
)
from .spaces import (
    Euclidean,
    FlatTorus,
    MobiusBand,
    ProjectivePlane,
    Sphere,
    SurfaceOfRevolution,
    make_space,
)
from .tolerances import DEFAULT as DEFAULT_TOLERANCES
from .tolerances import Tolerances

__version__ = "0.1.0"

__all__ = [
    "ScenarioConfig",
    "load_config",
    "parse_config",
    "ConvergenceReport",
    "LoopPath",
    "angle_chart_comparison",
    "borsuk_check",
    "conv_distance",
    "convergence_report",
    "convex_trap_check",
    "finite_time_bounds",
    "image_distance_series",
    "lambda_min_check",
    "loop_from_record",
    "loop_metrics",
    "neck_trap_check",
    "rate_identity_gaps",
    "theta_max_series",
    "winding_class",
    "IntegratorConfig",
    "PursuitLoop",
    "TrajectoryRecord",
    "run_pursuit",
    "preset_config",
    "preset_names",
    "run_batch",
    "run_scenario",
    "ConfigError",
    "DegenerateLogError",
    "DomainExitError",
    "GeometryError",
    "IntegrationError",
    "OutOfInjectivityError",
    "SolverError",
    "UsageError",
    "GeodesicSegment",
    "ManifoldPoint",
    "Space",
    "TangentVec",
    "angle",
    "dist",
    "end_tangent",
    "exp",
    "geodesic",
    "geodesic_eval",
    "log",
    "Euclidean",
    "FlatTorus",
    "MobiusBand",
    "ProjectivePlane",
    "Sphere",
    "SurfaceOfRevolution",
    "make_space",
    "Tolerances",
    "DEFAULT_TOLERANCES",
    "__version__",
]
