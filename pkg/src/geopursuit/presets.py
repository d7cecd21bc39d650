"""Shipped scenarios covering the interesting regimes of the dynamics.

Each preset is a plain scenario mapping that goes through the normal config
validation, so `presets emit <name>` output is a valid input for `run`.
Initial data uses seeded randomness; the seeds are part of the preset.
"""

import yaml

from .config import config_from_dict
from .errors import ConfigError

# unit side lengths, so the triangle collapses at t = 2/3 and the square at t = 1
_TRIANGLE_RADIUS = 3 ** -0.5
_SQUARE_RADIUS = 2 ** -0.5

PRESETS = {
    # shrinking Euclidean polygons: logarithmic-spiral captures
    "triangle": {
        "name": "triangle",
        "space": {"type": "euclidean", "dim": 2},
        "initial": {"regular_ngon": {"n": 3, "radius": _TRIANGLE_RADIUS}},
        "integrator": {"dt_max": 0.005, "t_max": 1.0, "record_every": 2},
        "diagnostics": {"oracle": "none"},
        "expect": "collapsed",
    },
    "square": {
        "name": "square",
        "space": {"type": "euclidean", "dim": 2},
        "initial": {"regular_ngon": {"n": 4, "radius": _SQUARE_RADIUS}},
        "integrator": {"dt_max": 0.005, "t_max": 2.0, "record_every": 2},
        "diagnostics": {"oracle": "none"},
        "expect": "collapsed",
    },
    "euclid_ngon": {
        "name": "euclid_ngon",
        "space": {"type": "euclidean", "dim": 2},
        "initial": {"regular_ngon": {"n": 8, "radius": 1.0}},
        "integrator": {"dt_max": 0.01, "t_max": 4.0, "record_every": 2},
        "diagnostics": {"oracle": "none"},
        "expect": "collapsed",
    },
    # generic cloud in the unit cube; collapse time obeys the length bound
    "euclid_random_cube": {
        "name": "euclid_random_cube",
        "space": {"type": "euclidean", "dim": 3},
        "initial": {"random_cube": {"n": 10, "side": 1.0, "seed": 0}},
        "integrator": {"dt_max": 0.01, "t_max": 25.0, "capture_eps": 1e-6,
                       "record_every": 4},
        "diagnostics": {"oracle": "none"},
        "expect": "collapsed",
    },
    # noncontractible loops on the flat torus straighten onto closed geodesics
    "torus_10": {
        "name": "torus_10",
        "space": {"type": "torus"},
        "initial": {"geodesic_perturbed": {"oracle": "torus_line:1,0", "n": 12,
                                           "noise": 0.1, "seed": 1}},
        "integrator": {"dt_max": 0.01, "t_max": 200.0, "record_every": 5,
                       "stop_on_converged": True},
        "diagnostics": {"oracle": "auto"},
        "expect": "converged",
    },
    "torus_11": {
        "name": "torus_11",
        "space": {"type": "torus"},
        "initial": {"geodesic_perturbed": {"oracle": "torus_line:1,1", "n": 12,
                                           "noise": 0.1, "seed": 1}},
        "integrator": {"dt_max": 0.01, "t_max": 200.0, "record_every": 5,
                       "stop_on_converged": True},
        "diagnostics": {"oracle": "auto"},
        "expect": "converged",
    },
    "mobius": {
        "name": "mobius",
        "space": {"type": "mobius", "width": 0.5},
        "initial": {"geodesic_perturbed": {"oracle": "mobius_centerline", "n": 10,
                                           "noise": 0.05, "seed": 2}},
        "integrator": {"dt_max": 0.01, "t_max": 200.0, "record_every": 5,
                       "stop_on_converged": True},
        "diagnostics": {"oracle": "auto"},
        "expect": "converged",
    },
    # positive curvature is exploratory: no convergence theorem, verdicts are
    # whatever the run produces
    "sphere": {
        "name": "sphere",
        "space": {"type": "sphere", "radius": 1.0},
        "initial": {"geodesic_perturbed": {"oracle": "great_circle", "n": 8,
                                           "noise": 0.1, "seed": 3}},
        "integrator": {"dt_max": 0.01, "t_max": 150.0, "record_every": 5,
                       "stop_on_converged": True},
        "diagnostics": {"oracle": "auto"},
        "expect": "any",
    },
    "rp2": {
        "name": "rp2",
        "space": {"type": "rp2", "radius": 1.0},
        "initial": {"geodesic_perturbed": {"oracle": "projective_line", "n": 8,
                                           "noise": 0.08, "seed": 4}},
        "integrator": {"dt_max": 0.01, "t_max": 150.0, "record_every": 5,
                       "stop_on_converged": True},
        "diagnostics": {"oracle": "auto"},
        "expect": "any",
    },
    # loop around the dumbbell waist, inside the trapping collar
    "dumbbell_neck": {
        "name": "dumbbell_neck",
        "space": {"type": "dumbbell"},
        "initial": {"geodesic_perturbed": {"oracle": "neck_circle", "n": 10,
                                           "noise": 0.04, "seed": 5}},
        "integrator": {"dt_max": 0.01, "t_max": 60.0, "record_every": 5,
                       "stop_on_converged": True},
        "diagnostics": {"oracle": "auto"},
        "expect": "converged",
    },
}


def preset_names():
    return sorted(PRESETS)


def preset_config(name, **overrides):
    """Validated ScenarioConfig for a named preset.

    Keyword overrides replace whole top-level blocks (handy for sweeping
    seeds or shortening t_max in tests).
    """
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r} (one of {', '.join(preset_names())})")
    spec = {k: (dict(v) if isinstance(v, dict) else v) for k, v in PRESETS[name].items()}
    for key, value in overrides.items():
        spec[key] = value
    return config_from_dict(spec)


def preset_text(name):
    """Preset as a YAML document that parses back to the same scenario."""
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r} (one of {', '.join(preset_names())})")
    return yaml.safe_dump(PRESETS[name], sort_keys=False)
