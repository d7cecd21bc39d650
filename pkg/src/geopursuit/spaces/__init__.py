"""Concrete pursuit domains and the config-driven factory."""

from ..errors import ConfigError
from .euclidean import Euclidean
from .flat import FlatTorus, MobiusBand
from .revolution import SurfaceOfRevolution
from .sphere import ProjectivePlane, Sphere

__all__ = [
    "Euclidean",
    "FlatTorus",
    "MobiusBand",
    "ProjectivePlane",
    "Sphere",
    "SurfaceOfRevolution",
    "make_space",
    "SPACE_TYPES",
]

# type name -> (constructor, allowed keyword params)
SPACE_TYPES = {
    "euclidean": (Euclidean, {"dim"}),
    "torus": (FlatTorus, set()),
    "mobius": (MobiusBand, {"width"}),
    "sphere": (Sphere, {"radius"}),
    "rp2": (ProjectivePlane, {"radius"}),
    "dumbbell": (
        SurfaceOfRevolution,
        {"depth", "width", "z_extent", "injectivity_bound"},
    ),
}


def make_space(spec, tol=None):
    """Build a space from a config mapping like {"type": "sphere", "radius": 2}.

    Unknown types and unknown parameters are rejected rather than ignored.
    """
    if isinstance(spec, str):
        spec = {"type": spec}
    if not isinstance(spec, dict):
        raise ConfigError(f"space config must be a mapping, got {type(spec).__name__}")
    spec = dict(spec)
    kind = spec.pop("type", None)
    if kind is None:
        raise ConfigError("space config is missing 'type'")
    entry = SPACE_TYPES.get(kind)
    if entry is None:
        known = ", ".join(sorted(SPACE_TYPES))
        raise ConfigError(f"unknown space type {kind!r} (known: {known})")
    ctor, allowed = entry
    extra = set(spec) - allowed
    if extra:
        raise ConfigError(
            f"space type {kind!r} does not accept parameter(s): {', '.join(sorted(extra))}"
        )
    if tol is not None:
        spec["tol"] = tol
    return ctor(**spec)
