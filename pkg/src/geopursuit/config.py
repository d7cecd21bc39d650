"""Scenario configuration: parsing, validation, initial-condition construction.

A scenario is a YAML document with nested blocks:

    name: torus_10
    space: {type: torus}
    initial:
      geodesic_perturbed: {oracle: "torus_line:1,0", n: 12, noise: 0.1, seed: 1}
    integrator: {dt_max: 0.01, t_max: 200.0, stop_on_converged: true}
    diagnostics: {oracle: auto}
    expect: converged
    output: {dir: runs/torus_10}

Unknown keys anywhere are rejected with the source line.  Defaults are filled
in and the fully resolved scenario is echoed into the run metadata, so an
output directory always records exactly what was run.
"""

import hashlib
import json
import math

import numpy as np
import yaml

from .engine import IntegratorConfig
from .errors import ConfigError
from .spaces import Euclidean, make_space
from .spaces.oracles import oracle_from_selector

_INTEGRATOR_DEFAULTS = {
    "dt_max": 0.01,
    "t_max": 100.0,
    "capture_eps": None,
    "record_every": 1,
    "step_safety": 0.1,
    "stop_on_converged": False,
    "converged_angle": 1e-6,
    "check_every": 1.0,
}

_DIAGNOSTIC_DEFAULTS = {
    "oracle": "auto",
    "conv_fraction": 5e-3,
    "gap_fraction": 1e-3,
}

_EXPECT_VALUES = ("collapsed", "converged", "any")

_INITIAL_KINDS = ("points", "regular_ngon", "random_cube", "geodesic_perturbed")


class _TracedDict(dict):
    """Mapping that remembers where it and its keys came from."""

    line = None
    key_lines = ()

    def line_of(self, key):
        if isinstance(self.key_lines, dict):
            return self.key_lines.get(key, self.line)
        return self.line


class _TracedLoader(yaml.SafeLoader):
    pass


def _construct_traced_map(loader, node):
    data = _TracedDict()
    data.line = node.start_mark.line + 1
    data.key_lines = {}
    yield data
    value = loader.construct_mapping(node, deep=True)
    for key_node, _ in node.value:
        try:
            data.key_lines[key_node.value] = key_node.start_mark.line + 1
        except TypeError:
            pass
    data.update(value)


_TracedLoader.add_constructor("tag:yaml.org,2002:map", _construct_traced_map)


def _line(block, key=None):
    if isinstance(block, _TracedDict):
        return block.line_of(key) if key is not None else block.line
    return None


def _reject_unknown(block, allowed, where):
    for key in block:
        if key not in allowed:
            raise ConfigError(
                f"unknown key {key!r} in {where} (allowed: {', '.join(sorted(allowed))})",
                line=_line(block, key),
            )


def _require(block, key, where):
    if key not in block:
        raise ConfigError(f"{where} is missing required key {key!r}", line=_line(block))
    return block[key]


def _number(block, key, where, default=None, minimum=None, allow_none=False,
            strict_min=True, integer=False):
    value = block.get(key, default)
    if value is None:
        if allow_none:
            return None
        raise ConfigError(f"{where}.{key} must be set", line=_line(block, key))
    ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    if integer:
        ok = isinstance(value, int) and not isinstance(value, bool)
    if not ok or not math.isfinite(value):
        kind = "an integer" if integer else "a finite number"
        raise ConfigError(f"{where}.{key} must be {kind}, got {value!r}",
                          line=_line(block, key))
    if minimum is not None:
        bad = value <= minimum if strict_min else value < minimum
        if bad:
            op = ">" if strict_min else ">="
            raise ConfigError(f"{where}.{key} must be {op} {minimum}, got {value}",
                              line=_line(block, key))
    return value


class ScenarioConfig:
    """A validated scenario: space, initial loop, integrator and verdict settings.

    Construction validates everything up front, including the standing
    requirement that consecutive bugs start closer than the injectivity
    radius, so a config that constructs will run.
    """

    def __init__(self, name, space_spec, initial_spec, integrator, diagnostics,
                 expect, output_dir):
        self.name = name
        self.space_spec = space_spec
        self.initial_spec = initial_spec
        self.integrator = integrator
        self.diagnostics = diagnostics
        self.expect = expect
        self.output_dir = output_dir

    def build_space(self):
        return make_space(self.space_spec)

    def build_initial(self, space=None):
        space = space if space is not None else self.build_space()
        return build_initial(space, self.initial_spec)

    def integrator_config(self):
        kw = dict(self.integrator)
        return IntegratorConfig(**kw)

    def resolved(self):
        """Plain-dict echo of the scenario with every default filled in."""
        return {
            "name": self.name,
            "space": dict(self.space_spec),
            "initial": {k: (v if k != "points" else [list(map(float, p)) for p in v])
                        for k, v in self.initial_spec.items()},
            "integrator": dict(self.integrator),
            "diagnostics": dict(self.diagnostics),
            "expect": self.expect,
            "output": {"dir": self.output_dir},
        }

    def config_hash(self):
        """Stable digest of the resolved scenario; embedded in every artifact."""
        canon = json.dumps(self.resolved(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:16]


def parse_config(text):
    """Parse and validate one YAML scenario document."""
    try:
        raw = yaml.load(text, Loader=_TracedLoader)
    except yaml.YAMLError as exc:
        line = None
        mark = getattr(exc, "problem_mark", None)
        if mark is not None:
            line = mark.line + 1
        raise ConfigError(f"malformed YAML: {exc}", line=line) from exc
    return config_from_dict(raw)


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def config_from_dict(raw):
    """Validate an already loaded mapping (presets reuse this path)."""
    if not isinstance(raw, dict):
        raise ConfigError("scenario must be a mapping of blocks")
    _reject_unknown(raw, {"name", "space", "initial", "integrator", "diagnostics",
                          "expect", "output"}, "scenario")

    name = _require(raw, "name", "scenario")
    if not isinstance(name, str) or not name:
        raise ConfigError("scenario.name must be a non-empty string",
                          line=_line(raw, "name"))

    space_block = _require(raw, "space", "scenario")
    if not isinstance(space_block, dict):
        raise ConfigError("scenario.space must be a mapping with a 'type' key",
                          line=_line(raw, "space"))
    try:
        space = make_space(dict(space_block))
    except ConfigError as exc:
        raise ConfigError(str(exc), line=_line(raw, "space")) from exc
    space_spec = {k: space_block[k] for k in space_block}

    initial_block = _require(raw, "initial", "scenario")
    initial_spec = _validate_initial(initial_block)

    integ_block = raw.get("integrator", _TracedDict())
    if not isinstance(integ_block, dict):
        raise ConfigError("scenario.integrator must be a mapping",
                          line=_line(raw, "integrator"))
    integrator = _validate_integrator(integ_block)

    diag_block = raw.get("diagnostics", _TracedDict())
    if not isinstance(diag_block, dict):
        raise ConfigError("scenario.diagnostics must be a mapping",
                          line=_line(raw, "diagnostics"))
    diagnostics = _validate_diagnostics(diag_block, space)

    expect = raw.get("expect", "any")
    if expect not in _EXPECT_VALUES:
        raise ConfigError(
            f"scenario.expect must be one of {_EXPECT_VALUES}, got {expect!r}",
            line=_line(raw, "expect"))

    out_block = raw.get("output", _TracedDict())
    if not isinstance(out_block, dict):
        raise ConfigError("scenario.output must be a mapping", line=_line(raw, "output"))
    _reject_unknown(out_block, {"dir"}, "scenario.output")
    output_dir = out_block.get("dir", f"runs/{name}")
    if not isinstance(output_dir, str) or not output_dir:
        raise ConfigError("scenario.output.dir must be a non-empty path",
                          line=_line(out_block, "dir"))

    cfg = ScenarioConfig(name, space_spec, initial_spec, integrator, diagnostics,
                         expect, output_dir)

    # standing hypothesis: consecutive starting bugs must be strictly inside
    # one injectivity radius of each other, otherwise the chased geodesic is
    # not unique and the dynamics are ill-posed
    points = build_initial(space, initial_spec, line=_line(initial_block))
    gaps = space.dist_rows(points, np.roll(points, -1, axis=0))
    worst = int(np.argmax(gaps))
    if gaps[worst] >= space.injectivity_radius:
        raise ConfigError(
            f"initial bugs {worst} and {(worst + 1) % len(points)} are "
            f"{gaps[worst]:.6g} apart, which is not below the injectivity "
            f"radius {space.injectivity_radius:.6g} of {space.name}; "
            "each bug must start strictly within one injectivity radius of "
            "its target so the pursued shortest geodesic is unique",
            line=_line(initial_block))

    # fail early if the integrator kwargs are inconsistent
    cfg.integrator_config().validate()
    return cfg


def _validate_initial(block):
    if not isinstance(block, dict) or len(block) != 1:
        raise ConfigError(
            f"scenario.initial must contain exactly one of {_INITIAL_KINDS}",
            line=_line(block) if isinstance(block, dict) else None)
    kind, body = next(iter(block.items()))
    if kind not in _INITIAL_KINDS:
        raise ConfigError(
            f"unknown initial-condition kind {kind!r} (one of {_INITIAL_KINDS})",
            line=_line(block, kind))

    if kind == "points":
        if (not isinstance(body, list) or len(body) < 2
                or not all(isinstance(p, list) for p in body)):
            raise ConfigError("initial.points must be a list of at least two "
                              "coordinate rows", line=_line(block, kind))
        return {"points": [list(map(float, p)) for p in body]}

    if not isinstance(body, dict):
        raise ConfigError(f"initial.{kind} must be a mapping", line=_line(block, kind))
    where = f"initial.{kind}"

    if kind == "regular_ngon":
        _reject_unknown(body, {"n", "radius"}, where)
        n = _number(body, "n", where, minimum=2, strict_min=False, integer=True)
        radius = _number(body, "radius", where, minimum=0.0)
        return {"regular_ngon": {"n": n, "radius": radius}}

    if kind == "random_cube":
        _reject_unknown(body, {"n", "side", "seed"}, where)
        n = _number(body, "n", where, minimum=2, strict_min=False, integer=True)
        side = _number(body, "side", where, minimum=0.0)
        seed = _number(body, "seed", where, default=0, minimum=0, strict_min=False,
                       integer=True)
        return {"random_cube": {"n": n, "side": side, "seed": seed}}

    _reject_unknown(body, {"oracle", "n", "noise", "seed"}, where)
    oracle = _require(body, "oracle", where)
    if not isinstance(oracle, str):
        raise ConfigError(f"{where}.oracle must be a selector string",
                          line=_line(body, "oracle"))
    n = _number(body, "n", where, minimum=2, strict_min=False, integer=True)
    noise = _number(body, "noise", where, minimum=0.0, strict_min=False)
    seed = _number(body, "seed", where, default=0, minimum=0, strict_min=False,
                   integer=True)
    return {"geodesic_perturbed": {"oracle": oracle, "n": n, "noise": noise,
                                   "seed": seed}}


def _validate_integrator(block):
    _reject_unknown(block, set(_INTEGRATOR_DEFAULTS), "scenario.integrator")
    out = dict(_INTEGRATOR_DEFAULTS)
    out["dt_max"] = _number(block, "dt_max", "integrator",
                            default=out["dt_max"], minimum=0.0)
    out["t_max"] = _number(block, "t_max", "integrator",
                           default=out["t_max"], minimum=0.0)
    out["capture_eps"] = _number(block, "capture_eps", "integrator",
                                 default=None, minimum=0.0, allow_none=True)
    out["record_every"] = _number(block, "record_every", "integrator",
                                  default=out["record_every"], minimum=1,
                                  strict_min=False, integer=True)
    out["step_safety"] = _number(block, "step_safety", "integrator",
                                 default=out["step_safety"], minimum=0.0)
    out["converged_angle"] = _number(block, "converged_angle", "integrator",
                                     default=out["converged_angle"], minimum=0.0)
    out["check_every"] = _number(block, "check_every", "integrator",
                                 default=out["check_every"], minimum=0.0)
    stop = block.get("stop_on_converged", out["stop_on_converged"])
    if not isinstance(stop, bool):
        raise ConfigError("integrator.stop_on_converged must be true or false",
                          line=_line(block, "stop_on_converged"))
    out["stop_on_converged"] = stop
    return out


def _validate_diagnostics(block, space):
    _reject_unknown(block, set(_DIAGNOSTIC_DEFAULTS), "scenario.diagnostics")
    out = dict(_DIAGNOSTIC_DEFAULTS)
    selector = block.get("oracle", out["oracle"])
    if not isinstance(selector, str):
        raise ConfigError("diagnostics.oracle must be a selector string",
                          line=_line(block, "oracle"))
    if selector not in ("auto", "none"):
        # constructing it is the validation
        try:
            oracle_from_selector(space, selector)
        except ConfigError as exc:
            raise ConfigError(str(exc), line=_line(block, "oracle")) from exc
    out["oracle"] = selector
    out["conv_fraction"] = _number(block, "conv_fraction", "diagnostics",
                                   default=out["conv_fraction"], minimum=0.0)
    out["gap_fraction"] = _number(block, "gap_fraction", "diagnostics",
                                  default=out["gap_fraction"], minimum=0.0)
    return out


def build_initial(space, spec, line=None):
    """Construct the (n, coord_dim) starting loop described by an initial block."""
    kind, body = next(iter(spec.items()))

    if kind == "points":
        pts = np.asarray(body, float)
        if pts.ndim != 2 or pts.shape[1] != space.coord_dim:
            raise ConfigError(
                f"initial.points must have {space.coord_dim} coordinates per row "
                f"for {space.name}, got shape {'x'.join(map(str, pts.shape))}",
                line=line)
        try:
            for row in pts:
                space.check_coords(row)
        except Exception as exc:
            raise ConfigError(f"initial point rejected: {exc}", line=line) from exc
        return space.reduce_rows(pts)

    if kind == "regular_ngon":
        if not isinstance(space, Euclidean):
            raise ConfigError("regular_ngon initial conditions need a euclidean "
                              f"space, not {space.name}", line=line)
        n, radius = body["n"], body["radius"]
        th = 2.0 * np.pi * np.arange(n) / n
        pts = np.zeros((n, space.coord_dim))
        pts[:, 0] = radius * np.cos(th)
        pts[:, 1] = radius * np.sin(th)
        return pts

    if kind == "random_cube":
        if not isinstance(space, Euclidean):
            raise ConfigError("random_cube initial conditions need a euclidean "
                              f"space, not {space.name}", line=line)
        rng = np.random.default_rng(body["seed"])
        return rng.uniform(0.0, body["side"], size=(body["n"], space.coord_dim))

    try:
        oracle = oracle_from_selector(space, body["oracle"])
    except ConfigError as exc:
        raise ConfigError(str(exc), line=line) from exc
    n, noise, seed = body["n"], body["noise"], body["seed"]
    base = oracle.points(np.arange(n) / n)
    rng = np.random.default_rng(seed)
    jitter = rng.uniform(-noise, noise, size=base.shape)
    return space.reduce_rows(space.project_rows(base + jitter))
