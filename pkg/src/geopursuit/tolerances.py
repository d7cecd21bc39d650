"""Numeric tolerances used across the geometry layer.

These are deliberate contract numbers, not ad-hoc epsilons: tests assert against
them and scenario configs may override individual fields (see ``replace``).
"""

from dataclasses import dataclass, replace as _replace


@dataclass(frozen=True)
class Tolerances:
    # round-trip d(exp(p, log(p,q)), q)
    roundtrip_closed_form: float = 1e-8
    roundtrip_shooting: float = 1e-6
    # | ||log(p,q)|| - dist(p,q) |
    norm_consistency_closed_form: float = 1e-10
    norm_consistency_shooting: float = 1e-7
    # |dist(p,q) - dist(q,p)|
    dist_symmetry: float = 1e-10
    # triangle inequality slack
    triangle_slack: float = 1e-9
    # constant-speed parameterization of segments, relative to length
    constant_speed_rel: float = 1e-7
    # points are "the same" after fundamental-domain reduction
    point_equality: float = 1e-12
    # Clairaut invariant drift per unit arc length on surfaces of revolution
    clairaut_drift: float = 1e-6
    # speed drift per unit arc length along integrated geodesics
    speed_drift: float = 1e-8
    # deck-transform tie detection in quotient logs
    deck_tie: float = 1e-12

    def replace(self, **kw) -> "Tolerances":
        return _replace(self, **kw)


DEFAULT = Tolerances()
