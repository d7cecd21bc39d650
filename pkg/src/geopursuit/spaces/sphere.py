"""Round sphere S^2 and the projective plane RP^2.

Points are stored as unit 3-vectors regardless of the metric radius; the
radius enters through the metric (inner products scale by radius^2), so a
tangent vector of Euclidean norm t has metric norm radius * t. The
projective plane reuses the spherical formulas on whichever lift of the
target is nearer, and canonicalizes representatives so that the first
nonzero coordinate is positive.
"""

import numpy as np

from ..errors import DegenerateLogError, OutOfInjectivityError, UsageError
from ..geometry import Space

_ANTIPODAL_MARGIN = 1e-9


def _angle_between_units(a, b):
    """Angle between unit vectors, stable at both ends of [0, pi]
    (arccos of the dot product loses ~8 digits near 0 and pi)."""
    return 2.0 * np.arctan2(np.linalg.norm(a - b), np.linalg.norm(a + b))


def _angle_between_unit_rows(A, B):
    return 2.0 * np.arctan2(
        np.linalg.norm(A - B, axis=1), np.linalg.norm(A + B, axis=1)
    )


class Sphere(Space):
    closed_form_geodesics = True
    coord_dim = 3
    dim = 2

    def __init__(self, radius=1.0, tol=None):
        super().__init__(**({"tol": tol} if tol else {}))
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.radius = float(radius)
        self.name = f"sphere(r={radius:g})"
        self.injectivity_radius = np.pi * self.radius
        self.convexity_radius = 0.5 * np.pi * self.radius
        self.shortest_closed_geodesic = 2.0 * np.pi * self.radius

    def check_coords(self, c):
        super().check_coords(c)
        n = np.linalg.norm(c)
        if n < 0.5 or n > 2.0:
            raise UsageError(f"{self.name}: coordinates far from the unit sphere (|c|={n:.3g})")

    def reduce_c(self, c):
        c = np.asarray(c, dtype=float)
        return c / np.linalg.norm(c)

    def reduce_rows(self, C):
        C = np.asarray(C, dtype=float)
        return C / np.linalg.norm(C, axis=1)[:, None]

    project_rows = reduce_rows

    def _clean_tangent(self, base_c, v):
        normal = float(np.dot(v, base_c))
        if abs(normal) > 1e-6 * max(1.0, np.linalg.norm(v)):
            raise UsageError("tangent components stick out of the tangent plane")
        return v - normal * base_c

    def dist_c(self, a, b):
        return self.radius * float(_angle_between_units(np.asarray(a, float), np.asarray(b, float)))

    def log_c(self, a, b, guess=None):
        a = np.asarray(a, float)
        b = np.asarray(b, float)
        c = float(np.clip(np.dot(a, b), -1.0, 1.0))
        theta = float(_angle_between_units(a, b))
        if theta >= np.pi - _ANTIPODAL_MARGIN:
            raise OutOfInjectivityError(f"{self.name}: points are (nearly) antipodal")
        w = b - c * a
        wn = np.linalg.norm(w)
        if wn == 0.0:
            raise DegenerateLogError("log at coincident points")
        return (theta / wn) * w

    def exp_c(self, a, v):
        a = np.asarray(a, float)
        v = np.asarray(v, float)
        theta = np.linalg.norm(v)  # metric norm / radius
        if theta == 0.0:
            return a.copy()
        w = v / theta
        out = np.cos(theta) * a + np.sin(theta) * w
        return out / np.linalg.norm(out)

    def inner_c(self, base, u, v):
        return self.radius**2 * float(np.dot(u, v))

    def tangent_frame(self, c):
        c = np.asarray(c, float)
        ref = np.array([0.0, 0.0, 1.0]) if abs(c[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
        u = np.cross(c, ref)
        u = u / (np.linalg.norm(u) * self.radius)
        v = np.cross(c, u * self.radius) / self.radius
        return np.array([u, v])

    def chase_logs(self, P, Q, guesses=None):
        P = np.asarray(P, float)
        Q = np.asarray(Q, float)
        c = np.clip(np.einsum("ij,ij->i", P, Q), -1.0, 1.0)
        theta = _angle_between_unit_rows(P, Q)
        if np.any(theta >= np.pi - _ANTIPODAL_MARGIN):
            raise OutOfInjectivityError(f"{self.name}: a chased pair is (nearly) antipodal")
        w = Q - c[:, None] * P
        wn = np.linalg.norm(w, axis=1)
        if np.any(wn == 0.0):
            raise DegenerateLogError("chase over coincident points")
        w = w / wn[:, None]
        V = theta[:, None] * w
        D = self.radius * theta
        # forward unit tangent at Q: differentiate the great circle
        E = (-np.sin(theta)[:, None] * P + np.cos(theta)[:, None] * w) / self.radius
        return V, D, E, None

    def dist_rows(self, A, B):
        return self.radius * _angle_between_unit_rows(np.asarray(A, float), np.asarray(B, float))

    def random_point(self, rng):
        v = rng.normal(size=3)
        return self.point(v / np.linalg.norm(v))


def _canonical_sign(c, tol=1e-12):
    """Sign flip making the first non-negligible coordinate positive."""
    for x in c:
        if abs(x) > tol:
            return 1.0 if x > 0 else -1.0
    return 1.0


class ProjectivePlane(Sphere):
    """RP^2: the sphere with antipodal points identified."""

    def __init__(self, radius=1.0, tol=None):
        super().__init__(radius=radius, tol=tol)
        self.name = f"rp2(r={radius:g})"
        self.injectivity_radius = 0.5 * np.pi * self.radius
        self.convexity_radius = 0.25 * np.pi * self.radius
        self.shortest_closed_geodesic = np.pi * self.radius
        self.is_quotient = True

    def reduce_c(self, c):
        c = super().reduce_c(c)
        return _canonical_sign(c) * c

    def reduce_rows(self, C):
        C = super().reduce_rows(C)
        return np.array([_canonical_sign(c) for c in C])[:, None] * C

    # project_rows stays the plain sphere normalization: mid-step states keep
    # their current lift so stage tangents share one frame

    def project_rows(self, C):
        C = np.asarray(C, dtype=float)
        return C / np.linalg.norm(C, axis=1)[:, None]

    def _nearer_lift(self, a, b):
        s = 1.0 if np.dot(a, b) >= 0.0 else -1.0
        return s, s * np.asarray(b, float)

    def dist_c(self, a, b):
        a = np.asarray(a, float)
        b = np.asarray(b, float)
        dm = np.linalg.norm(a - b)
        dp = np.linalg.norm(a + b)
        return self.radius * 2.0 * float(np.arctan2(min(dm, dp), max(dm, dp)))

    def log_c(self, a, b, guess=None):
        s, b_lift = self._nearer_lift(a, b)
        c = float(np.clip(np.dot(a, b_lift), 0.0, 1.0))
        theta = float(_angle_between_units(np.asarray(a, float), b_lift))
        if self.radius * theta >= self.injectivity_radius - _ANTIPODAL_MARGIN:
            raise OutOfInjectivityError(
                f"{self.name}: points at distance >= injectivity radius (lift tie)"
            )
        w = b_lift - c * a
        wn = np.linalg.norm(w)
        if wn == 0.0:
            raise DegenerateLogError("log at coincident points")
        return (theta / wn) * w

    def exp_c(self, a, v):
        return self.reduce_c(super().exp_c(a, v))

    def chase_logs(self, P, Q, guesses=None):
        P = np.asarray(P, float)
        Q = np.asarray(Q, float)
        raw = np.einsum("ij,ij->i", P, Q)
        s = np.where(raw >= 0.0, 1.0, -1.0)
        c = np.clip(np.abs(raw), 0.0, 1.0)
        Ql = s[:, None] * Q
        theta = _angle_between_unit_rows(P, Ql)
        if np.any(self.radius * theta >= self.injectivity_radius - _ANTIPODAL_MARGIN):
            raise OutOfInjectivityError(f"{self.name}: a chased pair is at the lift cut")
        w = Ql - c[:, None] * P
        wn = np.linalg.norm(w, axis=1)
        if np.any(wn == 0.0):
            raise DegenerateLogError("chase over coincident points")
        w = w / wn[:, None]
        V = theta[:, None] * w
        D = self.radius * theta
        # end tangent computed on the lift, pushed down through the antipodal
        # map (differential -I) when the lift was flipped
        E = s[:, None] * (-np.sin(theta)[:, None] * P + np.cos(theta)[:, None] * w) / self.radius
        return V, D, E, None

    def dist_rows(self, A, B):
        A = np.asarray(A, float)
        B = np.asarray(B, float)
        dm = np.linalg.norm(A - B, axis=1)
        dp = np.linalg.norm(A + B, axis=1)
        return self.radius * 2.0 * np.arctan2(np.minimum(dm, dp), np.maximum(dm, dp))
