"""Closed geodesics as explicit constant-speed loops.

A pursuit loop that stops shrinking is expected to settle onto a closed
geodesic. These oracles give the candidate limit curves in closed form so
the alignment diagnostics can measure distance to them independently of the
integrator. Each oracle is alpha: [0, 1) -> M at constant speed `length`.
"""

import math

import numpy as np

from ..errors import ConfigError, UsageError
from .euclidean import Euclidean
from .flat import FlatTorus, MobiusBand
from .revolution import SurfaceOfRevolution
from .sphere import ProjectivePlane, Sphere

TWO_PI = 2.0 * math.pi


class ClosedLoopOracle:
    """Base: constant-speed closed curve with optional fast image distance."""

    def __init__(self, space, length):
        self.space = space
        self.length = float(length)

    def points(self, us):
        raise NotImplementedError

    def point(self, u):
        return self.space.point(self.points(np.array([u]))[0])

    def dist_to_image(self, coords):
        """Distance from each coords row to the nearest point of the curve.

        Default: dense minimization over the curve with local 3-point
        parabolic refinement; subclasses override with exact forms.
        """
        coords = np.asarray(coords, float)
        m = 2048
        us = np.arange(m) / m
        curve = self.points(us)
        out = np.empty(len(coords))
        for k, c in enumerate(coords):
            d = self.space.dist_rows(np.broadcast_to(c, curve.shape), curve)
            j = int(np.argmin(d))
            # parabolic refinement through the three neighboring samples
            dm, d0, dp = d[(j - 1) % m], d[j], d[(j + 1) % m]
            denom = dm - 2 * d0 + dp
            if denom > 0:
                shift = 0.5 * (dm - dp) / denom
                u_ref = (us[j] + shift / m) % 1.0
                d0 = min(d0, float(self.space.dist_rows(c[None, :], self.points(np.array([u_ref])))[0]))
            out[k] = d0
        return out


def _open_walk_turn(lifts, e1, e2):
    # net turning of the vertex walk, skipping the seam step: consecutive
    # vertices are close so each open step wraps unambiguously, while the
    # seam step of an orientation-odd lift jumps by exactly pi
    th = np.arctan2(lifts @ e2, lifts @ e1)
    steps = np.mod(np.diff(th) + math.pi, TWO_PI) - math.pi
    return float(steps.sum())


class TorusLineOracle(ClosedLoopOracle):
    """Closed geodesic of winding class (p, q) on the unit flat torus."""

    def __init__(self, space, p, q, base=(0.0, 0.0)):
        if not isinstance(space, FlatTorus):
            raise UsageError("torus line oracle needs a FlatTorus")
        if math.gcd(int(p), int(q)) != 1:
            raise UsageError("winding class must be primitive (gcd 1)")
        super().__init__(space, math.hypot(p, q))
        self.winding = (int(p), int(q))
        self.base = np.asarray(base, float)

    def points(self, us):
        us = np.asarray(us, float)
        w = np.array(self.winding, float)
        return np.mod(self.base[None, :] + us[:, None] * w[None, :], 1.0)

    def dist_to_image(self, coords):
        # perpendicular distance to the nearest lift of the line family:
        # lifts are base + t*w + k, so project the wrapped offset onto the
        # unit normal and minimize over the residue classes of the normal
        # offsets, which repeat with period 1/|w| along the normal.
        coords = np.asarray(coords, float)
        w = np.array(self.winding, float)
        nrm = np.array([-w[1], w[0]]) / np.linalg.norm(w)
        off = (coords - self.base[None, :]) @ nrm
        period = 1.0 / np.linalg.norm(w)
        r = np.mod(off, period)
        return np.minimum(r, period - r)

    @classmethod
    def fit(cls, space, p, q, points):
        """Line of class (p, q) through the circular mean of the points' offsets.

        Lines of a fixed class form a one-parameter family indexed by
        perpendicular offset mod 1/|(p, q)|; this picks the family member
        closest to the cloud on average.
        """
        points = np.asarray(points, float)
        w = np.array([float(p), float(q)])
        nrm = np.array([-w[1], w[0]]) / np.linalg.norm(w)
        period = 1.0 / np.linalg.norm(w)
        ang = TWO_PI * (points @ nrm) / period
        mean = math.atan2(np.sin(ang).mean(), np.cos(ang).mean()) / TWO_PI * period
        return cls(space, p, q, base=mean * nrm)


class MobiusCenterlineOracle(ClosedLoopOracle):
    """The y = 0 circle of the flat Mobius band (the shortest closed geodesic)."""

    def __init__(self, space, direction=1):
        if not isinstance(space, MobiusBand):
            raise UsageError("centerline oracle needs a MobiusBand")
        super().__init__(space, 1.0)
        self.direction = 1 if direction >= 0 else -1

    def points(self, us):
        us = self.direction * np.asarray(us, float)
        return np.column_stack([np.mod(us, 1.0), np.zeros_like(us)])

    def dist_to_image(self, coords):
        return np.abs(np.asarray(coords, float)[:, 1])


class GreatCircleOracle(ClosedLoopOracle):
    """Great circle spanned by an orthonormal pair (e1, e2) on a sphere."""

    def __init__(self, space, e1=(1.0, 0.0, 0.0), e2=(0.0, 1.0, 0.0)):
        if not isinstance(space, Sphere) or isinstance(space, ProjectivePlane):
            raise UsageError("great circle oracle needs a Sphere")
        e1 = np.asarray(e1, float)
        e2 = np.asarray(e2, float)
        e1 = e1 / np.linalg.norm(e1)
        e2 = e2 - (e1 @ e2) * e1
        e2 = e2 / np.linalg.norm(e2)
        super().__init__(space, TWO_PI * space.radius)
        self.e1, self.e2 = e1, e2
        self.normal = np.cross(e1, e2)

    def points(self, us):
        th = TWO_PI * np.asarray(us, float)
        return np.outer(np.cos(th), self.e1) + np.outer(np.sin(th), self.e2)

    def dist_to_image(self, coords):
        coords = np.asarray(coords, float)
        s = np.clip(coords @ self.normal, -1.0, 1.0)
        return self.space.radius * np.abs(np.arcsin(s))

    @classmethod
    def fit(cls, space, points):
        """Great circle of the best-fit plane through the points.

        The plane normal is the smallest principal axis of the cloud and the
        circle is oriented to run the same way the points are ordered.
        """
        points = np.asarray(points, float)
        normal = np.linalg.svd(points, full_matrices=False)[2][-1]
        e1 = points[0] - (points[0] @ normal) * normal
        e1 = e1 / np.linalg.norm(e1)
        e2 = np.cross(normal, e1)
        if _open_walk_turn(points, e1, e2) < 0.0:
            e2 = -e2
        return cls(space, e1, e2)


class ProjectiveLineOracle(ClosedLoopOracle):
    """Closed geodesic on the projective plane: a half great circle."""

    def __init__(self, space, e1=(1.0, 0.0, 0.0), e2=(0.0, 1.0, 0.0)):
        if not isinstance(space, ProjectivePlane):
            raise UsageError("projective line oracle needs a ProjectivePlane")
        e1 = np.asarray(e1, float)
        e2 = np.asarray(e2, float)
        e1 = e1 / np.linalg.norm(e1)
        e2 = e2 - (e1 @ e2) * e1
        e2 = e2 / np.linalg.norm(e2)
        super().__init__(space, math.pi * space.radius)
        self.e1, self.e2 = e1, e2
        self.normal = np.cross(e1, e2)

    def points(self, us):
        th = math.pi * np.asarray(us, float)
        raw = np.outer(np.cos(th), self.e1) + np.outer(np.sin(th), self.e2)
        return self.space.reduce_rows(raw)

    def dist_to_image(self, coords):
        coords = np.asarray(coords, float)
        s = np.clip(coords @ self.normal, -1.0, 1.0)
        return self.space.radius * np.abs(np.arcsin(s))

    @classmethod
    def fit(cls, space, points):
        """Projective line of the best-fit plane through the points.

        Plane fitting is sign-blind, but orientation is not, so the points
        are first lifted to consistently signed sphere representatives.
        """
        points = np.asarray(points, float)
        normal = np.linalg.svd(points, full_matrices=False)[2][-1]
        lifts = points.copy()
        for i in range(1, len(lifts)):
            if lifts[i] @ lifts[i - 1] < 0.0:
                lifts[i] = -lifts[i]
        e1 = lifts[0] - (lifts[0] @ normal) * normal
        e1 = e1 / np.linalg.norm(e1)
        e2 = np.cross(normal, e1)
        if _open_walk_turn(lifts, e1, e2) < 0.0:
            e2 = -e2
        return cls(space, e1, e2)


class NeckCircleOracle(ClosedLoopOracle):
    """The waist parallel of the dumbbell (its shortest closed geodesic)."""

    def __init__(self, space, direction=1):
        if not isinstance(space, SurfaceOfRevolution):
            raise UsageError("neck oracle needs a SurfaceOfRevolution")
        super().__init__(space, TWO_PI * space.neck_radius)
        self.direction = 1 if direction >= 0 else -1

    def points(self, us):
        us = self.direction * np.asarray(us, float)
        return np.column_stack([np.zeros_like(us), TWO_PI * np.mod(us, 1.0)])

    def dist_to_image(self, coords):
        # nearest point on the waist is straight down the meridian
        return self.space.dist_to_neck(np.asarray(coords, float)[:, 0])


class EuclideanCircleOracle(ClosedLoopOracle):
    """A round circle in the plane. Not a geodesic; used to exercise the
    alignment diagnostics against curves with known offsets."""

    def __init__(self, space, center=(0.0, 0.0), radius=1.0):
        if not isinstance(space, Euclidean) or space.dim != 2:
            raise UsageError("circle oracle needs the euclidean plane")
        super().__init__(space, TWO_PI * radius)
        self.center = np.asarray(center, float)
        self.circle_radius = float(radius)

    def points(self, us):
        th = TWO_PI * np.asarray(us, float)
        return self.center[None, :] + self.circle_radius * np.column_stack(
            [np.cos(th), np.sin(th)]
        )

    def dist_to_image(self, coords):
        rr = np.linalg.norm(np.asarray(coords, float) - self.center[None, :], axis=1)
        return np.abs(rr - self.circle_radius)


def geodesic_defect(oracle, n=64):
    """Max triangle-equality defect over consecutive sample triples.

    For a genuine geodesic loop d(a,b) + d(b,c) = d(a,c) whenever the arcs
    are short enough to be minimizing, so this is ~0; curves with corners or
    curvature relative to the metric score visibly positive.
    """
    us = np.arange(2 * n) / (2 * n)
    X = oracle.points(us)
    A = X[0::2]
    B = X[1::2]
    C = np.roll(A, -1, axis=0)
    d_ab = oracle.space.dist_rows(A, B)
    d_bc = oracle.space.dist_rows(B, C)
    d_ac = oracle.space.dist_rows(A, C)
    return float(np.max(np.abs(d_ab + d_bc - d_ac)))


def oracle_from_selector(space, selector):
    """Build a closed-geodesic oracle from a selector string.

    Grammar: a family name, optionally followed by ':' and comma-separated
    arguments: "torus_line:1,0", "great_circle", "projective_line",
    "mobius_centerline", "mobius_centerline:-1", "neck_circle",
    "neck_circle:-1".
    """
    name, _, argtext = selector.partition(":")
    args = [a.strip() for a in argtext.split(",")] if argtext else []
    try:
        if name == "torus_line":
            if len(args) != 2:
                raise ConfigError(
                    f"torus_line needs a winding class, e.g. 'torus_line:1,0' "
                    f"(got {selector!r})")
            return TorusLineOracle(space, int(args[0]), int(args[1]))
        if name == "great_circle":
            if args:
                raise ConfigError(f"great_circle takes no arguments (got {selector!r})")
            return GreatCircleOracle(space)
        if name == "projective_line":
            if args:
                raise ConfigError(
                    f"projective_line takes no arguments (got {selector!r})")
            return ProjectiveLineOracle(space)
        if name == "mobius_centerline":
            return MobiusCenterlineOracle(space, direction=int(args[0]) if args else 1)
        if name == "neck_circle":
            return NeckCircleOracle(space, direction=int(args[0]) if args else 1)
    except ValueError as exc:
        raise ConfigError(f"bad oracle arguments in {selector!r}: {exc}") from exc
    except UsageError as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(
        f"unknown oracle selector {name!r} (one of torus_line, great_circle, "
        "projective_line, mobius_centerline, neck_circle)")
