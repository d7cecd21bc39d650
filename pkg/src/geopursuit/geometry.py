"""Core geometric types and the space contract.

A `Space` owns all metric structure: distances, Riemannian log/exp maps,
geodesic segments and angles. Points and tangent vectors are thin typed
wrappers around numpy arrays; every numeric decision lives in the space
object so the pursuit engine and the diagnostics can stay geometry-agnostic.

Two layers:

* a raw layer operating on bare coordinate arrays (`dist_c`, `log_c`,
  `exp_c`, ...) used by the integrator hot path, and
* a public layer on `ManifoldPoint` / `TangentVec` with validation.

Coordinate conventions are per space: flat quotients use chart coordinates
reduced to a fundamental domain, spheres use embedded unit 3-vectors, and
surfaces of revolution use (z, phi) charts. See the concrete classes in
`geopursuit.spaces`.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DegenerateLogError, UsageError
from .tolerances import DEFAULT as DEFAULT_TOL, Tolerances


@dataclass(frozen=True, eq=False)
class ManifoldPoint:
    """A point of a specific space, coordinates already reduced."""

    space: "Space"
    coords: np.ndarray

    def __repr__(self):
        c = np.array2string(self.coords, precision=6, suppress_small=True)
        return f"<{self.space.name} point {c}>"


@dataclass(frozen=True, eq=False)
class TangentVec:
    """A tangent vector attached to a base point.

    Components live in the same representation as the base point's
    coordinates (chart components, or an ambient vector in the tangent
    plane for embedded surfaces). Norms and angles are always taken with
    the space's metric, never the raw Euclidean one.
    """

    base: ManifoldPoint
    components: np.ndarray

    @property
    def space(self) -> "Space":
        return self.base.space

    def norm(self) -> float:
        return self.space.norm_c(self.base.coords, self.components)

    def __repr__(self):
        c = np.array2string(self.components, precision=6, suppress_small=True)
        return f"<tangent {c} at {self.base!r}>"


@dataclass(eq=False)
class GeodesicSegment:
    """Shortest geodesic from start to end, parameterized at constant speed
    over [0, 1]. The initial tangent has metric norm equal to the length."""

    space: "Space"
    start: ManifoldPoint
    end: ManifoldPoint
    initial_tangent: TangentVec
    length: float
    # numerical surfaces cache their integrated path (uniform fractions,
    # one row per node: coords then velocity) and the forward end velocity
    path: Optional[np.ndarray] = field(default=None, repr=False)
    end_velocity: Optional[np.ndarray] = field(default=None, repr=False)


@dataclass(frozen=True)
class SpaceCapabilities:
    dim: int
    coord_dim: int
    injectivity_radius: float
    convexity_radius: float
    closed_form_geodesics: bool
    is_quotient: bool
    has_boundary: bool


class Space(ABC):
    """Metric structure shared by all concrete geometries."""

    name: str = "space"
    dim: int = 2
    coord_dim: int = 2
    injectivity_radius: float = np.inf
    convexity_radius: float = np.inf
    closed_form_geodesics: bool = True
    is_quotient: bool = False
    has_boundary: bool = False
    # length of the shortest closed geodesic, inf if none exists
    shortest_closed_geodesic: float = np.inf

    def __init__(self, tol: Tolerances = DEFAULT_TOL):
        self.tol = tol

    # ---------------------------------------------------------------- raw

    def reduce_c(self, c: np.ndarray) -> np.ndarray:
        """Canonical fundamental-domain representative of raw coordinates."""
        return np.asarray(c, dtype=float)

    def reduce_rows(self, C: np.ndarray) -> np.ndarray:
        return np.array([self.reduce_c(row) for row in C])

    def project_rows(self, C: np.ndarray) -> np.ndarray:
        """Pull mid-step integrator states back onto the manifold without
        choosing a fundamental-domain representative (keeps stage frames
        consistent within one RK4 step)."""
        return C

    def check_coords(self, c: np.ndarray) -> None:
        c = np.asarray(c, dtype=float)
        if c.shape != (self.coord_dim,):
            raise UsageError(
                f"{self.name}: expected {self.coord_dim} coordinates, got shape {c.shape}"
            )
        if not np.all(np.isfinite(c)):
            raise UsageError(f"{self.name}: non-finite coordinates {c}")

    @abstractmethod
    def dist_c(self, a: np.ndarray, b: np.ndarray) -> float: ...

    @abstractmethod
    def log_c(self, a: np.ndarray, b: np.ndarray, guess=None) -> np.ndarray: ...

    @abstractmethod
    def exp_c(self, a: np.ndarray, v: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def inner_c(self, base: np.ndarray, u: np.ndarray, v: np.ndarray) -> float: ...

    def norm_c(self, base, u) -> float:
        return float(np.sqrt(max(self.inner_c(base, u, u), 0.0)))

    def tangent_frame(self, c) -> np.ndarray:
        """Metric-orthonormal tangent basis at c, one vector per row.

        Gram-Schmidt over the chart axes; valid when the chart coordinates
        span the tangent space. Embedded spaces override.
        """
        if self.coord_dim != self.dim:
            raise NotImplementedError(f"{self.name}: no default tangent frame")
        c = np.asarray(c, float)
        rows = []
        for k in range(self.dim):
            v = np.zeros(self.coord_dim)
            v[k] = 1.0
            for e in rows:
                v = v - self.inner_c(c, v, e) * e
            v = v / self.norm_c(c, v)
            rows.append(v)
        return np.array(rows)

    def chase_logs(self, P: np.ndarray, Q: np.ndarray, guesses=None):
        """Vectorized log for row-paired points: returns (V, dists, end_units,
        carries) where V[k] = log(P[k], Q[k]), dists[k] its metric norm, and
        end_units[k] the metric-unit forward tangent of the geodesic at Q[k].

        Default implementation loops; flat and spherical spaces override
        with array code and return carries=None. Shooting spaces return an
        opaque warm-start carry that callers pass back via `guesses` when
        solving a related batch (the solver itself keeps no state).
        """
        n = len(P)
        V = np.empty_like(np.asarray(P, dtype=float))
        D = np.empty(n)
        E = np.empty_like(V)
        for k in range(n):
            v = self.log_c(P[k], Q[k])
            d = self.norm_c(P[k], v)
            V[k] = v
            D[k] = d
            w = -self.log_c(Q[k], P[k])
            E[k] = w / self.norm_c(Q[k], w)
        return V, D, E, None

    def dist_rows(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        """Row-paired distances; overridden where a vector form exists."""
        return np.array([self.dist_c(a, b) for a, b in zip(A, B)])

    # ------------------------------------------------------------- public

    def point(self, coords) -> ManifoldPoint:
        c = np.asarray(coords, dtype=float)
        self.check_coords(c)
        return ManifoldPoint(self, self.reduce_c(c))

    def tangent(self, base: ManifoldPoint, components) -> TangentVec:
        self._own(base)
        v = np.asarray(components, dtype=float)
        if v.shape != (self.coord_dim,):
            raise UsageError(f"{self.name}: tangent components have shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise UsageError(f"{self.name}: non-finite tangent components")
        return TangentVec(base, self._clean_tangent(base.coords, v))

    def _clean_tangent(self, base_c, v):
        """Hook for embedded surfaces to project onto the tangent plane."""
        return v

    def same_point(self, p: ManifoldPoint, q: ManifoldPoint) -> bool:
        self._own(p)
        self._own(q)
        return bool(np.max(np.abs(p.coords - q.coords)) <= self.tol.point_equality)

    def dist(self, p: ManifoldPoint, q: ManifoldPoint) -> float:
        self._own(p)
        self._own(q)
        return self.dist_c(p.coords, q.coords)

    def log(self, p: ManifoldPoint, q: ManifoldPoint, guess=None) -> TangentVec:
        self._own(p)
        self._own(q)
        if self.same_point(p, q):
            raise DegenerateLogError(f"{self.name}: log requested at coincident points")
        return TangentVec(p, self.log_c(p.coords, q.coords, guess=guess))

    def exp(self, p: ManifoldPoint, v: TangentVec) -> ManifoldPoint:
        self._own(p)
        if v.base is not p and not self.same_point(p, v.base):
            raise UsageError(f"{self.name}: tangent vector based at a different point")
        return ManifoldPoint(self, self.exp_c(p.coords, v.components))

    def geodesic(self, p: ManifoldPoint, q: ManifoldPoint) -> GeodesicSegment:
        v = self.log(p, q)
        return GeodesicSegment(
            space=self,
            start=p,
            end=q,
            initial_tangent=v,
            length=v.norm(),
        )

    def geodesic_eval(self, seg: GeodesicSegment, s: float) -> ManifoldPoint:
        if seg.space is not self:
            raise UsageError("segment belongs to a different space")
        if not (0.0 <= s <= 1.0):
            raise UsageError(f"geodesic parameter {s} outside [0, 1]")
        c = self.exp_c(seg.start.coords, s * seg.initial_tangent.components)
        return ManifoldPoint(self, c)

    def end_tangent(self, seg: GeodesicSegment) -> TangentVec:
        """Forward tangent at the end of the segment, metric norm = length."""
        if seg.space is not self:
            raise UsageError("segment belongs to a different space")
        if seg.end_velocity is not None:
            return TangentVec(seg.end, seg.length * seg.end_velocity)
        back = self.log_c(seg.end.coords, seg.start.coords)
        n = self.norm_c(seg.end.coords, back)
        return TangentVec(seg.end, -(seg.length / n) * back)

    def angle(self, u: TangentVec, v: TangentVec) -> float:
        """Metric angle in [0, pi] between two tangents at the same point."""
        if u.space is not self or v.space is not self:
            raise UsageError("tangents belong to a different space")
        if np.max(np.abs(u.base.coords - v.base.coords)) > 1e-9:
            raise UsageError("angle of tangents at different base points")
        return self.angle_c(u.base.coords, u.components, v.components)

    def angle_c(self, base, u, v) -> float:
        nu = self.norm_c(base, u)
        nv = self.norm_c(base, v)
        if nu == 0.0 or nv == 0.0:
            raise UsageError("angle with a zero tangent vector")
        c = self.inner_c(base, u, v) / (nu * nv)
        return float(np.arccos(np.clip(c, -1.0, 1.0)))

    # -------------------------------------------------------------- misc

    @property
    def capabilities(self) -> SpaceCapabilities:
        return SpaceCapabilities(
            dim=self.dim,
            coord_dim=self.coord_dim,
            injectivity_radius=self.injectivity_radius,
            convexity_radius=self.convexity_radius,
            closed_form_geodesics=self.closed_form_geodesics,
            is_quotient=self.is_quotient,
            has_boundary=self.has_boundary,
        )

    def random_point(self, rng: np.random.Generator) -> ManifoldPoint:
        raise NotImplementedError

    def _own(self, p: ManifoldPoint) -> None:
        if p.space is not self:
            raise UsageError(
                f"point of space '{p.space.name}' used with space '{self.name}'"
            )

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


# Functional aliases: free-function spelling of the public operations.

def dist(p: ManifoldPoint, q: ManifoldPoint) -> float:
    return p.space.dist(p, q)


def log(p: ManifoldPoint, q: ManifoldPoint) -> TangentVec:
    return p.space.log(p, q)


def exp(p: ManifoldPoint, v: TangentVec) -> ManifoldPoint:
    return p.space.exp(p, v)


def geodesic(p: ManifoldPoint, q: ManifoldPoint) -> GeodesicSegment:
    return p.space.geodesic(p, q)


def geodesic_eval(seg: GeodesicSegment, s: float) -> ManifoldPoint:
    return seg.space.geodesic_eval(seg, s)


def end_tangent(seg: GeodesicSegment) -> TangentVec:
    return seg.space.end_tangent(seg)


def angle(u: TangentVec, v: TangentVec) -> float:
    return u.space.angle(u, v)
