"""Surfaces of revolution with numerically integrated geodesics.

The surface is the profile r(z) = 1 - depth * exp(-(z/width)^2) revolved
around the z axis, restricted to a working interval |z| <= z_extent. The
default parameters give a dumbbell: two bulbs joined by a negatively curved
neck at z = 0 whose parallel is the shortest closed geodesic.

Chart coordinates are (z, phi) with metric

    ds^2 = (1 + r'(z)^2) dz^2 + r(z)^2 dphi^2.

Geodesics are integrated with a fixed-step classical RK4 scheme (numba
kernels; the step bound for any published path is h <= min(1e-3, L/1000)).
The log map is solved by a two-variable Newton shooting on (launch angle,
length): residual Jacobians come from central finite differences with step
1e-6, with cheap Broyden updates between refreshes, and the accepted
solution is verified on the fine grid at endpoint error < 1e-8. Along a
geodesic the quantity r(z)^2 * dphi/ds (Clairaut) is conserved; tests pin
its drift below 1e-6 per unit arc length.

The shooting solver is stateless; callers that solve many related problems
(the pursuit integrator, the loop-alignment sweep) thread an opaque carry
of (angle, length, Jacobian) through repeated calls to warm-start Newton.
"""

import math

import numpy as np
from numba import njit

from ..errors import (
    DegenerateLogError,
    DomainExitError,
    OutOfInjectivityError,
    SolverError,
    UsageError,
)
from ..geometry import GeodesicSegment, ManifoldPoint, Space, TangentVec

TWO_PI = 2.0 * math.pi

# endpoint convergence target for the shooting solver, in chart coordinates
_SHOOT_TOL = 1e-8
# inner Newton iterations run on this many RK4 steps; the accepted solution
# is re-verified on the fine grid
_COARSE_STEPS = 256
_FD_STEP = 1e-6
_MAX_ITER = 50
_RESTART_ANGLES = 8


@njit(cache=True)
def _rk4_final(z, phi, vz, vphi, T, n, depth, width):
    """Integrate the geodesic system for time T in n fixed RK4 steps.

    State is (z, phi, vz, vphi); returns the final state plus max |z| seen.
    """
    h = T / n
    iw2 = 1.0 / (width * width)
    zmax = abs(z)
    for _ in range(n):
        e = math.exp(-z * z * iw2)
        r = 1.0 - depth * e
        rp = 2.0 * depth * z * iw2 * e
        rpp = 2.0 * depth * iw2 * e * (1.0 - 2.0 * z * z * iw2)
        E = 1.0 + rp * rp
        az1 = (-rp * rpp * vz * vz + r * rp * vphi * vphi) / E
        ap1 = -2.0 * rp / r * vz * vphi

        zb = z + 0.5 * h * vz
        vzb = vz + 0.5 * h * az1
        vpb = vphi + 0.5 * h * ap1
        e = math.exp(-zb * zb * iw2)
        r = 1.0 - depth * e
        rp = 2.0 * depth * zb * iw2 * e
        rpp = 2.0 * depth * iw2 * e * (1.0 - 2.0 * zb * zb * iw2)
        E = 1.0 + rp * rp
        az2 = (-rp * rpp * vzb * vzb + r * rp * vpb * vpb) / E
        ap2 = -2.0 * rp / r * vzb * vpb
        k2z = vz + 0.5 * h * az1

        zc = z + 0.5 * h * k2z
        vzc = vz + 0.5 * h * az2
        vpc = vphi + 0.5 * h * ap2
        e = math.exp(-zc * zc * iw2)
        r = 1.0 - depth * e
        rp = 2.0 * depth * zc * iw2 * e
        rpp = 2.0 * depth * iw2 * e * (1.0 - 2.0 * zc * zc * iw2)
        E = 1.0 + rp * rp
        az3 = (-rp * rpp * vzc * vzc + r * rp * vpc * vpc) / E
        ap3 = -2.0 * rp / r * vzc * vpc
        k3z = vz + 0.5 * h * az2

        zd = z + h * k3z
        vzd = vz + h * az3
        vpd = vphi + h * ap3
        e = math.exp(-zd * zd * iw2)
        r = 1.0 - depth * e
        rp = 2.0 * depth * zd * iw2 * e
        rpp = 2.0 * depth * iw2 * e * (1.0 - 2.0 * zd * zd * iw2)
        E = 1.0 + rp * rp
        az4 = (-rp * rpp * vzd * vzd + r * rp * vpd * vpd) / E
        ap4 = -2.0 * rp / r * vzd * vpd
        k4z = vz + h * az3

        z += h / 6.0 * (vz + 2.0 * k2z + 2.0 * k3z + k4z)
        phi += h / 6.0 * (vphi + 2.0 * vpb + 2.0 * vpc + vpd)
        vz += h / 6.0 * (az1 + 2.0 * az2 + 2.0 * az3 + az4)
        vphi += h / 6.0 * (ap1 + 2.0 * ap2 + 2.0 * ap3 + ap4)
        a = abs(z)
        if a > zmax:
            zmax = a
    return z, phi, vz, vphi, zmax


@njit(cache=True)
def _rk4_path(z, phi, vz, vphi, T, n, depth, width, out):
    """Same scheme as _rk4_final but records every node into out[(n+1), 4]."""
    h = T / n
    iw2 = 1.0 / (width * width)
    zmax = abs(z)
    out[0, 0] = z
    out[0, 1] = phi
    out[0, 2] = vz
    out[0, 3] = vphi
    for i in range(n):
        e = math.exp(-z * z * iw2)
        r = 1.0 - depth * e
        rp = 2.0 * depth * z * iw2 * e
        rpp = 2.0 * depth * iw2 * e * (1.0 - 2.0 * z * z * iw2)
        E = 1.0 + rp * rp
        az1 = (-rp * rpp * vz * vz + r * rp * vphi * vphi) / E
        ap1 = -2.0 * rp / r * vz * vphi

        zb = z + 0.5 * h * vz
        vzb = vz + 0.5 * h * az1
        vpb = vphi + 0.5 * h * ap1
        e = math.exp(-zb * zb * iw2)
        r = 1.0 - depth * e
        rp = 2.0 * depth * zb * iw2 * e
        rpp = 2.0 * depth * iw2 * e * (1.0 - 2.0 * zb * zb * iw2)
        E = 1.0 + rp * rp
        az2 = (-rp * rpp * vzb * vzb + r * rp * vpb * vpb) / E
        ap2 = -2.0 * rp / r * vzb * vpb
        k2z = vz + 0.5 * h * az1

        zc = z + 0.5 * h * k2z
        vzc = vz + 0.5 * h * az2
        vpc = vphi + 0.5 * h * ap2
        e = math.exp(-zc * zc * iw2)
        r = 1.0 - depth * e
        rp = 2.0 * depth * zc * iw2 * e
        rpp = 2.0 * depth * iw2 * e * (1.0 - 2.0 * zc * zc * iw2)
        E = 1.0 + rp * rp
        az3 = (-rp * rpp * vzc * vzc + r * rp * vpc * vpc) / E
        ap3 = -2.0 * rp / r * vzc * vpc
        k3z = vz + 0.5 * h * az2

        zd = z + h * k3z
        vzd = vz + h * az3
        vpd = vphi + h * ap3
        e = math.exp(-zd * zd * iw2)
        r = 1.0 - depth * e
        rp = 2.0 * depth * zd * iw2 * e
        rpp = 2.0 * depth * iw2 * e * (1.0 - 2.0 * zd * zd * iw2)
        E = 1.0 + rp * rp
        az4 = (-rp * rpp * vzd * vzd + r * rp * vpd * vpd) / E
        ap4 = -2.0 * rp / r * vzd * vpd
        k4z = vz + h * az3

        z += h / 6.0 * (vz + 2.0 * k2z + 2.0 * k3z + k4z)
        phi += h / 6.0 * (vphi + 2.0 * vpb + 2.0 * vpc + vpd)
        vz += h / 6.0 * (az1 + 2.0 * az2 + 2.0 * az3 + az4)
        vphi += h / 6.0 * (ap1 + 2.0 * ap2 + 2.0 * ap3 + ap4)
        out[i + 1, 0] = z
        out[i + 1, 1] = phi
        out[i + 1, 2] = vz
        out[i + 1, 3] = vphi
        a = abs(z)
        if a > zmax:
            zmax = a
    return zmax


def _wrap_pi(x):
    return (x + math.pi) % TWO_PI - math.pi


class ShootCarry:
    """Warm-start state threaded between related shooting solves."""

    __slots__ = ("psi", "length", "jac")

    def __init__(self, psi, length, jac):
        self.psi = psi
        self.length = length
        self.jac = jac


class SurfaceOfRevolution(Space):
    closed_form_geodesics = False
    coord_dim = 2
    dim = 2

    def __init__(
        self,
        depth=0.6,
        width=1.0,
        z_extent=2.0,
        injectivity_bound=0.5,
        tol=None,
    ):
        super().__init__(**({"tol": tol} if tol else {}))
        if not (0.0 < depth < 1.0):
            raise ValueError("depth must be in (0, 1)")
        self.depth = float(depth)
        self.width = float(width)
        self.z_extent = float(z_extent)
        self.injectivity_radius = float(injectivity_bound)
        self.convexity_radius = 0.5 * self.injectivity_radius
        self.neck_radius = 1.0 - self.depth
        self.shortest_closed_geodesic = TWO_PI * self.neck_radius
        self.has_boundary = True  # the working interval ends at |z| = z_extent
        self.name = "dumbbell"
        self._meridian_table = None

    # ------------------------------------------------------------ profile

    def radius(self, z):
        z = np.asarray(z, float)
        return 1.0 - self.depth * np.exp(-((z / self.width) ** 2))

    def radius_slope(self, z):
        z = np.asarray(z, float)
        iw2 = 1.0 / self.width**2
        return 2.0 * self.depth * z * iw2 * np.exp(-z * z * iw2)

    def metric_coeffs(self, z):
        """(E, G) = ((1 + r'^2), r^2) at z."""
        rp = self.radius_slope(z)
        return 1.0 + rp * rp, self.radius(z) ** 2

    # ------------------------------------------------------ basic contract

    def check_coords(self, c):
        super().check_coords(c)
        if abs(float(np.asarray(c, float)[0])) > self.z_extent:
            raise UsageError(
                f"dumbbell: |z| = {abs(c[0]):.6g} outside working interval "
                f"[-{self.z_extent:g}, {self.z_extent:g}]"
            )

    def reduce_c(self, c):
        c = np.asarray(c, dtype=float)
        return np.array([c[0], np.mod(c[1], TWO_PI)])

    def reduce_rows(self, C):
        C = np.asarray(C, dtype=float)
        out = C.copy()
        out[:, 1] = np.mod(out[:, 1], TWO_PI)
        return out

    def inner_c(self, base, u, v):
        E, G = self.metric_coeffs(float(base[0]))
        return float(E * u[0] * v[0] + G * u[1] * v[1])

    def chord_estimate(self, a, b):
        """Flat chord in (z, r_neck * phi) coordinates; never exceeds the
        true distance (the metric dominates this flat one everywhere)."""
        dz = float(b[0]) - float(a[0])
        dphi = _wrap_pi(float(b[1]) - float(a[1]))
        return math.hypot(dz, self.neck_radius * dphi)

    # --------------------------------------------------------- integration

    def _fine_steps(self, length):
        return max(1000, int(math.ceil(length / 1e-3)))

    def _launch_components(self, z, psi):
        """Metric-unit initial velocity for launch angle psi (measured from
        the meridian direction toward increasing z)."""
        E, G = self.metric_coeffs(z)
        return math.cos(psi) / math.sqrt(E), math.sin(psi) / math.sqrt(G)

    def _tangent_to_angle(self, z, v):
        """(psi, metric length) of tangent components v at height z."""
        E, G = self.metric_coeffs(z)
        L = math.sqrt(max(E * v[0] * v[0] + G * v[1] * v[1], 0.0))
        psi = math.atan2(math.sqrt(G) * v[1], math.sqrt(E) * v[0])
        return psi, L

    def _endpoint(self, z1, psi, L, n):
        vz0, vphi0 = self._launch_components(z1, psi)
        return _rk4_final(z1, 0.0, vz0, vphi0, L, n, self.depth, self.width)

    # ------------------------------------------------------------ shooting

    def _newton(self, z1, zt, pt, psi, L, jac=None):
        """Newton iteration for the shooting residual on the coarse grid.

        Returns (converged, psi, L, jac, endstate). `jac` is reused via
        Broyden updates and refreshed by central differences when progress
        stalls or on the first iteration.
        """
        n = _COARSE_STEPS
        state = self._endpoint(z1, psi, L, n)
        res = np.array([state[0] - zt, state[1] - pt])
        best = np.max(np.abs(res))
        stalls = 0
        for _ in range(_MAX_ITER):
            if np.max(np.abs(res)) < 1e-9:
                return True, psi, L, jac, state
            if jac is None or stalls >= 2:
                jac = self._fd_jacobian(z1, psi, L, n)
                stalls = 0
            det = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
            if abs(det) < 1e-14:
                jac = self._fd_jacobian(z1, psi, L, n)
                det = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
                if abs(det) < 1e-14:
                    return False, psi, L, jac, state
            dpsi = (-res[0] * jac[1, 1] + res[1] * jac[0, 1]) / det
            dL = (-jac[0, 0] * res[1] + jac[1, 0] * res[0]) / det
            # damp wild steps; keep the length positive
            scale = 1.0
            if abs(dpsi) > 0.7:
                scale = 0.7 / abs(dpsi)
            if abs(dL) * scale > max(0.5 * L, 0.1):
                scale = max(0.5 * L, 0.1) / abs(dL)
            psi_new = psi + scale * dpsi
            L_new = max(L + scale * dL, 1e-12)
            state_new = self._endpoint(z1, psi_new, L_new, n)
            res_new = np.array([state_new[0] - zt, state_new[1] - pt])
            dx = np.array([psi_new - psi, L_new - L])
            dr = res_new - res
            dx2 = float(dx @ dx)
            if dx2 > 0:
                jac = jac + np.outer(dr - jac @ dx, dx) / dx2
            r_new = np.max(np.abs(res_new))
            stalls = stalls + 1 if r_new > 0.9 * best else 0
            best = min(best, r_new)
            psi, L, state, res = psi_new, L_new, state_new, res_new
        return bool(np.max(np.abs(res)) < 1e-9), psi, L, jac, state

    def _fd_jacobian(self, z1, psi, L, n):
        d = _FD_STEP
        sp = self._endpoint(z1, psi + d, L, n)
        sm = self._endpoint(z1, psi - d, L, n)
        sLp = self._endpoint(z1, psi, L + d, n)
        sLm = self._endpoint(z1, psi, max(L - d, 1e-12), n)
        dL_eff = L + d - max(L - d, 1e-12)
        return np.array(
            [
                [(sp[0] - sm[0]) / (2 * d), (sLp[0] - sLm[0]) / dL_eff],
                [(sp[1] - sm[1]) / (2 * d), (sLp[1] - sLm[1]) / dL_eff],
            ]
        )

    def _solve_log(self, a, b, carry=None, guess=None, fine=True, want_path=False):
        """Full shooting solve; returns (info dict, carry) or raises."""
        z1, phi1 = float(a[0]), float(a[1])
        zt = float(b[0])
        pt = _wrap_pi(float(b[1]) - phi1)
        chord = math.hypot(zt - z1, self.neck_radius * pt)
        if chord == 0.0:
            raise DegenerateLogError("dumbbell: log at coincident points")
        if chord >= self.injectivity_radius:
            raise OutOfInjectivityError(
                f"dumbbell: chord estimate {chord:.6g} >= injectivity bound "
                f"{self.injectivity_radius:g}"
            )

        starts = []
        if carry is not None:
            starts.append((carry.psi, carry.length, carry.jac))
        if guess is not None:
            g = np.asarray(guess, float)
            if np.any(g):
                psi_g, L_g = self._tangent_to_angle(z1, g)
                if L_g > 0:
                    starts.append((psi_g, max(L_g, 1e-9), None))
        psi0 = math.atan2(self.neck_radius * pt, zt - z1)
        starts.append((psi0, chord, None))
        for k in range(_RESTART_ANGLES):
            starts.append((k * TWO_PI / _RESTART_ANGLES, chord, None))

        solved = None
        for psi, L, jac in starts:
            ok, psi, L, jac, state = self._newton(z1, zt, pt, psi, L, jac=jac)
            if ok and L < self.injectivity_radius * 1.5:
                solved = (psi, L, jac, state)
                break
        if solved is None:
            raise SolverError(
                f"dumbbell: shooting failed from ({z1:.4g},{phi1:.4g}) to "
                f"({zt:.4g},{float(b[1]):.4g}) after {_RESTART_ANGLES} restarts"
            )
        psi, L, jac, state = solved

        n_fine = self._fine_steps(L)
        path = None
        if fine:
            for _ in range(8):
                if want_path:
                    path = np.empty((n_fine + 1, 4))
                    vz0, vphi0 = self._launch_components(z1, psi)
                    zmax = _rk4_path(
                        z1, 0.0, vz0, vphi0, L, n_fine, self.depth, self.width, path
                    )
                    state = (path[-1, 0], path[-1, 1], path[-1, 2], path[-1, 3], zmax)
                else:
                    state = self._endpoint(z1, psi, L, n_fine)
                res = np.array([state[0] - zt, state[1] - pt])
                if np.max(np.abs(res)) < _SHOOT_TOL:
                    break
                if jac is None:
                    jac = self._fd_jacobian(z1, psi, L, _COARSE_STEPS)
                det = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
                if abs(det) < 1e-14:
                    jac = self._fd_jacobian(z1, psi, L, _COARSE_STEPS)
                    det = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
                psi -= (res[0] * jac[1, 1] - res[1] * jac[0, 1]) / det
                L -= (-jac[1, 0] * res[0] + jac[0, 0] * res[1]) / det
                L = max(L, 1e-12)
            else:
                raise SolverError("dumbbell: fine-grid polish did not converge")
            if state[4] > self.z_extent:
                raise DomainExitError(
                    f"dumbbell: connecting geodesic reached |z| = {state[4]:.4g} "
                    f"beyond the working interval"
                )

        if L >= self.injectivity_radius:
            raise OutOfInjectivityError(
                f"dumbbell: geodesic length {L:.6g} >= injectivity bound"
            )

        vz0, vphi0 = self._launch_components(z1, psi)
        info = {
            "psi": psi,
            "length": L,
            "components": np.array([L * vz0, L * vphi0]),
            "end_unit": np.array([state[2], state[3]]),
            "end_state": state,
            "zmax": state[4],
            "path": path,
        }
        if path is not None:
            path[:, 1] += phi1  # store absolute phi along the path
        return info, ShootCarry(psi, L, jac)

    # ----------------------------------------------------------- public ops

    def dist_c(self, a, b):
        chord = self.chord_estimate(a, b)
        if chord < 1e-7:
            # below solver resolution the metric chord is exact to O(d^3)
            E, G = self.metric_coeffs(float(a[0]))
            dz = float(b[0]) - float(a[0])
            dphi = _wrap_pi(float(b[1]) - float(a[1]))
            return math.sqrt(E * dz * dz + G * dphi * dphi)
        info, _ = self._solve_log(a, b, fine=False)
        return info["length"]

    def log_c(self, a, b, guess=None):
        info, _ = self._solve_log(a, b, guess=guess)
        return info["components"]

    def exp_c(self, a, v):
        a = np.asarray(a, float)
        v = np.asarray(v, float)
        L = self.norm_c(a, v)
        if L == 0.0:
            return a.copy()
        u = v / L
        n = self._fine_steps(L)
        z, phi, _, _, zmax = _rk4_final(
            float(a[0]), float(a[1]), float(u[0]), float(u[1]), L, n,
            self.depth, self.width,
        )
        if zmax > self.z_extent:
            raise DomainExitError(
                f"dumbbell: geodesic reached |z| = {zmax:.4g} beyond the working "
                f"interval (z_extent = {self.z_extent:g})"
            )
        return np.array([z, np.mod(phi, TWO_PI)])

    def chase_logs(self, P, Q, guesses=None):
        n = len(P)
        V = np.empty((n, 2))
        D = np.empty(n)
        E = np.empty((n, 2))
        carries = guesses if isinstance(guesses, list) else [None] * n
        out_carries = [None] * n
        for k in range(n):
            info, out_carries[k] = self._solve_log(P[k], Q[k], carry=carries[k])
            V[k] = info["components"]
            D[k] = info["length"]
            E[k] = info["end_unit"]
        return V, D, E, out_carries

    def dist_rows(self, A, B):
        """Row-paired distances with warm starts threaded along the rows.

        Values below the injectivity bound are exact (coarse-grid solver);
        pairs whose chord already reaches the bound are reported as the
        saturated lower bound max(chord, bound) without solving — callers
        compare against small thresholds, and these can never win a minimum
        against a genuinely nearby pair.
        """
        A = np.asarray(A, float)
        B = np.asarray(B, float)
        out = np.empty(len(A))
        carry = None
        for k in range(len(A)):
            chord = self.chord_estimate(A[k], B[k])
            if chord >= self.injectivity_radius:
                out[k] = max(chord, self.injectivity_radius)
                continue
            if chord < 1e-7:
                E, G = self.metric_coeffs(float(A[k][0]))
                dz = float(B[k][0]) - float(A[k][0])
                dphi = _wrap_pi(float(B[k][1]) - float(A[k][1]))
                out[k] = math.sqrt(E * dz * dz + G * dphi * dphi)
                continue
            try:
                info, carry = self._solve_log(A[k], B[k], carry=carry, fine=False)
                out[k] = info["length"]
            except OutOfInjectivityError:
                out[k] = self.injectivity_radius
                carry = None
        return out

    def geodesic(self, p: ManifoldPoint, q: ManifoldPoint) -> GeodesicSegment:
        self._own(p)
        self._own(q)
        if self.same_point(p, q):
            raise DegenerateLogError("geodesic between coincident points")
        info, _ = self._solve_log(p.coords, q.coords, want_path=True)
        if info["zmax"] > self.z_extent:
            raise DomainExitError("dumbbell: connecting geodesic leaves the working interval")
        v = TangentVec(p, info["components"])
        return GeodesicSegment(
            space=self,
            start=p,
            end=q,
            initial_tangent=v,
            length=info["length"],
            path=info["path"],
            end_velocity=info["end_unit"],
        )

    def geodesic_eval(self, seg: GeodesicSegment, s: float) -> ManifoldPoint:
        if seg.space is not self:
            raise UsageError("segment belongs to a different space")
        if not (0.0 <= s <= 1.0):
            raise UsageError(f"geodesic parameter {s} outside [0, 1]")
        if seg.path is None:
            seg_full = self.geodesic(seg.start, seg.end)
            seg.path = seg_full.path
            seg.end_velocity = seg_full.end_velocity
        return ManifoldPoint(self, self.reduce_c(self._hermite(seg.path, seg.length, s)))

    def _hermite(self, path, length, s):
        """Cubic Hermite interpolation of the cached path at fraction s."""
        n = len(path) - 1
        t = s * n
        i = min(int(t), n - 1)
        u = t - i
        ds = length / n  # chart derivative scale: d(coords)/du = velocity * ds
        p0 = path[i, 0:2]
        p1 = path[i + 1, 0:2]
        m0 = path[i, 2:4] * ds
        m1 = path[i + 1, 2:4] * ds
        u2 = u * u
        u3 = u2 * u
        return (
            (2 * u3 - 3 * u2 + 1) * p0
            + (u3 - 2 * u2 + u) * m0
            + (-2 * u3 + 3 * u2) * p1
            + (u3 - u2) * m1
        )

    def geodesic_ivp(self, p: ManifoldPoint, v: TangentVec):
        """Dense geodesic path from p with initial tangent v (length = |v|).

        Returns (fractions, points, velocities): chart rows with phi left
        unreduced so the path is continuous. Raises DomainExitError if the
        path leaves |z| <= z_extent.
        """
        self._own(p)
        L = v.norm()
        if L == 0.0:
            raise UsageError("geodesic_ivp with zero initial tangent")
        u = v.components / L
        n = self._fine_steps(L)
        path = np.empty((n + 1, 4))
        zmax = _rk4_path(
            float(p.coords[0]), float(p.coords[1]), float(u[0]), float(u[1]),
            L, n, self.depth, self.width, path,
        )
        if zmax > self.z_extent:
            raise DomainExitError(
                f"dumbbell: geodesic reached |z| = {zmax:.4g} beyond the working interval"
            )
        fracs = np.linspace(0.0, 1.0, n + 1)
        return fracs, path[:, 0:2], path[:, 2:4]

    def clairaut_values(self, points, velocities):
        """r(z)^2 * dphi/ds along a unit-speed path; constant on geodesics."""
        r2 = self.radius(points[:, 0]) ** 2
        return r2 * velocities[:, 1]

    # ------------------------------------------------------------ meridian

    def _meridian(self):
        if self._meridian_table is None:
            zg = np.linspace(-self.z_extent, self.z_extent, 8001)
            f = np.sqrt(1.0 + self.radius_slope(zg) ** 2)
            cum = np.concatenate([[0.0], np.cumsum((f[1:] + f[:-1]) * 0.5 * np.diff(zg))])
            cum -= np.interp(0.0, zg, cum)  # measure arc length from the neck
            self._meridian_table = (zg, cum)
        return self._meridian_table

    def meridian_length(self, z):
        """Signed meridian arc length from the neck parallel to height z."""
        zg, cum = self._meridian()
        return np.interp(z, zg, cum)

    def dist_to_neck(self, z):
        return np.abs(self.meridian_length(z))

    def random_point(self, rng):
        return self.point([rng.uniform(-1.5, 1.5), rng.uniform(0.0, TWO_PI)])
