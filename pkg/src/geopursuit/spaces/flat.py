"""Flat quotient surfaces: the unit square torus and the flat Moebius band.

Both are quotients of a flat covering chart by a discrete group of affine
isometries x -> A x + b with A a diagonal sign matrix. Distances and log
maps minimize over a precomputed list of deck transforms whose translation
part is short enough to matter: everything displacing the origin by at most
2 * injectivity radius + the diameter of the fundamental domain.

Tangent components live in the chart frame of their base point. When a
minimizing lift of the target involves a sign flip (the Moebius glide), the
forward end tangent is pushed back through the transform's linear part.
"""

import numpy as np

from ..errors import DegenerateLogError, DomainExitError, OutOfInjectivityError, UsageError
from ..geometry import Space


class FlatQuotientSpace(Space):
    """Common machinery for flat charts modulo a deck group.

    Subclasses provide `reduce_c` plus the deck enumeration via
    `_deck_transforms()` returning (signs, offsets) arrays ordered by
    transform index; ties in the lift minimization break toward the lower
    index (first minimum wins).
    """

    closed_form_geodesics = True
    is_quotient = True
    coord_dim = 2
    dim = 2

    def __init__(self, tol=None, **kw):
        super().__init__(**({"tol": tol} if tol else {}))
        signs, offsets = self._deck_transforms()
        self._signs = np.asarray(signs, float)        # (m, 2) rows of +-1
        self._offsets = np.asarray(offsets, float)    # (m, 2)

    def _deck_transforms(self):
        raise NotImplementedError

    # images of a batch of points under every enumerated transform:
    # result[m, k, :] = A_m q_k + b_m
    def _images(self, Q):
        Q = np.asarray(Q, float)
        return self._signs[:, None, :] * Q[None, :, :] + self._offsets[:, None, :]

    def dist_c(self, a, b):
        img = self._signs * np.asarray(b, float) + self._offsets
        return float(np.min(np.linalg.norm(img - np.asarray(a, float), axis=1)))

    def log_c(self, a, b, guess=None):
        a = np.asarray(a, float)
        img = self._signs * np.asarray(b, float) + self._offsets
        disp = img - a
        norms = np.linalg.norm(disp, axis=1)
        k = int(np.argmin(norms))
        best = norms[k]
        if best == 0.0:
            raise DegenerateLogError("log at coincident points")
        if best >= self.injectivity_radius - 1e-15:
            raise OutOfInjectivityError(
                f"{self.name}: distance {best:.6g} >= injectivity radius "
                f"{self.injectivity_radius:.6g}"
            )
        others = np.delete(norms, k)
        if others.size and np.min(others) - best <= self.tol.deck_tie:
            raise OutOfInjectivityError(
                f"{self.name}: tie between deck images at distance {best:.6g}"
            )
        return disp[k]

    def exp_c(self, a, v):
        return self.reduce_c(np.asarray(a, float) + np.asarray(v, float))

    def inner_c(self, base, u, v):
        return float(np.dot(u, v))

    def chase_logs(self, P, Q, guesses=None):
        disp = self._images(Q) - np.asarray(P, float)[None, :, :]   # (m, n, 2)
        norms = np.linalg.norm(disp, axis=2)                        # (m, n)
        m = np.argmin(norms, axis=0)                                # (n,)
        n_idx = np.arange(len(P))
        D = norms[m, n_idx]
        if np.any(D >= self.injectivity_radius - 1e-15):
            k = int(np.argmax(D))
            raise OutOfInjectivityError(
                f"{self.name}: pair {k} at distance {D[k]:.6g} >= injectivity radius"
            )
        V = disp[m, n_idx]
        # forward tangent at the target, pushed through the winning lift
        E = (V / D[:, None]) * self._signs[m]
        return V, D, E, None

    def dist_rows(self, A, B):
        disp = self._images(B) - np.asarray(A, float)[None, :, :]
        return np.min(np.linalg.norm(disp, axis=2), axis=0)


class FlatTorus(FlatQuotientSpace):
    """Unit square with opposite edges glued: R^2 / Z^2."""

    name = "torus"
    injectivity_radius = 0.5
    convexity_radius = 0.25
    shortest_closed_geodesic = 1.0

    def _deck_transforms(self):
        radius = 2.0 * self.injectivity_radius + np.sqrt(2.0) + 1e-9
        span = int(np.ceil(radius))
        offs = [
            (i, j)
            for i in range(-span, span + 1)
            for j in range(-span, span + 1)
            if np.hypot(i, j) <= radius
        ]
        return [(1.0, 1.0)] * len(offs), offs

    def reduce_c(self, c):
        return np.mod(np.asarray(c, dtype=float), 1.0)

    def reduce_rows(self, C):
        return np.mod(np.asarray(C, dtype=float), 1.0)

    def random_point(self, rng):
        return self.point(rng.uniform(0.0, 1.0, 2))


class MobiusBand(FlatQuotientSpace):
    """Flat open Moebius band: the strip R x (-w, w) modulo the glide
    (x, y) -> (x + 1, -y). Fundamental domain x in [0, 1)."""

    name = "mobius"
    injectivity_radius = 0.5
    convexity_radius = 0.25
    has_boundary = True
    shortest_closed_geodesic = 1.0  # the centerline y = 0

    def __init__(self, width=0.5, tol=None):
        if not (0.0 < width):
            raise ValueError("width must be positive")
        self.width = float(width)
        super().__init__(tol=tol)

    def _deck_transforms(self):
        # translation part of glide^k has length |k|
        radius = 2.0 * self.injectivity_radius + np.hypot(1.0, 2.0 * self.width) + 1e-9
        ks = range(-int(np.ceil(radius)), int(np.ceil(radius)) + 1)
        return [(1.0, (-1.0) ** k) for k in ks], [(float(k), 0.0) for k in ks]

    def check_coords(self, c):
        super().check_coords(c)
        if abs(float(np.asarray(c, float)[1])) >= self.width:
            raise UsageError(
                f"mobius: |y| = {abs(c[1]):.6g} outside the open band (width {self.width})"
            )

    def reduce_c(self, c):
        x, y = float(c[0]), float(c[1])
        k = np.floor(x)
        x -= k
        if int(k) % 2:
            y = -y
        return np.array([x, y])

    def reduce_rows(self, C):
        C = np.asarray(C, dtype=float)
        k = np.floor(C[:, 0])
        out = np.empty_like(C)
        out[:, 0] = C[:, 0] - k
        out[:, 1] = np.where(np.mod(k, 2.0) == 0.0, C[:, 1], -C[:, 1])
        return out

    def exp_c(self, a, v):
        raw = np.asarray(a, float) + np.asarray(v, float)
        if abs(raw[1]) >= self.width:
            raise DomainExitError(
                f"mobius: geodesic reached |y| = {abs(raw[1]):.6g}, band width {self.width}"
            )
        return self.reduce_c(raw)

    def random_point(self, rng):
        return self.point(
            [rng.uniform(0.0, 1.0), rng.uniform(-0.8 * self.width, 0.8 * self.width)]
        )
