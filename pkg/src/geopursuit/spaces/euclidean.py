"""Flat R^d with the standard metric."""

import numpy as np

from ..errors import DegenerateLogError
from ..geometry import Space


class Euclidean(Space):
    closed_form_geodesics = True

    def __init__(self, dim=2, tol=None, **kw):
        super().__init__(**({"tol": tol} if tol else {}))
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = int(dim)
        self.coord_dim = int(dim)
        self.name = f"euclidean{dim}"

    def dist_c(self, a, b):
        return float(np.linalg.norm(np.asarray(b, float) - np.asarray(a, float)))

    def log_c(self, a, b, guess=None):
        v = np.asarray(b, float) - np.asarray(a, float)
        if not np.any(v):
            raise DegenerateLogError("log at coincident points")
        return v

    def exp_c(self, a, v):
        return np.asarray(a, float) + np.asarray(v, float)

    def inner_c(self, base, u, v):
        return float(np.dot(u, v))

    def chase_logs(self, P, Q, guesses=None):
        V = np.asarray(Q, float) - np.asarray(P, float)
        D = np.linalg.norm(V, axis=1)
        E = V / D[:, None]
        return V, D, E, None

    def dist_rows(self, A, B):
        return np.linalg.norm(np.asarray(B, float) - np.asarray(A, float), axis=1)

    def random_point(self, rng):
        return self.point(rng.uniform(0.0, 1.0, self.dim))
