"""Chart gymnastics: seam splitting on the flat quotients and 3D embeddings.

The simulator stores quotient-space paths reduced into one fundamental
domain, so a bug crossing the seam jumps from one edge to the other.  These
helpers cut such paths into pieces that are each continuous on paper; no
returned segment spans more than half the domain in a periodic direction.
"""

import numpy as np

from .io import VizError


def _exit_param(a, d):
    # fraction of the step at which coordinate a + s*d leaves [0, 1]
    if d > 0 and a + d > 1.0:
        return (1.0 - a) / d
    if d < 0 and a + d < 0.0:
        return -a / d
    return None


def split_torus_path(points):
    """Cut a path on the unit torus chart into seamless pieces.

    Steps are taken along the shortest displacement, so each input step must
    be shorter than half a period per axis (true for recorded trajectories).
    """
    pts = np.asarray(points, float) % 1.0
    pieces = []
    cur = [pts[0]]
    for b in pts[1:]:
        a = cur[-1]
        d = (b - a + 0.5) % 1.0 - 0.5
        while True:
            exits = [(s, i) for i, s in ((0, _exit_param(a[0], d[0])),
                                         (1, _exit_param(a[1], d[1])))
                     if s is not None and s < 1.0]
            if not exits:
                break
            s, axis = min(exits)
            edge = a + d * s
            cur.append(edge)
            pieces.append(np.array(cur))
            edge = edge.copy()
            edge[axis] = 1.0 - round(edge[axis])  # 0 -> 1 or 1 -> 0
            cur = [edge]
            d = d * (1.0 - s)
            a = edge
        cur.append(a + d)
    pieces.append(np.array(cur))
    return [p for p in pieces if len(p) >= 2]


def _mobius_canonical(pts):
    # reduce any lift to the fundamental domain; odd wraps flip y
    x = pts[:, 0] % 1.0
    flip = np.where(np.floor(pts[:, 0]) % 2 == 0, 1.0, -1.0)
    return np.column_stack([x, pts[:, 1] * flip])


def split_mobius_path(points, width):
    """Seamless pieces of a band path; the x seam glues with a y flip."""
    pts = _mobius_canonical(np.asarray(points, float))
    pieces = []
    cur = [pts[0]]
    for b in pts[1:]:
        a = cur[-1]
        # nearest glide-reflected lift of the target
        lifts = [np.array([b[0] + k, b[1] * (-1.0) ** k]) for k in (-1, 0, 1)]
        lift = min(lifts, key=lambda q: float(np.hypot(*(q - a))))
        d = lift - a
        s = _exit_param(a[0], d[0])
        if s is not None and s < 1.0:
            edge = a + d * s
            cur.append(edge)
            pieces.append(np.array(cur))
            # re-enter on the far side, mirrored
            start = np.array([1.0 - round(edge[0]), -edge[1]])
            rest = d * (1.0 - s)
            cur = [start, start + np.array([rest[0], -rest[1]])]
        else:
            cur.append(a + d)
    pieces.append(np.array(cur))
    out = [p for p in pieces if len(p) >= 2]
    for p in out:
        if np.any(np.abs(p[:, 1]) > width + 1e-9):
            raise VizError("path leaves the band; wrong width in the report?")
    return out


def align_signs(points):
    """Continuous antipodal lift: flip rows so consecutive dots stay positive."""
    pts = np.asarray(points, float).copy()
    for i in range(1, len(pts)):
        if np.dot(pts[i - 1], pts[i]) < 0.0:
            pts[i] = -pts[i]
    return pts


def embed_sphere(points, radius):
    return np.asarray(points, float) * radius


def dumbbell_radius(z, depth, width):
    z = np.asarray(z, float)
    return 1.0 - depth * np.exp(-((z / width) ** 2))


def embed_dumbbell(points, depth, width):
    """(z, phi) chart rows to 3D on the revolved profile."""
    pts = np.asarray(points, float)
    r = dumbbell_radius(pts[:, 0], depth, width)
    return np.stack([r * np.cos(pts[:, 1]), r * np.sin(pts[:, 1]),
                     pts[:, 0]], axis=1)


def sphere_mesh(radius, n=40):
    th = np.linspace(0.0, np.pi, n)
    ph = np.linspace(0.0, 2.0 * np.pi, 2 * n)
    TH, PH = np.meshgrid(th, ph)
    return (radius * np.sin(TH) * np.cos(PH),
            radius * np.sin(TH) * np.sin(PH),
            radius * np.cos(TH))


def dumbbell_mesh(depth, width, z_extent, n=60):
    z = np.linspace(-z_extent, z_extent, n)
    ph = np.linspace(0.0, 2.0 * np.pi, n)
    Z, PH = np.meshgrid(z, ph)
    R = dumbbell_radius(Z, depth, width)
    return R * np.cos(PH), R * np.sin(PH), Z
