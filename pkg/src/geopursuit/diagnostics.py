"""Measurable quantities and testable claims about pursuit loops.

Everything here is a pure function over immutable inputs: loop vertex
cycles, trajectory records, and closed-geodesic oracles. The integrator
never depends on this module.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .engine import TrajectoryRecord
from .errors import UsageError
from .geometry import Space, angle, end_tangent
from .spaces.euclidean import Euclidean
from .spaces.flat import FlatQuotientSpace, FlatTorus, MobiusBand
from .spaces.revolution import SurfaceOfRevolution
from .spaces.sphere import ProjectivePlane

TWO_PI = 2.0 * math.pi


# --------------------------------------------------------------- loop model


class LoopPath:
    """Closed constant-speed piecewise-geodesic loop through a vertex cycle.

    Parametrized by arc-length fraction s in [0, 1), with s = 0 at vertex 0.
    A fully merged pursuit leaves a single vertex; that degenerates to the
    constant loop.
    """

    def __init__(self, space: Space, vertices):
        self.space = space
        self.points = [space.point(c) for c in vertices]
        m = len(self.points)
        if m == 0:
            raise UsageError("loop needs at least one vertex")
        if m == 1:
            self.segments = []
            self.lengths = np.zeros(0)
            self.total = 0.0
            self.fractions = np.zeros(1)
            return
        self.segments = [
            space.geodesic(self.points[i], self.points[(i + 1) % m])
            for i in range(m)
        ]
        self.lengths = np.array([s.length for s in self.segments])
        self.total = float(np.sum(self.lengths))
        # fractions[i] = loop parameter where segment i starts
        self.fractions = np.concatenate([[0.0], np.cumsum(self.lengths)]) / self.total

    @property
    def n_vertices(self):
        return len(self.points)

    def vertex_coords(self):
        return np.array([p.coords for p in self.points])

    def sample(self, us):
        """Coords rows of the loop at parameters us (taken mod 1)."""
        us = np.mod(np.asarray(us, float), 1.0)
        if not self.segments:
            return np.tile(self.points[0].coords, (len(us), 1))
        out = np.empty((len(us), self.space.coord_dim))
        idx = np.clip(
            np.searchsorted(self.fractions, us, side="right") - 1,
            0,
            len(self.segments) - 1,
        )
        for k, (u, i) in enumerate(zip(us, idx)):
            seg = self.segments[i]
            local = (u - self.fractions[i]) * self.total / seg.length
            out[k] = self.space.geodesic_eval(seg, min(max(local, 0.0), 1.0)).coords
        return out


def loop_from_record(space: Space, record: TrajectoryRecord, frame=-1) -> LoopPath:
    """Live-representative cycle of a recorded frame as a LoopPath."""
    groups = record.groups[frame]
    reps = np.unique(groups)
    return LoopPath(space, record.positions[frame][reps])


# ------------------------------------------------------------- loop metrics


@dataclass
class LoopMetrics:
    lengths: np.ndarray          # per-segment geodesic lengths
    angles: np.ndarray           # per-corner turning angles, angles[i] at vertex i+1
    total: float
    theta_max: float
    exterior_sum: float = None   # only meaningful in Euclidean space


def loop_metrics(space_or_loop, vertices=None) -> LoopMetrics:
    """Lengths and corner angles of a vertex cycle.

    Accepts either (space, vertices) or a LoopPath. The angle at each corner
    is measured between the incoming segment's terminal tangent and the
    outgoing segment's initial tangent, both based at the corner.
    """
    if isinstance(space_or_loop, LoopPath):
        loop = space_or_loop
    else:
        loop = LoopPath(space_or_loop, vertices)
    space = loop.space
    m = loop.n_vertices
    if m < 2:
        return LoopMetrics(
            lengths=np.zeros(0), angles=np.zeros(0), total=0.0, theta_max=0.0,
            exterior_sum=0.0 if isinstance(space, Euclidean) else None,
        )
    segs = loop.segments
    thetas = np.empty(m)
    for i in range(m):
        nxt = segs[(i + 1) % m]
        thetas[i] = angle(end_tangent(segs[i]), nxt.initial_tangent)
    ext = float(np.sum(thetas)) if isinstance(space, Euclidean) else None
    return LoopMetrics(
        lengths=loop.lengths,
        angles=thetas,
        total=loop.total,
        theta_max=float(np.max(thetas)),
        exterior_sum=ext,
    )


def borsuk_check(space: Space, vertices) -> dict:
    """Exterior-angle sum of a closed piecewise-linear Euclidean loop.

    Returns the sum and whether it clears 2*pi (minus 1e-9 slack for
    accumulated roundoff). Applies to Euclidean spaces of any dimension.
    """
    if not isinstance(space, Euclidean):
        raise UsageError("the exterior-angle bound applies to Euclidean loops")
    if len(vertices) < 3:
        raise UsageError("need at least 3 vertices")
    metrics = loop_metrics(space, vertices)
    total = metrics.exterior_sum
    return {"sum": total, "ok": total >= TWO_PI - 1e-9}


def finite_time_bounds(n: int, l0: float) -> dict:
    """Closed-form capture-time bounds for n bugs with initial loop length l0.

    coarse: from the worst single corner (one angle is at least 2*pi/n).
    refined: from the full angle sum via the two-case convexity estimate.
    exact_ngon: the capture time when the start is a regular planar n-gon.
    """
    if n < 2:
        raise UsageError("need n >= 2")
    if l0 <= 0:
        raise UsageError("need positive initial length")
    gap = 1.0 - math.cos(TWO_PI / n)
    return {
        "coarse": l0 / gap,
        "refined": l0 / min(1.0, n * gap),
        "exact_ngon": l0 / (n * gap),
    }


# --------------------------------------------------------------- rate checks


def rate_identity_gaps(record: TrajectoryRecord) -> dict:
    """Deviation between recorded length decrease and the angle-rate integral.

    For each recorded interval, compares the finite difference of l(t)
    against the accumulated integral of sum(cos theta_i - 1). Intervals
    containing a merge (or the final freeze) are masked out: the identity
    assumes all gaps stay positive and n fixed.
    """
    t = record.times
    dt = np.diff(t)
    dl = np.diff(record.l_total)
    dr = np.diff(record.rate_integral)
    valid = dt > 1e-14
    defect = np.zeros_like(dt)
    defect[valid] = np.abs(dl[valid] - dr[valid]) / dt[valid]

    event_times = np.array([e.t for e in record.events]) if record.events else np.zeros(0)
    masked = np.zeros(len(dt), dtype=bool)
    for te in event_times:
        masked |= (t[:-1] - 1e-12 <= te) & (te <= t[1:] + 1e-12)
    masked |= np.diff(record.live_count) != 0
    masked |= ~valid

    clean = defect[~masked]
    return {
        "defects": defect,
        "masked": masked,
        "max_clean": float(np.max(clean)) if clean.size else 0.0,
    }


def theta_max_series(record: TrajectoryRecord):
    """(times, theta_max) arrays straight from the record."""
    return record.times, record.theta_max


def lambda_min_check(space: Space, record: TrajectoryRecord) -> dict:
    """Once l(t) drops below the shortest closed geodesic, collapse must follow."""
    lam = space.shortest_closed_geodesic
    if not np.isfinite(lam):
        return {"applicable": False, "ok": True}
    live = record.live_count > 1
    below = np.nonzero((record.l_total < lam) & live)[0]
    if below.size == 0:
        return {"applicable": False, "ok": True, "lambda_min": lam}
    collapsed = record.termination == "all_merged"
    return {
        "applicable": True,
        "lambda_min": lam,
        "first_below_time": float(record.times[below[0]]),
        "collapsed": collapsed,
        "ok": collapsed,
    }


# ------------------------------------------------------------- trap checks


def convex_trap_check(space: Space, record: TrajectoryRecord, center, radius) -> dict:
    """Verify bugs never leave the closed metric ball after all are inside.

    The ball must be convex (radius at most the space's convexity radius):
    then the chase segments stay inside and so do the bugs.
    """
    if radius > space.convexity_radius + 1e-12:
        raise UsageError(
            f"radius {radius:g} exceeds the convexity radius "
            f"{space.convexity_radius:g}"
        )
    c = space.point(center).coords
    m = len(record.times)
    entered_at = None
    violated_at = None
    worst = 0.0
    for k in range(m):
        P = record.positions[k]
        d = space.dist_rows(P, np.broadcast_to(c, P.shape))
        dmax = float(np.max(d))
        if entered_at is None:
            if dmax <= radius:
                entered_at = float(record.times[k])
        else:
            worst = max(worst, dmax - radius)
            if dmax > radius + 1e-6 and violated_at is None:
                violated_at = float(record.times[k])
    return {
        "entered_at": entered_at,
        "violated_at": violated_at,
        "max_excursion": worst,
        "ok": entered_at is not None and violated_at is None,
    }


def neck_trap_check(space: SurfaceOfRevolution, record: TrajectoryRecord, delta) -> dict:
    """Tube variant for the dumbbell: the band of meridian distance <= delta
    around the waist is forward-invariant once every bug is inside."""
    if not isinstance(space, SurfaceOfRevolution):
        raise UsageError("neck trap check needs a surface of revolution")
    entered_at = None
    violated_at = None
    worst = 0.0
    for k in range(len(record.times)):
        d = space.dist_to_neck(record.positions[k][:, 0])
        dmax = float(np.max(d))
        if entered_at is None:
            if dmax <= delta:
                entered_at = float(record.times[k])
        else:
            worst = max(worst, dmax - delta)
            if dmax > delta + 1e-6 and violated_at is None:
                violated_at = float(record.times[k])
    return {
        "entered_at": entered_at,
        "violated_at": violated_at,
        "max_excursion": worst,
        "ok": entered_at is not None and violated_at is None,
    }


# ------------------------------------------------------- homotopy / winding


def _flat_lift_walk(space: FlatQuotientSpace, vertices):
    """Continuously lift a vertex cycle to the covering plane.

    Returns (signs, offset, residual): the deck transform mapping the start
    lift to the end lift, plus how far the offset is from the lattice.
    """
    verts = [space.point(c).coords for c in vertices]
    m = len(verts)
    sign = np.ones(2)
    lift = verts[0].copy()
    for i in range(m):
        v = space.log_c(verts[i], verts[(i + 1) % m])
        lift = lift + sign * v
        sign = sign * _segment_flip(space, verts[i], verts[(i + 1) % m])
    offset = lift - sign * verts[0]
    return sign, offset


def _segment_flip(space, a, b):
    """Sign change of the chart frame across the winning deck image."""
    img = space._signs * np.asarray(b, float) + space._offsets
    k = int(np.argmin(np.linalg.norm(img - np.asarray(a, float), axis=1)))
    return space._signs[k]


def winding_class(space: Space, vertices) -> dict:
    """Free-homotopy data of a vertex cycle, where the space has any.

    torus: integer winding vector (p, q).
    mobius: integer number of strip traversals (odd = orientation-reversing).
    dumbbell: winding around the axis of revolution.
    rp2: Z/2 class (0 = lift closes on the sphere, 1 = antipodal).
    euclidean, sphere: trivial fundamental group, class None.
    A lift residual above 0.1 means the lift is numerically broken and
    raises instead of misclassifying.
    """
    if isinstance(space, FlatTorus):
        _, offset = _flat_lift_walk(space, vertices)
        cls = np.round(offset)
        residual = float(np.max(np.abs(offset - cls)))
        if residual > 0.1:
            raise UsageError(f"lift residual {residual:.3g} too large to classify")
        return {"kind": "torus", "class": (int(cls[0]), int(cls[1])), "residual": residual}
    if isinstance(space, MobiusBand):
        sign, offset = _flat_lift_walk(space, vertices)
        k = round(float(offset[0]))
        residual = abs(float(offset[0]) - k)
        parity_ok = (sign[1] < 0) == (k % 2 == 1)
        if residual > 0.1 or abs(offset[1]) > 0.1 or not parity_ok:
            raise UsageError("lift residual too large to classify")
        return {"kind": "mobius", "class": int(k), "residual": residual}
    if isinstance(space, SurfaceOfRevolution):
        verts = [space.point(c).coords for c in vertices]
        total = 0.0
        for i in range(len(verts)):
            total += space.log_c(verts[i], verts[(i + 1) % len(verts)])[1]
        k = round(total / TWO_PI)
        residual = abs(total / TWO_PI - k)
        if residual > 0.1:
            raise UsageError(f"lift residual {residual:.3g} too large to classify")
        return {"kind": "dumbbell", "class": int(k), "residual": residual}
    if isinstance(space, ProjectivePlane):
        verts = [space.point(c).coords for c in vertices]
        lift = verts[0].copy()
        start = lift.copy()
        for i in range(1, len(verts) + 1):
            nxt = verts[i % len(verts)]
            d = float(np.dot(lift, nxt))
            if abs(d) < 0.05:
                raise UsageError("segment too close to the lift cut to classify")
            lift = nxt if d > 0 else -nxt
        cls = 0 if float(np.dot(lift, start)) > 0 else 1
        return {"kind": "rp2", "class": cls, "residual": 0.0}
    return {"kind": "trivial", "class": None, "residual": 0.0}


def torus_homotopy_class(space: FlatTorus, vertices):
    """Winding vector of a loop on the flat torus."""
    if not isinstance(space, FlatTorus):
        raise UsageError("needs the flat torus")
    return winding_class(space, vertices)["class"]


# --------------------------------------------------------- convergence (CONV)


@dataclass
class ConvergenceReport:
    oracle_name: str
    oracle_length: float
    loop_length: float
    length_gap: float                 # loop length minus oracle length
    sup_dist_to_image: float = None   # sup_s d(loop(s), oracle image)
    conv_dist: float = None           # inf_c sup_s d(loop(s), oracle(s+c))
    best_c: float = None
    verdict: str = "undecided"        # collapsed | converged | undecided
    resolution: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)


# verdict thresholds, relative to the oracle length
CONV_DIST_FRACTION = 5e-3
LENGTH_GAP_FRACTION = 1e-3


def conv_distance(loop: LoopPath, oracle, grid=0, offsets=256, refine_tol=1e-6,
                  conv_fraction=CONV_DIST_FRACTION,
                  gap_fraction=LENGTH_GAP_FRACTION) -> ConvergenceReport:
    """Distance from a loop to a closed geodesic, modulo domain rotation.

    sup over the loop parameter runs on a uniform grid of at least
    max(grid, 64 * segments) samples with every corner included; inf over
    the rotation c scans `offsets` offsets and then golden-section refines
    the best bracket down to `refine_tol` in c.
    """
    space = loop.space
    n_seg = max(len(loop.segments), 1)
    n_sup = max(int(grid), 64 * n_seg)
    us = np.unique(np.concatenate([np.arange(n_sup) / n_sup, loop.fractions % 1.0]))
    X = loop.sample(us)

    def g(c):
        return float(np.max(space.dist_rows(X, oracle.points(us + c))))

    cs = np.arange(offsets) / offsets
    vals = np.array([g(c) for c in cs])
    k = int(np.argmin(vals))
    # golden-section refinement inside the winning bracket
    lo = cs[k] - 1.0 / offsets
    hi = cs[k] + 1.0 / offsets
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c1 = b - phi * (b - a)
    c2 = a + phi * (b - a)
    f1, f2 = g(c1), g(c2)
    while b - a > refine_tol:
        if f1 <= f2:
            b, c2, f2 = c2, c1, f1
            c1 = b - phi * (b - a)
            f1 = g(c1)
        else:
            a, c1, f1 = c1, c2, f2
            c2 = a + phi * (b - a)
            f2 = g(c2)
    best_c = (c1 if f1 <= f2 else c2) % 1.0
    conv = min(f1, f2, vals[k])

    sup_img = float(np.max(oracle.dist_to_image(X)))
    gap = loop.total - oracle.length
    report = ConvergenceReport(
        oracle_name=type(oracle).__name__,
        oracle_length=oracle.length,
        loop_length=loop.total,
        length_gap=gap,
        sup_dist_to_image=sup_img,
        conv_dist=conv,
        best_c=float(best_c),
        resolution={
            "sup_samples": int(len(us)),
            "offsets": int(offsets),
            "refine_tol": float(refine_tol),
        },
    )
    if conv < conv_fraction * oracle.length and abs(gap) < gap_fraction * oracle.length:
        report.verdict = "converged"
    return report


def convergence_report(space: Space, record: TrajectoryRecord, oracle,
                       grid=0, offsets=256, refine_tol=1e-6,
                       conv_fraction=CONV_DIST_FRACTION,
                       gap_fraction=LENGTH_GAP_FRACTION) -> ConvergenceReport:
    """Verdict for a finished run against a target closed geodesic."""
    loop = loop_from_record(space, record, -1)
    if record.termination == "all_merged":
        pt = loop.points[0].coords
        dists = space.dist_rows(
            np.broadcast_to(pt, (256, space.coord_dim)), oracle.points(np.arange(256) / 256)
        )
        return ConvergenceReport(
            oracle_name=type(oracle).__name__,
            oracle_length=oracle.length,
            loop_length=0.0,
            length_gap=-oracle.length,
            sup_dist_to_image=float(np.max(dists)),
            conv_dist=float(np.max(dists)),
            best_c=0.0,
            verdict="collapsed",
            extras={"collapse_time": record.capture_time},
        )
    return conv_distance(loop, oracle, grid=grid, offsets=offsets,
                         refine_tol=refine_tol, conv_fraction=conv_fraction,
                         gap_fraction=gap_fraction)


def image_distance_series(space: Space, record: TrajectoryRecord, oracle,
                          stride=1, samples_per_seg=64):
    """sup_s d(loop_t(s), oracle image) for recorded frames (possibly strided)."""
    ts, sups = [], []
    for k in range(0, len(record.times), stride):
        loop = loop_from_record(space, record, k)
        if not loop.segments:
            X = loop.points[0].coords[None, :]
        else:
            n = samples_per_seg * len(loop.segments)
            us = np.unique(np.concatenate([np.arange(n) / n, loop.fractions % 1.0]))
            X = loop.sample(us)
        ts.append(float(record.times[k]))
        sups.append(float(np.max(oracle.dist_to_image(X))))
    return np.array(ts), np.array(sups)


# ------------------------------------------------- normal-coordinate angles


def angle_chart_comparison(space: Space, p, radius, n_pairs=50, seed=0) -> dict:
    """Metric vs chart angles for short geodesic pairs near a point.

    Normal coordinates at p assign each nearby point the frame components
    of log_p. Corners anchored at the center itself would agree exactly (the
    chart is a radial isometry), so each test corner sits at roughly half
    the working radius; endpoints fill the rest of the ball. The worst
    discrepancy decays linearly with the ball radius.
    """
    if radius > space.convexity_radius:
        raise UsageError(
            f"radius {radius:g} exceeds the convexity radius "
            f"{space.convexity_radius:g}"
        )
    pc = space.point(p).coords if not hasattr(p, "coords") else p.coords
    frame = space.tangent_frame(pc)
    rng = np.random.default_rng(seed)

    def chart(y):
        v = space.log_c(pc, y)
        return np.array([space.inner_c(pc, v, e) for e in frame])

    vals = []
    made = 0
    while made < n_pairs:
        coefs = rng.normal(size=(3, len(frame)))
        coefs /= np.linalg.norm(coefs, axis=1)[:, None]
        rho = rng.uniform(0.7, 1.0, size=3)
        rho[0] = rng.uniform(0.35, 0.55)
        q, a_, b_ = (
            space.exp_c(pc, radius * r * (c @ frame)) for r, c in zip(rho, coefs)
        )
        da = space.dist_c(q, a_)
        db = space.dist_c(q, b_)
        if min(da, db) < 0.2 * radius:
            continue
        va = space.log_c(q, a_)
        vb = space.log_c(q, b_)
        cosm = space.inner_c(q, va, vb) / (
            space.norm_c(q, va) * space.norm_c(q, vb)
        )
        ang_metric = math.acos(min(1.0, max(-1.0, cosm)))
        xq, xa, xb = chart(q), chart(a_), chart(b_)
        u1, u2 = xa - xq, xb - xq
        cosc = float(u1 @ u2) / (np.linalg.norm(u1) * np.linalg.norm(u2))
        ang_chart = math.acos(min(1.0, max(-1.0, cosc)))
        vals.append(abs(ang_metric - ang_chart))
        made += 1
    vals = np.array(vals)
    return {
        "radius": float(radius),
        "max": float(np.max(vals)),
        "median": float(np.median(vals)),
        "values": vals,
    }
