"""Cyclic pursuit integrator.

n bugs occupy points of a space; bug i moves at unit speed toward bug
i+1 (mod n) along the minimizing geodesic. Two rules shape the dynamics at
coincidence: bugs that meet merge and move together from then on, and if
all bugs meet the pursuit is over and the cluster stays put.

The integrator is a classical RK4 on the stacked positions of the live
cluster representatives with an adaptive cap on the step: no step may
exceed a fixed fraction of the smallest live gap, so captures are resolved
by geometric step decay rather than overshoot. Geodesic chases that fail
inside a trial step (cut-locus proximity, domain exit on bounded charts)
reject the step and halve it.

Merging is transitive within a step. Each accepted step also accumulates
the trapezoid integral of the theoretical shrink rate sum(cos(theta_i) - 1)
over the live corner angles, which diagnostics compare against the actual
decrease of the loop length.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateLogError,
    DomainExitError,
    IntegrationError,
    OutOfInjectivityError,
    SolverError,
    UsageError,
)
from .geometry import Space

_MAX_HALVINGS = 30


@dataclass
class IntegratorConfig:
    """Knobs for a pursuit run.

    capture_eps: gap at or below which bugs merge. None picks
        1e-9 * injectivity radius (or 1e-9 * initial loop length on spaces
        with no conjugate points).
    dt_max: hard step ceiling.
    step_safety: step may not exceed this fraction of the smallest gap.
    record_every: record a trajectory sample every k accepted steps
        (events and the final state are always recorded).
    stop_on_converged: end the run once every live corner angle stays
        below converged_angle at a check (checked every check_every time
        units). Used for runs that approach a closed geodesic and would
        otherwise spin until t_max.
    """

    dt_max: float = 0.01
    t_max: float = 100.0
    capture_eps: float = None
    step_safety: float = 0.1
    record_every: int = 1
    stop_on_converged: bool = False
    converged_angle: float = 1e-6
    check_every: float = 1.0

    def validate(self):
        if self.dt_max <= 0 or self.t_max <= 0:
            raise UsageError("dt_max and t_max must be positive")
        if not (0 < self.step_safety <= 0.5):
            raise UsageError("step_safety must be in (0, 0.5]")
        if self.record_every < 1:
            raise UsageError("record_every must be >= 1")
        if self.capture_eps is not None and self.capture_eps <= 0:
            raise UsageError("capture_eps must be positive")


@dataclass
class PursuitEvent:
    t: float
    kind: str                 # "capture" or "freeze"
    members: tuple            # original bug indices merged by this event
    rep: int                  # surviving representative index


@dataclass
class TrajectoryRecord:
    space_name: str
    n_bugs: int
    times: np.ndarray = None            # (m,)
    positions: np.ndarray = None        # (m, n, coord_dim)
    groups: np.ndarray = None           # (m, n) representative labels
    l_total: np.ndarray = None          # (m,)
    theta_max: np.ndarray = None        # (m,)
    min_gap: np.ndarray = None          # (m,)
    rate_integral: np.ndarray = None    # (m,) trapezoid of sum(cos θ - 1)
    live_count: np.ndarray = None       # (m,)
    events: list = field(default_factory=list)
    termination: str = ""               # "t_max" | "all_merged" | "converged"
    t_final: float = 0.0
    capture_time: float = None          # set when all bugs merged
    stats: dict = field(default_factory=dict)

    def frame(self, k):
        return {
            "t": self.times[k],
            "positions": self.positions[k],
            "groups": self.groups[k],
        }


class PursuitLoop:
    """Mutable pursuit state plus the stepper."""

    def __init__(self, space: Space, positions, config: IntegratorConfig = None):
        if not isinstance(space, Space):
            raise UsageError("space must be a Space instance")
        self.space = space
        self.config = config or IntegratorConfig()
        self.config.validate()

        pts = [space.point(c).coords for c in positions]
        if len(pts) < 2:
            raise UsageError("pursuit needs at least 2 bugs")
        self.n = len(pts)
        self.X = np.array(pts, dtype=float)
        self.parent = np.arange(self.n)
        self.t = 0.0
        self.events: list = []

        eps = self.config.capture_eps
        inj = space.injectivity_radius
        if eps is None:
            if np.isfinite(inj):
                eps = 1e-9 * inj
            else:
                eps = 1e-9 * self._initial_scale()
        elif np.isfinite(inj) and eps >= 1e-3 * inj:
            # a merge teleports the follower by up to eps; keep that far below
            # the geometry scale or merged dynamics stop approximating rule 2
            raise UsageError(
                f"capture_eps {eps:g} too coarse: must be below 1e-3 of the "
                f"injectivity radius {inj:g}")
        self.capture_eps = float(eps)

        self._carries = None
        self._merge_coincident(initial=True)
        if self.live_reps().size == 1:
            # degenerate input: everyone starts at one point
            self._finish_freeze()
        else:
            self._measure()
            self.l0 = self.l_total
        self.rate_int = 0.0
        self.n_steps = 0
        self.n_rejected = 0

    # ------------------------------------------------------------- topology

    def live_reps(self):
        return np.unique(self.parent)

    def _targets(self, reps):
        """reps[k] chases the first bug after it (in original cyclic order)
        that belongs to a different cluster."""
        tgt = np.empty(len(reps), dtype=int)
        for k, r in enumerate(reps):
            j = (r + 1) % self.n
            while self.parent[j] == r:
                j = (j + 1) % self.n
            tgt[k] = self.parent[j]
        return tgt

    def _initial_scale(self):
        total = 0.0
        for i in range(self.n):
            a, b = self.X[i], self.X[(i + 1) % self.n]
            try:
                total += self.space.dist_c(a, b)
            except DegenerateLogError:
                pass
        return total if total > 0 else 1.0

    def _merge_pairs(self, pairs):
        """Union the given (rep, target_rep) pairs; snap positions to reps."""
        for a, b in pairs:
            ra, rb = self.parent[a], self.parent[b]
            if ra == rb:
                continue
            keep, drop = (ra, rb) if ra < rb else (rb, ra)
            self.parent[self.parent == drop] = keep
        for i in range(self.n):
            self.X[i] = self.X[self.parent[i]]
        self._carries = None

    def _merge_coincident(self, initial=False):
        """Merge every adjacent live pair with gap <= capture_eps (transitive)."""
        changed = True
        while changed:
            changed = False
            reps = self.live_reps()
            if reps.size == 1:
                return
            tgt = self._targets(reps)
            try:
                D = self.space.dist_rows(self.X[reps], self.X[tgt])
            except (OutOfInjectivityError, SolverError) as exc:
                if initial:
                    raise UsageError(
                        f"initial bug gap could not be measured: {exc}"
                    ) from exc
                raise
            hits = np.nonzero(D <= self.capture_eps)[0]
            if hits.size:
                for k in hits:
                    self.events.append(
                        PursuitEvent(
                            t=self.t,
                            kind="capture",
                            members=(int(reps[k]), int(tgt[k])),
                            rep=int(min(self.parent[reps[k]], self.parent[tgt[k]])),
                        )
                    )
                self._merge_pairs([(reps[k], tgt[k]) for k in hits])
                changed = True

    # ------------------------------------------------------------ measuring

    def _measure(self):
        """Refresh chase data (V, D, E, theta, rate) at the current state."""
        reps = self.live_reps()
        tgt = self._targets(reps)
        V, D, E, carries = self.space.chase_logs(self.X[reps], self.X[tgt], self._carries)
        self._carries = carries
        self.reps = reps
        self.tgt = tgt
        self.V = V
        self.D = D
        self.E = E
        if np.any(D >= self.space.injectivity_radius):
            raise OutOfInjectivityError(
                "a pursuit gap reached the injectivity radius"
            )
        self.U = V / D[:, None]
        # corner angle at each target: arrival direction vs departure there
        pos = {int(r): k for k, r in enumerate(reps)}
        cos_t = np.empty(len(reps))
        for k in range(len(reps)):
            j = pos[int(self.tgt[k])]
            c = self.space.inner_c(self.X[self.tgt[k]], self.E[k], self.U[j])
            cos_t[k] = min(1.0, max(-1.0, c))
        self.cos_theta = cos_t
        self.theta = np.arccos(cos_t)
        self.rate = float(np.sum(cos_t - 1.0))
        self.l_total = float(np.sum(D))
        self.min_gap = float(np.min(D))

    # -------------------------------------------------------------- stepping

    def _velocity(self, Xstage):
        """Unit chase velocities for the live reps at given stage positions."""
        V, D, E, carries = self.space.chase_logs(
            Xstage[self.reps], Xstage[self.tgt], self._carries
        )
        self._carries = carries
        if np.any(D <= 0):
            raise IntegrationError("stage evaluation hit a zero gap")
        return V / D[:, None]

    def _try_step(self, h):
        """One RK4 trial from the current state; returns candidate positions."""
        X = self.X
        reps = self.reps
        proj = self.space.project_rows

        k1 = self.U
        X2 = X.copy()
        X2[reps] = proj(X[reps] + 0.5 * h * k1)
        k2 = self._velocity(X2)
        X3 = X.copy()
        X3[reps] = proj(X[reps] + 0.5 * h * k2)
        k3 = self._velocity(X3)
        X4 = X.copy()
        X4[reps] = proj(X[reps] + h * k3)
        k4 = self._velocity(X4)

        Xn = X.copy()
        Xn[reps] = self.space.reduce_rows(
            proj(X[reps] + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4))
        )
        for i in range(self.n):
            Xn[i] = Xn[self.parent[i]]
        return Xn

    def step(self):
        """Advance one accepted step. Returns False once the run is over."""
        if self.termination_reason() is not None:
            return False
        cfg = self.config
        h = min(cfg.dt_max, cfg.step_safety * self.min_gap, cfg.t_max - self.t)
        prev_rate = self.rate
        prev_l = self.l_total
        prev_gaps = (self.reps.copy(), self.D.copy())

        Xn = None
        for _ in range(_MAX_HALVINGS):
            try:
                Xn = self._try_step(h)
                break
            except (OutOfInjectivityError, DomainExitError, SolverError):
                self.n_rejected += 1
                h *= 0.5
                if h < 1e-15:
                    break
        if Xn is None:
            raise IntegrationError(
                f"step at t={self.t:.6g} rejected {_MAX_HALVINGS} times"
            )

        self.X = Xn
        self.t += h
        self.n_steps += 1
        self._measure()

        if self.l_total > prev_l + 1e-7 * self.l0:
            raise IntegrationError(
                f"loop length increased at t={self.t:.6g}: "
                f"{prev_l:.12g} -> {self.l_total:.12g}"
            )
        self.rate_int += 0.5 * h * (prev_rate + self.rate)

        if self.min_gap <= self.capture_eps:
            self._handle_captures(h, prev_gaps)
        return self.termination_reason() is None

    def _handle_captures(self, h, prev_gaps):
        prev_reps, prev_D = prev_gaps
        gap_before = dict(zip(prev_reps.tolist(), prev_D.tolist()))
        # linear gap interpolation locates when the first pair hit eps
        t_hit = self.t
        for k in np.nonzero(self.D <= self.capture_eps)[0]:
            r = int(self.reps[k])
            d1 = self.D[k]
            d0 = gap_before.get(r)
            if d0 is not None and d0 > d1:
                frac = (d0 - self.capture_eps) / (d0 - d1)
                t_hit = min(t_hit, self.t - h + frac * h)
        hold = self.t
        self.t = t_hit
        self._merge_coincident()
        self.t = hold
        if self.live_reps().size == 1:
            self._finish_freeze()
        else:
            self._measure()

    def _finish_freeze(self):
        self._frozen = True
        cap = max((e.t for e in self.events), default=self.t)
        self.capture_time = cap
        self.events.append(
            PursuitEvent(t=cap, kind="freeze", members=tuple(range(self.n)),
                         rep=int(self.parent[0]))
        )
        self.l_total = 0.0
        self.min_gap = 0.0
        self.theta = np.zeros(0)
        self.rate = 0.0

    def termination_reason(self):
        if getattr(self, "_frozen", False):
            return "all_merged"
        if self.t >= self.config.t_max - 1e-12:
            return "t_max"
        if getattr(self, "_converged", False):
            return "converged"
        return None

    # ------------------------------------------------------------------ run

    def run(self) -> TrajectoryRecord:
        cfg = self.config
        rec = _Recorder(self)
        rec.sample()
        next_check = cfg.check_every
        t0 = time.perf_counter()
        while True:
            alive = self.step()
            if self.n_steps % cfg.record_every == 0 or not alive:
                rec.sample()
            if not alive:
                break
            if cfg.stop_on_converged and self.t >= next_check:
                next_check = self.t + cfg.check_every
                if self.theta.size and float(np.max(self.theta)) < cfg.converged_angle:
                    self._converged = True
                    rec.sample()
                    break
        return rec.build(time.perf_counter() - t0)


class _Recorder:
    def __init__(self, loop: PursuitLoop):
        self.loop = loop
        self.times = []
        self.positions = []
        self.groups = []
        self.l_total = []
        self.theta_max = []
        self.min_gap = []
        self.rate_int = []
        self.live = []

    def sample(self):
        lp = self.loop
        if self.times and abs(self.times[-1] - lp.t) < 1e-15:
            return
        self.times.append(lp.t)
        self.positions.append(lp.X.copy())
        self.groups.append(lp.parent.copy())
        self.l_total.append(lp.l_total)
        self.theta_max.append(float(np.max(lp.theta)) if lp.theta.size else 0.0)
        self.min_gap.append(lp.min_gap)
        self.rate_int.append(lp.rate_int)
        self.live.append(int(lp.live_reps().size))

    def build(self, wall) -> TrajectoryRecord:
        lp = self.loop
        return TrajectoryRecord(
            space_name=lp.space.name,
            n_bugs=lp.n,
            times=np.array(self.times),
            positions=np.array(self.positions),
            groups=np.array(self.groups),
            l_total=np.array(self.l_total),
            theta_max=np.array(self.theta_max),
            min_gap=np.array(self.min_gap),
            rate_integral=np.array(self.rate_int),
            live_count=np.array(self.live),
            events=list(lp.events),
            termination=lp.termination_reason() or "t_max",
            t_final=lp.t,
            capture_time=getattr(lp, "capture_time", None),
            stats={
                "n_steps": lp.n_steps,
                "n_rejected": lp.n_rejected,
                "wall_time": wall,
                "capture_eps": lp.capture_eps,
            },
        )


def run_pursuit(space, positions, config: IntegratorConfig = None) -> TrajectoryRecord:
    """One-call helper: build the loop and integrate it to termination."""
    return PursuitLoop(space, positions, config).run()
