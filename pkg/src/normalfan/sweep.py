"""Sweeping a point along a normal line and certifying six concurrent normals.

For the boundary point ``x`` with outer normal ``u`` the family
``f_t = h_{x - t u}`` is followed for ``t`` in a range. Counts of critical
points by Morse index are piecewise constant in ``t``; the breakpoints are
births/deaths of pairs and index exchanges. Where the counts satisfy the
discrete-continuity hypotheses on the window ``[r_1 + eps, r_{n-1} - eps]``
a parameter with at least six critical points must exist, and the point
``x - t u`` is returned as a witness.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import linear_sum_assignment

from .curvature import curvature_spectrum, singular_locus_diagnostic
from .errors import PreconditionViolated, Unclassifiable, WitnessNotFound
from .normals import (NormalOptions, euler_characteristic, find_normals,
                      refine_seeds, shifted_derivatives)
from .sphere import as_direction

BIRTH_DEATH = "BirthDeath"
INDEX_EXCHANGE = "IndexExchange"
UNRESOLVED = "Unresolved"


@dataclass(frozen=True)
class SweepSpec:
    x_dir: np.ndarray
    t_range: tuple = None   # default (0.01 r_1, 2 r_{n-1})
    t_samples: int = 256
    margin: float = None    # window is [r_1 + margin, r_{n-1} - margin]

    def __post_init__(self):
        object.__setattr__(self, "x_dir", as_direction(self.x_dir))
        n = self.x_dir.shape[0]
        if self.t_samples < 16 * (n - 1):
            raise ValueError(f"t_samples must be at least {16 * (n - 1)}")
        if self.t_range is not None:
            lo, hi = self.t_range
            if not 0 < lo < hi:
                raise ValueError("t_range must satisfy 0 < t_lo < t_hi")


@dataclass(frozen=True)
class SweepOptions:
    t_tol: float = 1e-8             # event localization, relative to body scale
    fan_tol: float = 1e-6           # fan-based bisection floor for tracked-point events
    min_step: float = 1e-12         # absolute floor on bracket width
    seed_count: int = None          # global seeds per sample, default 512 * 4**(n-3)
    threads: int = 1
    continuation_rounds: int = 3
    recheck_intervals: bool = False
    tracked_radius: float = 1e-2    # radians; events this close to u are "at the tracked point"
    tracked_window: float = 1e-5    # half-width of the bracket around each radius at x
    normal_options: NormalOptions = NormalOptions(degeneracy_tol=1e-11)

    def normals_for(self, n):
        seeds = self.seed_count if self.seed_count is not None else 512 * 4 ** (n - 3)
        return replace(self.normal_options, seed_count=seeds)


@dataclass(frozen=True)
class SweepEvent:
    t_star: float
    kind: str
    sheet: int              # the colliding pair has indices (sheet - 1, sheet)
    at_tracked_point: bool
    bracket: tuple = None


@dataclass(frozen=True)
class SweepInterval:
    t_lo: float
    t_hi: float
    counts: tuple           # C_0 .. C_{n-1}
    tracked_index: int = None

    @property
    def N(self):
        return int(sum(self.counts))

    @property
    def width(self):
        return self.t_hi - self.t_lo


@dataclass(frozen=True)
class SweepSample:
    t: float
    counts: tuple
    tracked_index: int

    @property
    def N(self):
        return int(sum(self.counts))


@dataclass(frozen=True)
class SweepProfile:
    events: tuple
    intervals: tuple
    spec: SweepSpec = None
    radii_at_x: object = None   # CurvatureSpectrum
    samples: tuple = ()
    x: np.ndarray = None
    u: np.ndarray = None

    @property
    def dimension(self):
        return len(self.intervals[0].counts)

    def interval_at(self, t, side="right"):
        """Interval containing ``t``; at a breakpoint, the one on ``side``."""
        for i, iv in enumerate(self.intervals):
            if iv.t_lo < t < iv.t_hi:
                return iv
            if t == iv.t_hi and side == "left":
                return iv
            if t == iv.t_lo and side == "right":
                return iv
        return None


@dataclass(frozen=True)
class TheoremWitness:
    z: np.ndarray
    t_witness: float
    feet: object            # NormalFan
    window: tuple           # (r_1, r_{n-1})
    x: np.ndarray = None
    u: np.ndarray = None
    profile: SweepProfile = field(default=None, repr=False)

    def to_dict(self):
        return {
            "z": self.z.tolist(), "t_witness": self.t_witness,
            "window": list(self.window), "x": self.x.tolist(), "u": self.u.tolist(),
            "count": self.feet.count,
            "points": [{"v": cp.direction.tolist(), "foot": cp.foot.tolist(),
                        "t": cp.signed_distance, "index": cp.morse_index,
                        "residual": cp.residual} for cp in self.feet.critical_points],
        }


# -- fan comparison -----------------------------------------------------

def _indices(fan):
    return np.array([-1 if cp.morse_index is None else cp.morse_index
                     for cp in fan.critical_points], dtype=int)


def _find(fan, u):
    if u is None:
        return None
    for i, cp in enumerate(fan.critical_points):
        if cp.direction @ u > 1.0 - 1e-12:
            return i
    return None


def match_fans(a, b, tracked=None):
    """Optimal angular assignment between two fans: (rows, cols, angles).

    A ``tracked`` direction present in both fans is always matched to
    itself: at an index exchange the partner passes through it, so
    positions alone cannot tell the two apart.
    """
    A, B = a.directions, b.directions
    if len(A) == 0 or len(B) == 0:
        return np.zeros(0, int), np.zeros(0, int), np.zeros(0)
    ang = np.arccos(np.clip(A @ B.T, -1.0, 1.0))
    ia, ib = _find(a, tracked), _find(b, tracked)
    if ia is not None and ib is not None:
        ang = ang.copy()
        ang[ia, :] = np.pi * 4
        ang[:, ib] = np.pi * 4
        ang[ia, ib] = 0.0
    rows, cols = linear_sum_assignment(ang)
    return rows, cols, ang[rows, cols]


def fans_differ(a, b, tracked=None):
    """True if the counts differ or some matched critical point changed index."""
    if a.count != b.count:
        return True
    rows, cols, _ = match_fans(a, b, tracked)
    return bool(np.any(_indices(a)[rows] != _indices(b)[cols]))


@dataclass(frozen=True)
class EventClass:
    kind: str
    sheet: int
    changed: np.ndarray     # directions of the points that appeared, vanished or swapped


def classify_event(before, after, tracked=None):
    """Classify the bifurcation between two Morse fans bracketing one event.

    Birth/death when ``N`` changes by two: the counts change by the same
    +-1 at two neighbouring indices ``k - 1`` and ``k``. Index exchange when
    ``N`` is unchanged and exactly two matched points swap indices
    ``k - 1 <-> k``. Anything else raises :class:`Unclassifiable`.
    """
    n = before.y.shape[0]
    dN = after.count - before.count
    dC = after.index_counts() - before.index_counts()
    if abs(dN) > 2 or abs(dN) == 1:
        raise Unclassifiable(f"N changes by {dN}")
    rows, cols, _ = match_fans(before, after, tracked)
    ib, ia = _indices(before), _indices(after)
    swapped = [(r, c) for r, c in zip(rows, cols) if ib[r] != ia[c]]
    if abs(dN) == 2:
        sign = np.sign(dN)
        ks = [k for k in range(1, n) if dC[k - 1] == sign and dC[k] == sign
              and not np.any(np.delete(dC, [k - 1, k]))]
        if len(ks) != 1:
            raise Unclassifiable(f"count change {dC.tolist()} is not a birth/death pair")
        bigger = after if dN > 0 else before
        used = set(cols if dN > 0 else rows)
        new = [cp.direction for i, cp in enumerate(bigger.critical_points) if i not in used]
        changed = [before.critical_points[r].direction for r, _ in swapped] + new
        return EventClass(BIRTH_DEATH, ks[0], np.array(changed))
    if np.any(dC):
        raise Unclassifiable(f"count change {dC.tolist()} with constant N")
    if len(swapped) != 2:
        raise Unclassifiable(f"{len(swapped)} matched points changed index")
    pair = sorted(ib[r] for r, _ in swapped)
    if pair[1] - pair[0] != 1 or sorted(ia[c] for _, c in swapped) != pair:
        raise Unclassifiable(f"indices {pair} are not an exchange of neighbours")
    changed = np.array([before.critical_points[r].direction for r, _ in swapped])
    return EventClass(INDEX_EXCHANGE, pair[1], changed)


# -- the sweep ------------------------------------------------------------

class _Tracker:
    """Solves along the line ``x - t u`` and caches fans by ``t``."""

    def __init__(self, body, x, u, options):
        self.body, self.x, self.u = body, x, u
        self.options = options
        self.nopts = options.normals_for(body.dimension)

    def point(self, t):
        return self.x - t * self.u

    def full(self, t, warm=()):
        seeds = np.vstack([self.u[None]] + [np.atleast_2d(w) for w in warm if len(w)])
        return find_normals(self.body, self.point(t), self.nopts, extra_seeds=seeds)

    def warm(self, t, warm):
        seeds = np.vstack([self.u[None]] + [np.atleast_2d(w) for w in warm if len(w)])
        return refine_seeds(self.body, self.point(t), seeds, self.nopts)

    def tracked_index(self, fan):
        i = _find(fan, self.u)
        return None if i is None else fan.critical_points[i].morse_index


def _merge(tracker, t, a, b):
    return tracker.warm(t, [a.directions, b.directions])


def _continuation(tracker, ts, fans, rounds):
    """Forward/backward warm-start passes so every branch is followed to where it ends."""
    fans = list(fans)
    for _ in range(rounds):
        changed = False
        order = list(range(1, len(ts))) + list(range(len(ts) - 2, -1, -1))
        for step, i in enumerate(order):
            j = i - 1 if step < len(ts) - 1 else i + 1
            trial = tracker.warm(ts[i], [fans[i].directions, fans[j].directions])
            if trial.count > fans[i].count:
                fans[i] = trial
                changed = True
        if not changed:
            break
    return fans


def _tracked_index_at(tracker, t):
    y = tracker.point(t)
    _, _, _, H, _ = shifted_derivatives(tracker.body, y, tracker.u[None])
    return int(np.sum(np.linalg.eigvalsh(H[0]) < 0))


def _refine_tracked(tracker, ta, tb, tol):
    """Bisection on the Morse index of the tracked direction itself."""
    ia = _tracked_index_at(tracker, ta)
    while tb - ta > tol:
        tm = 0.5 * (ta + tb)
        if _tracked_index_at(tracker, tm) == ia:
            ta = tm
        else:
            tb = tm
    return 0.5 * (ta + tb)


def _suspicious(fan):
    n = fan.y.shape[0]
    return not fan.morse_valid or fan.euler_sum() != euler_characteristic(n)


def _localize(tracker, ta, fa, tb, fb, fan_tol, tol, events, unresolved):
    """Bisection of a bracket on the "fans differ" predicate.

    Fans are compared down to ``fan_tol``; an event that moves the tracked
    direction's index is then pinned down to ``tol`` by bisecting on that
    index alone, because the colliding pair cannot be told apart by Newton
    much closer to the event. Other events are bisected on fans to ``tol``.
    """
    stack = [(ta, fa, tb, fb, False)]
    while stack:
        ta, fa, tb, fb, verified = stack.pop()
        ia, ib = tracker.tracked_index(fa), tracker.tracked_index(fb)
        tracked_change = ia != ib
        if not tracked_change and not fans_differ(fa, fb, tracker.u):
            continue
        width = tb - ta
        if width <= tol or (tracked_change and width <= fan_tol):
            if not verified:
                # warm solves can drop a branch; confirm with full solves
                seeds = [fa.directions, fb.directions]
                fa, fb = tracker.full(ta, seeds), tracker.full(tb, seeds)
                stack.append((ta, fa, tb, fb, True))
                continue
            try:
                cls = classify_event(fa, fb, tracker.u)
            except Unclassifiable:
                unresolved.append((ta, tb))
                continue
            near = cls.changed.size and np.any(
                np.arccos(np.clip(cls.changed @ tracker.u, -1, 1)) < tracker.options.tracked_radius)
            t_star = _refine_tracked(tracker, ta, tb, tol) if tracked_change else 0.5 * (ta + tb)
            events.append(SweepEvent(t_star=t_star, kind=cls.kind, sheet=int(cls.sheet),
                                     at_tracked_point=bool(tracked_change or near),
                                     bracket=(ta, tb)))
            continue
        tm = 0.5 * (ta + tb)
        fm = _merge(tracker, tm, fa, fb)
        if _suspicious(fm):
            # step off a numerically degenerate parameter
            for off in (0.25, -0.25, 0.125, -0.125):
                cand = tm + off * width
                trial = _merge(tracker, cand, fa, fb)
                if not _suspicious(trial):
                    tm, fm = cand, trial
                    break
        stack.append((tm, fm, tb, fb, False))
        stack.append((ta, fa, tm, fm, False))


def _tracked_event(tracker, r, ta, fa, tb, fb, fan_tol, tol, events, unresolved):
    """Classify the event at a curvature radius ``r`` of the tracked point.

    Near ``r`` the colliding partner is too close to the tracked direction
    for Newton to keep them apart, so the fans are compared on both sides of
    a window around ``r``, shrinking it if the window holds more than one
    event.
    """
    while True:
        if not fans_differ(fa, fb, tracker.u):
            return
        try:
            cls = classify_event(fa, fb, tracker.u)
        except Unclassifiable:
            cls = None
        if cls is not None:
            t_star = _refine_tracked(tracker, ta, tb, tol)
            events.append(SweepEvent(t_star=float(t_star), kind=cls.kind, sheet=int(cls.sheet),
                                     at_tracked_point=True, bracket=(ta, tb)))
            return
        delta = 0.1 * (tb - ta) / 2
        if delta < fan_tol:
            unresolved.append((ta, tb))
            return
        ta, tb = r - delta, r + delta
        fa = _merge(tracker, ta, fa, fb)
        fb = _merge(tracker, tb, fa, fb)


def _interval_counts(tracker, lo, hi, known):
    mid = 0.5 * (lo + hi)
    warm = [f.directions for t, f in known if lo < t < hi]
    fan = tracker.full(mid, warm)
    return fan, tuple(int(c) for c in fan.index_counts())


def run_sweep(body, spec, options=SweepOptions(), check_precondition=True):
    """Profile of critical-point counts along the normal line at ``spec.x_dir``."""
    u = spec.x_dir
    if check_precondition:
        diag = singular_locus_diagnostic(body, u)
        if diag.multiplicity_flag:
            raise PreconditionViolated(
                f"curvature radii gap {diag.min_gap:.3g} below {diag.gap_threshold:.3g}")
    radii = curvature_spectrum(body, u)
    x = body.boundary_point(u)
    r = radii.radii
    t_lo, t_hi = spec.t_range if spec.t_range is not None else (0.01 * r[0], 2.0 * r[-1])
    ts = np.linspace(t_lo, t_hi, spec.t_samples)
    # the tracked direction changes index exactly at each radius; those
    # parameters are bracketed by a small window instead of a grid node
    delta = options.tracked_window * body.scale
    windows = [(k - delta, k + delta) for k in r if t_lo < k - delta and k + delta < t_hi]
    for a, b in windows:
        ts = ts[(ts <= a) | (ts >= b)]
    ts = np.unique(np.concatenate([ts] + [np.array(w) for w in windows]))
    tracker = _Tracker(body, x, u, options)

    if options.threads > 1:
        with ThreadPoolExecutor(options.threads) as pool:
            fans = list(pool.map(tracker.full, ts))
    else:
        fans = [tracker.full(t) for t in ts]
    fans = _continuation(tracker, ts, fans, options.continuation_rounds)

    tol = max(options.t_tol * body.scale, options.min_step)
    fan_tol = max(options.fan_tol * body.scale, tol)
    events, unresolved = [], []
    starts = {a: 0.5 * (a + b) for a, b in windows}
    for i in range(len(ts) - 1):
        if ts[i] in starts:
            _tracked_event(tracker, starts[ts[i]], ts[i], fans[i], ts[i + 1], fans[i + 1],
                           fan_tol, tol, events, unresolved)
            continue
        _localize(tracker, ts[i], fans[i], ts[i + 1], fans[i + 1], fan_tol, tol,
                  events, unresolved)
    for a, b in unresolved:
        events.append(SweepEvent(t_star=0.5 * (a + b), kind=UNRESOLVED, sheet=0,
                                 at_tracked_point=False, bracket=(a, b)))
    events.sort(key=lambda e: e.t_star)

    known = list(zip(ts, fans))
    bounds = [t_lo] + [e.t_star for e in events] + [t_hi]
    intervals = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        fan, counts = _interval_counts(tracker, lo, hi, known)
        if options.recheck_intervals:
            for frac in (0.25, 0.5, 0.75):
                t = lo + frac * (hi - lo)
                other = tracker.full(t, [fan.directions])
                if tuple(other.index_counts()) != counts:
                    raise Unclassifiable(f"counts not constant on ({lo}, {hi})")
        intervals.append(SweepInterval(lo, hi, counts, tracker.tracked_index(fan)))
    samples = tuple(SweepSample(float(t), tuple(int(c) for c in f.index_counts()),
                                tracker.tracked_index(f)) for t, f in known)
    return SweepProfile(events=tuple(events), intervals=tuple(intervals), spec=spec,
                        radii_at_x=radii, samples=samples, x=x, u=u)


# -- discrete continuity ----------------------------------------------------

@dataclass(frozen=True)
class Lemma2Verdict:
    hypotheses_hold: bool
    consistent: bool
    witness_interval: tuple = None
    refutation_trace: tuple = ()
    violations: tuple = ()


def profile_violations(profile):
    """Ways in which ``profile`` breaks the axioms of a nice family.

    Each interval must satisfy the Euler relation for S^{n-1} and contain a
    minimum and a maximum; consecutive intervals must differ exactly as the
    separating event prescribes.
    """
    out = []
    ivs, evs = profile.intervals, profile.events
    n = len(ivs[0].counts)
    chi = euler_characteristic(n)
    if len(evs) != len(ivs) - 1:
        out.append(f"{len(evs)} events for {len(ivs)} intervals")
    for i, iv in enumerate(ivs):
        c = np.asarray(iv.counts)
        if np.any(c < 0):
            out.append(f"interval {i}: negative count")
        if sum((-1) ** k * ck for k, ck in enumerate(c)) != chi:
            out.append(f"interval {i}: Euler sum differs from {chi}")
        if c[0] < 1 or c[-1] < 1:
            out.append(f"interval {i}: missing minimum or maximum")
        if i and iv.t_lo < ivs[i - 1].t_hi:
            out.append(f"interval {i}: overlaps its predecessor")
    for i, ev in enumerate(evs[:len(ivs) - 1]):
        d = np.asarray(ivs[i + 1].counts) - np.asarray(ivs[i].counts)
        if not ivs[i].t_hi <= ev.t_star <= ivs[i + 1].t_lo:
            out.append(f"event {i}: t = {ev.t_star} outside the gap between intervals")
        if ev.kind == INDEX_EXCHANGE:
            if np.any(d):
                out.append(f"event {i}: index exchange changes counts by {d.tolist()}")
        elif ev.kind == BIRTH_DEATH:
            k = ev.sheet
            expected = np.zeros(n, dtype=int)
            if 1 <= k <= n - 1:
                expected[k - 1] = expected[k] = 1
            if not (np.array_equal(d, expected) or np.array_equal(d, -expected)) or not expected.any():
                out.append(f"event {i}: birth/death at sheet {k} changes counts by {d.tolist()}")
        else:
            out.append(f"event {i}: unresolved bracket")
    return tuple(out)


def lemma2_check(profile, window):
    """Check the discrete-continuity hypotheses on ``window`` and look for N >= 6.

    Hypotheses: two minima at the left end, two maxima at the right end and
    at least one critical point of intermediate index throughout. When they
    hold, a consistent profile always has an interval with N >= 6; failing
    to find one is returned as a refutation trace (a tracking failure or an
    inconsistent profile), never as a silent pass.
    """
    t1, t2 = window
    violations = profile_violations(profile)
    n = profile.dimension
    left = profile.interval_at(t1, side="right")
    right = profile.interval_at(t2, side="left")
    inside = [iv for iv in profile.intervals if iv.t_hi > t1 and iv.t_lo < t2]
    trace = []
    holds = left is not None and right is not None and bool(inside)
    if holds and left.counts[0] < 2:
        holds = False
        trace.append(f"C_0 = {left.counts[0]} at t1 = {t1}")
    if holds and right.counts[n - 1] < 2:
        holds = False
        trace.append(f"C_{n - 1} = {right.counts[n - 1]} at t2 = {t2}")
    if holds:
        for iv in inside:
            if sum(iv.counts[1:n - 1]) < 1:
                holds = False
                trace.append(f"no intermediate index on ({iv.t_lo}, {iv.t_hi})")
                break
    if not holds:
        return Lemma2Verdict(False, not violations, None, tuple(trace), violations)
    six = [iv for iv in inside if iv.N >= 6]
    if six:
        best = max(six, key=lambda iv: min(iv.t_hi, t2) - max(iv.t_lo, t1))
        return Lemma2Verdict(True, not violations, (max(best.t_lo, t1), min(best.t_hi, t2)),
                             (), violations)
    trace = tuple(f"({iv.t_lo:.12g}, {iv.t_hi:.12g}): N = {iv.N}, C = {list(iv.counts)}"
                  for iv in inside)
    return Lemma2Verdict(True, not violations, None, trace, violations)


# -- the theorem ------------------------------------------------------------

def _check_precondition(body, x_dir):
    diag = singular_locus_diagnostic(body, x_dir)
    if diag.multiplicity_flag:
        raise PreconditionViolated(
            f"curvature radii gap {diag.min_gap:.3g} below {diag.gap_threshold:.3g}")
    return diag


@dataclass(frozen=True)
class VerifyOptions:
    margin: float = None        # default 100 * t_tol * scale, far above localization error
    pad: float = 0.25           # sweep range extends this fraction of the window on each side
    t_samples: int = 64
    sweep: SweepOptions = SweepOptions()
    certify_options: NormalOptions = NormalOptions()


def verify_theorem(body, x_dir, options=VerifyOptions()):
    """Find ``z = x - t u`` with ``r_1 < t < r_{n-1}`` lying on at least six normals.

    The sweep covers the curvature window padded by ``options.pad`` of its
    width on each side, so the events at ``r_1`` and ``r_{n-1}`` are inside
    the range. The witness parameter is the midpoint of the widest N >= 6
    interval inside the window and is re-certified with a full solve.
    """
    u = as_direction(x_dir)
    _check_precondition(body, u)
    radii = curvature_spectrum(body, u).radii
    r1, rn = float(radii[0]), float(radii[-1])
    width = rn - r1
    margin = (options.margin if options.margin is not None
              else 100.0 * options.sweep.t_tol * body.scale)
    window = (r1 + margin, rn - margin)
    lo = max(r1 - options.pad * width, 0.5 * r1)
    hi = rn + options.pad * width
    n = u.shape[0]
    spec = SweepSpec(x_dir=u, t_range=(lo, hi),
                     t_samples=max(options.t_samples, 16 * (n - 1)), margin=margin)
    profile = run_sweep(body, spec, options.sweep, check_precondition=False)
    verdict = lemma2_check(profile, window)
    if verdict.witness_interval is None:
        raise WitnessNotFound("no interval with N >= 6 in the curvature window",
                              profile=profile, verdict=verdict)
    a, b = verdict.witness_interval
    t = 0.5 * (a + b)
    x = profile.x
    z = x - t * u
    feet = find_normals(body, z, options.certify_options, extra_seeds=u[None])
    res_tol = options.certify_options.residual_tol * body.scale
    if feet.count < 6 or any(cp.residual > res_tol for cp in feet.critical_points):
        raise WitnessNotFound(f"certification at t = {t} found {feet.count} feet",
                              profile=profile, verdict=verdict)
    return TheoremWitness(z=z, t_witness=t, feet=feet, window=(r1, rn), x=x, u=u,
                          profile=profile)


def hypothesis_check_minima(body, x_dir, t, options=NormalOptions()):
    """C_{t,0} on the normal at ``x_dir``; two or more just above r_1."""
    u = as_direction(x_dir)
    _check_precondition(body, u)
    fan = find_normals(body, body.boundary_point(u) - t * u, options, extra_seeds=u[None])
    return int(fan.index_counts()[0])


def hypothesis_check_maxima(body, x_dir, t, options=NormalOptions()):
    """C_{t,n-1} on the normal at ``x_dir``; the mirror check just below r_{n-1}."""
    u = as_direction(x_dir)
    _check_precondition(body, u)
    fan = find_normals(body, body.boundary_point(u) - t * u, options, extra_seeds=u[None])
    return int(fan.index_counts()[-1])
