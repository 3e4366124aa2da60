"""Flows on the circle and flat tori, and cocycle integration along them.

Points live on (R/2pi Z)^m but are carried as unwrapped floats; charts wrap
coordinates into their own windows, which keeps winding bookkeeping exact.
Cocycle representatives are covers by arc/box charts with bounded local
primitives: step functions with integer values (exact gains) or piecewise
linear functions on a shared knot lattice (gains exact up to float noise).
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from random import Random

TWO_PI = 2.0 * math.pi


class FlowError(ValueError):
    pass


def wrap_delta(a, b):
    """Signed circle distance a - b wrapped into [-pi, pi)."""
    return (a - b + math.pi) % TWO_PI - math.pi


def torus_distance(x, p):
    return math.sqrt(sum(wrap_delta(a, b) ** 2 for a, b in zip(x, p)))


def curve_length(points):
    total = 0.0
    for a, b in zip(points, points[1:]):
        total += math.sqrt(sum((u - v) ** 2 for u, v in zip(a, b)))
    return total


# ---------------------------------------------------------------------------
# local primitives
# ---------------------------------------------------------------------------


@dataclass
class StepBeta:
    """Piecewise-constant primitive of one factor, in window coordinates.

    values[i] applies left of breakpoints[i]; values[-1] to the right of the
    last one.  Values are integers stored as floats, so differences are exact.
    """

    factor: int
    breakpoints: list
    values: list

    def value(self, w_point):
        w = w_point[self.factor]
        return float(self.values[bisect_right(self.breakpoints, w)])

    def max_abs(self):
        return max(abs(v) for v in self.values)


@dataclass
class PLBeta:
    """Piecewise-linear primitive of one factor on explicit knots.

    Charts sharing a knot lattice agree exactly (up to a constant) on their
    overlaps, which keeps partition invariance at float-noise level.
    """

    factor: int
    knots: list
    knot_values: list

    def value(self, w_point):
        w = w_point[self.factor]
        xs, ys = self.knots, self.knot_values
        if w <= xs[0]:
            return ys[0]
        if w >= xs[-1]:
            return ys[-1]
        i = bisect_right(xs, w) - 1
        t = (w - xs[i]) / (xs[i + 1] - xs[i])
        return ys[i] * (1.0 - t) + ys[i + 1] * t

    def max_abs(self):
        return max(abs(v) for v in self.knot_values)


@dataclass
class Chart:
    """A product region: per factor either an arc (lo, hi) or None (full)."""

    region: tuple
    beta: object

    def locate(self, x):
        """Window coordinates of x if the chart contains it, else None."""
        out = []
        for i, arc in enumerate(self.region):
            if arc is None:
                out.append(x[i])
                continue
            lo, hi = arc
            w = lo + ((x[i] - lo) % TWO_PI)
            if w > hi:
                return None
            out.append(w)
        return tuple(out)

    def locate_pair(self, x, y):
        """Window coordinates of both points, or None.

        Each point is wrapped by the same formula, so repeated evaluations
        of one point are bitwise identical and pair gains telescope exactly
        along a walk.  Arcs must be shorter than a full turn minus the
        sampling step for this wrap to be unambiguous.
        """
        wx, wy = [], []
        for i, arc in enumerate(self.region):
            if arc is None:
                wx.append(x[i])
                wy.append(y[i])
                continue
            lo, hi = arc
            w = lo + ((x[i] - lo) % TWO_PI)
            if w > hi:
                return None
            w2 = lo + ((y[i] - lo) % TWO_PI)
            if w2 > hi:
                return None
            wx.append(w)
            wy.append(w2)
        return tuple(wx), tuple(wy)

    def min_width(self):
        widths = [hi - lo for arc in self.region if arc is not None for lo, hi in [arc]]
        return min(widths) if widths else TWO_PI


@dataclass
class CocycleRep:
    """A rank-1 bounded cocycle representative: charts covering the space
    with local primitives, plus the declared bound on |beta|.

    max_step caps the distance between consecutive samples so every pair
    fits in a chart; it must not exceed half the smallest chart overlap.
    """

    name: str
    dim: int
    charts: list
    bound: float
    loop_value: float = 0.0
    max_step: float = 0.0

    def pair_gain(self, x, y):
        """beta(y) - beta(x) in the first chart containing both points."""
        for idx, chart in enumerate(self.charts):
            located = chart.locate_pair(x, y)
            if located is not None:
                wx, wy = located
                return chart.beta.value(wy) - chart.beta.value(wx), idx
        raise FlowError(
            "no chart contains the pair %r -> %r; refine the sampling" % (x, y)
        )

    def min_chart_width(self):
        return min(chart.min_width() for chart in self.charts)

    def step_limit(self):
        return self.max_step or self.min_chart_width() / 4.0


def step_chart(lo, hi, breakpoints, values, factor=0, dim=1):
    region = [None] * dim
    region[factor] = (lo, hi)
    return Chart(
        region=tuple(region),
        beta=StepBeta(factor=factor, breakpoints=list(breakpoints), values=list(values)),
    )


def pl_charts_from_lattice(fn, period_shift, windows, n_knots=128, factor=0, dim=1):
    """Charts whose PL primitives interpolate fn on one global knot lattice.

    fn is evaluated on canonical angles [0, 2pi); a full turn adds
    period_shift.  Sharing the lattice makes chart overlaps agree exactly.
    """
    h = TWO_PI / n_knots
    cache = {}

    def lattice_value(k):
        if k not in cache:
            m = k // n_knots
            cache[k] = fn((k - m * n_knots) * h) + m * period_shift
        return cache[k]

    charts = []
    for lo, hi in windows:
        k0 = math.floor(lo / h) - 1
        k1 = math.ceil(hi / h) + 1
        knots = [k * h for k in range(k0, k1 + 1)]
        values = [lattice_value(k) for k in range(k0, k1 + 1)]
        region = [None] * dim
        region[factor] = (lo, hi)
        charts.append(
            Chart(
                region=tuple(region),
                beta=PLBeta(factor=factor, knots=knots, knot_values=values),
            )
        )
    return charts


# ---------------------------------------------------------------------------
# flow models and trajectories
# ---------------------------------------------------------------------------


@dataclass
class FlowModel:
    """An analytic flow on S^1 (dim 1) or T^m with declared fixed points."""

    name: str
    dim: int
    velocity: object
    fixed_points: list
    lipschitz_bound: float
    speed_bound: float

    def __post_init__(self):
        for p, _index in self.fixed_points:
            speed = math.sqrt(sum(v * v for v in self.velocity(p)))
            if speed > 1e-12:
                raise FlowError(
                    "declared fixed point %r has |V| = %.3e" % (p, speed)
                )

    @property
    def fixed_point_free(self):
        return not self.fixed_points


@dataclass
class Trajectory:
    samples: list
    dt: float

    def points(self):
        return [p for _t, p in self.samples]

    @property
    def start(self):
        return self.samples[0][1]

    @property
    def end(self):
        return self.samples[-1][1]

    @property
    def duration(self):
        return self.samples[-1][0] - self.samples[0][0]


def integrate_flow(model, x0, T, dt):
    """Fixed-step RK4 from x0 for time T (T may be negative)."""
    if dt <= 0:
        raise FlowError("dt must be positive")
    x0 = tuple(float(v) for v in x0)
    n = max(1, round(abs(T) / dt))
    h = T / n
    V = model.velocity
    samples = [(0.0, x0)]
    x = x0
    for k in range(n):
        k1 = V(x)
        k2 = V(tuple(a + 0.5 * h * b for a, b in zip(x, k1)))
        k3 = V(tuple(a + 0.5 * h * b for a, b in zip(x, k2)))
        k4 = V(tuple(a + h * b for a, b in zip(x, k3)))
        x = tuple(
            a + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
            for a, b1, b2, b3, b4 in zip(x, k1, k2, k3, k4)
        )
        samples.append(((k + 1) * h, x))
    return Trajectory(samples=samples, dt=abs(h))


def flow_property_defect(model, x0, s, t, dt):
    """|x.(s+t) - (x.s).t| for a spot check of the flow axiom."""
    direct = integrate_flow(model, x0, s + t, dt).end
    first = integrate_flow(model, x0, s, dt).end
    second = integrate_flow(model, first, t, dt).end
    return max(abs(a - b) for a, b in zip(direct, second))


def default_dt(model, rep):
    """A step small enough that consecutive samples share a chart."""
    return rep.step_limit() / max(model.speed_bound, 1e-9)


# ---------------------------------------------------------------------------
# cocycle integration
# ---------------------------------------------------------------------------


def _as_points(curve):
    if isinstance(curve, Trajectory):
        return curve.points()
    return [tuple(p) for p in curve]


def integrate_cocycle(rep, curve):
    """Sum of local-primitive differences over consecutive sample pairs.

    Exact for step primitives; partition-independent up to float noise for
    lattice-aligned PL primitives.
    """
    points = _as_points(curve)
    total = 0.0
    for x, y in zip(points, points[1:]):
        gain, _idx = rep.pair_gain(x, y)
        total += gain
    return total


@dataclass
class ChainPath:
    """Flow segments (start, duration >= min_time) joined by in-chart jumps.

    jumps[i] is the declared chart index for the pair (end of segment i,
    start of segment i+1), or None to search; len(jumps) == len(segments)
    closes the chain back to the first start.
    """

    segments: list
    jumps: list
    min_time: float = 0.0

    @property
    def closed(self):
        return len(self.jumps) == len(self.segments)


def integrate_chain(model, rep, chain, dt=None):
    """Flow-segment integrals plus jump-gap primitive differences."""
    if dt is None:
        dt = default_dt(model, rep)
    n = len(chain.segments)
    if chain.jumps and len(chain.jumps) not in (n - 1, n):
        raise FlowError("need one jump per consecutive segment pair")
    total = 0.0
    ends = []
    starts = []
    for start, duration in chain.segments:
        if duration < chain.min_time:
            raise FlowError(
                "segment duration %.3f below the declared minimum %.3f"
                % (duration, chain.min_time)
            )
        traj = integrate_flow(model, start, duration, dt)
        total += integrate_cocycle(rep, traj)
        starts.append(traj.start)
        ends.append(traj.end)
    for i, declared in enumerate(chain.jumps):
        x = ends[i]
        y = starts[(i + 1) % n]
        if declared is None:
            gain, _idx = rep.pair_gain(x, y)
        else:
            chart = rep.charts[declared]
            located = chart.locate_pair(x, y)
            if located is None:
                raise FlowError(
                    "jump %d does not fit inside its declared chart" % i
                )
            wx, wy = located
            gain = chart.beta.value(wy) - chart.beta.value(wx)
        total += gain
    return total


# ---------------------------------------------------------------------------
# alpha-flow certification
# ---------------------------------------------------------------------------


@dataclass
class AlphaFlowParams:
    r: float
    rho: float
    lam: float
    t0: float

    def __post_init__(self):
        if self.r <= 0 or self.rho <= 0 or self.t0 <= 0:
            raise FlowError("r, rho, t0 must be positive")
        if not 0 <= self.lam < 1:
            raise FlowError("lambda must lie in [0, 1)")


@dataclass
class SamplingPlan:
    pairs_per_ball: int = 40
    seeds_per_boundary: int = 2
    t0_samples: int = 40
    max_time: float = 60.0
    dt: float = 0.0
    seed: int = 0


@dataclass
class CertReport:
    model: str
    cocycle: str
    fixed_point_free: bool
    params: AlphaFlowParams
    conditions: dict
    verdict: str
    witness: object = None
    low_coverage: bool = False


def _ball_entry_index(model, params, points, skip=0):
    for idx in range(skip, len(points)):
        for p, _i in model.fixed_points:
            if torus_distance(points[idx], p) <= params.r:
                return idx
    return None


def _segment_points(x, y, step):
    n = max(1, math.ceil(math.dist(x, y) / step))
    return [
        tuple(a + (b - a) * k / n for a, b in zip(x, y)) for k in range(n + 1)
    ]


def certify_alpha_flow(model, rep, params, plan=None):
    """Sample-based check of the carrying conditions.

    A REFUTED verdict exhibits a concrete witness; CERTIFIED_ON_SAMPLES
    means every sampled quantity satisfied its inequality.  Fixed-point-free
    models only face the long-segment condition.
    """
    plan = plan or SamplingPlan()
    rng = Random(plan.seed)
    dt = plan.dt or default_dt(model, rep)
    tol = 1e-9
    conditions = {}
    witness = None
    verdict = "CERTIFIED_ON_SAMPLES"
    low_coverage = False

    def fail(condition, info):
        nonlocal verdict, witness
        if verdict != "REFUTED":
            verdict = "REFUTED"
            witness = (condition, info)

    if not model.fixed_point_free:
        conditions["gradient_like_in_balls"] = {
            "checked": False,
            "declared": True,
            "note": "taken from the declared fixed-point structure",
        }

        # oscillation of the primitive over pairs inside each ball
        worst = 0.0
        pairs = 0
        for p, _i in model.fixed_points:
            for _ in range(plan.pairs_per_ball):
                x = tuple(
                    c + rng.uniform(-params.r, params.r) for c in p
                )
                y = tuple(
                    c + rng.uniform(-params.r, params.r) for c in p
                )
                if (
                    torus_distance(x, p) > params.r
                    or torus_distance(y, p) > params.r
                ):
                    continue
                val = integrate_cocycle(
                    rep, _segment_points(x, y, rep.step_limit() / 2.0)
                )
                pairs += 1
                if abs(val) > worst:
                    worst = abs(val)
                if abs(val) > params.lam * params.rho + tol:
                    fail("oscillation_near_fixed_points", {"pair": (x, y), "value": val})
        conditions["oscillation_near_fixed_points"] = {
            "checked": True,
            "samples": pairs,
            "worst": worst,
            "threshold": params.lam * params.rho,
        }

        # trajectories running from one ball boundary to another
        gains = []
        leftovers = []
        for p, _i in model.fixed_points:
            seeds = []
            if model.dim == 1:
                seeds = [(p[0] + params.r,), (p[0] - params.r,)]
            else:
                for _ in range(plan.seeds_per_boundary):
                    direction = [rng.gauss(0.0, 1.0) for _ in range(model.dim)]
                    norm = math.sqrt(sum(d * d for d in direction)) or 1.0
                    seeds.append(
                        tuple(
                            c + params.r * d / norm for c, d in zip(p, direction)
                        )
                    )
            for seed in seeds:
                vel = model.velocity(seed)
                outward = sum(
                    v * wrap_delta(a, b) for v, a, b in zip(vel, seed, p)
                )
                if outward <= 0:
                    continue
                traj = integrate_flow(model, seed, plan.max_time, dt)
                pts = traj.points()
                entry = _ball_entry_index(model, params, pts, skip=1)
                if entry is None:
                    leftovers.append(pts)
                    continue
                segment = pts[: entry + 1]
                gain = integrate_cocycle(rep, segment)
                gains.append(gain)
                if gain < params.rho - tol:
                    fail(
                        "ball_to_ball_integral",
                        {"seed": seed, "value": gain},
                    )
        conditions["ball_to_ball_integral"] = {
            "checked": True,
            "samples": len(gains),
            "worst": min(gains) if gains else None,
            "threshold": params.rho,
        }
        if not gains:
            low_coverage = True
    else:
        leftovers = []

    # duration-t0 sub-trajectories away from the balls
    segment_gains = []
    candidates = list(leftovers)
    if model.fixed_point_free:
        for _ in range(plan.t0_samples):
            x = tuple(rng.uniform(0.0, TWO_PI) for _ in range(model.dim))
            shift = rng.uniform(0.0, params.t0)
            start = integrate_flow(model, x, shift, dt).end if shift else x
            traj = integrate_flow(model, start, params.t0, dt)
            gain = integrate_cocycle(rep, traj)
            segment_gains.append(gain)
            if gain < params.rho - tol:
                fail("long_segment_integral", {"start": start, "value": gain})
    else:
        for pts in candidates:
            duration = (len(pts) - 1) * dt
            if duration < params.t0:
                continue
            n_sub = max(1, int(duration / params.t0))
            per = int(params.t0 / dt)
            for k in range(n_sub):
                sub = pts[k * per : (k + 1) * per + 1]
                if len(sub) < 2:
                    continue
                gain = integrate_cocycle(rep, sub)
                segment_gains.append(gain)
                if gain < params.rho - tol:
                    fail(
                        "long_segment_integral",
                        {"start": sub[0], "value": gain},
                    )
    conditions["long_segment_integral"] = {
        "checked": True,
        "samples": len(segment_gains),
        "worst": min(segment_gains) if segment_gains else None,
        "threshold": params.rho,
    }
    if model.fixed_point_free and not segment_gains:
        low_coverage = True

    return CertReport(
        model=model.name,
        cocycle=rep.name,
        fixed_point_free=model.fixed_point_free,
        params=params,
        conditions=conditions,
        verdict=verdict,
        witness=witness,
        low_coverage=low_coverage,
    )


# ---------------------------------------------------------------------------
# built-in models
# ---------------------------------------------------------------------------


@dataclass
class ModelBundle:
    model: FlowModel
    cocycles: list
    params: object  # AlphaFlowParams or None when certification is not set up


def degree_cocycle(dim=1, factor=0, name=None):
    """The integer class of the circle factor: two charts, one unit step.

    The primitive jumps by one at angle 0 inside the first chart, so a
    counterclockwise loop integrates to +1.
    """
    charts = [
        step_chart(-5 * math.pi / 8, 5 * math.pi / 8, [0.0], [0, 1], factor, dim),
        step_chart(3 * math.pi / 8, 13 * math.pi / 8, [], [0], factor, dim),
    ]
    return CocycleRep(
        name=name or ("alpha_%d" % (factor + 1) if dim > 1 else "alpha"),
        dim=dim,
        charts=charts,
        bound=1.0,
        loop_value=1.0,
        max_step=math.pi / 8.0,
    )


def two_fixed_cocycle(r=0.15):
    """The four-chart step cocycle whose clockwise loop value is one; the
    primitive is flat near both fixed points."""
    half = math.pi / 2
    charts = [
        step_chart(half - 2 * r, half + 2 * r, [], [0]),
        step_chart(3 * half - 2 * r, 3 * half + 2 * r, [], [0]),
        step_chart(half + r, 3 * half - r, [math.pi], [0, 1]),
        step_chart(-half + r, half - r, [0.0], [2, 0]),
    ]
    return CocycleRep(
        name="two_fixed_step",
        dim=1,
        charts=charts,
        bound=2.0,
        loop_value=-1.0,
        max_step=r / 2.0,
    )


def circle_two_fixed():
    """Gradient-like circle flow with a repeller at pi/2 and an attractor at
    3pi/2, carrying a nontrivial step cocycle with rho = 1, lambda = 0."""
    model = FlowModel(
        name="circle_two_fixed",
        dim=1,
        velocity=lambda x: (-math.cos(x[0]),),
        fixed_points=[((math.pi / 2,), 1), ((3 * math.pi / 2,), 0)],
        lipschitz_bound=1.0,
        speed_bound=1.0,
    )
    params = AlphaFlowParams(r=0.3, rho=1.0, lam=0.0, t0=1.0)
    return ModelBundle(model=model, cocycles=[two_fixed_cocycle()], params=params)


def circle_three_fixed():
    """Circulating circle flow with three one-sided fixed points; it winds
    through them, so it is not gradient-like for the degree class."""
    model = FlowModel(
        name="circle_three_fixed",
        dim=1,
        velocity=lambda x: (1.0 - math.cos(3.0 * x[0]),),
        fixed_points=[
            ((0.0,), None),
            ((2 * math.pi / 3,), None),
            ((4 * math.pi / 3,), None),
        ],
        lipschitz_bound=3.0,
        speed_bound=2.0,
    )
    return ModelBundle(model=model, cocycles=[degree_cocycle()], params=None)


GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


def torus_irrational(dim=2, omega=None):
    """The linear flow with irrational slope; fixed-point free, so it
    carries the factor classes outright."""
    if omega is None:
        omega = tuple(GOLDEN ** k for k in range(dim))
    omega = tuple(float(w) for w in omega)
    speed = math.sqrt(sum(w * w for w in omega))
    model = FlowModel(
        name="torus_irrational",
        dim=dim,
        velocity=lambda x, _w=omega: _w,
        fixed_points=[],
        lipschitz_bound=0.0,
        speed_bound=speed,
    )
    cocycles = [degree_cocycle(dim=dim, factor=i) for i in range(dim)]
    params = AlphaFlowParams(
        r=0.1, rho=1.0, lam=0.0, t0=2.0 * TWO_PI / abs(omega[0])
    )
    return ModelBundle(model=model, cocycles=cocycles, params=params)


def gradient_morse(n_knots=128):
    """Ascending gradient flow of sin(theta) on the circle with the exact
    coboundary of its piecewise-linear interpolant as cocycle."""
    model = FlowModel(
        name="gradient_morse",
        dim=1,
        velocity=lambda x: (math.cos(x[0]),),
        fixed_points=[((math.pi / 2,), 0), ((3 * math.pi / 2,), 1)],
        lipschitz_bound=1.0,
        speed_bound=1.0,
    )
    windows = [(-0.7, math.pi + 0.7), (math.pi - 0.7, TWO_PI + 0.7)]
    charts = pl_charts_from_lattice(math.sin, 0.0, windows, n_knots=n_knots)
    rep = CocycleRep(
        name="height_coboundary",
        dim=1,
        charts=charts,
        bound=1.0,
        loop_value=0.0,
        max_step=0.5,
    )
    params = AlphaFlowParams(r=0.45, rho=1.0, lam=0.2, t0=1.0)
    return ModelBundle(model=model, cocycles=[rep], params=params)


def perturbed_one_form(epsilon=0.5, n_knots=256):
    """A one-form flow with two zeros plus a perturbation vanishing near
    them; the class integrates to pi per loop."""
    if not 0 <= epsilon < 1:
        raise FlowError("epsilon must lie in [0, 1)")
    z1 = 2 * math.pi / 3
    z2 = 4 * math.pi / 3

    def base(theta):
        return 0.5 + math.cos(theta)

    def bump(theta):
        return (1.0 - math.cos(theta - z1)) * (1.0 - math.cos(theta - z2)) / 4.0

    def velocity(x):
        th = x[0]
        return (base(th) * (1.0 + epsilon * bump(th)),)

    model = FlowModel(
        name="perturbed_one_form",
        dim=1,
        velocity=velocity,
        fixed_points=[((z1,), 0), ((z2,), 1)],
        lipschitz_bound=3.0,
        speed_bound=1.5 * (1.0 + epsilon),
    )
    windows = [(-0.7, math.pi + 0.7), (math.pi - 0.7, TWO_PI + 0.7)]
    charts = pl_charts_from_lattice(
        lambda th: 0.5 * th + math.sin(th), math.pi, windows, n_knots=n_knots
    )
    rep = CocycleRep(
        name="one_form_primitive",
        dim=1,
        charts=charts,
        bound=0.5 * (TWO_PI + 0.7) + 1.0,
        loop_value=math.pi,
        max_step=0.5,
    )
    params = AlphaFlowParams(r=0.25, rho=0.3, lam=0.9, t0=8.0)
    return ModelBundle(model=model, cocycles=[rep], params=params)


REGISTRY = {
    "circle_two_fixed": circle_two_fixed,
    "circle_three_fixed": circle_three_fixed,
    "torus_irrational": torus_irrational,
    "gradient_morse": gradient_morse,
    "perturbed_one_form": perturbed_one_form,
}


def load_model(name, **params):
    if name not in REGISTRY:
        raise FlowError(
            "unknown model %r; available: %s" % (name, ", ".join(sorted(REGISTRY)))
        )
    return REGISTRY[name](**params)
