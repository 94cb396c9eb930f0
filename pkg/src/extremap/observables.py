"""Distance observables, exact quantile thresholds and exceedance geometry.

An observable is psi(x) = g(dist(x, Z)) for a maximal set Z and a decreasing
profile g.  Thresholds are chosen by *exact quantiles*: u is picked so that
the exceedance set has measure exactly tau/n as a rational number, by
inverting the piecewise-linear measure-vs-radius function — never by
numerically inverting g.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .dynamics import EigenData
from .geometry import ExactReal, IntervalSet, TorusRect, ball
from .quadratic import Sqrt5

_HALF = Fraction(1, 2)


class InfeasibleThresholdError(ValueError):
    """The requested exceedance mass is not attainable by any ball radius."""


# ---------------------------------------------------------------------------
# observable profiles g


@dataclass(frozen=True)
class LogType:
    """g(t) = -log t: exceedances of every size, exponential tail."""


@dataclass(frozen=True)
class ParetoType:
    """g(t) = t^(-1/alpha): positive polynomial tail of index alpha."""

    alpha: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")


@dataclass(frozen=True)
class BoundedType:
    """g(t) = bound - t^(1/alpha): observable capped at `bound`."""

    bound: Fraction
    alpha: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "bound", Fraction(self.bound))
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")


GType = Union[LogType, ParetoType, BoundedType]


def g_apply(gtype: GType, t) -> float:
    """Evaluate the profile at distance t >= 0 (t = 0 gives the supremum)."""
    t = float(t)
    if t < 0:
        raise ValueError("distance must be non-negative")
    if isinstance(gtype, LogType):
        return math.inf if t == 0 else -math.log(t)
    if isinstance(gtype, ParetoType):
        return math.inf if t == 0 else t ** (-1 / float(gtype.alpha))
    if isinstance(gtype, BoundedType):
        return float(gtype.bound) - t ** (1 / float(gtype.alpha))
    raise TypeError(f"unknown observable profile {gtype!r}")


def g_inverse(gtype: GType, u: float) -> float:
    """The distance r with g(r) = u (the exceedance radius of level u)."""
    if isinstance(gtype, LogType):
        return math.exp(-u)
    if isinstance(gtype, ParetoType):
        if u <= 0:
            raise ValueError("Pareto-type levels are positive")
        return u ** (-float(gtype.alpha)) if u != math.inf else 0.0
    if isinstance(gtype, BoundedType):
        gap = float(gtype.bound) - u
        if gap < 0:
            raise ValueError("level exceeds the observable bound")
        return gap ** float(gtype.alpha)
    raise TypeError(f"unknown observable profile {gtype!r}")


# ---------------------------------------------------------------------------
# maximal sets and observables


@dataclass(frozen=True)
class FinitePoints:
    """A finite set of rational points on the circle."""

    points: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        pts = tuple(sorted(Fraction(p) % 1 for p in self.points))
        if not pts:
            raise ValueError("maximal set needs at least one point")
        if len(set(pts)) != len(pts):
            raise ValueError("maximal points must be distinct")
        object.__setattr__(self, "points", pts)


@dataclass(frozen=True)
class UnstableSegment:
    """A segment of local unstable manifold through a toral fixed point.

    ``center`` and ``half_length`` are exact arc-length coordinates along the
    unstable eigendirection (origin at the fixed point).
    """

    center: ExactReal
    half_length: ExactReal

    def __post_init__(self) -> None:
        hl = self.half_length
        if isinstance(hl, int):
            hl = Fraction(hl)
            object.__setattr__(self, "half_length", hl)
        if isinstance(self.center, int):
            object.__setattr__(self, "center", Fraction(self.center))
        if not hl > 0:
            raise ValueError("half_length must be positive")


MaximalSet = Union[FinitePoints, UnstableSegment]


@dataclass(frozen=True)
class Observable:
    """One component psi(x) = g(dist(x, Z))."""

    zset: MaximalSet
    gtype: GType


@dataclass(frozen=True)
class ObservableSpec:
    """The observable vector Psi = (psi_1, ..., psi_d)."""

    components: tuple[Observable, ...]

    def __post_init__(self) -> None:
        if not self.components:
            raise ValueError("need at least one observable")

    @property
    def dim(self) -> int:
        return len(self.components)


def frequency_vector(values: Sequence) -> tuple[Fraction, ...]:
    """Validate a frequency vector: rationals >= 0, not all zero."""
    out = []
    for v in values:
        if isinstance(v, float):
            raise TypeError("frequencies must be exact rationals (int, str or Fraction)")
        f = Fraction(v)
        if f < 0:
            raise ValueError("frequencies must be non-negative")
        out.append(f)
    if not out or all(f == 0 for f in out):
        raise ValueError("at least one frequency must be positive")
    return tuple(out)


# ---------------------------------------------------------------------------
# evaluation


def _circle_distance(x, z: Fraction):
    if isinstance(x, (Fraction, int)):
        d = (Fraction(x) - z) % 1
        return min(d, 1 - d)
    d = (float(x) - float(z)) % 1.0
    return min(d, 1.0 - d)


def evaluate(obs: Observable, x, frame: Optional[EigenData] = None) -> float:
    """psi(x) = g(dist(x, Z)); +inf (or the bound) is attained on Z itself.

    Circle observables take x as a number mod 1.  Unstable-segment
    observables take x = (x1, x2) on the torus and need the automorphism's
    eigen ``frame``; the distance is Euclidean distance to the segment in the
    (orthonormal) eigen coordinates.
    """
    z = obs.zset
    if isinstance(z, FinitePoints):
        d = min(_circle_distance(x, p) for p in z.points)
        return g_apply(obs.gtype, d)
    if isinstance(z, UnstableSegment):
        if frame is None:
            raise ValueError("unstable-segment observables need the eigen frame")
        x1, x2 = (float(c) for c in x)
        cx = (x1 + 0.5) % 1.0 - 0.5
        cy = (x2 + 0.5) % 1.0 - 0.5
        u = cx * frame.e_unstable[0] + cy * frame.e_unstable[1]
        s = cx * frame.e_stable[0] + cy * frame.e_stable[1]
        du = max(0.0, abs(u - float(z.center)) - float(z.half_length))
        return g_apply(obs.gtype, math.hypot(du, s))
    raise TypeError(f"unknown maximal set {z!r}")


# ---------------------------------------------------------------------------
# exceedance sets


def exceedance_set(obs: Observable, radius: ExactReal, boundary: str = "circle"):
    """The sublevel region {dist(., Z) < r} as an exact set.

    For finite point sets this is a union of balls.  For unstable segments it
    is the eigen-axes rectangle of stable half-height ``radius`` (the rounded
    tips that an exact Euclidean metric would add carry measure O(r^2) and
    are deliberately omitted; the thresholds below are exact for the
    rectangle geometry).
    """
    z = obs.zset
    if isinstance(z, FinitePoints):
        out = IntervalSet.empty()
        for p in z.points:
            out = out.union(ball(p, Fraction(radius), boundary=boundary))
        return out
    if isinstance(z, UnstableSegment):
        return TorusRect(
            center=(z.center, Fraction(0)),
            half_widths=(z.half_length, radius),
            axes="eigen",
        )
    raise TypeError(f"unknown maximal set {z!r}")


# ---------------------------------------------------------------------------
# exact thresholds


def _mass_at(points: tuple[Fraction, ...], r: Fraction, boundary: str) -> Fraction:
    out = IntervalSet.empty()
    for p in points:
        out = out.union(ball(p, r, boundary=boundary))
    return out.measure


def _solve_radius(points: tuple[Fraction, ...], target: Fraction, boundary: str) -> Fraction:
    """Invert the measure-vs-radius function exactly.

    The map r -> measure(union of balls of radius r) is continuous, piecewise
    linear and non-decreasing; its breakpoints are half-gaps between
    neighbouring points (and, on the interval, the distances to 0 and 1).
    Each linear piece is identified by two interior probes and solved
    exactly; the solution is verified by direct measure evaluation.
    """
    pts = sorted(points)
    candidates = set()
    for a, b in zip(pts, pts[1:]):
        candidates.add((b - a) / 2)
    if boundary == "circle":
        if len(pts) > 1:
            candidates.add((pts[0] + 1 - pts[-1]) / 2)
    else:
        if len(pts) > 1:
            candidates.add((pts[0] + 1 - pts[-1]) / 2)  # the same pair seen across 1 is clipped anyway
        candidates.add(pts[0])
        candidates.add(1 - pts[-1])
    cuts = sorted(c for c in candidates if 0 < c < _HALF)
    grid = [Fraction(0)] + cuts + [_HALF]
    for lo, hi in zip(grid, grid[1:]):
        if lo == hi:
            continue
        ra = lo + (hi - lo) / 3
        rb = lo + 2 * (hi - lo) / 3
        ma = _mass_at(pts, ra, boundary)
        mb = _mass_at(pts, rb, boundary)
        if ma == mb:
            if target == ma:
                return ra
            continue
        slope = (mb - ma) / (rb - ra)
        r = ra + (target - ma) / slope
        if 0 < r < _HALF and lo <= r <= hi and _mass_at(pts, r, boundary) == target:
            return r
    raise InfeasibleThresholdError(
        f"no ball radius gives exceedance mass {target} "
        f"for {len(pts)} point(s) with boundary={boundary!r}"
    )


@dataclass(frozen=True)
class ThresholdVector:
    """Exact quantile thresholds: n * measure(exceedance set i) = tau_i."""

    tau: tuple[Fraction, ...]
    n: int
    boundary: str
    u: tuple[float, ...]
    radii: tuple[Optional[ExactReal], ...]
    sets: tuple[Union[IntervalSet, TorusRect, None], ...]


def thresholds(
    spec: ObservableSpec,
    tau: Sequence,
    n: int,
    boundary: str = "circle",
) -> ThresholdVector:
    """Exact per-component quantile thresholds at frequency tau and time n.

    A zero frequency disables its component: the threshold is the observable's
    supremum and the exceedance set is empty.
    """
    tau_v = frequency_vector(tau)
    if len(tau_v) != spec.dim:
        raise ValueError(f"tau has {len(tau_v)} components, observables have {spec.dim}")
    if n < 1:
        raise ValueError("n must be positive")
    us: list[float] = []
    radii: list[Optional[ExactReal]] = []
    sets: list[Union[IntervalSet, TorusRect, None]] = []
    for obs, t in zip(spec.components, tau_v):
        if t == 0:
            us.append(g_apply(obs.gtype, 0))
            radii.append(None)
            sets.append(IntervalSet.empty() if isinstance(obs.zset, FinitePoints) else None)
            continue
        target = Fraction(t, n)
        if isinstance(obs.zset, FinitePoints):
            r: ExactReal = _solve_radius(obs.zset.points, target, boundary)
        else:
            seg = obs.zset
            r = target / (4 * seg.half_length)
            if not float(r) < 0.5:
                raise InfeasibleThresholdError(
                    f"stable half-height {float(r):g} for mass {target} is not small"
                )
        us.append(g_apply(obs.gtype, float(r) if not isinstance(r, Fraction) else r))
        radii.append(r)
        sets.append(exceedance_set(obs, r, boundary=boundary))
    return ThresholdVector(
        tau=tau_v, n=n, boundary=boundary, u=tuple(us), radii=tuple(radii), sets=tuple(sets)
    )


# ---------------------------------------------------------------------------
# overlap bookkeeping for maximal sets sharing points


@dataclass(frozen=True)
class OverlapFractions:
    """Finite-n mass splitting of exceedance sets around shared points.

    ``p[i]``: fraction of observable i's exceedance mass sitting at its own
    (non-shared) maximal points.  ``q[i]``: measure of the common overlap
    region around shared points relative to observable i's piece there
    (zero when the maximal sets are disjoint).
    """

    p: tuple[Fraction, ...]
    q: tuple[Fraction, ...]
    tau: tuple[Fraction, ...]
    n: int


def overlap_fractions(
    spec: ObservableSpec,
    tau: Sequence,
    n: int,
    boundary: str = "circle",
) -> OverlapFractions:
    for obs in spec.components:
        if not isinstance(obs.zset, FinitePoints):
            raise TypeError("overlap fractions are defined for finite maximal sets")
    tv = thresholds(spec, tau, n, boundary=boundary)
    point_sets = [set(obs.zset.points) for obs in spec.components]
    shared: set[Fraction] = set()
    for i, pts in enumerate(point_sets):
        for j in range(i + 1, len(point_sets)):
            shared |= pts & point_sets[j]
    hats: list[IntervalSet] = []
    for i, obs in enumerate(spec.components):
        r = tv.radii[i]
        hat = IntervalSet.empty()
        if r is not None:
            for p in sorted(point_sets[i] & shared):
                hat = hat.union(ball(p, Fraction(r), boundary=boundary))
        hats.append(hat)
    nonempty_hats = [h for h in hats if not h.is_empty]
    common = IntervalSet.empty()
    if nonempty_hats:
        common = nonempty_hats[0]
        for h in nonempty_hats[1:]:
            common = common.intersect(h)
    ps: list[Fraction] = []
    qs: list[Fraction] = []
    for i in range(spec.dim):
        u_i = tv.sets[i]
        if u_i is None or u_i.is_empty:
            ps.append(Fraction(1))
            qs.append(Fraction(0))
            continue
        own = u_i.difference(hats[i])
        ps.append(own.measure / u_i.measure)
        qs.append(common.measure / hats[i].measure if not hats[i].is_empty else Fraction(0))
    return OverlapFractions(p=tuple(ps), q=tuple(qs), tau=tv.tau, n=n)
