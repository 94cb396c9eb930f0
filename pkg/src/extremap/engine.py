"""Exact finite-n computation of cluster sets and their measure ratios.

For piecewise-linear circle maps with rational data everything here is exact
rational arithmetic: exceedance regions come from exact quantile thresholds,
preimages are unions of arcs, and the reported numbers are true measure
ratios at the given n — not floating-point approximations of them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .dynamics import (
    DEFAULT_COMPONENT_BUDGET,
    MapSpec,
    UnsupportedMapError,
    preimage_within,
)
from .geometry import ExactReal, IntervalSet
from .observables import FinitePoints, ObservableSpec, frequency_vector, thresholds

_TOL = Fraction(1, 10**9)

DEFAULT_N_SCHEDULE: tuple[int, ...] = (2**10, 2**14, 2**18, 2**22)
DEFAULT_Q_SCHEDULE: tuple[int, ...] = tuple(range(7))


@dataclass(frozen=True)
class EstimateResult:
    """A single estimated or exactly computed quantity with its provenance."""

    quantity: str
    value: float
    stderr: Optional[float] = None
    exact: Optional[ExactReal] = None
    n: Optional[int] = None
    q: Optional[int] = None
    seed: Optional[int] = None
    trials: Optional[int] = None
    status: str = "ok"
    diagnostics: dict = field(default_factory=dict)

    @property
    def is_exact(self) -> bool:
        return self.exact is not None


@dataclass(frozen=True)
class AqSet:
    """The exact cluster-opening set A^(q): exceed now, stay below for q steps."""

    set: IntervalSet
    tau: tuple[Fraction, ...]
    n: int
    q: int

    @property
    def component_count(self) -> int:
        return self.set.component_count


@dataclass(frozen=True)
class ConditionCheckConfig:
    """Block/gap schedule for the separation diagnostics.

    Blocks of length n/k_n separated by gaps of length t_n must satisfy
    k_n -> infinity with k_n * t_n negligible next to n; the constructor
    checks both numerically along the schedule.
    """

    n_schedule: tuple[int, ...]
    q: int = 0

    def __post_init__(self) -> None:
        ns = tuple(int(n) for n in self.n_schedule)
        object.__setattr__(self, "n_schedule", ns)
        if not ns:
            raise ValueError("n_schedule must be non-empty")
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValueError("n_schedule must be strictly increasing")
        if any(n < 16 for n in ns):
            raise ValueError("schedule entries must be at least 16")
        blocks = [self.block_count(n) for n in ns]
        if any(b2 <= b1 for b1, b2 in zip(blocks, blocks[1:])):
            raise ValueError("block counts must increase along the schedule")
        ratios = [
            Fraction(self.block_count(n) * self.gap_length(n), n) for n in ns
        ]
        if any(r2 >= r1 for r1, r2 in zip(ratios, ratios[1:])):
            raise ValueError("k_n * t_n / n must decrease along the schedule")

    @staticmethod
    def block_count(n: int) -> int:
        return math.isqrt(n)

    @staticmethod
    def gap_length(n: int) -> int:
        return math.isqrt(math.isqrt(n))


def _require_circle(spec: ObservableSpec) -> None:
    if not all(isinstance(obs.zset, FinitePoints) for obs in spec.components):
        raise UnsupportedMapError(
            "exact mode needs circle observables (finite rational point sets)"
        )


def exceedance_union(
    spec: ObservableSpec, tau: Sequence, n: int, boundary: str = "circle"
) -> IntervalSet:
    """U(tau) = union of the per-component exact exceedance sets."""
    _require_circle(spec)
    tv = thresholds(spec, tau, n, boundary=boundary)
    out = IntervalSet.empty()
    for s in tv.sets:
        if s is not None and not s.is_empty:
            out = out.union(s)
    return out


def gamma_hat(
    spec: ObservableSpec, tau: Sequence, n: int, boundary: str = "circle"
) -> EstimateResult:
    """n times the measure of the joint exceedance region (exact rational)."""
    u = exceedance_union(spec, tau, n, boundary=boundary)
    val = n * u.measure
    return EstimateResult(
        quantity="gamma_hat", value=float(val), stderr=0.0, exact=val, n=n
    )


def aq_set(
    map_spec: MapSpec,
    spec: ObservableSpec,
    tau: Sequence,
    n: int,
    q: int,
    boundary: str = "circle",
    budget: int = DEFAULT_COMPONENT_BUDGET,
) -> AqSet:
    """Exceed at time 0 and return to the sub-threshold region for q steps.

    Computed as U minus the first q preimages of U, with each preimage
    restricted to the surviving set so the work stays proportional to the
    (tiny) exceedance region rather than to b^j.
    """
    if q < 0:
        raise ValueError("q must be non-negative")
    u = exceedance_union(spec, tau, n, boundary=boundary)
    a = u
    for j in range(1, q + 1):
        a = a.difference(preimage_within(map_spec, u, j, within=a, budget=budget))
    return AqSet(set=a, tau=frequency_vector(tau), n=n, q=q)


def theta_exact(
    map_spec: MapSpec,
    spec: ObservableSpec,
    tau: Sequence,
    n: int,
    q: int,
    boundary: str = "circle",
    budget: int = DEFAULT_COMPONENT_BUDGET,
) -> EstimateResult:
    """The exact finite-n cluster ratio measure(A^(q)) / measure(A^(0))."""
    u = exceedance_union(spec, tau, n, boundary=boundary)
    a = u
    for j in range(1, q + 1):
        a = a.difference(preimage_within(map_spec, u, j, within=a, budget=budget))
    ratio = a.measure / u.measure
    return EstimateResult(
        quantity="theta", value=float(ratio), stderr=0.0, exact=ratio, n=n, q=q
    )


def theta_limit(
    map_spec: MapSpec,
    spec: ObservableSpec,
    tau: Sequence,
    q_schedule: Sequence[int] = DEFAULT_Q_SCHEDULE,
    n_schedule: Sequence[int] = DEFAULT_N_SCHEDULE,
    boundary: str = "circle",
    budget: int = DEFAULT_COMPONENT_BUDGET,
    tol: Fraction = _TOL,
) -> EstimateResult:
    """Double-schedule estimate of the limiting cluster ratio.

    Computes the full (q, n) table of exact ratios, declares stabilization at
    the first q whose successor agrees within ``tol`` at the largest n, and
    reports the smallest schedule n from which those two rows are constant.
    Never silently returns an unstabilized number: the status says so.
    """
    qs = sorted(set(int(q) for q in q_schedule))
    ns = sorted(set(int(n) for n in n_schedule))
    if not qs or not ns:
        raise ValueError("schedules must be non-empty")
    if qs[0] < 0:
        raise ValueError("q values must be non-negative")
    q_max = qs[-1]
    table: dict[tuple[int, int], Fraction] = {}
    for n in ns:
        u = exceedance_union(spec, tau, n, boundary=boundary)
        a = u
        if 0 in qs:
            table[(0, n)] = Fraction(1)
        for j in range(1, q_max + 1):
            a = a.difference(preimage_within(map_spec, u, j, within=a, budget=budget))
            if j in qs:
                table[(j, n)] = a.measure / u.measure
    n_top = ns[-1]
    q_stab: Optional[int] = None
    for q1, q2 in zip(qs, qs[1:]):
        if abs(table[(q2, n_top)] - table[(q1, n_top)]) < tol:
            q_stab = q1
            break
    if q_stab is None:
        val = table[(q_max, n_top)]
        return EstimateResult(
            quantity="theta",
            value=float(val),
            stderr=0.0,
            exact=val,
            n=n_top,
            q=q_max,
            status="not-converged",
            diagnostics={"table": table, "q_stab": None, "n0": None},
        )
    q_next = qs[qs.index(q_stab) + 1]
    val = table[(q_next, n_top)]
    n0 = n_top
    for i in range(len(ns) - 1, -1, -1):
        n = ns[i]
        if all(abs(table[(q, n)] - table[(q, n_top)]) < tol for q in (q_stab, q_next)):
            n0 = n
        else:
            break
    return EstimateResult(
        quantity="theta",
        value=float(val),
        stderr=0.0,
        exact=val,
        n=n_top,
        q=q_stab,
        diagnostics={"table": table, "q_stab": q_stab, "n0": n0},
    )


def delta_prime_partial_sum(
    map_spec: MapSpec,
    a_set: IntervalSet,
    n: int,
    q: int,
    k_n: Optional[int] = None,
    j_cap: int = 20,
    budget: int = DEFAULT_COMPONENT_BUDGET,
) -> EstimateResult:
    """n * sum of measure(A intersect f^(-j) A) over the separation range.

    The full range runs j = q+1 .. n//k_n - 1; the computation stops at
    q + j_cap and says so in the status.  Small values mean cluster openings
    do not re-enter their own region soon — the anti-clustering signal.
    """
    k = k_n if k_n is not None else math.isqrt(n)
    if k < 1:
        raise ValueError("block count must be positive")
    j_full = n // k - 1
    j_lo = q + 1
    j_hi = min(j_full, q + j_cap)
    total = Fraction(0)
    nonzero = 0
    for j in range(j_lo, j_hi + 1):
        m = preimage_within(map_spec, a_set, j, within=a_set, budget=budget).measure
        if m:
            nonzero += 1
            total += m
    val = n * total
    return EstimateResult(
        quantity="delta_prime",
        value=float(val),
        stderr=0.0,
        exact=val,
        n=n,
        q=q,
        status="ok" if j_hi == j_full else "truncated",
        diagnostics={
            "j_lo": j_lo,
            "j_hi": j_hi,
            "j_full": j_full,
            "nonzero_terms": nonzero,
        },
    )


def delta_prime(
    map_spec: MapSpec,
    spec: ObservableSpec,
    tau: Sequence,
    n: int,
    q: int,
    cfg: Optional[ConditionCheckConfig] = None,
    j_cap: int = 20,
    boundary: str = "circle",
    budget: int = DEFAULT_COMPONENT_BUDGET,
) -> EstimateResult:
    """The anti-clustering partial sum for the exact cluster set at (tau, n, q)."""
    a = aq_set(map_spec, spec, tau, n, q, boundary=boundary, budget=budget)
    k = cfg.block_count(n) if cfg is not None else None
    return delta_prime_partial_sum(
        map_spec, a.set, n, q, k_n=k, j_cap=j_cap, budget=budget
    )


def g_value(theta: EstimateResult, gamma: EstimateResult) -> EstimateResult:
    """exp(-theta * gamma_hat) with first-order error propagation."""
    th, gm = theta.value, gamma.value
    v = math.exp(-th * gm)
    s_th = theta.stderr or 0.0
    s_gm = gamma.stderr or 0.0
    stderr = v * math.hypot(gm * s_th, th * s_gm)
    status = theta.status if theta.status != "ok" else gamma.status
    return EstimateResult(
        quantity="G",
        value=v,
        stderr=stderr,
        n=theta.n,
        q=theta.q,
        seed=theta.seed,
        trials=theta.trials,
        status=status,
    )
