"""Measure-preserving maps: base-b circle expansions and toral automorphisms.

Exact preimage machinery works on `IntervalSet`s with rational arithmetic.
Orbit simulation uses exact digit windows (circle) or 64-bit lattice points
(torus); both evolve by integer operations only, so orbits never drift.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .geometry import IntervalSet
from .quadratic import Sqrt5

DEFAULT_COMPONENT_BUDGET = 2_000_000

_TWO64 = 1 << 64
_MASK64 = _TWO64 - 1


class UnsupportedMapError(TypeError):
    """Raised when an operation is not defined for the given map family."""


class BudgetExceededError(RuntimeError):
    """A preimage expansion would exceed the component budget.

    ``achieved_j`` reports the largest iterate that stays within budget for
    the same input set (``None`` when no iterate is feasible or the notion
    does not apply).
    """

    def __init__(self, message: str, achieved_j: Optional[int] = None, requested_j: Optional[int] = None):
        super().__init__(message)
        self.achieved_j = achieved_j
        self.requested_j = requested_j


# ---------------------------------------------------------------------------
# map specifications


@dataclass(frozen=True)
class ExpandingBase:
    """The circle map x -> base * x mod 1."""

    base: int

    def __post_init__(self) -> None:
        if not isinstance(self.base, int) or self.base < 2:
            raise ValueError(f"expanding base must be an integer >= 2, got {self.base!r}")


@dataclass(frozen=True)
class ToralAuto:
    """A hyperbolic automorphism of the 2-torus given by an integer matrix."""

    rows: tuple[tuple[int, int], tuple[int, int]]

    def __post_init__(self) -> None:
        rows = tuple(tuple(int(x) for x in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        (a, b), (c, d) = rows
        det = a * d - b * c
        if det not in (1, -1):
            raise ValueError(f"matrix must have determinant +-1, got {det}")
        tr = a + d
        # Eigenvalues on the unit circle iff |tr| <= 2 (det = 1) or tr = 0 (det = -1).
        if det == 1 and abs(tr) <= 2:
            raise ValueError("matrix is not hyperbolic (eigenvalues on the unit circle)")
        if det == -1 and tr == 0:
            raise ValueError("matrix is not hyperbolic (eigenvalues on the unit circle)")

    @property
    def trace(self) -> int:
        return self.rows[0][0] + self.rows[1][1]

    @property
    def det(self) -> int:
        (a, b), (c, d) = self.rows
        return a * d - b * c


MapSpec = Union[ExpandingBase, ToralAuto]


# ---------------------------------------------------------------------------
# point types


@dataclass(frozen=True)
class LatticePoint2D:
    """A torus point (u / 2^64, v / 2^64) on the 64-bit dyadic lattice.

    Unimodular integer matrices act bijectively on this lattice mod 2^64, so
    orbits are exact.
    """

    u: int
    v: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "u", self.u & _MASK64)
        object.__setattr__(self, "v", self.v & _MASK64)

    @property
    def x(self) -> Fraction:
        return Fraction(self.u, _TWO64)

    @property
    def y(self) -> Fraction:
        return Fraction(self.v, _TWO64)

    def centered(self) -> tuple[Fraction, Fraction]:
        """Coordinates shifted into [-1/2, 1/2) (i.e. relative to the origin)."""
        cu = self.u if self.u < _TWO64 // 2 else self.u - _TWO64
        cv = self.v if self.v < _TWO64 // 2 else self.v - _TWO64
        return Fraction(cu, _TWO64), Fraction(cv, _TWO64)


class LazyDigitPoint:
    """A circle point represented by its lazily extended base-b digit stream.

    Only a sliding window of ``window`` digits is retained; the stream is
    refilled in blocks of 64 digits from a recorded-seed generator.  Stepping
    shifts the window by one digit, which is exactly the action of
    x -> base*x mod 1, so orbits carry no roundoff whatsoever.
    """

    def __init__(self, base: int, seed: int, window: int = 64):
        if base < 2:
            raise ValueError("base must be >= 2")
        if window < 1:
            raise ValueError("window must be positive")
        self.base = base
        self.window = window
        self.seed = seed
        self._rng = np.random.default_rng(np.random.SeedSequence(seed))
        self._digits: deque[int] = deque()
        self._refill()

    def _refill(self) -> None:
        while len(self._digits) < self.window:
            block = self._rng.integers(0, self.base, size=64)
            self._digits.extend(int(d) for d in block)

    def step(self) -> "LazyDigitPoint":
        self._digits.popleft()
        self._refill()
        return self

    @property
    def window_int(self) -> int:
        """The first ``window`` digits as an integer (most significant first)."""
        w = 0
        for i, d in enumerate(self._digits):
            if i == self.window:
                break
            w = w * self.base + d
        return w

    @property
    def fraction(self) -> Fraction:
        """The point truncated to the current window: error < base**(-window)."""
        return Fraction(self.window_int, self.base**self.window)

    def __float__(self) -> float:
        return float(self.fraction)


# ---------------------------------------------------------------------------
# stepping


def step(map_spec: MapSpec, state):
    """Apply the map once.

    Supported states: `Fraction` (circle), `LazyDigitPoint` (circle, mutated
    in place and returned), `LatticePoint2D` (torus) and rational coordinate
    pairs (torus).
    """
    if isinstance(map_spec, ExpandingBase):
        if isinstance(state, LazyDigitPoint):
            if state.base != map_spec.base:
                raise ValueError("digit point base does not match the map")
            return state.step()
        if isinstance(state, (Fraction, int)):
            return (map_spec.base * Fraction(state)) % 1
        raise UnsupportedMapError(f"cannot step state {state!r} under an expanding circle map")
    if isinstance(map_spec, ToralAuto):
        (a, b), (c, d) = map_spec.rows
        if isinstance(state, LatticePoint2D):
            return LatticePoint2D(a * state.u + b * state.v, c * state.u + d * state.v)
        if isinstance(state, (tuple, list)) and len(state) == 2:
            x, y = Fraction(state[0]), Fraction(state[1])
            return ((a * x + b * y) % 1, (c * x + d * y) % 1)
        raise UnsupportedMapError(f"cannot step state {state!r} under a toral automorphism")
    raise UnsupportedMapError(f"unknown map spec {map_spec!r}")


# ---------------------------------------------------------------------------
# preimages (circle maps only)


def _require_circle(map_spec: MapSpec, op: str) -> ExpandingBase:
    if not isinstance(map_spec, ExpandingBase):
        raise UnsupportedMapError(
            f"{op} works on interval sets and is defined for expanding circle maps only"
        )
    return map_spec


def preimage(map_spec: MapSpec, s: IntervalSet) -> IntervalSet:
    """The full preimage f^(-1)(s), exactly. Measure is preserved."""
    m = _require_circle(map_spec, "preimage")
    b = m.base
    pairs = []
    for lo, hi in s.arcs:
        for k in range(b):
            pairs.append((Fraction(lo + k, b), Fraction(hi + k, b)))
    return IntervalSet.from_arcs(pairs)


def _max_feasible_iterate(base: int, n_arcs: int, budget: int) -> int:
    j = 0
    if n_arcs <= 0:
        return 0
    cap = budget // n_arcs
    size = base
    while size <= cap:
        j += 1
        size *= base
    return j


def iterated_preimage(
    map_spec: MapSpec,
    s: IntervalSet,
    j: int,
    budget: int = DEFAULT_COMPONENT_BUDGET,
) -> IntervalSet:
    """f^(-j)(s), materialized globally, guarded by a component budget."""
    m = _require_circle(map_spec, "iterated_preimage")
    if j < 0:
        raise ValueError("iterate count must be non-negative")
    n_arcs = max(1, len(s.arcs))
    if m.base**j * n_arcs > budget:
        achieved = _max_feasible_iterate(m.base, n_arcs, budget)
        raise BudgetExceededError(
            f"f^(-{j}) of a {n_arcs}-component set needs ~{m.base**j * n_arcs} components, "
            f"budget is {budget} (largest feasible iterate: {achieved})",
            achieved_j=achieved,
            requested_j=j,
        )
    out = s
    for _ in range(j):
        out = preimage(m, out)
    return out


def preimage_within(
    map_spec: MapSpec,
    target: IntervalSet,
    j: int,
    within: IntervalSet,
    budget: int = DEFAULT_COMPONENT_BUDGET,
) -> IntervalSet:
    """The set {x in within : f^j(x) in target}, i.e. f^(-j)(target) ∩ within.

    Computed arc by arc without materializing the global preimage: on an arc
    [a, c), the condition b^j x mod 1 in target means b^j x lies in an
    integer-shifted copy of target, and only shifts m in [floor(b^j a),
    ceil(b^j c)) can intersect [b^j a, b^j c).  The cost is proportional to
    b^j * length(within) + components, not b^j * components.
    """
    m = _require_circle(map_spec, "preimage_within")
    if j < 0:
        raise ValueError("iterate count must be non-negative")
    if j == 0:
        return target.intersect(within)
    if target.is_empty or within.is_empty:
        return IntervalSet.empty()
    if target.is_full:
        return within
    big = m.base**j
    # budget accounting: number of (shift, target-arc) pairs examined
    total_work = 0
    out_pairs: list[tuple[Fraction, Fraction]] = []
    for a, c in within.arcs:
        lo_m = math.floor(big * a)
        hi_m = math.ceil(big * c)
        total_work += (hi_m - lo_m) * len(target.arcs)
        if total_work > budget:
            raise BudgetExceededError(
                f"restricted preimage at iterate {j} needs {total_work}+ arc operations, "
                f"budget is {budget}",
                requested_j=j,
            )
        for shift in range(lo_m, hi_m):
            for p, q in target.arcs:
                lo = max(a, Fraction(p + shift, big))
                hi = min(c, Fraction(q + shift, big))
                if lo < hi:
                    out_pairs.append((lo, hi))
    return IntervalSet.from_arcs(out_pairs)


def first_return(
    map_spec: MapSpec,
    s: IntervalSet,
    j_max: int,
    budget: int = DEFAULT_COMPONENT_BUDGET,
) -> Optional[int]:
    """Smallest j in [1, j_max] with s ∩ f^(-j)(s) nonempty, else None."""
    _require_circle(map_spec, "first_return")
    if s.is_empty:
        return None
    for j in range(1, j_max + 1):
        if not preimage_within(map_spec, s, j, s, budget=budget).is_empty:
            return j
    return None


# ---------------------------------------------------------------------------
# stationary sampling


def sample_stationary(
    map_spec: MapSpec,
    size: int,
    seed: int,
    workers: int = 1,
) -> np.ndarray:
    """I.i.d. samples from the invariant (Lebesgue) measure.

    Reproducible: the stream is partitioned per worker via seed spawn keys,
    so the result depends only on (seed, workers), not on scheduling.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    dim = 1 if isinstance(map_spec, ExpandingBase) else 2
    counts = [size // workers + (1 if i < size % workers else 0) for i in range(workers)]
    chunks = []
    for i, count in enumerate(counts):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i,)))
        if dim == 1:
            chunks.append(rng.random(count))
        else:
            chunks.append(rng.random((count, 2)))
    return np.concatenate(chunks) if len(chunks) > 1 else chunks[0]


# ---------------------------------------------------------------------------
# eigen-structure of toral automorphisms


@dataclass(frozen=True)
class EigenData:
    """Eigenvalues and unit eigenvectors of a hyperbolic toral automorphism.

    Floating-point fields are accurate to a few ulp.  When the characteristic
    discriminant is 5, exact counterparts are provided in Q(sqrt 5):
    ``lam_exact`` (the unstable eigenvalue) and ``slope_exact`` (the slope of
    the unstable eigenvector normalized to (1, slope)).
    """

    lam_unstable: float
    lam_stable: float
    e_unstable: tuple[float, float]
    e_stable: tuple[float, float]
    discriminant: int
    lam_exact: Optional[Sqrt5] = None
    slope_exact: Optional[Sqrt5] = None


def _eigenvector(rows, lam: float) -> tuple[float, float]:
    (a, b), (c, d) = rows
    if b != 0:
        v = (float(b), lam - a)
    elif c != 0:
        v = (lam - d, float(c))
    else:  # diagonal
        v = (1.0, 0.0) if abs(a) >= abs(d) else (0.0, 1.0)
    norm = math.hypot(*v)
    return (v[0] / norm, v[1] / norm)


def eigen_data(map_spec: ToralAuto) -> EigenData:
    if not isinstance(map_spec, ToralAuto):
        raise UnsupportedMapError("eigen data is defined for toral automorphisms")
    (a, b), (c, d) = map_spec.rows
    tr = map_spec.trace
    det = map_spec.det
    disc = tr * tr - 4 * det
    sq = math.sqrt(disc)
    lam1 = (tr + sq) / 2
    lam2 = (tr - sq) / 2
    lam_u, lam_s = (lam1, lam2) if abs(lam1) >= abs(lam2) else (lam2, lam1)
    lam_exact = None
    slope_exact = None
    if disc == 5:
        half = Fraction(1, 2)
        lam_exact = Sqrt5(Fraction(tr, 2), half)
        if abs(lam2) > abs(lam1):
            lam_exact = Sqrt5(Fraction(tr, 2), -half)
        if b != 0:
            slope_exact = (lam_exact - a) / b
    return EigenData(
        lam_unstable=lam_u,
        lam_stable=lam_s,
        e_unstable=_eigenvector(map_spec.rows, lam_u),
        e_stable=_eigenvector(map_spec.rows, lam_s),
        discriminant=disc,
        lam_exact=lam_exact,
        slope_exact=slope_exact,
    )
