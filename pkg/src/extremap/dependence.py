"""Closed-form extreme-value dependence structures for the worked example family.

Each catalog entry packages the stable dependence function, the directional
extremal-index profile, and the marginal indices of one example system.  All
derived objects (rescaled dependence function, limit law, max-stable law,
copula, Pickands function) follow from those three ingredients:

* ``gamma(tau) = theta(s) * gamma_hat(s)`` with ``s_j = tau_j / marginal_j``,
* ``G(tau) = exp(-theta(tau) * gamma_hat(tau))``,
* ``H(t) = G(-log t)`` componentwise, so ``H(exp(-tau)) = G(tau)``,
* ``copula(t) = exp(-gamma(-log t))``,
* ``D(alpha) = gamma(alpha)`` on the unit simplex.

Rational inputs are evaluated exactly (in ``Q(sqrt 5)`` for the toral
automorphism); float inputs take the fast floating path.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Tuple, Union

from .quadratic import SQRT5, Sqrt5

__all__ = [
    "DependenceFunctions",
    "ExampleId",
    "ValidationReport",
    "closed_form",
    "logistic_D",
    "pickands",
    "theta_cat",
    "theta_linked_nonperiodic",
    "theta_linked_periodic",
    "theta_linked_to_fixed",
    "theta_overlap_pair",
    "theta_trivariate",
    "validate",
]

Number = Union[int, float, Fraction, Sqrt5]
TauVector = Sequence[Number]

_F = Fraction


def _is_exact(value: Number) -> bool:
    return isinstance(value, (int, Fraction, Sqrt5))


def _inverse(value: Number) -> Number:
    """Exact reciprocal (``1/int`` stays rational instead of going float)."""
    if isinstance(value, int):
        return Fraction(1, value)
    return 1 / value


class ExampleId(enum.Enum):
    """Identifiers for the worked examples shipped with the package."""

    CommonPoint_3_1_1 = "CommonPoint_3_1_1"
    DisjointPoints_3_1_2 = "DisjointPoints_3_1_2"
    LinkedNonPeriodic_3_2_1 = "LinkedNonPeriodic_3_2_1"
    LinkedPeriodic_3_2_2 = "LinkedPeriodic_3_2_2"
    LinkedPeriodic2_3_2_3 = "LinkedPeriodic2_3_2_3"
    OverlapNonPeriodic_3_3_2 = "OverlapNonPeriodic_3_3_2"
    Trivariate_3_3_3 = "Trivariate_3_3_3"
    OverlapPeriodic_3_3_4 = "OverlapPeriodic_3_3_4"
    CatMap_3_4 = "CatMap_3_4"

    @property
    def dim(self) -> int:
        return 3 if self is ExampleId.Trivariate_3_3_3 else 2

    @property
    def is_circle(self) -> bool:
        return self is not ExampleId.CatMap_3_4


# ---------------------------------------------------------------------------
# directional extremal-index profiles
#
# All profiles are functions of the direction alpha = tau_1 / (tau_1 + tau_2)
# only (degree-0 homogeneous in tau).  The general-density parameters default
# to the Lebesgue-measure values used by the catalog.


def theta_linked_nonperiodic(
    alpha: Number, deriv: Number = 2, density_ratio: Number = 1
) -> Number:
    """Profile for maximal points ``{z, f(z)}`` with ``z`` aperiodic.

    ``deriv`` is ``|Df(z)|`` and ``density_ratio`` is ``rho(z)/rho(f z)`` for
    the invariant density ``rho``.
    """
    if alpha == 0:
        return 1 - alpha
    bite = density_ratio * (1 - alpha) / (deriv * alpha)
    return alpha * max(0, 1 - bite) + (1 - alpha)


def theta_linked_periodic(
    alpha: Number,
    deriv: Number = 2,
    deriv2: Optional[Number] = None,
    density_ratio: Number = 1,
) -> Number:
    """Profile for maximal points ``{z, f(z)}`` on a common 2-periodic orbit.

    ``deriv`` is ``|Df(z)|``, ``deriv2`` is ``|Df^2|`` along the orbit
    (defaults to ``deriv**2``), ``density_ratio`` is ``rho(z)/rho(f z)``.
    """
    if deriv2 is None:
        deriv2 = deriv * deriv
    inv2 = _inverse(deriv2)

    def one_sided(a: Number, ratio: Number) -> Number:
        if a == 0:
            return max(0, 1 - inv2)
        neighbour = ratio * (1 - a) / (deriv * a)
        return max(0, 1 - max(neighbour, inv2))

    first = one_sided(alpha, density_ratio)
    second = one_sided(1 - alpha, _inverse(density_ratio))
    return alpha * first + (1 - alpha) * second


def theta_linked_to_fixed(
    alpha: Number,
    deriv: Number = 3,
    theta_fixed: Number = _F(2, 3),
    density_ratio: Number = 1,
) -> Number:
    """Profile for ``{z, f(z)}`` where ``f(z)`` is a fixed point of the map."""
    if alpha == 0:
        first = 0
    else:
        bite = density_ratio * (1 - alpha) / (deriv * alpha)
        first = alpha * max(0, 1 - bite)
    return first + (1 - alpha) * theta_fixed


def theta_overlap_pair(
    alpha: Number,
    deriv: Number = 2,
    theta_shared: Number = 1,
    r1: Number = 1,
    r2: Number = 1,
    big_r: Optional[Callable[[Number], Number]] = None,
) -> Number:
    """Profile for two maximal sets sharing one point, linked via the others.

    The union splits into an own-point piece for each margin plus the shared
    piece, with weights ``alpha``, ``1 - alpha`` and ``max(alpha, 1 - alpha)``
    (normalised).  ``theta_shared`` is the extremal index carried by the
    shared point, ``r1``/``r2`` are the density weights of the own-point
    pieces, and ``big_r(alpha)`` is the limiting radius ratio of the two
    own-point balls (defaults to ``alpha / (1 - alpha)``).
    """
    m = max(alpha, 1 - alpha)
    denom = 1 + m
    inv = _inverse(deriv)

    theta = (m / denom) * theta_shared
    if alpha > 0:
        if big_r is None:
            cross = r2 * (1 - alpha) / alpha
        else:
            cross = r2 / big_r(alpha)
        theta += (alpha / denom) * max(0, 1 - inv * max(r1, cross))
    if alpha < 1:
        if big_r is None:
            cross = r1 * alpha / (1 - alpha)
        else:
            cross = r1 * big_r(alpha)
        theta += ((1 - alpha) / denom) * max(0, 1 - inv * max(r2, cross))
    return theta


def theta_trivariate(alpha: Number, beta: Number) -> Number:
    """Profile for three maximal points with the first two mapping to the third."""
    rest = 1 - alpha - beta
    return 1 - min(alpha, rest / 2) - min(beta, rest / 2)


def theta_cat(alpha: Number, lam: Optional[Number] = None) -> Number:
    """Profile for an aligned pair ``{z, f(z)}`` of a hyperbolic toral map.

    ``lam`` is the unstable eigenvalue; by default the golden-ratio value
    ``(3 + sqrt 5)/2`` is used, exactly for rational ``alpha`` and in floating
    point otherwise.
    """
    if lam is None:
        root = SQRT5 if _is_exact(alpha) else math.sqrt(5.0)
        lam = (3 + root) / 2
    lam_inv = 1 / lam
    alpha_star = 2 * lam / (3 * lam - 1)
    if alpha <= alpha_star:
        return 1 - (1 + lam_inv) * alpha / 2
    return (1 - lam_inv) * alpha


# ---------------------------------------------------------------------------
# stable dependence functions


def _gamma_hat_max(tau: TauVector) -> Number:
    return max(tau)


def _gamma_hat_sum(tau: TauVector) -> Number:
    return sum(tau)


def _gamma_hat_half_overlap(tau: TauVector) -> Number:
    return sum(tau) - min(tau) / 2


# ---------------------------------------------------------------------------
# dependence-function bundle


@dataclass(frozen=True)
class DependenceFunctions:
    """Limit-law dependence structure of a multivariate extreme-value family.

    ``gamma_hat`` is the stable dependence function of the unnormalised
    exceedance directions, ``theta`` the directional extremal-index profile
    (degree-0 homogeneous), and ``marginals`` the per-coordinate extremal
    indices.  Everything else is derived; see the module docstring.
    """

    dim: int
    marginals: Tuple[Number, ...]
    gamma_hat: Callable[[TauVector], Number]
    theta: Callable[[TauVector], Number]
    label: str = ""

    @classmethod
    def from_pickands(
        cls,
        d_fn: Callable[[Tuple[Number, ...]], Number],
        dim: int,
        label: str = "",
    ) -> "DependenceFunctions":
        """Build a bundle from a Pickands function alone (unit marginals)."""

        def gamma_hat(tau: TauVector) -> Number:
            total = sum(tau)
            if total == 0:
                return 0
            return total * d_fn(tuple(v / total for v in tau))

        return cls(
            dim=dim,
            marginals=(1,) * dim,
            gamma_hat=gamma_hat,
            theta=lambda tau: 1,
            label=label,
        )

    # -- derived objects ---------------------------------------------------

    def gamma(self, tau: TauVector) -> Number:
        """Rescaled dependence function ``gamma(tau) = theta(s) gamma_hat(s)``."""
        self._check_tau(tau)
        if all(v == 0 for v in tau):
            return 0
        if all(_is_exact(v) for v in tau):
            margs = self.marginals
        else:
            margs = tuple(float(m) for m in self.marginals)
        s = tuple(v / m for v, m in zip(tau, margs))
        return self.theta(s) * self.gamma_hat(s)

    def G(self, tau: TauVector) -> float:
        """Limit law of normalised block maxima at threshold direction ``tau``."""
        self._check_tau(tau)
        if all(v == 0 for v in tau):
            return 1.0
        return math.exp(-float(self.theta(tau) * self.gamma_hat(tau)))

    def H(self, t: TauVector) -> float:
        """Max-stable law with power-law marginals ``H_j(t) = t**marginal_j``."""
        self._check_cube(t)
        if any(v == 0 for v in t):
            return 0.0
        return self.G(tuple(-math.log(float(v)) for v in t))

    def copula(self, t: TauVector) -> float:
        """Extreme-value copula ``C(t) = exp(-gamma(-log t))``."""
        self._check_cube(t)
        if any(v == 0 for v in t):
            return 0.0
        tau = tuple(-math.log(float(v)) for v in t)
        return math.exp(-float(self.gamma(tau)))

    def D(self, point: TauVector) -> Number:
        """Pickands dependence function: ``gamma`` restricted to the simplex."""
        point = tuple(point)
        if len(point) != self.dim:
            raise ValueError(f"expected {self.dim} simplex coordinates, got {len(point)}")
        if any(v < 0 for v in point):
            raise ValueError(f"simplex coordinates must be nonnegative: {point}")
        total = sum(point)
        if all(_is_exact(v) for v in point):
            on_simplex = total == 1
        else:
            on_simplex = abs(float(total) - 1.0) <= 1e-9
        if not on_simplex:
            raise ValueError(f"coordinates must sum to 1, got total {total}")
        return self.gamma(point)

    # -- input validation ---------------------------------------------------

    def _check_tau(self, tau: TauVector) -> None:
        if len(tau) != self.dim:
            raise ValueError(f"expected {self.dim} components, got {len(tau)}")
        if any(v < 0 for v in tau):
            raise ValueError(f"threshold frequencies must be nonnegative: {tuple(tau)}")

    def _check_cube(self, t: TauVector) -> None:
        if len(t) != self.dim:
            raise ValueError(f"expected {self.dim} components, got {len(t)}")
        if any(v < 0 or v > 1 for v in t):
            raise ValueError(f"copula arguments must lie in [0, 1]: {tuple(t)}")


def pickands(df: DependenceFunctions, point: TauVector) -> Number:
    """Evaluate the Pickands function at a simplex point.

    ``point`` may carry all ``df.dim`` coordinates (summing to one) or the
    first ``df.dim - 1`` (the last is implied).  Raises ``ValueError`` off
    the simplex.
    """
    point = tuple(point)
    if len(point) == df.dim - 1:
        total = sum(point)
        if total > 1:
            raise ValueError(f"simplex coordinates sum to {total} > 1")
        point = point + (1 - total,)
    elif len(point) != df.dim:
        raise ValueError(
            f"expected {df.dim} or {df.dim - 1} coordinates, got {len(point)}"
        )
    return df.D(point)


def logistic_D(alpha: Number, beta: Number) -> float:
    """Logistic (Gumbel) Pickands function ``((a**(1/b) + (1-a)**(1/b)))**b``."""
    a = float(alpha)
    b = float(beta)
    if not 0 < b <= 1:
        raise ValueError(f"beta must lie in (0, 1], got {beta}")
    if not 0 <= a <= 1:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if a == 0.0 or a == 1.0 or b == 1.0:
        return 1.0
    inv = 1.0 / b
    return (a**inv + (1.0 - a) ** inv) ** b


# ---------------------------------------------------------------------------
# catalog


def closed_form(example: ExampleId) -> DependenceFunctions:
    """Return the closed-form dependence bundle for a catalog example."""
    dim = example.dim

    def wrap2(profile: Callable[[Number], Number]) -> Callable[[TauVector], Number]:
        def theta(tau: TauVector) -> Number:
            total = tau[0] + tau[1]
            if total == 0:
                raise ValueError("direction undefined for zero total mass")
            return profile(tau[0] / total)

        return theta

    if example is ExampleId.CommonPoint_3_1_1:
        marginals: Tuple[Number, ...] = (1, 1)
        gamma_hat, theta = _gamma_hat_max, lambda tau: 1
    elif example is ExampleId.DisjointPoints_3_1_2:
        marginals = (1, 1)
        gamma_hat, theta = _gamma_hat_sum, lambda tau: 1
    elif example is ExampleId.LinkedNonPeriodic_3_2_1:
        marginals = (1, 1)
        gamma_hat, theta = _gamma_hat_sum, wrap2(theta_linked_nonperiodic)
    elif example is ExampleId.LinkedPeriodic_3_2_2:
        marginals = (_F(3, 4), _F(3, 4))
        gamma_hat, theta = _gamma_hat_sum, wrap2(theta_linked_periodic)
    elif example is ExampleId.LinkedPeriodic2_3_2_3:
        marginals = (1, _F(2, 3))
        gamma_hat, theta = _gamma_hat_sum, wrap2(theta_linked_to_fixed)
    elif example is ExampleId.OverlapNonPeriodic_3_3_2:
        marginals = (_F(3, 4), _F(3, 4))
        gamma_hat, theta = _gamma_hat_half_overlap, wrap2(theta_overlap_pair)
    elif example is ExampleId.Trivariate_3_3_3:
        marginals = (1, 1, 1)
        gamma_hat = _gamma_hat_sum

        def theta(tau: TauVector) -> Number:
            total = sum(tau)
            if total == 0:
                raise ValueError("direction undefined for zero total mass")
            return theta_trivariate(tau[0] / total, tau[1] / total)

    elif example is ExampleId.OverlapPeriodic_3_3_4:
        marginals = (_F(2, 3), _F(2, 3))
        gamma_hat = _gamma_hat_half_overlap
        theta = wrap2(
            lambda a: theta_overlap_pair(a, deriv=3, theta_shared=_F(2, 3))
        )
    elif example is ExampleId.CatMap_3_4:
        marginals = ((SQRT5 - 1) / 2, 1)
        gamma_hat, theta = _gamma_hat_sum, wrap2(theta_cat)
    else:  # pragma: no cover - exhaustive over the enum
        raise ValueError(f"unknown example {example!r}")

    return DependenceFunctions(
        dim=dim,
        marginals=marginals,
        gamma_hat=gamma_hat,
        theta=theta,
        label=example.name,
    )


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of the structural checks on a dependence bundle."""

    passed: bool
    failures: Tuple[str, ...]
    checks: int


_BOUND_SLACK = 1e-9


def validate(
    df: DependenceFunctions,
    *,
    simplex_step: Number = _F(1, 100),
    t_step: Optional[float] = None,
    tol: float = 1e-12,
) -> ValidationReport:
    """Check the structural properties a dependence bundle must satisfy.

    Verifies homogeneity of ``gamma_hat`` and scale invariance of ``theta``,
    the elementary bounds ``max tau <= gamma_hat(tau) <= sum tau``, Pickands
    bounds and convexity of ``D`` on the simplex grid, copula bounds
    ``prod t <= C(t) <= min t``, max-stability ``C(t**c) = C(t)**c``, the
    marginal power laws, and the consistency chain linking ``G``, ``H``,
    ``copula`` and ``gamma``.  Every violation is reported with the grid
    point that produced it.
    """
    d = df.dim
    if t_step is None:
        t_step = 0.01 if d == 2 else 0.05
    m = int(round(1 / float(simplex_step)))
    failures = []
    checks = 0

    # simplex grid and Pickands bounds
    if d == 2:
        simplex = [(k / m, (m - k) / m) for k in range(m + 1)]
    elif d == 3:
        simplex = [
            (i / m, j / m, (m - i - j) / m)
            for i in range(m + 1)
            for j in range(m + 1 - i)
        ]
    else:
        raise ValueError(f"validation supports dimensions 2 and 3, got {d}")

    d_vals = {}
    for p in simplex:
        v = float(df.D(p))
        d_vals[p] = v
        lo = max(p)
        checks += 2
        if v < lo - _BOUND_SLACK:
            failures.append(
                f"pickands lower bound violated at alpha={p}: D={v:.12g} < {lo:.12g}"
            )
        if v > 1 + _BOUND_SLACK:
            failures.append(
                f"pickands upper bound violated at alpha={p}: D={v:.12g} > 1"
            )

    # convexity along straight grid lines
    def convexity(line):
        nonlocal checks
        vals = [d_vals[p] for p in line]
        for i in range(1, len(vals) - 1):
            checks += 1
            bend = vals[i - 1] + vals[i + 1] - 2 * vals[i]
            if bend < -_BOUND_SLACK:
                failures.append(
                    f"pickands convexity violated near alpha={line[i]}: bend {bend:.3g}"
                )

    if d == 2:
        convexity(simplex)
    else:
        by_index = {(round(p[0] * m), round(p[1] * m)): p for p in simplex}
        for i in range(m + 1):
            convexity([by_index[(i, j)] for j in range(m + 1 - i)])
        for j in range(m + 1):
            convexity([by_index[(i, j)] for i in range(m + 1 - j)])
        for k in range(m + 1):
            convexity([by_index[(i, k - i)] for i in range(k + 1)])

    # tau-level checks on a subsampled grid
    stride = max(1, m // 10)
    taus = [
        tuple(x * scale for x in p)
        for p in simplex[:: max(1, len(simplex) // (m // stride + 1))]
        for scale in (0.5, 1.0, 2.5)
    ]
    for tau in taus:
        gh = float(df.gamma_hat(tau))
        th = float(df.theta(tau))
        checks += 3
        if not max(tau) - _BOUND_SLACK <= gh <= sum(tau) + _BOUND_SLACK:
            failures.append(
                f"gamma_hat bounds violated at tau={tau}: {gh:.12g} "
                f"not in [{max(tau):.12g}, {sum(tau):.12g}]"
            )
        if not -tol <= th <= 1 + tol:
            failures.append(f"theta out of [0, 1] at tau={tau}: {th:.12g}")
        g = df.G(tau)
        t = tuple(math.exp(-x) for x in tau)
        if abs(df.H(t) - g) > tol:
            failures.append(f"H(exp(-tau)) != G(tau) at tau={tau}")
        checks += 1
        if abs(df.copula(t) - math.exp(-float(df.gamma(tau)))) > tol:
            failures.append(f"copula/gamma mismatch at tau={tau}")
        for c in (2, 3, 0.5):
            scaled = tuple(c * x for x in tau)
            checks += 2
            if abs(float(df.gamma_hat(scaled)) - c * gh) > _BOUND_SLACK * max(1.0, c * abs(gh)):
                failures.append(f"gamma_hat not homogeneous at tau={tau}, c={c}")
            if abs(float(df.theta(scaled)) - th) > _BOUND_SLACK:
                failures.append(f"theta not scale invariant at tau={tau}, c={c}")

    # marginal power laws
    for j, marg in enumerate(df.marginals):
        for t_val in (0.1, 0.4, 0.8):
            vec = tuple(t_val if i == j else 1.0 for i in range(d))
            checks += 1
            if abs(df.H(vec) - t_val ** float(marg)) > tol:
                failures.append(
                    f"marginal law violated in coordinate {j} at t={t_val}"
                )

    # copula bounds and max-stability on a t-grid
    steps = int(round(1 / t_step))
    t_values = [k / steps for k in range(1, steps + 1)]
    for point in itertools.product(t_values, repeat=d):
        c_val = df.copula(point)
        checks += 2
        upper = min(point)
        lower = math.prod(point)
        if c_val > upper + _BOUND_SLACK:
            failures.append(
                f"copula upper bound violated at t={point}: {c_val:.12g} > {upper:.12g}"
            )
        if c_val < lower - _BOUND_SLACK:
            failures.append(
                f"copula lower bound violated at t={point}: {c_val:.12g} < {lower:.12g}"
            )

    coarse = t_values[:: max(1, steps // 5)]
    for point in itertools.product(coarse, repeat=d):
        c_val = df.copula(point)
        for c in (2, 3, 0.5):
            checks += 1
            powered = df.copula(tuple(x**c for x in point))
            if abs(powered - c_val**c) > _BOUND_SLACK:
                failures.append(f"max-stability violated at t={point}, c={c}")

    return ValidationReport(
        passed=not failures, failures=tuple(failures), checks=checks
    )
