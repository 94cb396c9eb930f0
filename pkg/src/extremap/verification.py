"""Cross-verification suite: exact engine vs closed-form catalog vs Monte Carlo.

Every public check returns a :class:`CheckResult` with a single pass/fail
verdict and a human-readable detail string naming the first offending grid
cell when something disagrees.  :func:`run_all` executes the whole battery in
a fixed order, optionally restricted to exact-only or MC-only checks.
"""

from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, List, Optional, Sequence

from .dependence import (
    DependenceFunctions,
    ExampleId,
    closed_form,
    logistic_D,
    validate,
)
from .engine import delta_prime, gamma_hat, theta_exact
from .geometry import IntervalSet, ball
from .mc import mc_block_maxima, mc_theta_runs
from .presets import preset
from .quadratic import SQRT5
from .reporting import closed_form_curves, logistic_curves, write_curves

__all__ = [
    "CheckResult",
    "DEFAULT_SEED",
    "check_block_maxima_limit",
    "check_cat_theta",
    "check_delta_prime",
    "check_exact_catalog",
    "check_figures",
    "check_gamma_hat_forms",
    "check_marginals",
    "check_validator_and_geometry",
    "run_all",
]

_F = Fraction

DEFAULT_SEED = 20260816

Catalog = Callable[[ExampleId], DependenceFunctions]


@dataclass(frozen=True)
class CheckResult:
    """One named verification verdict."""

    name: str
    passed: bool
    detail: str

    @property
    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def _result(name: str, failures: List[str], detail: str) -> CheckResult:
    if failures:
        shown = "; ".join(failures[:4])
        more = f" (+{len(failures) - 4} more)" if len(failures) > 4 else ""
        return CheckResult(name, False, shown + more)
    return CheckResult(name, True, detail)


# ---------------------------------------------------------------------------
# exact engine vs catalog


_SPOT_HALF = {
    ExampleId.LinkedNonPeriodic_3_2_1: _F(3, 4),
    ExampleId.LinkedPeriodic_3_2_2: _F(1, 2),
    ExampleId.LinkedPeriodic2_3_2_3: _F(2, 3),
    ExampleId.OverlapNonPeriodic_3_3_2: _F(2, 3),
    ExampleId.OverlapPeriodic_3_3_4: _F(2, 3),
}


def check_exact_catalog(
    n: int = 2**18,
    examples: Optional[Sequence[ExampleId]] = None,
    catalog: Catalog = closed_form,
    grid_step: Fraction = _F(1, 20),
) -> CheckResult:
    """Exact cluster ratios equal the catalog's piecewise formulas, cell by cell."""
    chosen = [e for e in (examples or list(ExampleId)) if e.is_circle]
    m = int(round(1 / grid_step))
    failures: List[str] = []
    cells = 0
    for example in chosen:
        p = preset(example)
        df = catalog(example)
        if example.dim == 2:
            directions = [(_F(k, m), _F(m - k, m)) for k in range(1, m)]
        else:
            directions = [
                (_F(i, m), _F(j, m), _F(m - i - j, m))
                for i in range(1, m)
                for j in range(1, m - i + 1)
            ]
        for tau in directions:
            want = df.theta(tau)
            for q in p.agreement_qs:
                cells += 1
                got = theta_exact(p.map_spec, p.observables, tau, n=n, q=q).exact
                if got != want:
                    failures.append(
                        f"{example.name} alpha={tuple(tau)} q={q}: "
                        f"engine {got} != catalog {want}"
                    )
            if len(failures) > 8:
                break
        if example in _SPOT_HALF:
            half = (_F(1, 2), _F(1, 2))
            cells += 1
            if df.theta(half) != _SPOT_HALF[example]:
                failures.append(
                    f"{example.name} alpha=(1/2,1/2): catalog {df.theta(half)} "
                    f"!= reference {_SPOT_HALF[example]}"
                )
    return _result(
        "exact-catalog-agreement",
        failures,
        f"{cells} grid cells agree exactly (rational arithmetic, n={n})",
    )


def check_gamma_hat_forms(n: int = 2**18) -> CheckResult:
    """The three catalog stable-dependence closed forms hold exactly."""
    grid = [
        (_F(1), _F(1)),
        (_F(1), _F(2)),
        (_F(2), _F(1)),
        (_F(1, 2), _F(3, 2)),
        (_F(3, 10), _F(17, 10)),
        (_F(7, 5), _F(3, 5)),
    ]
    cases = [
        (ExampleId.CommonPoint_3_1_1, lambda t: max(t), "max"),
        (ExampleId.DisjointPoints_3_1_2, lambda t: sum(t), "sum"),
        (
            ExampleId.OverlapNonPeriodic_3_3_2,
            lambda t: sum(t) - min(t) / 2,
            "sum - min/2",
        ),
    ]
    failures: List[str] = []
    cells = 0
    for example, formula, label in cases:
        p = preset(example)
        for tau in grid:
            cells += 1
            got = gamma_hat(p.observables, tau, n).exact
            want = formula(tau)
            if got != want:
                failures.append(
                    f"{example.name} tau={tuple(tau)}: {got} != {label} = {want}"
                )
    return _result(
        "gamma-hat-forms", failures, f"{cells} rational grid cells match exactly"
    )


# ---------------------------------------------------------------------------
# Monte Carlo limits


def check_block_maxima_limit(
    trials: int = 200_000, seed: int = DEFAULT_SEED, n: int = 5000
) -> CheckResult:
    """Empirical no-exceedance frequency approaches exp(-theta * gamma_hat)."""
    targets = [
        ExampleId.DisjointPoints_3_1_2,
        ExampleId.LinkedPeriodic_3_2_2,
        ExampleId.OverlapNonPeriodic_3_3_2,
    ]
    failures: List[str] = []
    details: List[str] = []
    tau = (_F(1), _F(1))
    for offset, example in enumerate(targets):
        p = preset(example)
        target = closed_form(example).G(tau)
        est = mc_block_maxima(
            p.map_spec, p.observables, tau, n=n, trials=trials, seed=seed + offset
        )
        tol = 3 * (est.stderr or 0.0) + 0.01
        gap = abs(est.value - target)
        if gap > tol:
            failures.append(
                f"{example.name}: |{est.value:.5f} - {target:.5f}| = {gap:.5f} > {tol:.5f}"
            )
        details.append(f"{example.name} {est.value:.4f}~{target:.4f}")
    return _result(
        "block-maxima-limit",
        failures,
        f"n={n}, trials={trials}: " + ", ".join(details),
    )


_CAT_FIT_ALPHAS = (
    _F(1, 10),
    _F(3, 10),
    _F(1, 2),
    _F(17, 20),
    _F(9, 10),
    _F(19, 20),
)
_CAT_REQUIRED = {_F(3, 10), _F(1, 2), _F(9, 10)}


def _fit_line(points: Sequence[tuple]) -> tuple:
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    k = len(points)
    mx = sum(xs) / k
    my = sum(ys) / k
    var = sum((x - mx) ** 2 for x in xs)
    cov = sum((x - mx) * (y - my) for x, y in points)
    slope = cov / var
    return my - slope * mx, slope


def check_cat_theta(
    orbit: int = 10**7,
    seed: int = DEFAULT_SEED,
    n: int = 1000,
    q: int = 2,
) -> CheckResult:
    """Toral-automorphism cluster ratios match the two-branch profile; the
    fitted branch intersection lands near the true breakpoint."""
    p = preset(ExampleId.CatMap_3_4)
    df = closed_form(ExampleId.CatMap_3_4)
    failures: List[str] = []
    estimates = {}
    for i, a in enumerate(_CAT_FIT_ALPHAS):
        tau = (a, 1 - a)
        est = mc_theta_runs(
            p.map_spec,
            p.observables,
            tau,
            n=n,
            q=q,
            orbit_length=orbit,
            seed=seed + 10 * i,
        )
        estimates[a] = est
        if a in _CAT_REQUIRED:
            target = float(df.theta(tau))
            tol = 3 * (est.stderr or 0.0) + 0.01
            gap = abs(est.value - target)
            if gap > tol:
                failures.append(
                    f"alpha={a}: |{est.value:.5f} - {target:.5f}| = {gap:.5f} > {tol:.5f}"
                )
    left = [(float(a), estimates[a].value) for a in _CAT_FIT_ALPHAS if a <= _F(1, 2)]
    right = [(float(a), estimates[a].value) for a in _CAT_FIT_ALPHAS if a >= _F(17, 20)]
    intercept, slope = _fit_line(left)
    through_origin = sum(x * y for x, y in right) / sum(x * x for x, _ in right)
    breakpoint_hat = intercept / (through_origin - slope)
    if not 0.70 < breakpoint_hat < 0.82:
        failures.append(
            f"fitted branch intersection {breakpoint_hat:.4f} outside (0.70, 0.82)"
        )
    return _result(
        "cat-map-theta",
        failures,
        f"orbit={orbit}: profile matched at 3 directions, "
        f"breakpoint fit {breakpoint_hat:.4f} (true {float(3 - SQRT5):.4f})",
    )


def check_marginals(
    n: int = 2**18,
    mc: bool = True,
    orbit: int = 4 * 10**6,
    seed: int = DEFAULT_SEED + 1,
    exact: bool = True,
) -> CheckResult:
    """Per-coordinate extremal indices from single-component thresholds."""
    cases = {
        ExampleId.LinkedNonPeriodic_3_2_1: (_F(1), _F(1)),
        ExampleId.LinkedPeriodic_3_2_2: (_F(3, 4), _F(3, 4)),
        ExampleId.LinkedPeriodic2_3_2_3: (_F(1), _F(2, 3)),
        ExampleId.OverlapPeriodic_3_3_4: (_F(2, 3), _F(2, 3)),
    }
    failures: List[str] = []
    cells = 0
    if exact:
        for example, margins in cases.items():
            p = preset(example)
            for j, want in enumerate(margins):
                tau = tuple(_F(1) if i == j else _F(0) for i in range(2))
                cells += 1
                got = theta_exact(p.map_spec, p.observables, tau, n=n, q=p.q).exact
                if got != want:
                    failures.append(
                        f"{example.name} coordinate {j}: {got} != {want}"
                    )
    if mc:
        p = preset(ExampleId.CatMap_3_4)
        lam_inv = float((SQRT5 - 1) / 2)
        for j, want in enumerate((lam_inv, 1.0)):
            tau = tuple(_F(1) if i == j else _F(0) for i in range(2))
            cells += 1
            est = mc_theta_runs(
                p.map_spec,
                p.observables,
                tau,
                n=1000,
                q=2,
                orbit_length=orbit,
                seed=seed + j,
            )
            tol = 3 * (est.stderr or 0.0) + 1e-9
            if abs(est.value - want) > tol:
                failures.append(
                    f"{ExampleId.CatMap_3_4.name} coordinate {j}: "
                    f"|{est.value:.5f} - {want:.5f}| > {tol:.5f}"
                )
    return _result(
        "marginal-indices", failures, f"{cells} marginal indices reproduced"
    )


# ---------------------------------------------------------------------------
# structural properties


def check_validator_and_geometry(
    instances: int = 10**4, seed: int = DEFAULT_SEED + 2
) -> CheckResult:
    """Catalog + logistic family pass the validator; exact set algebra obeys
    additivity and De Morgan laws on randomized instances."""
    failures: List[str] = []
    for example in ExampleId:
        report = validate(closed_form(example))
        if not report.passed:
            failures.append(f"{example.name}: {report.failures[0]}")
    for k in range(1, 10):
        beta = k / 10
        df = DependenceFunctions.from_pickands(
            lambda alpha, b=beta: logistic_D(alpha[0], b), dim=2, label="logistic"
        )
        report = validate(df)
        if not report.passed:
            failures.append(f"logistic beta={beta}: {report.failures[0]}")

    rng = random.Random(seed)

    def random_set() -> IntervalSet:
        out = IntervalSet.empty()
        for _ in range(rng.randint(0, 3)):
            center = _F(rng.randint(0, 63), 64)
            radius = _F(rng.randint(1, 31), 256)
            out = out.union(ball(center, radius))
        return out

    algebra_checked = 0
    for i in range(instances):
        a, b = random_set(), random_set()
        union, inter = a.union(b), a.intersect(b)
        if union.measure + inter.measure != a.measure + b.measure:
            failures.append(f"additivity violated at instance {i}")
            break
        if union.complement() != a.complement().intersect(b.complement()):
            failures.append(f"De Morgan (union) violated at instance {i}")
            break
        if inter.complement() != a.complement().union(b.complement()):
            failures.append(f"De Morgan (intersection) violated at instance {i}")
            break
        if a.difference(b) != a.intersect(b.complement()):
            failures.append(f"difference identity violated at instance {i}")
            break
        algebra_checked += 1
    return _result(
        "validator-and-geometry",
        failures,
        f"{len(list(ExampleId))} catalog entries + 9 logistic curves validated, "
        f"{algebra_checked} randomized set-algebra instances",
    )


def check_delta_prime(
    examples: Optional[Sequence[ExampleId]] = None,
) -> CheckResult:
    """Co-recurrence partial sums vanish exactly at the stabilizing depth and
    stay strictly positive one step below it for the periodic examples."""
    failures: List[str] = []
    details: List[str] = []
    chosen = examples or list(ExampleId)
    for example in chosen:
        p = preset(example)
        c = p.delta_check
        if c is None:
            continue
        # the reference diagnostic truncates at absolute lag 20, whatever q is
        res = delta_prime(
            p.map_spec, p.observables, c.tau, n=c.n, q=c.q_stab,
            j_cap=20 - c.q_stab,
        )
        if res.exact != 0:
            failures.append(
                f"{example.name} q={c.q_stab} n=2^{c.n.bit_length() - 1}: "
                f"partial sum {res.exact} != 0"
            )
        details.append(f"{example.name}:0@q={c.q_stab}")
        if c.positive_below:
            below = delta_prime(
                p.map_spec, p.observables, c.tau, n=c.n, q=c.q_stab - 1,
                j_cap=20 - (c.q_stab - 1),
            )
            if not below.exact > 0:
                failures.append(
                    f"{example.name} q={c.q_stab - 1}: partial sum "
                    f"{below.exact} not strictly positive"
                )
            details[-1] += f",+@q={c.q_stab - 1}"
    return _result(
        "anti-clustering-partial-sums", failures, " ".join(details)
    )


# ---------------------------------------------------------------------------
# figure reproduction from emitted CSV


def _emit_and_parse(rows) -> List[dict]:
    buf = io.StringIO()
    write_curves(buf, rows)
    return list(csv.DictReader(io.StringIO(buf.getvalue())))


def check_figures(step: Fraction = _F(1, 100)) -> CheckResult:
    """Re-parse emitted closed-form CSVs and confirm the reference curve
    shapes: plateau values, breakpoints, endpoints, and family ordering."""
    failures: List[str] = []

    def check_curve(example: ExampleId, d_formula, label: str) -> None:
        parsed = _emit_and_parse(closed_form_curves(example, step))
        for row in parsed:
            alpha = float(row["alpha"])
            want = d_formula(alpha)
            got = float(row["D"])
            if abs(got - want) > 1e-12:
                failures.append(
                    f"{example.name} alpha={alpha}: D={got!r} != {label} {want!r}"
                )
                return

    check_curve(
        ExampleId.LinkedPeriodic_3_2_2,
        lambda a: max(a, 1 - a, 2 / 3),
        "max(alpha, 1-alpha, 2/3)",
    )
    check_curve(
        ExampleId.OverlapPeriodic_3_3_4,
        lambda a: max(a, 1 - a, 3 / 4),
        "max(alpha, 1-alpha, 3/4)",
    )
    check_curve(
        ExampleId.CatMap_3_4, lambda a: max(1 - a / 2, a), "max(1-alpha/2, alpha)"
    )

    # endpoints of the toral curve
    cat_rows = _emit_and_parse(closed_form_curves(ExampleId.CatMap_3_4, step))
    for row in (cat_rows[0], cat_rows[-1]):
        if abs(float(row["D"]) - 1.0) > 1e-12:
            failures.append(f"CatMap_3_4 endpoint alpha={row['alpha']}: D != 1")

    # logistic family ordering: D nondecreasing in beta pointwise
    betas = [k / 10 for k in range(1, 10)]
    logistic_rows = _emit_and_parse(logistic_curves(betas, step))
    by_alpha: dict = {}
    for row in logistic_rows:
        by_alpha.setdefault(row["alpha"], []).append(
            (float(row["beta"]), float(row["D"]))
        )
    for alpha, pairs in by_alpha.items():
        pairs.sort()
        values = [v for _, v in pairs]
        if any(x > y + 1e-12 for x, y in zip(values, values[1:])):
            failures.append(f"logistic family not ordered in beta at alpha={alpha}")
            break

    return _result(
        "figure-reproduction",
        failures,
        "plateaus, breakpoints, endpoints and family ordering reproduced from CSV",
    )


# ---------------------------------------------------------------------------
# orchestration


def run_all(
    mode: str = "both",
    examples: Optional[Sequence[ExampleId]] = None,
    catalog: Catalog = closed_form,
    seed: int = DEFAULT_SEED,
    fast: bool = False,
    emit: Optional[Callable[[str], None]] = None,
) -> List[CheckResult]:
    """Run the verification battery in order; returns all verdicts.

    ``mode`` is ``exact`` (deterministic checks only), ``mc`` (stochastic
    only), or ``both``.  ``fast`` shrinks stochastic sample sizes for smoke
    runs; exact checks always run at full resolution.
    """
    if mode not in ("exact", "mc", "both"):
        raise ValueError(f"mode must be exact, mc or both, got {mode!r}")
    results: List[CheckResult] = []

    def add(result: CheckResult) -> None:
        results.append(result)
        if emit is not None:
            emit(result.line)

    run_exact = mode in ("exact", "both")
    run_mc = mode in ("mc", "both")

    if run_exact:
        add(check_exact_catalog(examples=examples, catalog=catalog))
        add(check_gamma_hat_forms())
    if run_mc:
        add(
            check_block_maxima_limit(
                trials=20_000 if fast else 200_000, seed=seed
            )
        )
        add(check_cat_theta(orbit=10**6 if fast else 10**7, seed=seed))
    add(
        check_marginals(
            exact=run_exact,
            mc=run_mc,
            orbit=10**6 if fast else 4 * 10**6,
            seed=seed + 1,
        )
    )
    if run_exact:
        add(
            check_validator_and_geometry(
                instances=500 if fast else 10**4, seed=seed + 2
            )
        )
        add(check_delta_prime(examples=examples))
        add(check_figures())
    return results
