"""Closed-form catalog oracles and dependence-function algebra checks.

Expected values are the catalog's piecewise formulas, evaluated by hand at
rational grid points and frozen here as exact fractions (exact quadratic
irrationals for the toral family).
"""

import math
from fractions import Fraction as F

import pytest

from extremap.dependence import (
    DependenceFunctions,
    ExampleId,
    closed_form,
    logistic_D,
    pickands,
    validate,
)
from extremap.quadratic import SQRT5, Sqrt5

ALL_IDS = list(ExampleId)
GRID = [F(k, 20) for k in range(21)]


def test_example_id_roster():
    names = {e.name for e in ALL_IDS}
    assert names == {
        "CommonPoint_3_1_1",
        "DisjointPoints_3_1_2",
        "LinkedNonPeriodic_3_2_1",
        "LinkedPeriodic_3_2_2",
        "LinkedPeriodic2_3_2_3",
        "OverlapNonPeriodic_3_3_2",
        "Trivariate_3_3_3",
        "OverlapPeriodic_3_3_4",
        "CatMap_3_4",
    }
    assert ExampleId.Trivariate_3_3_3.dim == 3
    assert ExampleId.CatMap_3_4.dim == 2
    assert not ExampleId.CatMap_3_4.is_circle
    assert ExampleId.LinkedPeriodic_3_2_2.is_circle


# ---------------------------------------------------------------------------
# theta piecewise tables (exact)


def _theta_linked_nonper(a):
    return 1 - a if a <= F(1, 3) else (1 + a) / 2


def _theta_linked_per(a):
    if a <= F(1, 3):
        return F(3, 4) * (1 - a)
    if a <= F(2, 3):
        return F(1, 2)
    return F(3, 4) * a


def _theta_linked_fixed(a):
    return F(2, 3) * (1 - a) if a <= F(1, 4) else (1 + 2 * a) / 3


def _theta_overlap(a):
    if a <= F(1, 3):
        return (3 - 3 * a) / (4 - 2 * a)
    if a <= F(1, 2):
        return 1 / (2 - a)
    if a <= F(2, 3):
        return 1 / (1 + a)
    return 3 * a / (2 + 2 * a)


def _theta_overlap_fixed(a):
    if a <= F(1, 4):
        return F(4, 3) * (1 - a) / (2 - a)
    if a <= F(1, 2):
        return 1 / (2 - a)
    if a <= F(3, 4):
        return 1 / (1 + a)
    return F(4, 3) * a / (1 + a)


def _theta_cat(a):
    if a <= 3 - SQRT5:
        return 1 - (5 - SQRT5) * a / 4
    return (SQRT5 - 1) * a / 2


THETA_TABLES = [
    (ExampleId.CommonPoint_3_1_1, lambda a: F(1)),
    (ExampleId.DisjointPoints_3_1_2, lambda a: F(1)),
    (ExampleId.LinkedNonPeriodic_3_2_1, _theta_linked_nonper),
    (ExampleId.LinkedPeriodic_3_2_2, _theta_linked_per),
    (ExampleId.LinkedPeriodic2_3_2_3, _theta_linked_fixed),
    (ExampleId.OverlapNonPeriodic_3_3_2, _theta_overlap),
    (ExampleId.OverlapPeriodic_3_3_4, _theta_overlap_fixed),
    (ExampleId.CatMap_3_4, _theta_cat),
]


@pytest.mark.parametrize("example, reference", THETA_TABLES, ids=lambda p: getattr(p, "name", ""))
def test_theta_matches_piecewise_table(example, reference):
    df = closed_form(example)
    for a in GRID:
        tau = (a, 1 - a)
        got = df.theta(tau)
        assert got == reference(a), f"alpha={a}"
        # scale invariance: only the direction of tau matters
        assert df.theta((3 * a, 3 * (1 - a))) == got


def test_theta_trivariate_formula():
    df = closed_form(ExampleId.Trivariate_3_3_3)
    assert df.theta((F(1), F(1), F(1))) == F(2, 3)
    for a, b in [(F(1, 10), F(3, 10)), (F(2, 5), F(2, 5)), (F(1, 2), F(1, 2)), (F(9, 10), F(1, 20))]:
        c = 1 - a - b
        expected = 1 - min(a, c / 2) - min(b, c / 2)
        assert df.theta((a, b, c)) == expected


def test_theta_spot_values_from_case_tables():
    half = F(1, 2)
    assert closed_form(ExampleId.LinkedNonPeriodic_3_2_1).theta((half, half)) == F(3, 4)
    assert closed_form(ExampleId.LinkedPeriodic_3_2_2).theta((half, half)) == F(1, 2)
    assert closed_form(ExampleId.LinkedPeriodic2_3_2_3).theta((half, half)) == F(2, 3)
    assert closed_form(ExampleId.OverlapNonPeriodic_3_3_2).theta((half, half)) == F(2, 3)
    assert closed_form(ExampleId.OverlapPeriodic_3_3_4).theta((half, half)) == F(2, 3)


def test_theta_cat_branch_values():
    df = closed_form(ExampleId.CatMap_3_4)
    assert float(df.theta((F(3, 10), F(7, 10)))) == pytest.approx(0.7927050983124842)
    assert float(df.theta((F(1, 2), F(1, 2)))) == pytest.approx((3 + math.sqrt(5)) / 8)
    assert float(df.theta((F(9, 10), F(1, 10)))) == pytest.approx(0.9 * (math.sqrt(5) - 1) / 2)
    # the two branches meet exactly at 3 - sqrt(5)
    a_star = 3 - SQRT5
    left = 1 - (5 - SQRT5) * a_star / 4
    right = (SQRT5 - 1) * a_star / 2
    assert left == right
    assert float(a_star) == pytest.approx(0.7639320225002102)


# ---------------------------------------------------------------------------
# gamma_hat and marginals


def test_gamma_hat_forms():
    tau = (F(2, 5), F(9, 5))
    assert closed_form(ExampleId.CommonPoint_3_1_1).gamma_hat(tau) == F(9, 5)
    assert closed_form(ExampleId.DisjointPoints_3_1_2).gamma_hat(tau) == F(11, 5)
    assert closed_form(ExampleId.OverlapNonPeriodic_3_3_2).gamma_hat(tau) == F(11, 5) - F(1, 5)
    assert closed_form(ExampleId.CatMap_3_4).gamma_hat(tau) == F(11, 5)
    assert closed_form(ExampleId.Trivariate_3_3_3).gamma_hat((F(1), F(2), F(3))) == F(6)


def test_marginals():
    assert closed_form(ExampleId.LinkedNonPeriodic_3_2_1).marginals == (1, 1)
    assert closed_form(ExampleId.LinkedPeriodic_3_2_2).marginals == (F(3, 4), F(3, 4))
    assert closed_form(ExampleId.LinkedPeriodic2_3_2_3).marginals == (1, F(2, 3))
    assert closed_form(ExampleId.OverlapPeriodic_3_3_4).marginals == (F(2, 3), F(2, 3))
    cat = closed_form(ExampleId.CatMap_3_4).marginals
    assert cat[1] == 1
    assert cat[0] == (SQRT5 - 1) / 2
    # theta at a coordinate direction reproduces the marginal index
    for example in ALL_IDS:
        df = closed_form(example)
        for j, m in enumerate(df.marginals):
            tau = tuple(F(7, 2) if i == j else F(0) for i in range(df.dim))
            assert df.theta(tau) == m


# ---------------------------------------------------------------------------
# derived objects: D, Gamma, G, H, copula


def _d_max(a):
    return max(a, 1 - a)


D_TABLES = [
    (ExampleId.CommonPoint_3_1_1, _d_max),
    (ExampleId.DisjointPoints_3_1_2, lambda a: F(1)),
    (ExampleId.LinkedNonPeriodic_3_2_1, lambda a: max(1 - a, (1 + a) / 2)),
    (ExampleId.LinkedPeriodic_3_2_2, lambda a: max(a, 1 - a, F(2, 3))),
    (ExampleId.LinkedPeriodic2_3_2_3, lambda a: max(1 - a, (1 + a) / 2)),
    (ExampleId.OverlapNonPeriodic_3_3_2, lambda a: max(a, 1 - a, F(2, 3))),
    (ExampleId.OverlapPeriodic_3_3_4, lambda a: max(a, 1 - a, F(3, 4))),
    (ExampleId.CatMap_3_4, lambda a: max(1 - a / 2, a)),
]


@pytest.mark.parametrize("example, reference", D_TABLES, ids=lambda p: getattr(p, "name", ""))
def test_pickands_function_tables(example, reference):
    df = closed_form(example)
    for a in GRID:
        assert df.D((a, 1 - a)) == reference(a), f"alpha={a}"


def test_pickands_trivariate_equals_theta():
    df = closed_form(ExampleId.Trivariate_3_3_3)
    for a, b in [(F(1, 3), F(1, 3)), (F(1, 10), F(7, 10)), (F(2, 5), F(1, 5))]:
        assert df.D((a, b, 1 - a - b)) == df.theta((a, b, 1 - a - b))


def test_gamma_rescaled_identities():
    # Published closed forms for the rescaled dependence function.
    df2 = closed_form(ExampleId.LinkedPeriodic_3_2_2)
    df4 = closed_form(ExampleId.OverlapPeriodic_3_3_4)
    for tau in [(F(1), F(1)), (F(1, 4), F(5, 4)), (F(8, 5), F(2, 5))]:
        assert df2.gamma(tau) == F(4, 3) * df2.theta(tau) * df2.gamma_hat(tau)
        assert df4.gamma(tau) == F(3, 2) * df4.theta(tau) * df4.gamma_hat(tau)


def test_cat_pickands_spot_value_and_kink():
    df = closed_form(ExampleId.CatMap_3_4)
    assert df.D((F(1, 2), F(1, 2))) == F(3, 4)
    left = df.D((F(2, 3) - F(1, 10**6), F(1, 3) + F(1, 10**6)))
    at = df.D((F(2, 3), F(1, 3)))
    right = df.D((F(2, 3) + F(1, 10**6), F(1, 3) - F(1, 10**6)))
    assert abs(float(left) - float(at)) < 1e-5
    assert abs(float(right) - float(at)) < 1e-5
    assert df.D((F(0), F(1))) == 1 and df.D((F(1), F(0))) == 1


def test_consistency_chain_on_grid():
    taus2 = [(0.3, 0.7), (1.0, 1.0), (2.5, 0.1), (0.0, 1.2), (1.7, 0.0)]
    for example in ALL_IDS:
        df = closed_form(example)
        taus = taus2 if df.dim == 2 else [(0.3, 0.7, 1.1), (1.0, 1.0, 1.0), (2.0, 0.0, 0.5)]
        for tau in taus:
            g = df.G(tau)
            assert g == pytest.approx(
                math.exp(-float(df.theta(tau)) * float(df.gamma_hat(tau))), abs=1e-14
            )
            t = tuple(math.exp(-v) for v in tau)
            assert df.H(t) == pytest.approx(g, abs=1e-12)
            assert df.copula(t) == pytest.approx(math.exp(-float(df.gamma(tau))), abs=1e-12)


def test_marginal_law_is_power():
    for example in ALL_IDS:
        df = closed_form(example)
        for j, m in enumerate(df.marginals):
            for t in (0.2, 0.5, 0.9):
                vec = tuple(t if i == j else 1.0 for i in range(df.dim))
                assert df.H(vec) == pytest.approx(t ** float(m), abs=1e-12)


def test_copula_and_h_endpoints():
    for example in ALL_IDS:
        df = closed_form(example)
        ones = (1.0,) * df.dim
        zeros0 = (0.0,) + (1.0,) * (df.dim - 1)
        assert df.copula(ones) == 1.0
        assert df.H(ones) == 1.0
        assert df.copula(zeros0) == 0.0
        assert df.H(zeros0) == 0.0


# ---------------------------------------------------------------------------
# pickands() helper


def test_pickands_helper_accepts_short_and_full_coordinates():
    df = closed_form(ExampleId.LinkedPeriodic_3_2_2)
    assert pickands(df, (F(1, 2),)) == F(2, 3)
    assert pickands(df, (F(1, 2), F(1, 2))) == F(2, 3)
    tri = closed_form(ExampleId.Trivariate_3_3_3)
    assert pickands(tri, (F(1, 3), F(1, 3))) == F(2, 3)


def test_pickands_rejects_off_simplex():
    df = closed_form(ExampleId.CommonPoint_3_1_1)
    with pytest.raises(ValueError):
        pickands(df, (F(3, 2),))
    with pytest.raises(ValueError):
        pickands(df, (F(-1, 10),))
    with pytest.raises(ValueError):
        pickands(df, (F(1, 2), F(1, 4)))  # full coordinates must sum to 1


# ---------------------------------------------------------------------------
# logistic model


def test_logistic_values():
    assert logistic_D(0.0, 0.3) == 1.0
    assert logistic_D(1.0, 0.7) == 1.0
    assert logistic_D(0.37, 1.0) == pytest.approx(1.0)
    assert logistic_D(0.5, 0.5) == pytest.approx(math.sqrt(0.5))


def test_logistic_monotone_in_beta():
    alphas = [k / 50 for k in range(1, 50)]
    betas = [0.1, 0.3, 0.5, 0.7, 0.9]
    for a in alphas:
        vals = [logistic_D(a, b) for b in betas]
        assert all(x <= y + 1e-15 for x, y in zip(vals, vals[1:]))


def test_logistic_rejects_bad_beta():
    for beta in (0.0, -0.5, 1.5):
        with pytest.raises(ValueError):
            logistic_D(0.5, beta)


# ---------------------------------------------------------------------------
# validator


@pytest.mark.parametrize("example", ALL_IDS, ids=lambda e: e.name)
def test_validate_catalog_entry(example):
    report = validate(closed_form(example))
    assert report.passed, report.failures
    assert report.checks > 0


def test_validate_flags_corrupted_pickands_function():
    # D(alpha) = alpha^2 violates the lower dependence bound max(alpha, 1-alpha).
    broken = DependenceFunctions(
        dim=2,
        marginals=(F(1), F(1)),
        gamma_hat=lambda tau: sum(tau),
        theta=lambda tau: (tau[0] / (tau[0] + tau[1])) ** 2,
        label="corrupted",
    )
    report = validate(broken)
    assert not report.passed
    assert any("lower" in f or "bound" in f for f in report.failures)


def test_validate_logistic_family():
    for beta in (0.1, 0.5, 0.9):
        df = DependenceFunctions.from_pickands(
            lambda alpha, b=beta: logistic_D(alpha[0], b), dim=2
        )
        report = validate(df)
        assert report.passed, (beta, report.failures)
