"""Tests for observables: distance functionals, exact quantile thresholds,
exceedance geometry and overlap bookkeeping."""

import math
import random
from fractions import Fraction as F

import pytest

from extremap.dynamics import ToralAuto, eigen_data
from extremap.geometry import IntervalSet, TorusRect
from extremap.observables import (
    BoundedType,
    FinitePoints,
    InfeasibleThresholdError,
    LogType,
    Observable,
    ObservableSpec,
    ParetoType,
    UnstableSegment,
    evaluate,
    exceedance_set,
    frequency_vector,
    g_apply,
    g_inverse,
    overlap_fractions,
    thresholds,
)
from extremap.quadratic import Sqrt5

CAT = ToralAuto(((2, 1), (1, 1)))


def _obs(points, gtype=LogType()):
    return Observable(FinitePoints(tuple(F(p) for p in points)), gtype)


# ---------------------------------------------------------------------------
# observable evaluation


def test_evaluate_log_type():
    obs = _obs(["1/2"])
    x = 0.5 + 1 / math.e
    assert evaluate(obs, x) == pytest.approx(1.0, rel=1e-12)


def test_evaluate_pareto_type():
    obs = _obs([0], ParetoType(F(1)))
    assert evaluate(obs, F(1, 4)) == pytest.approx(4.0, rel=1e-12)


def test_evaluate_bounded_type_attains_bound():
    obs = _obs(["1/3"], BoundedType(bound=F(5), alpha=F(1)))
    assert evaluate(obs, F(1, 3)) == 5.0


def test_evaluate_infinite_at_maximal_point():
    obs = _obs(["1/2"])
    assert evaluate(obs, F(1, 2)) == math.inf


def test_evaluate_uses_circle_distance():
    obs = _obs([0], ParetoType(F(1)))
    assert evaluate(obs, F(9, 10)) == pytest.approx(10.0, rel=1e-12)


def test_evaluate_unstable_segment_distance():
    frame = eigen_data(CAT)
    seg = Observable(UnstableSegment(center=F(0), half_length=F(1, 64)), LogType())
    # a point displaced purely in the stable direction from the segment center
    s = 1e-3
    x = (-frame.e_stable[0] * s, -frame.e_stable[1] * s)
    d = math.exp(-evaluate(seg, x, frame=frame))
    assert d == pytest.approx(s, rel=1e-9)


# ---------------------------------------------------------------------------
# g and its inverse


def test_g_roundtrip():
    for gtype in (LogType(), ParetoType(F(2)), BoundedType(F(3), F(1, 2))):
        for t in (0.25, 0.01, 0.4):
            assert g_inverse(gtype, g_apply(gtype, t)) == pytest.approx(t, rel=1e-12)


# ---------------------------------------------------------------------------
# exact thresholds


def test_threshold_log_type_single_point():
    spec = ObservableSpec((_obs(["1/2"]),))
    tv = thresholds(spec, (F(1),), 100)
    assert tv.radii[0] == F(1, 200)
    assert tv.u[0] == pytest.approx(math.log(200), rel=1e-12)
    assert tv.sets[0].measure == F(1, 100)


def test_threshold_pareto_single_point():
    spec = ObservableSpec((_obs(["1/2"], ParetoType(F(1))),))
    tv = thresholds(spec, (F(1),), 100)
    assert tv.radii[0] == F(1, 200)
    assert tv.u[0] == pytest.approx(200.0, rel=1e-12)


def test_threshold_two_points_halves_radius():
    spec = ObservableSpec((_obs(["1/12", "1/6"]),))
    tv = thresholds(spec, (F(1),), 1024)
    assert tv.radii[0] == F(1, 4 * 1024)
    assert tv.sets[0].measure == F(1, 1024)


def test_threshold_zero_tau_component():
    spec = ObservableSpec((_obs(["1/2"]), _obs(["1/4"])))
    tv = thresholds(spec, (F(1), F(0)), 100)
    assert tv.u[1] == math.inf
    assert tv.radii[1] is None
    assert tv.sets[1].is_empty
    assert tv.sets[0].measure == F(1, 100)


def test_threshold_merging_balls():
    # Two points 1/50 apart: past radius 1/100 the balls merge and the
    # measure grows with slope 2 instead of 4.  Target mass 1/20 lands on the
    # merged branch: 2r + 1/50 = 1/20 gives r = 3/200 by hand.
    spec = ObservableSpec((_obs(["1/4", "27/100"]),))
    tv = thresholds(spec, (F(5),), 100)
    assert tv.radii[0] == F(3, 200)
    assert tv.sets[0].measure == F(1, 20)
    assert tv.sets[0].component_count == 1


def test_threshold_interval_boundary_clips():
    spec = ObservableSpec((_obs([0]),))
    tv = thresholds(spec, (F(1),), 100, boundary="interval")
    assert tv.radii[0] == F(1, 100)
    assert tv.sets[0] == IntervalSet.from_arcs([(F(0), F(1, 100))])
    assert tv.u[0] == pytest.approx(math.log(100), rel=1e-12)


def test_threshold_infeasible():
    spec = ObservableSpec((_obs(["1/2"]),))
    with pytest.raises(InfeasibleThresholdError):
        thresholds(spec, (F(150),), 100)


def test_threshold_exactness_randomized():
    rng = random.Random(808)
    gtypes = [LogType(), ParetoType(F(3, 2)), BoundedType(F(7), F(2))]
    for _ in range(100):
        m = rng.randint(1, 4)
        points = sorted({F(rng.randint(0, 839), 840) for _ in range(m)})
        gtype = rng.choice(gtypes)
        spec = ObservableSpec((Observable(FinitePoints(tuple(points)), gtype),))
        tau = F(rng.randint(1, 8), rng.choice([1, 2, 3]))
        n = rng.choice([64, 1024, 4096])
        boundary = rng.choice(["circle", "interval"])
        tv = thresholds(spec, (tau,), n, boundary=boundary)
        assert n * tv.sets[0].measure == tau


def test_threshold_type_independence():
    # Exact quantile sets depend only on the mass target, not on the g family.
    spec_log = ObservableSpec((_obs(["1/3", "2/3"]),))
    spec_par = ObservableSpec((_obs(["1/3", "2/3"], ParetoType(F(4))),))
    a = thresholds(spec_log, (F(1),), 512)
    b = thresholds(spec_par, (F(1),), 512)
    assert a.sets[0] == b.sets[0]


def test_threshold_nesting_in_tau():
    spec = ObservableSpec((_obs(["1/3"]),))
    small = thresholds(spec, (F(1),), 256)
    large = thresholds(spec, (F(2),), 256)
    assert small.sets[0].difference(large.sets[0]).is_empty
    assert small.u[0] > large.u[0]


def test_threshold_unstable_segment():
    lam_m1 = Sqrt5(F(2), F(1))  # lambda^2 - lambda = 2 + sqrt 5
    seg = Observable(
        UnstableSegment(center=Sqrt5(F(5, 128), F(2, 128)), half_length=lam_m1 / 128),
        LogType(),
    )
    spec = ObservableSpec((seg,))
    tv = thresholds(spec, (F(1),), 1000)
    rect = tv.sets[0]
    assert isinstance(rect, TorusRect)
    assert rect.axes == "eigen"
    assert rect.measure == F(1, 1000)


# ---------------------------------------------------------------------------
# exceedance sets


def test_exceedance_set_is_union_of_balls():
    obs = _obs(["1/4", "3/4"])
    s = exceedance_set(obs, F(1, 100))
    expected = IntervalSet.from_arcs(
        [(F(1, 4) - F(1, 100), F(1, 4) + F(1, 100)), (F(3, 4) - F(1, 100), F(3, 4) + F(1, 100))]
    )
    assert s == expected


def test_exceedance_set_consistent_with_evaluate():
    # x is in the exceedance set at radius r iff psi(x) > g(r).
    obs = _obs(["1/3"], ParetoType(F(2)))
    r = F(1, 50)
    s = exceedance_set(obs, r)
    u = g_apply(ParetoType(F(2)), r)
    for k in range(200):
        x = F(k, 200)
        assert s.contains(x) == (evaluate(obs, x) > u + 1e-12 or evaluate(obs, x) == math.inf)


# ---------------------------------------------------------------------------
# overlap bookkeeping


def _overlap_spec():
    z1 = FinitePoints((F(1, 12), F(1, 6)))
    z2 = FinitePoints((F(7, 12), F(1, 6)))
    return ObservableSpec((Observable(z1, LogType()), Observable(z2, LogType())))


def test_overlap_fractions_shared_point():
    res = overlap_fractions(_overlap_spec(), (F(1), F(1)), 4096)
    assert res.p == (F(1, 2), F(1, 2))
    assert res.q == (F(1), F(1))


def test_overlap_fractions_unequal_tau():
    res = overlap_fractions(_overlap_spec(), (F(1), F(2)), 4096)
    assert res.p == (F(1, 2), F(1, 2))
    assert res.q == (F(1), F(1, 2))


def test_overlap_fractions_disjoint():
    spec = ObservableSpec((_obs(["1/12"]), _obs(["1/10"])))
    res = overlap_fractions(spec, (F(1), F(1)), 4096)
    assert res.q == (F(0), F(0))
    assert res.p == (F(1), F(1))


# ---------------------------------------------------------------------------
# frequency vectors


def test_frequency_vector_validation():
    assert frequency_vector(("1/2", 1)) == (F(1, 2), F(1))
    with pytest.raises(ValueError):
        frequency_vector((F(0), F(0)))
    with pytest.raises(ValueError):
        frequency_vector((F(-1), F(1)))
