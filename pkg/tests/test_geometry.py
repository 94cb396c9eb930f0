"""Tests for exact circle set algebra.

Oracle values are hand-computed rationals; randomized properties are checked
against an independent grid-counting estimate of the measure.
"""

import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from extremap.geometry import (
    DegenerateBallError,
    IntervalSet,
    TorusRect,
    ball,
)


def _random_interval_set(rng: random.Random, max_arcs: int = 4, denom: int = 840) -> IntervalSet:
    pairs = []
    for _ in range(rng.randint(0, max_arcs)):
        a = F(rng.randint(0, denom), denom)
        b = F(rng.randint(0, denom), denom)
        pairs.append((a, b))
    return IntervalSet.from_arcs(pairs)


# ---------------------------------------------------------------------------
# measure


def test_measure_empty():
    assert IntervalSet.empty().measure == 0


def test_measure_single_arc():
    s = IntervalSet.from_arcs([(F(0), F(1, 3))])
    assert s.measure == F(1, 3)


def test_measure_wrapping_arc():
    s = IntervalSet.from_arcs([(F(7, 8), F(1, 8))])
    assert s.measure == F(1, 4)
    assert s.arcs == ((F(0), F(1, 8)), (F(7, 8), F(1)))


def test_full_circle():
    assert IntervalSet.full().measure == 1
    assert IntervalSet.from_arcs([(F(0), F(1, 2)), (F(1, 2), F(1))]) == IntervalSet.full()


# ---------------------------------------------------------------------------
# set operations


def test_difference_splits_arc():
    a = IntervalSet.from_arcs([(F(0), F(1, 2))])
    b = IntervalSet.from_arcs([(F(1, 4), F(1, 3))])
    expected = IntervalSet.from_arcs([(F(0), F(1, 4)), (F(1, 3), F(1, 2))])
    assert a.difference(b) == expected


def test_union_merges_touching_arcs():
    a = IntervalSet.from_arcs([(F(0), F(1, 4))])
    b = IntervalSet.from_arcs([(F(1, 4), F(1, 2))])
    assert a.union(b) == IntervalSet.from_arcs([(F(0), F(1, 2))])


def test_intersect_disjoint_is_empty():
    a = IntervalSet.from_arcs([(F(0), F(1, 4))])
    b = IntervalSet.from_arcs([(F(1, 2), F(3, 4))])
    assert a.intersect(b) == IntervalSet.empty()


def test_additivity_fixed_example():
    a = IntervalSet.from_arcs([(F(0), F(1, 2)), (F(3, 4), F(7, 8))])
    b = IntervalSet.from_arcs([(F(1, 3), F(2, 3))])
    assert a.union(b).measure + a.intersect(b).measure == a.measure + b.measure


def test_additivity_randomized():
    rng = random.Random(20260816)
    for _ in range(2000):
        a = _random_interval_set(rng)
        b = _random_interval_set(rng)
        assert a.union(b).measure + a.intersect(b).measure == a.measure + b.measure


def test_de_morgan_randomized():
    rng = random.Random(4120)
    for _ in range(2000):
        a = _random_interval_set(rng)
        b = _random_interval_set(rng)
        assert a.union(b).complement() == a.complement().intersect(b.complement())
        assert a.intersect(b).complement() == a.complement().union(b.complement())


def test_idempotence_and_commutativity():
    rng = random.Random(77)
    for _ in range(500):
        a = _random_interval_set(rng)
        b = _random_interval_set(rng)
        assert a.union(a) == a
        assert a.intersect(a) == a
        assert a.union(b) == b.union(a)
        assert a.intersect(b) == b.intersect(a)


def test_difference_of_full_is_complement():
    rng = random.Random(99)
    for _ in range(200):
        a = _random_interval_set(rng)
        assert IntervalSet.full().difference(a) == a.complement()


def test_measure_against_grid_count():
    # Independent oracle: count lattice points k/N inside the set.  For a union
    # of m half-open arcs with rational endpoints, the count can differ from
    # N*measure by at most m in absolute value.
    rng = random.Random(314159)
    n_grid = 2520  # divisible by 840 so endpoints land on lattice points
    for _ in range(300):
        s = _random_interval_set(rng)
        count = sum(1 for k in range(n_grid) if s.contains(F(k, n_grid)))
        assert abs(count - n_grid * s.measure) <= len(s.arcs)


@given(
    st.lists(
        st.tuples(st.fractions(0, 1, max_denominator=64), st.fractions(0, 1, max_denominator=64)),
        max_size=5,
    ),
    st.lists(
        st.tuples(st.fractions(0, 1, max_denominator=64), st.fractions(0, 1, max_denominator=64)),
        max_size=5,
    ),
)
@settings(max_examples=200, deadline=None)
def test_additivity_property(pairs_a, pairs_b):
    a = IntervalSet.from_arcs(pairs_a)
    b = IntervalSet.from_arcs(pairs_b)
    assert a.union(b).measure + a.intersect(b).measure == a.measure + b.measure
    assert a.difference(b) == a.intersect(b.complement())


# ---------------------------------------------------------------------------
# balls


def test_ball_interior():
    assert ball(F(1, 2), F(1, 8)) == IntervalSet.from_arcs([(F(3, 8), F(5, 8))])


def test_ball_wrapping():
    b = ball(F(0), F(1, 8))
    assert b.measure == F(1, 4)
    assert b.contains(F(15, 16))
    assert b.contains(F(1, 16))
    assert not b.contains(F(1, 2))


def test_ball_component_count_mod_one():
    b = ball(F(0), F(1, 8))
    assert len(b.arcs) == 2  # stored split at 0
    assert b.component_count == 1  # one arc on the circle


def test_ball_boundary_interval_clips():
    b = ball(F(0), F(1, 8), boundary="interval")
    assert b == IntervalSet.from_arcs([(F(0), F(1, 8))])
    assert b.measure == F(1, 8)
    b2 = ball(F(1), F(1, 8), boundary="interval")
    assert b2 == IntervalSet.from_arcs([(F(7, 8), F(1))])


def test_ball_degenerate_radius_rejected():
    with pytest.raises(DegenerateBallError):
        ball(F(1, 2), F(0))
    with pytest.raises(DegenerateBallError):
        ball(F(1, 2), F(1, 2))
    with pytest.raises(DegenerateBallError):
        ball(F(1, 2), F(-1, 8))


def test_ball_measure_is_twice_radius():
    rng = random.Random(55)
    for _ in range(200):
        c = F(rng.randint(0, 840), 840)
        r = F(rng.randint(1, 419), 840)
        assert ball(c, r).measure == 2 * r


# ---------------------------------------------------------------------------
# shift


def test_shift_preserves_measure_and_wraps():
    s = IntervalSet.from_arcs([(F(3, 4), F(7, 8))])
    t = s.shift(F(1, 4))
    assert t == IntervalSet.from_arcs([(F(0), F(1, 8))])
    assert t.measure == s.measure


# ---------------------------------------------------------------------------
# torus rectangles


def test_torus_rect_measure():
    r = TorusRect(center=(F(1, 2), F(1, 2)), half_widths=(F(1, 8), F(1, 16)))
    assert r.measure == 4 * F(1, 8) * F(1, 16)


def test_torus_rect_contains_with_wrap():
    r = TorusRect(center=(F(0), F(0)), half_widths=(F(1, 8), F(1, 8)))
    assert r.contains((F(15, 16), F(1, 16)))
    assert not r.contains((F(1, 2), F(0)))
    # half-open on the upper edge
    assert not r.contains((F(1, 8), F(0)))
    assert r.contains((F(-1, 8) % 1, F(0)))


def test_torus_rect_validation():
    with pytest.raises(ValueError):
        TorusRect(center=(F(0), F(0)), half_widths=(F(0), F(1, 8)))
    with pytest.raises(ValueError):
        TorusRect(center=(F(0), F(0)), half_widths=(F(3, 4), F(3, 4)))
