"""Ready-made experiment definitions for the worked example family.

Each preset binds an :class:`~extremap.dependence.ExampleId` to its dynamical
system and observable vector, together with the recurrence depth ``q`` at
which the cluster sets stabilize and a reference configuration for the
short-range co-recurrence diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from .dependence import ExampleId
from .dynamics import ExpandingBase, MapSpec, ToralAuto
from .observables import (
    FinitePoints,
    LogType,
    Observable,
    ObservableSpec,
    UnstableSegment,
)
from .quadratic import SQRT5, Sqrt5

__all__ = [
    "CAT_EPSILON",
    "DeltaPrimeCheck",
    "ExperimentPreset",
    "cat_observables",
    "preset",
]

_F = Fraction

CAT_EPSILON = _F(1, 64)


@dataclass(frozen=True)
class DeltaPrimeCheck:
    """Reference point for the co-recurrence partial-sum diagnostic.

    ``delta_prime`` truncated at lag 20 must vanish exactly at depth
    ``q_stab`` for threshold direction ``tau`` and block length ``n``; when
    ``positive_below`` is set it must be strictly positive at ``q_stab - 1``.
    """

    q_stab: int
    tau: Tuple[Fraction, ...]
    n: int
    positive_below: bool


@dataclass(frozen=True)
class ExperimentPreset:
    """A fully bound experiment: map, observables, and reference depths."""

    example: ExampleId
    map_spec: MapSpec
    observables: ObservableSpec
    q: int
    agreement_qs: Tuple[int, ...]
    delta_check: Optional[DeltaPrimeCheck]

    @property
    def dim(self) -> int:
        return self.observables.dim


def _point_spec(*groups: Tuple[Fraction, ...]) -> ObservableSpec:
    return ObservableSpec(
        tuple(Observable(FinitePoints(tuple(g)), LogType()) for g in groups)
    )


def cat_observables(epsilon: Fraction = CAT_EPSILON) -> ObservableSpec:
    """Aligned unstable segments ``Z`` and ``f(Z)`` through the origin.

    ``Z`` has arc-length radius ``epsilon`` around the fixed point; its image
    is the segment between ``lam * epsilon`` and ``lam**2 * epsilon`` where
    ``lam`` is the unstable eigenvalue.
    """
    lam = (3 + SQRT5) / 2
    lo = lam * epsilon
    hi = lam * lam * epsilon
    first = Observable(UnstableSegment(Fraction(0), epsilon), LogType())
    second = Observable(
        UnstableSegment((lo + hi) / 2, (hi - lo) / 2), LogType()
    )
    return ObservableSpec((first, second))


_DOUBLING = ExpandingBase(2)
_TRIPLING = ExpandingBase(3)
_CAT = ToralAuto(((2, 1), (1, 1)))

_ONE = (_F(1), _F(1))
_ONE3 = (_F(1), _F(1), _F(1))
_SKEW = (_F(9, 10), _F(1, 10))

_TABLE = {
    ExampleId.CommonPoint_3_1_1: dict(
        map_spec=_DOUBLING,
        observables=_point_spec((_F(1, 12),), (_F(1, 12),)),
        q=0,
        delta=None,
    ),
    ExampleId.DisjointPoints_3_1_2: dict(
        map_spec=_DOUBLING,
        observables=_point_spec((_F(1, 12),), (_F(1, 10),)),
        q=0,
        delta=DeltaPrimeCheck(0, _ONE, 2**26, positive_below=False),
    ),
    ExampleId.LinkedNonPeriodic_3_2_1: dict(
        map_spec=_DOUBLING,
        observables=_point_spec((_F(1, 12),), (_F(1, 6),)),
        q=1,
        delta=DeltaPrimeCheck(1, _ONE, 2**26, positive_below=False),
    ),
    ExampleId.LinkedPeriodic_3_2_2: dict(
        map_spec=_DOUBLING,
        observables=_point_spec((_F(1, 3),), (_F(2, 3),)),
        q=2,
        delta=DeltaPrimeCheck(2, _SKEW, 2**26, positive_below=True),
    ),
    ExampleId.LinkedPeriodic2_3_2_3: dict(
        map_spec=_TRIPLING,
        observables=_point_spec((_F(1, 6),), (_F(1, 2),)),
        q=1,
        delta=DeltaPrimeCheck(1, _ONE, 2**33, positive_below=True),
    ),
    ExampleId.OverlapNonPeriodic_3_3_2: dict(
        map_spec=_DOUBLING,
        observables=_point_spec((_F(1, 12), _F(1, 6)), (_F(7, 12), _F(1, 6))),
        q=1,
        delta=DeltaPrimeCheck(1, _ONE, 2**26, positive_below=False),
    ),
    ExampleId.Trivariate_3_3_3: dict(
        map_spec=_DOUBLING,
        observables=_point_spec((_F(1, 12),), (_F(7, 12),), (_F(1, 6),)),
        q=1,
        delta=DeltaPrimeCheck(1, _ONE3, 2**26, positive_below=False),
    ),
    ExampleId.OverlapPeriodic_3_3_4: dict(
        map_spec=_TRIPLING,
        observables=_point_spec((_F(1, 6), _F(1, 2)), (_F(5, 6), _F(1, 2))),
        q=1,
        agreement_qs=(1, 2),
        delta=DeltaPrimeCheck(1, _ONE, 2**33, positive_below=True),
    ),
    ExampleId.CatMap_3_4: dict(
        map_spec=_CAT,
        observables=None,  # built lazily: exact quadratic-irrational geometry
        q=2,
        delta=None,
    ),
}


def preset(example: ExampleId) -> ExperimentPreset:
    """Return the bound experiment definition for a catalog example."""
    try:
        row = _TABLE[example]
    except KeyError:
        raise ValueError(f"unknown example {example!r}") from None
    observables = row["observables"]
    if observables is None:
        observables = cat_observables()
    return ExperimentPreset(
        example=example,
        map_spec=row["map_spec"],
        observables=observables,
        q=row["q"],
        agreement_qs=tuple(row.get("agreement_qs", (row["q"],))),
        delta_check=row["delta"],
    )
