"""Exact set algebra on the circle [0, 1) and rectangles on the 2-torus.

All measures and set operations use rational arithmetic (`fractions.Fraction`)
exclusively; no floating point enters any computation here.  A set on the
circle is a finite union of half-open arcs ``[a, b)``; the internal
representation is sorted, pairwise disjoint and maximally merged, with arcs
that wrap through 0 stored as a split pair.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .quadratic import Sqrt5

Rational = Fraction
ExactReal = Union[Fraction, Sqrt5]

_ZERO = Fraction(0)
_ONE = Fraction(1)


class DegenerateBallError(ValueError):
    """Raised when a ball radius is outside (0, 1/2)."""


Arc = tuple[Fraction, Fraction]


def _normalize(pairs: Iterable[tuple[Fraction, Fraction]]) -> tuple[Arc, ...]:
    """Reduce arbitrary (start, end) pairs to the canonical arc tuple.

    Endpoints are reduced mod 1.  A pair with ``start < end`` (after
    reduction) denotes the plain arc [start, end); ``start > end`` denotes the
    arc wrapping through 0; equal endpoints denote the empty arc.
    """
    raw: list[Arc] = []
    for a, b in pairs:
        a = Fraction(a)
        b = Fraction(b)
        a %= 1
        if b != 1:
            b %= 1
        if a == b:
            continue
        if a < b:
            raw.append((a, b))
        else:
            raw.append((a, _ONE))
            if b > 0:
                raw.append((_ZERO, b))
    if not raw:
        return ()
    raw.sort()
    merged: list[Arc] = [raw[0]]
    for a, b in raw[1:]:
        la, lb = merged[-1]
        if a <= lb:
            if b > lb:
                merged[-1] = (la, b)
        else:
            merged.append((a, b))
    return tuple(merged)


@dataclass(frozen=True)
class IntervalSet:
    """A finite union of half-open arcs on the circle, in canonical form.

    Construct through :meth:`from_arcs`, :meth:`empty`, :meth:`full` or
    :func:`ball`; the raw constructor expects already-normalized arcs.
    """

    arcs: tuple[Arc, ...] = ()

    # -- constructors ---------------------------------------------------------

    @classmethod
    def from_arcs(cls, pairs: Iterable[tuple[Fraction, Fraction]]) -> "IntervalSet":
        return cls(_normalize(pairs))

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls(())

    @classmethod
    def full(cls) -> "IntervalSet":
        return cls(((_ZERO, _ONE),))

    # -- basic queries --------------------------------------------------------

    @property
    def measure(self) -> Fraction:
        return sum((b - a for a, b in self.arcs), _ZERO)

    @property
    def is_empty(self) -> bool:
        return not self.arcs

    @property
    def is_full(self) -> bool:
        return self.arcs == ((_ZERO, _ONE),)

    @property
    def component_count(self) -> int:
        """Number of connected components on the circle (mod-1 aware)."""
        n = len(self.arcs)
        if n >= 2 and self.arcs[0][0] == 0 and self.arcs[-1][1] == 1:
            return n - 1
        return n

    def arcs_mod_one(self) -> tuple[tuple[Fraction, Fraction], ...]:
        """Arcs with the pair split at 0 re-joined into one wrapping arc."""
        if len(self.arcs) >= 2 and self.arcs[0][0] == 0 and self.arcs[-1][1] == 1:
            middle = self.arcs[1:-1]
            wrap = (self.arcs[-1][0], self.arcs[0][1])
            return middle + (wrap,)
        return self.arcs

    def contains(self, x: Fraction) -> bool:
        x = Fraction(x) % 1
        starts = [a for a, _ in self.arcs]
        i = bisect_right(starts, x) - 1
        return i >= 0 and x < self.arcs[i][1]

    # -- set operations -------------------------------------------------------

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(_normalize(self.arcs + other.arcs))

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        out: list[Arc] = []
        i = j = 0
        a, b = self.arcs, other.arcs
        while i < len(a) and j < len(b):
            lo = max(a[i][0], b[j][0])
            hi = min(a[i][1], b[j][1])
            if lo < hi:
                out.append((lo, hi))
            if a[i][1] <= b[j][1]:
                i += 1
            else:
                j += 1
        return IntervalSet(tuple(out))

    def complement(self) -> "IntervalSet":
        out: list[Arc] = []
        prev = _ZERO
        for a, b in self.arcs:
            if a > prev:
                out.append((prev, a))
            prev = b
        if prev < 1:
            out.append((prev, _ONE))
        return IntervalSet(tuple(out))

    def difference(self, other: "IntervalSet") -> "IntervalSet":
        return self.intersect(other.complement())

    def shift(self, t: Fraction) -> "IntervalSet":
        """The set {x + t mod 1 : x in self}."""
        t = Fraction(t) % 1
        return IntervalSet.from_arcs([(a + t, b + t) for a, b in self.arcs])


def ball(center: Fraction, radius: Fraction, boundary: str = "circle") -> IntervalSet:
    """Open-ish metric ball of the given radius: the arc [c - r, c + r).

    With ``boundary="circle"`` the ball wraps mod 1; with
    ``boundary="interval"`` it is clipped to [0, 1] (the endpoint geometry of
    a map viewed on the interval rather than the circle).
    """
    radius = Fraction(radius)
    if not 0 < radius < Fraction(1, 2):
        raise DegenerateBallError(
            f"ball radius must lie strictly between 0 and 1/2, got {radius}"
        )
    center = Fraction(center)
    if boundary == "circle":
        return IntervalSet.from_arcs([(center % 1 - radius, center % 1 + radius)])
    if boundary == "interval":
        if not 0 <= center <= 1:
            raise ValueError("interval-boundary balls need a center in [0, 1]")
        lo = max(_ZERO, center - radius)
        hi = min(_ONE, center + radius)
        return IntervalSet.from_arcs([(lo, hi)])
    raise ValueError(f"unknown boundary mode {boundary!r}")


def _exact(value: ExactReal) -> ExactReal:
    if isinstance(value, (Fraction, Sqrt5)):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected an exact number, got {value!r}")


@dataclass(frozen=True)
class TorusRect:
    """An axis-aligned rectangle on the 2-torus with exact sides.

    ``axes="standard"`` means the coordinate axes of the torus; membership is
    then an exact rational comparison per axis (half-open: the lower edge is
    included, the upper excluded).  ``axes="eigen"`` declares the rectangle in
    an eigenbasis of a toral automorphism (center and half-widths along the
    unstable/stable directions, as exact algebraic numbers); membership in
    that frame is provided by the dynamics layer, which knows the basis.
    """

    center: tuple[ExactReal, ExactReal]
    half_widths: tuple[ExactReal, ExactReal]
    axes: str = "standard"

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", tuple(_exact(c) for c in self.center))
        object.__setattr__(self, "half_widths", tuple(_exact(w) for w in self.half_widths))
        if self.axes not in ("standard", "eigen"):
            raise ValueError(f"unknown axes {self.axes!r}")
        w1, w2 = self.half_widths
        if not (w1 > 0 and w2 > 0):
            raise ValueError("half-widths must be positive")
        if self.measure > 1:
            raise ValueError("rectangle measure exceeds the torus volume")

    @property
    def measure(self) -> ExactReal:
        w1, w2 = self.half_widths
        m = 4 * w1 * w2
        if isinstance(m, Sqrt5) and m.is_rational:
            return m.as_fraction()
        return m

    def contains(self, point: Sequence[Fraction]) -> bool:
        """Exact membership for standard-axes rectangles."""
        if self.axes != "standard":
            raise ValueError(
                "eigen-axes membership depends on the automorphism; "
                "use the dynamics-layer membership helpers"
            )
        x, y = (Fraction(p) % 1 for p in point)
        for coord, c, w in zip((x, y), self.center, self.half_widths):
            if (coord - c + w) % 1 >= 2 * w:
                return False
        return True
