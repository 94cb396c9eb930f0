"""Exact arithmetic in the real quadratic field Q(sqrt(5)).

Numbers are stored as ``a + b*sqrt(5)`` with rational coefficients.  Ordering
is decided by an exact sign test (integer comparisons only), so these values
can be used wherever `fractions.Fraction` is used for exact geometry, at the
cost of one extra squaring per comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

RationalLike = Union[int, Fraction]


def _coerce(value: "Sqrt5 | RationalLike") -> "Sqrt5":
    if isinstance(value, Sqrt5):
        return value
    if isinstance(value, (int, Fraction)):
        return Sqrt5(Fraction(value), Fraction(0))
    raise TypeError(f"cannot interpret {value!r} as an element of Q(sqrt 5)")


@dataclass(frozen=True)
class Sqrt5:
    """The number ``a + b*sqrt(5)`` with ``a``, ``b`` rational."""

    a: Fraction
    b: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    # -- ring operations ----------------------------------------------------

    def __add__(self, other: "Sqrt5 | RationalLike") -> "Sqrt5":
        o = _coerce(other)
        return Sqrt5(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self) -> "Sqrt5":
        return Sqrt5(-self.a, -self.b)

    def __sub__(self, other: "Sqrt5 | RationalLike") -> "Sqrt5":
        return self + (-_coerce(other))

    def __rsub__(self, other: "Sqrt5 | RationalLike") -> "Sqrt5":
        return _coerce(other) + (-self)

    def __mul__(self, other: "Sqrt5 | RationalLike") -> "Sqrt5":
        o = _coerce(other)
        return Sqrt5(self.a * o.a + 5 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __truediv__(self, other: "Sqrt5 | RationalLike") -> "Sqrt5":
        o = _coerce(other)
        norm = o.a * o.a - 5 * o.b * o.b  # o times its conjugate
        if norm == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt 5)")
        conj = Sqrt5(o.a, -o.b)
        num = self * conj
        return Sqrt5(num.a / norm, num.b / norm)

    def __rtruediv__(self, other: "Sqrt5 | RationalLike") -> "Sqrt5":
        return _coerce(other) / self

    def __pow__(self, exponent: int) -> "Sqrt5":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("only non-negative integer powers are supported")
        out = Sqrt5(Fraction(1), Fraction(0))
        base = self
        e = exponent
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    # -- ordering -----------------------------------------------------------

    def sign(self) -> int:
        """Exact sign of ``a + b*sqrt(5)``."""
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return (b > 0) - (b < 0)
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # opposite signs: the sign agrees with sign(a) iff a^2 > 5 b^2
        d = a * a - 5 * b * b
        if d == 0:
            return 0  # unreachable: sqrt(5) is irrational
        return (1 if a > 0 else -1) * (1 if d > 0 else -1)

    def _cmp(self, other: "Sqrt5 | RationalLike") -> int:
        return (self - _coerce(other)).sign()

    def __lt__(self, other: "Sqrt5 | RationalLike") -> bool:
        return self._cmp(other) < 0

    def __le__(self, other: "Sqrt5 | RationalLike") -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other: "Sqrt5 | RationalLike") -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other: "Sqrt5 | RationalLike") -> bool:
        return self._cmp(other) >= 0

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (Sqrt5, int, Fraction)):
            return self._cmp(other) == 0
        return NotImplemented

    def __hash__(self) -> int:
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b))

    # -- conversions ---------------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def as_fraction(self) -> Fraction:
        if self.b != 0:
            raise ValueError(f"{self!r} is irrational")
        return self.a

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(5.0)

    def __abs__(self) -> "Sqrt5":
        return -self if self.sign() < 0 else self

    def __repr__(self) -> str:
        return f"Sqrt5({self.a!s}, {self.b!s})"


SQRT5 = Sqrt5(Fraction(0), Fraction(1))
