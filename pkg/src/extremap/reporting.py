"""CSV emission with stable, versioned schemas and deterministic formatting.

Two row shapes are emitted:

* **curves** (`curves-1`): closed-form functions sampled over a simplex grid
  — one row per grid point with ``theta``, ``D``, ``Gamma`` (the rescaled
  dependence function, which coincides with ``D`` on the simplex) and ``G``.
  The ``beta`` column carries the second simplex coordinate in the trivariate
  case and the model parameter for the logistic family; it is empty
  otherwise.
* **estimates** (`estimates-1`): numerical results keyed by threshold
  direction, block length and recurrence depth.  ``value`` is always the
  15-significant-digit decimal rendering; when the underlying number is
  exact, ``exact_flag`` is 1 and the ``pq`` column carries the exact form.

Floats are rendered with ``%.15g``; identical inputs therefore produce
byte-identical files.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Iterable, Optional, Sequence, Union

from .dependence import ExampleId, closed_form, logistic_D
from .engine import EstimateResult
from .quadratic import Sqrt5

__all__ = [
    "CURVES_COLUMNS",
    "CURVES_SCHEMA",
    "ESTIMATES_COLUMNS",
    "ESTIMATES_SCHEMA",
    "CurveRow",
    "closed_form_curves",
    "estimate_row",
    "logistic_curves",
    "render_exact",
    "render_number",
    "write_curves",
    "write_estimates",
]

CURVES_SCHEMA = "curves-1"
ESTIMATES_SCHEMA = "estimates-1"

CURVES_COLUMNS = ("schema", "example", "alpha", "beta", "theta", "D", "Gamma", "G")
ESTIMATES_COLUMNS = (
    "schema",
    "example",
    "tau",
    "n",
    "q",
    "quantity",
    "value",
    "stderr",
    "exact_flag",
    "status",
    "pq",
)

Numeric = Union[int, float, Fraction, Sqrt5]


def render_number(value: Optional[Numeric]) -> str:
    """Decimal rendering at 15 significant digits; empty for ``None``."""
    if value is None:
        return ""
    return f"{float(value):.15g}"


def render_exact(value: Optional[Numeric]) -> str:
    """Exact rendering: ``p/q`` for rationals, ``p/q+r/s*sqrt5`` in Q(sqrt5)."""
    if value is None:
        return ""
    if isinstance(value, Sqrt5):
        return f"{value.a}+{value.b}*sqrt5"
    if isinstance(value, (int, Fraction)):
        return str(Fraction(value))
    return ""


def _render_tau(tau: Sequence[Numeric]) -> str:
    parts = []
    for v in tau:
        exact = render_exact(v)
        parts.append(exact if exact else render_number(v))
    return ";".join(parts)


@dataclass(frozen=True)
class CurveRow:
    """One closed-form sample: simplex point plus the four derived values."""

    example: str
    alpha: float
    beta: Optional[float]
    theta: float
    d: float
    gamma: float
    g: float


def closed_form_curves(
    example: ExampleId, step: Fraction = Fraction(1, 100)
) -> list[CurveRow]:
    """Sample a catalog entry's closed forms over the simplex grid ``step``."""
    df = closed_form(example)
    m = int(round(1 / Fraction(step)))
    rows: list[CurveRow] = []
    if df.dim == 2:
        grid = [(Fraction(k, m), Fraction(m - k, m), None) for k in range(m + 1)]
    else:
        grid = [
            (Fraction(i, m), Fraction(j, m), Fraction(m - i - j, m))
            for i in range(m + 1)
            for j in range(m + 1 - i)
        ]
    for point in grid:
        if df.dim == 2:
            alpha, rest, _ = point
            tau = (alpha, rest)
            beta = None
        else:
            alpha, beta, rest = point
            tau = (alpha, beta, rest)
        rows.append(
            CurveRow(
                example=example.name,
                alpha=float(alpha),
                beta=None if beta is None else float(beta),
                theta=float(df.theta(tau)),
                d=float(df.D(tau)),
                gamma=float(df.gamma(tau)),
                g=df.G(tau),
            )
        )
    return rows


def logistic_curves(
    betas: Sequence[float], step: Fraction = Fraction(1, 100)
) -> list[CurveRow]:
    """Sample the logistic Pickands family over an alpha grid, one curve per beta."""
    m = int(round(1 / Fraction(step)))
    rows: list[CurveRow] = []
    for beta in betas:
        for k in range(m + 1):
            alpha = k / m
            d = logistic_D(alpha, beta)
            rows.append(
                CurveRow(
                    example="logistic",
                    alpha=alpha,
                    beta=float(beta),
                    theta=1.0,
                    d=d,
                    gamma=d,
                    g=math.exp(-d),
                )
            )
    return rows


def write_curves(stream: IO[str], rows: Iterable[CurveRow]) -> int:
    """Write curve rows; returns the number of data rows written."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CURVES_COLUMNS)
    count = 0
    for row in rows:
        writer.writerow(
            [
                CURVES_SCHEMA,
                row.example,
                render_number(row.alpha),
                render_number(row.beta),
                render_number(row.theta),
                render_number(row.d),
                render_number(row.gamma),
                render_number(row.g),
            ]
        )
        count += 1
    return count


def estimate_row(
    example: str, tau: Sequence[Numeric], result: EstimateResult
) -> tuple:
    """Flatten an engine/MC result into an estimates-1 CSV record."""
    value = result.value
    rendered = "" if value is None or (
        isinstance(value, float) and math.isnan(value)
    ) else render_number(value)
    return (
        ESTIMATES_SCHEMA,
        example,
        _render_tau(tau),
        "" if result.n is None else str(result.n),
        "" if result.q is None else str(result.q),
        result.quantity,
        rendered,
        render_number(result.stderr),
        "1" if result.exact is not None else "0",
        result.status,
        render_exact(result.exact),
    )


def write_estimates(stream: IO[str], rows: Iterable[tuple]) -> int:
    """Write pre-flattened estimate records; returns the data-row count."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(ESTIMATES_COLUMNS)
    count = 0
    for row in rows:
        writer.writerow(list(row))
        count += 1
    return count
