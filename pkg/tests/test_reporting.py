"""CSV schema stability, deterministic rendering, exact-value columns."""

import csv
import io
import math
from fractions import Fraction as F

from extremap.engine import EstimateResult
from extremap.quadratic import SQRT5
from extremap.reporting import (
    CURVES_COLUMNS,
    ESTIMATES_COLUMNS,
    CurveRow,
    estimate_row,
    render_exact,
    render_number,
    write_curves,
    write_estimates,
)


def test_render_number_fifteen_digits():
    assert render_number(float(F(2, 3))) == "0.666666666666667"
    assert render_number(1.0) == "1"
    assert render_number(F(1, 4)) == "0.25"
    assert render_number(None) == ""
    assert render_number(math.exp(-1)) == "0.367879441171442"


def test_render_exact_forms():
    assert render_exact(F(2, 3)) == "2/3"
    assert render_exact(F(4, 2)) == "2"
    assert render_exact(7) == "7"
    assert render_exact((SQRT5 - 1) / 2) == "-1/2+1/2*sqrt5"
    assert render_exact(0.5) == ""
    assert render_exact(None) == ""


def test_curves_header_and_rows():
    buf = io.StringIO()
    rows = [
        CurveRow("LinkedPeriodic_3_2_2", 0.5, None, 0.5, 2 / 3, 2 / 3, math.exp(-1.0)),
        CurveRow("Trivariate_3_3_3", 0.25, 0.25, 0.75, 0.75, 0.75, math.exp(-0.75)),
    ]
    assert write_curves(buf, rows) == 2
    parsed = list(csv.reader(io.StringIO(buf.getvalue())))
    assert parsed[0] == list(CURVES_COLUMNS)
    assert parsed[1][0] == "curves-1"
    assert parsed[1][3] == ""  # bivariate rows leave beta empty
    assert parsed[2][3] == "0.25"
    assert parsed[1][4] == "0.5"


def test_empty_grid_writes_header_only():
    buf = io.StringIO()
    assert write_curves(buf, []) == 0
    assert buf.getvalue() == ",".join(CURVES_COLUMNS) + "\n"
    buf2 = io.StringIO()
    assert write_estimates(buf2, []) == 0
    assert buf2.getvalue() == ",".join(ESTIMATES_COLUMNS) + "\n"


def test_estimate_row_exact_and_mc():
    exact = EstimateResult(
        quantity="theta", value=float(F(27, 40)), exact=F(27, 40), n=2**18, q=2
    )
    row = estimate_row("LinkedPeriodic_3_2_2", (F(9, 10), F(1, 10)), exact)
    assert row[0] == "estimates-1"
    assert row[2] == "9/10;1/10"
    assert row[3] == str(2**18) and row[4] == "2"
    assert row[5] == "theta"
    assert row[6] == "0.675"
    assert row[8] == "1" and row[10] == "27/40"

    mc = EstimateResult(
        quantity="theta_mc", value=0.6543, stderr=0.0021, n=1000, q=2, status="ok"
    )
    row = estimate_row("CatMap_3_4", (1.0, 1.0), mc)
    assert row[6] == "0.6543" and row[7] == "0.0021"
    assert row[8] == "0" and row[10] == ""

    undefined = EstimateResult(quantity="theta_mc", value=float("nan"), status="undefined")
    row = estimate_row("CatMap_3_4", (F(1), F(1)), undefined)
    assert row[6] == "" and row[9] == "undefined"
    assert row[2] == "1;1"


def test_deterministic_bytes():
    def emit() -> str:
        buf = io.StringIO()
        write_estimates(
            buf,
            [
                estimate_row(
                    "DisjointPoints_3_1_2",
                    (F(1), F(1)),
                    EstimateResult(quantity="gamma_hat", value=2.0, exact=F(2), n=4096),
                )
            ],
        )
        return buf.getvalue()

    assert emit() == emit()
