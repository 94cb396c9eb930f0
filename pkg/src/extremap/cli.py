"""Command-line interface.

Subcommands
-----------
closed-form
    Closed-form dependence curves for one catalog example (curves-1 CSV).
pickands-table
    Dependence-function tables for catalog examples and/or the symmetric
    logistic family (curves-1 CSV).
exact
    Exact rational estimates (gamma_hat, theta, delta_prime, stabilization
    verdict) over an (example, tau, n, q) lattice (estimates-1 CSV).
mc
    Monte Carlo block-maxima and cluster-ratio estimates (estimates-1 CSV).
delta-prime
    Anti-clustering partial sums, exact or Monte Carlo (estimates-1 CSV).
verify
    Run the cross-check battery and report PASS/FAIL per check.

Exit codes: 0 success, 2 verification failure, 3 configuration error,
4 every requested estimate exceeded the component budget.

Options may also come from a config file (``--config``): a flat INI file
whose keys match the long option names (``example``, ``tau``, ``alpha_grid``,
``n_schedule``, ``q_max``, ``trials``, ``seed``, ``boundary``, ``mode``,
``beta``, ``budget``).  Explicit command-line flags override config values.
A ``tau`` config value may hold several vectors separated by semicolons; an
explicitly empty value selects the empty grid (header-only output).
"""

from __future__ import annotations

import configparser
import dataclasses
import sys
from contextlib import contextmanager
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence, TextIO

import click

from .dependence import ExampleId
from .dynamics import DEFAULT_COMPONENT_BUDGET, BudgetExceededError, UnsupportedMapError
from .engine import EstimateResult, delta_prime, gamma_hat, theta_exact, theta_limit
from .mc import mc_block_maxima, mc_delta_prime, mc_theta_runs
from .observables import InfeasibleThresholdError
from .presets import preset
from .reporting import (
    closed_form_curves,
    estimate_row,
    logistic_curves,
    write_curves,
    write_estimates,
)
from .verification import DEFAULT_SEED, run_all

EXIT_VERIFICATION = 2
EXIT_CONFIG = 3
EXIT_BUDGET = 4

_BOUNDARIES = ("circle", "interval")
_RUN_MODES = ("exact", "mc", "both")
_DEFAULT_N_SCHEDULE = "1024,16384,262144"
_DEFAULT_MC_N_SCHEDULE = "5000"
_DEFAULT_TRIALS = "100000"
_SEED_STRIDE = 7919  # distinct per-row seeds derived from the base seed


def _fail(message: str) -> None:
    """Report a configuration problem and stop with the config exit code."""
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_CONFIG)


# ---------------------------------------------------------------------------
# config file + option merging
# ---------------------------------------------------------------------------


def _read_config(path: Optional[str]) -> dict[str, str]:
    if path is None:
        return {}
    parser = configparser.ConfigParser()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        _fail(f"cannot read config file {path!r}: {exc}")
    except configparser.Error as exc:
        _fail(f"cannot parse config file {path!r}: {exc}")
    data: dict[str, str] = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            data[key.replace("-", "_")] = value
    return data


def _merge(
    flag_value: Optional[str], cfg: dict[str, str], key: str, default: Optional[str] = None
) -> Optional[str]:
    """Command-line flag beats config value beats built-in default."""
    if flag_value is not None:
        return flag_value
    if key in cfg:
        return cfg[key]
    return default


# ---------------------------------------------------------------------------
# value parsers (all config errors exit with EXIT_CONFIG)
# ---------------------------------------------------------------------------


def _parse_fraction(text: str, what: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        _fail(f"cannot parse {what} {text!r} (expected a rational like 3/4 or 0.75)")
    raise AssertionError("unreachable")


def _parse_int(text: str, what: str, minimum: Optional[int] = None) -> int:
    try:
        value = int(text.strip(), 10)
    except ValueError:
        _fail(f"cannot parse {what} {text!r} (expected an integer)")
        raise AssertionError("unreachable")
    if minimum is not None and value < minimum:
        _fail(f"{what} must be at least {minimum}, got {value}")
    return value


def _parse_int_list(text: str, what: str, minimum: int = 1) -> tuple[int, ...]:
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        _fail(f"{what} must contain at least one integer")
    return tuple(sorted({_parse_int(p, what, minimum) for p in parts}))


def _parse_choice(text: str, what: str, choices: Sequence[str]) -> str:
    value = text.strip().lower()
    if value not in choices:
        _fail(f"{what} must be one of {', '.join(choices)}; got {text!r}")
    return value


def _resolve_example(name: Optional[str]) -> ExampleId:
    if name is None:
        _fail("an example id is required (--example or config key 'example')")
        raise AssertionError("unreachable")
    token = name.strip()
    try:
        return ExampleId[token]
    except KeyError:
        pass
    for member in ExampleId:
        if member.name.lower() == token.lower():
            return member
    _fail(
        f"unknown example {name!r}; known examples: "
        + ", ".join(member.name for member in ExampleId)
    )
    raise AssertionError("unreachable")


def _parse_tau_vector(text: str, dim: int) -> tuple[Fraction, ...]:
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != dim:
        _fail(f"tau vector {text!r} has {len(parts)} components, expected {dim}")
    tau = tuple(_parse_fraction(p, "tau component") for p in parts)
    if any(t < 0 for t in tau):
        _fail(f"tau vector {text!r} has a negative component")
    if all(t == 0 for t in tau):
        _fail(f"tau vector {text!r} is identically zero")
    return tau


def _simplex_directions(step: Fraction, dim: int) -> list[tuple[Fraction, ...]]:
    """Interior tau directions on the unit simplex with the given spacing."""
    if not 0 < step < 1:
        _fail(f"alpha grid step must lie in (0, 1), got {step}")
    m = int(1 / step)
    if m * step != 1:
        _fail(f"alpha grid step must divide 1 exactly, got {step}")
    out: list[tuple[Fraction, ...]] = []
    if dim == 2:
        for k in range(1, m):
            a = Fraction(k, m)
            out.append((a, 1 - a))
    else:
        for i in range(1, m):
            for j in range(1, m - i):
                out.append((Fraction(i, m), Fraction(j, m), Fraction(m - i - j, m)))
    return out


def _resolve_taus(
    tau_flags: Sequence[str],
    cfg: dict[str, str],
    alpha_grid: Optional[str],
    dim: int,
) -> list[tuple[Fraction, ...]]:
    """The tau grid: explicit vectors, else an alpha grid, else (1,...,1).

    An explicitly empty ``tau`` config value selects the empty grid.
    """
    if tau_flags:
        return [_parse_tau_vector(t, dim) for t in tau_flags]
    if "tau" in cfg:
        chunks = [c for c in cfg["tau"].split(";") if c.strip()]
        return [_parse_tau_vector(c, dim) for c in chunks]
    step_text = _merge(alpha_grid, cfg, "alpha_grid")
    if step_text is not None:
        return _simplex_directions(_parse_fraction(step_text, "alpha grid step"), dim)
    return [(Fraction(1),) * dim]


@contextmanager
def _out_stream(path: Optional[str]) -> Iterator[TextIO]:
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _finish_estimates(out: Optional[str], rows: list[tuple], ok: int, exceeded: int) -> None:
    """Write rows and apply the budget exit policy.

    Budget-exceeded rows are reported in place and the run continues; the
    run only fails (exit 4) when the budget left nothing at all to report.
    """
    with _out_stream(out) as fh:
        write_estimates(fh, rows)
    if exceeded > 0 and ok == 0:
        click.echo("error: every requested estimate exceeded the component budget", err=True)
        sys.exit(EXIT_BUDGET)


class _Tally:
    """Collect estimate rows while counting successes and budget failures."""

    def __init__(self, example: ExampleId) -> None:
        self.example = example
        self.rows: list[tuple] = []
        self.ok = 0
        self.exceeded = 0

    def run(
        self,
        tau: Sequence[Fraction],
        quantity: str,
        n: Optional[int],
        q: Optional[int],
        compute: Callable[[], EstimateResult],
    ) -> None:
        try:
            result = compute()
            self.ok += 1
        except BudgetExceededError:
            result = EstimateResult(
                quantity=quantity, value=None, n=n, q=q, status="budget-exceeded"
            )
            self.exceeded += 1
        except InfeasibleThresholdError:
            result = EstimateResult(
                quantity=quantity, value=None, n=n, q=q, status="infeasible"
            )
        self.rows.append(estimate_row(self.example.name, tau, result))


# ---------------------------------------------------------------------------
# command group
# ---------------------------------------------------------------------------


@click.group()
@click.version_option(package_name="extremap")
def main() -> None:
    """Exact and Monte Carlo extreme-value laws for chaotic maps."""


_example_opt = click.option("--example", default=None, help="Catalog example id.")
_config_opt = click.option(
    "--config", default=None, type=click.Path(), help="INI config file with defaults."
)
_tau_opt = click.option(
    "--tau",
    multiple=True,
    help="Scaling vector 'a,b' (or 'a,b,c'); repeatable. Components are rationals.",
)
_alpha_grid_opt = click.option(
    "--alpha-grid",
    default=None,
    help="Simplex grid spacing (a rational that divides 1, e.g. 0.01).",
)
_n_schedule_opt = click.option(
    "--n-schedule", default=None, help="Comma-separated list of time horizons n."
)
_q_max_opt = click.option(
    "--q-max", default=None, help="Largest cluster depth q to compute."
)
_boundary_opt = click.option(
    "--boundary", default=None, help="Threshold boundary convention: circle or interval."
)
_budget_opt = click.option(
    "--budget", default=None, help="Component budget for exact preimage expansion."
)
_out_opt = click.option(
    "--out", default=None, help="Output file ('-' or omitted for stdout)."
)
_trials_opt = click.option(
    "--trials", default=None, help="Monte Carlo budget (trials / orbit length)."
)
_seed_opt = click.option(
    "--seed", default=None, help="Base RNG seed (required for Monte Carlo)."
)


def _common_exact_inputs(example, config, boundary, budget):
    cfg = _read_config(config)
    ex = _resolve_example(_merge(example, cfg, "example"))
    pre = preset(ex)
    bnd = _parse_choice(_merge(boundary, cfg, "boundary", "circle"), "boundary", _BOUNDARIES)
    bud = _parse_int(
        _merge(budget, cfg, "budget", str(DEFAULT_COMPONENT_BUDGET)), "budget", 1
    )
    return cfg, ex, pre, bnd, bud


@main.command("closed-form")
@_example_opt
@_config_opt
@_alpha_grid_opt
@_out_opt
def closed_form_cmd(example, config, alpha_grid, out) -> None:
    """Closed-form theta, D, Gamma, and G curves for one example."""
    cfg = _read_config(config)
    ex = _resolve_example(_merge(example, cfg, "example"))
    step = _parse_fraction(
        _merge(alpha_grid, cfg, "alpha_grid", "1/100"), "alpha grid step"
    )
    if not 0 < step <= 1:
        _fail(f"alpha grid step must lie in (0, 1], got {step}")
    rows = closed_form_curves(ex, step=step)
    with _out_stream(_merge(out, cfg, "out")) as fh:
        write_curves(fh, rows)


@main.command("pickands-table")
@click.option("--example", multiple=True, help="Catalog example id; repeatable.")
@_config_opt
@click.option(
    "--beta",
    default=None,
    help="Comma-separated logistic dependence parameters in (0, 1].",
)
@_alpha_grid_opt
@_out_opt
def pickands_table_cmd(example, config, beta, alpha_grid, out) -> None:
    """Dependence-function tables: catalog examples and the logistic family.

    With no --example and no --beta, tabulates every catalog example.
    """
    cfg = _read_config(config)
    step = _parse_fraction(
        _merge(alpha_grid, cfg, "alpha_grid", "1/100"), "alpha grid step"
    )
    if not 0 < step <= 1:
        _fail(f"alpha grid step must lie in (0, 1], got {step}")
    example_names: Sequence[str] = example
    if not example_names and "example" in cfg:
        example_names = [cfg["example"]]
    beta_text = _merge(beta, cfg, "beta")
    betas: list[Fraction] = []
    if beta_text is not None:
        for part in beta_text.split(","):
            if not part.strip():
                continue
            b = _parse_fraction(part, "logistic beta")
            if not 0 < b <= 1:
                _fail(f"logistic beta must lie in (0, 1], got {part.strip()!r}")
            betas.append(b)
    examples = [_resolve_example(name) for name in example_names]
    if not examples and not betas:
        examples = list(ExampleId)
    rows = []
    for ex in examples:
        rows.extend(closed_form_curves(ex, step=step))
    if betas:
        rows.extend(logistic_curves(betas, step=step))
    with _out_stream(_merge(out, cfg, "out")) as fh:
        write_curves(fh, rows)


@main.command("exact")
@_example_opt
@_config_opt
@_tau_opt
@_alpha_grid_opt
@_n_schedule_opt
@_q_max_opt
@_boundary_opt
@_budget_opt
@_out_opt
def exact_cmd(
    example, config, tau, alpha_grid, n_schedule, q_max, boundary, budget, out
) -> None:
    """Exact rational estimates over the (tau, n, q) lattice.

    Emits gamma_hat per (tau, n), theta and delta_prime per (tau, n, q),
    and one stabilization verdict row (quantity 'theta_limit') per tau.
    """
    cfg, ex, pre, bnd, bud = _common_exact_inputs(example, config, boundary, budget)
    taus = _resolve_taus(tau, cfg, alpha_grid, pre.dim)
    ns = _parse_int_list(
        _merge(n_schedule, cfg, "n_schedule", _DEFAULT_N_SCHEDULE), "n schedule", 2
    )
    qm = _parse_int(_merge(q_max, cfg, "q_max", str(pre.q + 1)), "q max", 0)
    tally = _Tally(ex)
    try:
        for tv in taus:
            for n in ns:
                tally.run(tv, "gamma_hat", n, None, lambda: gamma_hat(
                    pre.observables, tv, n, boundary=bnd
                ))
                for q in range(qm + 1):
                    tally.run(tv, "theta", n, q, lambda: theta_exact(
                        pre.map_spec, pre.observables, tv, n, q,
                        boundary=bnd, budget=bud,
                    ))
                    tally.run(tv, "delta_prime", n, q, lambda: delta_prime(
                        pre.map_spec, pre.observables, tv, n, q,
                        boundary=bnd, budget=bud,
                    ))
            tally.run(tv, "theta_limit", ns[-1], qm, lambda: dataclasses.replace(
                theta_limit(
                    pre.map_spec, pre.observables, tv,
                    q_schedule=range(qm + 1), n_schedule=ns,
                    boundary=bnd, budget=bud,
                ),
                quantity="theta_limit",
                diagnostics={},
            ))
    except UnsupportedMapError as exc:
        _fail(str(exc))
    _finish_estimates(_merge(out, cfg, "out"), tally.rows, tally.ok, tally.exceeded)


@main.command("mc")
@_example_opt
@_config_opt
@_tau_opt
@_n_schedule_opt
@_q_max_opt
@_trials_opt
@_seed_opt
@_boundary_opt
@_out_opt
def mc_cmd(
    example, config, tau, n_schedule, q_max, trials, seed, boundary, out
) -> None:
    """Monte Carlo estimates: block-maxima law G and cluster ratio theta.

    Per (tau, n): one block-maxima row over `trials` independent orbits and
    one cluster-ratio row along a single orbit of length `trials`, at depth
    q = --q-max (default: the example's reference depth).  Each row draws a
    distinct seed derived deterministically from --seed.
    """
    cfg = _read_config(config)
    ex = _resolve_example(_merge(example, cfg, "example"))
    pre = preset(ex)
    bnd = _parse_choice(_merge(boundary, cfg, "boundary", "circle"), "boundary", _BOUNDARIES)
    seed_text = _merge(seed, cfg, "seed")
    if seed_text is None:
        _fail("Monte Carlo runs need an explicit --seed (or config key 'seed')")
    base_seed = _parse_int(seed_text, "seed")
    n_trials = _parse_int(
        _merge(trials, cfg, "trials", _DEFAULT_TRIALS), "trials", 2
    )
    q = _parse_int(_merge(q_max, cfg, "q_max", str(pre.q)), "q max", 0)
    taus = _resolve_taus(tau, cfg, None, pre.dim)
    ns = _parse_int_list(
        _merge(n_schedule, cfg, "n_schedule", _DEFAULT_MC_N_SCHEDULE), "n schedule", 2
    )
    tally = _Tally(ex)
    row_index = 0
    for tv in taus:
        for n in ns:
            tally.run(tv, "G", n, None, lambda: mc_block_maxima(
                pre.map_spec, pre.observables, tv, n,
                trials=n_trials, seed=base_seed + _SEED_STRIDE * row_index,
                boundary=bnd,
            ))
            row_index += 1
            tally.run(tv, "theta", n, q, lambda: mc_theta_runs(
                pre.map_spec, pre.observables, tv, n, q,
                orbit_length=n_trials, seed=base_seed + _SEED_STRIDE * row_index,
                boundary=bnd,
            ))
            row_index += 1
    _finish_estimates(_merge(out, cfg, "out"), tally.rows, tally.ok, tally.exceeded)


@main.command("delta-prime")
@_example_opt
@_config_opt
@_tau_opt
@_n_schedule_opt
@_q_max_opt
@click.option("--mode", default=None, help="Estimator: exact or mc.")
@_trials_opt
@_seed_opt
@_boundary_opt
@_budget_opt
@_out_opt
def delta_prime_cmd(
    example, config, tau, n_schedule, q_max, mode, trials, seed, boundary, budget, out
) -> None:
    """Anti-clustering partial sums Delta(q) per (tau, n, q)."""
    cfg, ex, pre, bnd, bud = _common_exact_inputs(example, config, boundary, budget)
    run_mode = _parse_choice(_merge(mode, cfg, "mode", "exact"), "mode", ("exact", "mc"))
    taus = _resolve_taus(tau, cfg, None, pre.dim)
    ns = _parse_int_list(
        _merge(n_schedule, cfg, "n_schedule", _DEFAULT_N_SCHEDULE), "n schedule", 2
    )
    qm = _parse_int(_merge(q_max, cfg, "q_max", str(pre.q)), "q max", 0)
    if run_mode == "mc":
        seed_text = _merge(seed, cfg, "seed")
        if seed_text is None:
            _fail("Monte Carlo runs need an explicit --seed (or config key 'seed')")
        base_seed = _parse_int(seed_text, "seed")
        n_trials = _parse_int(
            _merge(trials, cfg, "trials", _DEFAULT_TRIALS), "trials", 2
        )
    tally = _Tally(ex)
    row_index = 0
    try:
        for tv in taus:
            for n in ns:
                for q in range(qm + 1):
                    if run_mode == "exact":
                        tally.run(tv, "delta_prime", n, q, lambda: delta_prime(
                            pre.map_spec, pre.observables, tv, n, q,
                            boundary=bnd, budget=bud,
                        ))
                    else:
                        tally.run(tv, "delta_prime", n, q, lambda: mc_delta_prime(
                            pre.map_spec, pre.observables, tv, n, q,
                            orbit_length=n_trials,
                            seed=base_seed + _SEED_STRIDE * row_index,
                            boundary=bnd,
                        ))
                    row_index += 1
    except UnsupportedMapError as exc:
        _fail(str(exc))
    _finish_estimates(_merge(out, cfg, "out"), tally.rows, tally.ok, tally.exceeded)


@main.command("verify")
@click.option("--example", multiple=True, help="Restrict catalog checks; repeatable.")
@_config_opt
@click.option("--mode", default=None, help="Which checks to run: exact, mc, or both.")
@_seed_opt
@click.option("--fast", is_flag=True, help="Shrink stochastic sample sizes (smoke run).")
@_out_opt
def verify_cmd(example, config, mode, seed, fast, out) -> None:
    """Run the verification battery; exit 2 if any check fails."""
    cfg = _read_config(config)
    run_mode = _parse_choice(_merge(mode, cfg, "mode", "both"), "mode", _RUN_MODES)
    base_seed = _parse_int(_merge(seed, cfg, "seed", str(DEFAULT_SEED)), "seed")
    example_names: Sequence[str] = example
    if not example_names and "example" in cfg:
        example_names = [cfg["example"]]
    examples = [_resolve_example(name) for name in example_names] or None
    lines: list[str] = []

    def emit(line: str) -> None:
        lines.append(line)
        click.echo(line)

    results = run_all(mode=run_mode, examples=examples, seed=base_seed, fast=fast, emit=emit)
    out_path = _merge(out, cfg, "out")
    if out_path is not None and out_path != "-":
        with _out_stream(out_path) as fh:
            fh.write("\n".join(lines) + "\n")
    failed = [r for r in results if not r.passed]
    click.echo(f"{len(results) - len(failed)}/{len(results)} checks passed")
    if failed:
        sys.exit(EXIT_VERIFICATION)


if __name__ == "__main__":
    main()
