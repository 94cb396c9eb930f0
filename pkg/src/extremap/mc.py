"""Monte Carlo estimators for the same limit objects as the exact engine.

Circle orbits are simulated exactly in distribution through their digit
expansions: a 64-bit window of upcoming digits decides threshold exceedance
by integer comparison against exactly scaled arc endpoints (the truncation
error is one part in b^L, far below any tolerance used here).  Toral
automorphisms act exactly on the 2^-64 integer lattice, where the matrix
action modulo 2^64 is native unsigned wraparound.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .dynamics import ExpandingBase, MapSpec, ToralAuto, UnsupportedMapError, eigen_data
from .engine import EstimateResult, exceedance_union
from .geometry import IntervalSet, TorusRect
from .observables import ObservableSpec, thresholds

_WORD = 2**64


def _window_length(base: int) -> int:
    """Largest number of base-b digits that fits in an unsigned 64-bit word."""
    length = 0
    cap = _WORD
    while base ** (length + 1) <= cap:
        length += 1
    return length


def _ceil_scale(fr: Fraction, scale: int) -> int:
    return -((-fr.numerator * scale) // fr.denominator)


def _arc_bounds(region: IntervalSet, scale: int) -> list[tuple[np.uint64, np.uint64]]:
    """Integer window ranges [lo, hi] equivalent to membership in the arcs."""
    bounds = []
    for a, c in region.arcs:
        lo = _ceil_scale(a, scale)
        hi = _ceil_scale(c, scale) - 1
        if hi >= lo:
            bounds.append((np.uint64(lo), np.uint64(min(hi, _WORD - 1))))
    return bounds


def _member_windows(w: np.ndarray, bounds) -> np.ndarray:
    out = np.zeros(w.shape, dtype=bool)
    for lo, hi in bounds:
        out |= (w >= lo) & (w <= hi)
    return out


def _fold_windows(digits: np.ndarray, base: int, count: int, length: int) -> np.ndarray:
    w = np.zeros(count, dtype=np.uint64)
    for k in range(length):
        w = w * base + digits[k : k + count]
    return w


# ---------------------------------------------------------------------------
# torus helpers


def _rect_params(rects: Sequence[TorusRect]):
    out = []
    for r in rects:
        cu, cs = (float(c) for c in r.center)
        wu, ws = (float(w) for w in r.half_widths)
        out.append((cu, cs, wu, ws))
    return out


def _member_rects(xc, yc, frame, params) -> np.ndarray:
    pu = xc * frame.e_unstable[0] + yc * frame.e_unstable[1]
    ps = xc * frame.e_stable[0] + yc * frame.e_stable[1]
    out = np.zeros(np.shape(pu), dtype=bool)
    for cu, cs, wu, ws in params:
        out |= (np.abs(pu - cu) < wu) & (np.abs(ps - cs) < ws)
    return out


def _centered(words: np.ndarray) -> np.ndarray:
    return (words * 2.0**-64 + 0.5) % 1.0 - 0.5


def _toral_rects(spec: ObservableSpec, tau, n: int):
    tv = thresholds(spec, tau, n)
    rects = [s for s in tv.sets if isinstance(s, TorusRect)]
    if len(rects) != sum(1 for t in tv.tau if t != 0):
        raise UnsupportedMapError("toral runs need unstable-segment observables")
    return rects


def _matmul2(a, b):
    return (
        (a[0] * b[0] + a[1] * b[2]) % _WORD,
        (a[0] * b[1] + a[1] * b[3]) % _WORD,
        (a[2] * b[0] + a[3] * b[2]) % _WORD,
        (a[2] * b[1] + a[3] * b[3]) % _WORD,
    )


def _toral_orbit_member(
    map_spec: ToralAuto, rects, positions: int, rng, chunk: int = 4096
) -> np.ndarray:
    """Membership indicator along one exact lattice orbit of the automorphism."""
    frame = eigen_data(map_spec)
    params = _rect_params(rects)
    (a, b), (c, d) = map_spec.rows
    step = (a % _WORD, b % _WORD, c % _WORD, d % _WORD)
    size = min(chunk, positions)
    mats = []
    m = (1, 0, 0, 1)
    for _ in range(size):
        mats.append(m)
        m = _matmul2(step, m)
    m11 = np.array([t[0] for t in mats], dtype=np.uint64)
    m12 = np.array([t[1] for t in mats], dtype=np.uint64)
    m21 = np.array([t[2] for t in mats], dtype=np.uint64)
    m22 = np.array([t[3] for t in mats], dtype=np.uint64)
    u = int(rng.integers(0, _WORD - 1, dtype=np.uint64, endpoint=True))
    v = int(rng.integers(0, _WORD - 1, dtype=np.uint64, endpoint=True))
    member = np.empty(positions, dtype=bool)
    pos = 0
    while pos < positions:
        cnt = min(size, positions - pos)
        uu = m11[:cnt] * u + m12[:cnt] * v
        vv = m21[:cnt] * u + m22[:cnt] * v
        member[pos : pos + cnt] = _member_rects(_centered(uu), _centered(vv), frame, params)
        u, v = ((m[0] * u + m[1] * v) % _WORD, (m[2] * u + m[3] * v) % _WORD)
        pos += cnt
    return member


def _orbit_member(
    map_spec: MapSpec,
    spec: ObservableSpec,
    tau,
    n: int,
    positions: int,
    rng,
    boundary: str = "circle",
) -> np.ndarray:
    """Exceedance indicator X_t in U along one stationary orbit, t < positions."""
    if isinstance(map_spec, ExpandingBase):
        region = exceedance_union(spec, tau, n, boundary=boundary)
        base = map_spec.base
        length = _window_length(base)
        bounds = _arc_bounds(region, base**length)
        digits = rng.integers(0, base, size=positions + length - 1, dtype=np.uint8)
        w = _fold_windows(digits, base, positions, length)
        return _member_windows(w, bounds)
    if isinstance(map_spec, ToralAuto):
        if boundary != "circle":
            raise ValueError("toral systems have no interval-boundary variant")
        rects = _toral_rects(spec, tau, n)
        return _toral_orbit_member(map_spec, rects, positions, rng)
    raise UnsupportedMapError(f"unsupported map {map_spec!r}")


# ---------------------------------------------------------------------------
# batch-mean machinery


def _batch_edges(total: int, batches: int) -> np.ndarray:
    k = max(1, min(batches, total // 2))
    return np.linspace(0, total, k + 1, dtype=np.int64)


def _ratio_with_batch_stderr(num: np.ndarray, den: np.ndarray, batches: int):
    """Ratio of sums with a delta-method standard error over time batches."""
    total_d = int(den.sum())
    if total_d == 0:
        return math.nan, None, 0, 0
    total_n = int(num.sum())
    ratio = total_n / total_d
    edges = _batch_edges(len(num), batches)
    nb = np.add.reduceat(num.astype(np.int64), edges[:-1])
    db = np.add.reduceat(den.astype(np.int64), edges[:-1])
    k = len(nb)
    resid = nb - ratio * db
    var = float((resid @ resid)) / total_d**2
    if k > 1:
        var *= k / (k - 1)
    return ratio, math.sqrt(var), total_n, total_d


# ---------------------------------------------------------------------------
# estimators


def mc_block_maxima(
    map_spec: MapSpec,
    spec: ObservableSpec,
    tau,
    n: int,
    trials: int,
    seed: int,
    boundary: str = "circle",
    chunk: int = 512,
) -> EstimateResult:
    """Fraction of stationary length-n orbits that never enter the
    exceedance region — the direct estimate of the limiting law value."""
    if trials < 1:
        raise ValueError("trials must be positive")
    rng = np.random.default_rng(seed)
    if isinstance(map_spec, ExpandingBase):
        region = exceedance_union(spec, tau, n, boundary=boundary)
        base = map_spec.base
        length = _window_length(base)
        bounds = _arc_bounds(region, base**length)
        high = base ** (length - 1)
        init = rng.integers(0, base, size=(length, trials), dtype=np.uint8)
        w = np.zeros(trials, dtype=np.uint64)
        for k in range(length):
            w = w * base + init[k]
        alive = ~_member_windows(w, bounds)
        done = 1
        while done < n and alive.any():
            cnt = min(chunk, n - done)
            digits = rng.integers(0, base, size=(cnt, trials), dtype=np.uint8)
            for row in digits:
                w = (w % high) * base + row
                alive &= ~_member_windows(w, bounds)
            done += cnt
    elif isinstance(map_spec, ToralAuto):
        rects = _toral_rects(spec, tau, n)
        frame = eigen_data(map_spec)
        params = _rect_params(rects)
        (a, b), (c, d) = map_spec.rows
        a, b, c, d = a % _WORD, b % _WORD, c % _WORD, d % _WORD
        us = rng.integers(0, _WORD - 1, size=trials, dtype=np.uint64, endpoint=True)
        vs = rng.integers(0, _WORD - 1, size=trials, dtype=np.uint64, endpoint=True)
        alive = ~_member_rects(_centered(us), _centered(vs), frame, params)
        for _ in range(n - 1):
            us, vs = a * us + b * vs, c * us + d * vs
            alive &= ~_member_rects(_centered(us), _centered(vs), frame, params)
            if not alive.any():
                break
    else:
        raise UnsupportedMapError(f"unsupported map {map_spec!r}")
    p = float(alive.sum()) / trials
    stderr = math.sqrt(p * (1.0 - p) / trials)
    return EstimateResult(
        quantity="G",
        value=p,
        stderr=stderr,
        n=n,
        seed=seed,
        trials=trials,
        diagnostics={"method": "block-maxima"},
    )


def mc_theta_runs(
    map_spec: MapSpec,
    spec: ObservableSpec,
    tau,
    n: int,
    q: int,
    orbit_length: int,
    seed: int,
    batches: int = 1000,
    boundary: str = "circle",
) -> EstimateResult:
    """Cluster-opening ratio along one long stationary orbit.

    Counts times the orbit exceeds while staying sub-threshold for the next
    q steps, over all exceedance times; the standard error comes from batch
    means with a delta-method correction for the ratio.
    """
    if q < 0:
        raise ValueError("q must be non-negative")
    if orbit_length <= q:
        raise ValueError("orbit_length must exceed q")
    rng = np.random.default_rng(seed)
    member = _orbit_member(map_spec, spec, tau, n, orbit_length + q, rng, boundary)
    exceed = member[:orbit_length]
    blocked = np.zeros(orbit_length, dtype=bool)
    for j in range(1, q + 1):
        blocked |= member[j : orbit_length + j]
    openers = exceed & ~blocked
    ratio, stderr, opens, exceeds = _ratio_with_batch_stderr(openers, exceed, batches)
    status = "ok" if exceeds > 0 else "undefined"
    return EstimateResult(
        quantity="theta",
        value=ratio,
        stderr=stderr,
        n=n,
        q=q,
        seed=seed,
        trials=orbit_length,
        status=status,
        diagnostics={"exceedances": exceeds, "openers": opens},
    )


def mc_delta_prime(
    map_spec: MapSpec,
    spec: ObservableSpec,
    tau,
    n: int,
    q: int,
    orbit_length: int,
    seed: int,
    k_n: Optional[int] = None,
    j_cap: int = 20,
    batches: int = 1000,
    boundary: str = "circle",
) -> EstimateResult:
    """Orbit estimate of the anti-clustering partial sum.

    Empirical frequency of co-occurring cluster openings at separations
    j = q+1 .. min(n//k_n - 1, q + j_cap), scaled by n like the exact sum.
    """
    k = k_n if k_n is not None else math.isqrt(n)
    j_full = n // k - 1
    j_lo = q + 1
    j_hi = min(j_full, q + j_cap)
    rng = np.random.default_rng(seed)
    span = orbit_length + j_hi
    member = _orbit_member(map_spec, spec, tau, n, span + q, rng, boundary)
    exceed = member[:span]
    blocked = np.zeros(span, dtype=bool)
    for j in range(1, q + 1):
        blocked |= member[j : span + j]
    opener = exceed & ~blocked
    pairs = np.zeros(orbit_length, dtype=np.int32)
    head = opener[:orbit_length]
    for j in range(j_lo, j_hi + 1):
        pairs += head & opener[j : orbit_length + j]
    mean_pairs = float(pairs.sum()) / orbit_length
    value = n * mean_pairs
    edges = _batch_edges(orbit_length, batches)
    sums = np.add.reduceat(pairs.astype(np.int64), edges[:-1])
    sizes = np.diff(edges)
    resid = sums - mean_pairs * sizes
    var = float(resid @ resid) / orbit_length**2
    kb = len(sums)
    if kb > 1:
        var *= kb / (kb - 1)
    stderr = n * math.sqrt(var)
    return EstimateResult(
        quantity="delta_prime",
        value=value,
        stderr=stderr,
        n=n,
        q=q,
        seed=seed,
        trials=orbit_length,
        status="ok" if j_hi == j_full else "truncated",
        diagnostics={
            "j_lo": j_lo,
            "j_hi": j_hi,
            "j_full": j_full,
            "pair_count": int(pairs.sum()),
        },
    )


def autocovariance_diagnostic(
    map_spec: MapSpec,
    spec: ObservableSpec,
    tau,
    n: int,
    q: int,
    orbit_length: int,
    seed: int,
    lags: Sequence[int] = (1, 2, 5, 10, 20, 50),
    boundary: str = "circle",
) -> EstimateResult:
    """Empirical autocorrelation of the cluster-opening indicator.

    This is a plausibility check on short-range mixing only — it neither
    proves nor quantifies the mixing condition, hence its status label.
    """
    lags = tuple(sorted(set(int(v) for v in lags)))
    if not lags or lags[0] < 1:
        raise ValueError("lags must be positive")
    rng = np.random.default_rng(seed)
    span = orbit_length + lags[-1]
    member = _orbit_member(map_spec, spec, tau, n, span + q, rng, boundary)
    exceed = member[:span]
    blocked = np.zeros(span, dtype=bool)
    for j in range(1, q + 1):
        blocked |= member[j : span + j]
    opener = exceed & ~blocked
    head = opener[:orbit_length]
    p = float(head.mean())
    variance = p * (1.0 - p)
    rho: dict[int, float] = {}
    for lag in lags:
        joint = float((head & opener[lag : orbit_length + lag]).mean())
        rho[lag] = (joint - p * p) / variance if variance > 0 else math.nan
    worst = max((abs(v) for v in rho.values()), default=math.nan)
    return EstimateResult(
        quantity="autocov",
        value=worst,
        stderr=None,
        n=n,
        q=q,
        seed=seed,
        trials=orbit_length,
        status="diagnostic-only",
        diagnostics={"rho": rho, "mean": p},
    )
