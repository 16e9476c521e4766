"""Built-in oracle checks run by ``tickmoments selftest``.

Each check pits a closed-form result against an independent route (direct
weighted sums, equal-weight reductions, bisection on ``erf``) on fixtures
and seeded random data.
"""

from __future__ import annotations

from collections.abc import Callable
from fractions import Fraction
import math

import numpy as np

from .core import IntervalAggregate, Trades
from .hierarchy import LevelPoint, secondary_price_stats, secondary_return_stats
from .moments import direct_price_volatility, market_price_stats, price_stats
from .returns import ReturnObservation, direct_return_volatility, return_stats
from .risk import gaussian_var

RTOL = 1e-12


def _rel(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale else 0.0


def _random_trades(rng, n, price_sd=0.5, volume_sd=1.0, constant_volume=False) -> Trades:
    price = np.exp(rng.normal(np.log(50.0), price_sd, n))
    volume = np.full(n, rng.uniform(0.5, 5)) if constant_volume else np.exp(rng.normal(0, volume_sd, n))
    return Trades.from_arrays(np.arange(n), price, volume)


def check_price_fixture() -> float:
    ps = price_stats(Trades.from_arrays([0, 1], [10.0, 12.0], [2.0, 3.0]))
    return max(_rel(ps.a1, 11.2), _rel(ps.sigma2, 5.76 / 6.5), _rel(ps.a2, 821.12 / 6.5))


def check_return_fixture() -> float:
    obs = [ReturnObservation(0, 1.25, 16.0, 20.0), ReturnObservation(1, 1.2, 30.0, 36.0)]
    rs = return_stats(obs)
    h = Fraction(56, 46)
    pairs = [(Fraction(5, 4), 16), (Fraction(6, 5), 30)]
    v2 = sum((r - h) ** 2 * co * co for r, co in pairs) / sum(co * co for _, co in pairs)
    return max(_rel(rs.h1, 56 / 46), _rel(rs.v2, float(v2)),
               _rel(rs.v2, direct_return_volatility(obs)))


def check_price_decomposition(rng, sets=200) -> float:
    worst = 0.0
    for _ in range(sets):
        t = _random_trades(rng, int(rng.integers(2, 300)))
        ps = market_price_stats(IntervalAggregate.from_trades(t))
        worst = max(worst, _rel(ps.sigma2, direct_price_volatility(t)),
                    _rel(ps.a2, ps.sigma2 + ps.a1 ** 2))
    return worst


def check_return_decomposition(rng, sets=200) -> float:
    worst = 0.0
    for _ in range(sets):
        n = int(rng.integers(2, 300))
        past_p = np.exp(rng.normal(np.log(50.0), 0.5, n))
        ret = np.exp(rng.normal(0.0, 0.5, n))
        vol = np.exp(rng.normal(0.0, 1.0, n))
        obs = [ReturnObservation(i, r, pp * u, r * pp * u)
               for i, (r, pp, u) in enumerate(zip(ret, past_p, vol))]
        worst = max(worst, _rel(return_stats(obs).v2, direct_return_volatility(obs)))
    return worst


def check_constant_volume(rng, sets=100) -> float:
    worst = 0.0
    for _ in range(sets):
        t = _random_trades(rng, int(rng.integers(2, 300)), constant_volume=True)
        ps = price_stats(t)
        p = t.price.tolist()
        mean = math.fsum(p) / len(p)
        var = math.fsum((x - mean) ** 2 for x in p) / len(p)
        worst = max(worst, _rel(ps.a1, mean), _rel(ps.sigma2, var))
    return worst


def check_hierarchy_identity(rng, windows=50) -> float:
    worst = 0.0
    for _ in range(windows):
        m = int(rng.integers(2, 40))
        c = np.exp(rng.normal(np.log(100.0), 0.5, m))
        u = np.exp(rng.normal(0.0, 0.5, m))
        co = c / np.exp(rng.normal(0.0, 0.5, m))
        pts = [LevelPoint(i, i, ci, ui, coi) for i, (ci, ui, coi) in enumerate(zip(c, u, co))]
        a2, s2 = secondary_price_stats(pts)
        h2, v2 = secondary_return_stats(pts)
        level1 = price_stats(Trades.from_arrays(np.arange(m), c / u, u))
        rs = return_stats([ReturnObservation(i, ci / coi, coi, ci)
                           for i, (ci, coi) in enumerate(zip(c, co))])
        worst = max(worst, _rel(a2, level1.a1), _rel(s2, level1.sigma2),
                    _rel(h2, rs.h1), _rel(v2, rs.v2))
    return worst


def _bisect_quantile(alpha: float) -> float:
    lo, hi = -40.0, 40.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if 0.5 * math.erfc(-mid / math.sqrt(2.0)) < alpha:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def check_var_quantile() -> float:
    worst = abs(gaussian_var(0.0, 1.0, 0.05) - (-1.6448536269514722))
    for alpha in (0.001, 0.01, 0.05, 0.25, 0.5, 0.9):
        worst = max(worst, abs(gaussian_var(0.0, 1.0, alpha) - _bisect_quantile(alpha)))
    return worst


def run_checks(seed: int = 20240415) -> list[tuple[str, bool, float, float]]:
    """Run every check; returns ``(name, passed, worst_error, tolerance)`` rows."""
    rng = np.random.default_rng(seed)
    checks: list[tuple[str, Callable[[], float], float]] = [
        ("price hand fixture", check_price_fixture, RTOL),
        ("return hand fixture", check_return_fixture, RTOL),
        ("price decomposition vs weighted sum", lambda: check_price_decomposition(rng), RTOL),
        ("return decomposition vs weighted sum", lambda: check_return_decomposition(rng), RTOL),
        ("constant-volume reduction", lambda: check_constant_volume(rng), RTOL),
        ("secondary stats vs level-1 engine", lambda: check_hierarchy_identity(rng), RTOL),
        ("gaussian quantile vs bisection", check_var_quantile, 1e-9),
    ]
    out = []
    for name, fn, tol in checks:
        err = fn()
        out.append((name, err <= tol, err, tol))
    return out
