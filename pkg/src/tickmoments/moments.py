"""Price moments over one interval: equal-weight and volume-weighted.

The market-based chain starts from VWAP and obtains the price volatility
from the volatilities of trade value and volume and their covariance, all of
which come straight from the interval's power sums.  The direct weighted sums
(:func:`weighted_price_moment`, :func:`direct_price_volatility`) work on the
raw trades and serve as an independent check of that decomposition.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .core import IntervalAggregate, Trade, Trades, as_trades
from .errors import ParameterError, UndefinedStatisticError


@dataclass(frozen=True)
class TradeMoments:
    """Equal-weight moments of trade value ``C`` and volume ``U``.

    ``corr_cu`` is the covariance ``E[CU] - E[C]E[U]`` (not normalised).
    """

    value_mean: float
    value_second: float
    volume_mean: float
    volume_second: float
    value_vol: float
    volume_vol: float
    corr_cu: float
    joint_mean: float

    @property
    def correlation(self) -> float:
        """Pearson correlation of value and volume, nan when either is constant."""
        denom = np.sqrt(self.value_vol * self.volume_vol)
        return float(self.corr_cu / denom) if denom > 0 else float("nan")


@dataclass(frozen=True)
class PriceStats:
    a1: float
    a2: float
    sigma2: float
    freq_mean: float
    freq_second: float
    p22: float
    count: int
    degenerate: bool = False

    @property
    def freq_var(self) -> float:
        return max(self.freq_second - self.freq_mean ** 2, 0.0)


def _require(n: int, what: str = "statistic"):
    if n < 1:
        raise UndefinedStatisticError(f"{what} is undefined on an empty sample")


def frequency_moment(samples: Sequence[float] | np.ndarray, n: int) -> float:
    """Equal-weight n-th moment ``(1/N) * sum(x**n)``."""
    if n < 1:
        raise ParameterError(f"moment order must be >= 1, got {n}")
    x = np.asarray(samples, dtype=np.float64)
    _require(x.size, "frequency moment")
    return float(np.sum(x ** n) / x.size)


def vwap(agg: IntervalAggregate) -> float:
    _require(agg.count, "VWAP")
    return agg.value_sum(1) / agg.volume_sum(1)


def weight_function(trades: Trades | Sequence[Trade], m: int) -> np.ndarray:
    """Normalised volume powers ``U_i**m / sum_j U_j**m``.

    These are weights, not price probabilities; they sum to one.
    """
    if m < 1:
        raise ParameterError(f"weight order must be >= 1, got {m}")
    t = as_trades(trades)
    _require(len(t), "weight function")
    um = t.volume ** m
    return um / np.sum(um)


def weighted_price_moment(trades: Trades | Sequence[Trade], n: int, m: int) -> float:
    """``sum_i p_i**n * w_i(m)``; equals VWAP for ``n = m = 1``."""
    if n < 1:
        raise ParameterError(f"moment order must be >= 1, got {n}")
    t = as_trades(trades)
    w = weight_function(t, m)
    return float(np.sum(t.price ** n * w))


def direct_price_volatility(trades: Trades | Sequence[Trade]) -> float:
    """Volatility as the explicit weighted sum ``sum_i (p_i - a1)**2 * w_i(2)``."""
    t = as_trades(trades)
    a1 = weighted_price_moment(t, 1, 1)
    return float(np.sum((t.price - a1) ** 2 * weight_function(t, 2)))


def trade_moments(agg: IntervalAggregate) -> TradeMoments:
    n = agg.count
    _require(n, "trade moments")
    c1 = agg.value_sum(1) / n
    c2 = agg.value_sum(2) / n
    u1 = agg.volume_sum(1) / n
    u2 = agg.volume_sum(2) / n
    cu = agg.joint_sum_cu / n
    if n == 1:
        # exact zeros; differences of rounded squares need not cancel
        return TradeMoments(c1, c2, u1, u2, 0.0, 0.0, 0.0, cu)
    return TradeMoments(
        value_mean=c1,
        value_second=c2,
        volume_mean=u1,
        volume_second=u2,
        value_vol=max(c2 - c1 * c1, 0.0),
        volume_vol=max(u2 - u1 * u1, 0.0),
        corr_cu=cu - c1 * u1,
        joint_mean=cu,
    )


def market_price_stats(agg: IntervalAggregate, tm: TradeMoments | None = None) -> PriceStats:
    """Market-based mean, second moment and volatility of price.

    The volatility is assembled from value/volume volatilities and their
    covariance, divided by the mean squared volume.  Single-trade intervals
    are flagged ``degenerate`` with zero volatility.
    """
    _require(agg.count, "price statistics")
    if tm is None:
        tm = trade_moments(agg)
    n = agg.count
    a1 = vwap(agg)
    freq_mean = agg.price_sum(1) / n
    freq_second = agg.price_sum(2) / n
    p22 = agg.value_sum(2) / agg.volume_sum(2)
    if n == 1:
        return PriceStats(a1, a1 * a1, 0.0, freq_mean, freq_second, p22, n, degenerate=True)
    u2 = tm.volume_second
    cross = 2.0 * a1 * tm.corr_cu
    sigma2 = (tm.value_vol + a1 * a1 * tm.volume_vol - cross) / u2
    a2 = (tm.value_second + 2.0 * a1 * a1 * tm.volume_vol - cross) / u2
    return PriceStats(
        a1=a1,
        a2=a2,
        sigma2=max(sigma2, 0.0),
        freq_mean=freq_mean,
        freq_second=freq_second,
        p22=p22,
        count=n,
    )


def price_stats(trades: Trades | Sequence[Trade]) -> PriceStats:
    """Convenience: price statistics of a batch treated as one interval."""
    return market_price_stats(IntervalAggregate.from_trades(trades))
