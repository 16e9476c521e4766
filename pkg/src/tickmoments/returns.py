"""Lagged gross returns and their value-weighted statistics.

Each trade's return is its price over the price ``tau`` earlier, where the
earlier price is that of the last trade at or before ``t - tau``.  The trade
volume valued at that past price (the *past value*) is the weight: the
average return is total current value over total past value, the way a
portfolio return weights each holding by the amount invested.
"""

from __future__ import annotations

from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np

from .core import IntervalGrid, Trade, Trades, as_trades, group_starts, grouped_sum
from .errors import (
    InputOrderError,
    InsufficientHistoryError,
    ParameterError,
    UndefinedStatisticError,
)


@dataclass(frozen=True)
class ReturnObservation:
    time: int
    ret: float
    past_value: float
    current_value: float


@dataclass(frozen=True, eq=False)
class ReturnSeries:
    """Columnar return observations plus the number of trades dropped for
    lack of history."""

    time: np.ndarray
    ret: np.ndarray
    past_value: np.ndarray
    current_value: np.ndarray
    dropped: int = 0

    @classmethod
    def from_observations(cls, obs: Sequence[ReturnObservation], dropped: int = 0) -> ReturnSeries:
        obs = list(obs)
        return cls(
            np.array([o.time for o in obs], dtype=np.int64),
            np.array([o.ret for o in obs], dtype=np.float64),
            np.array([o.past_value for o in obs], dtype=np.float64),
            np.array([o.current_value for o in obs], dtype=np.float64),
            dropped,
        )

    def __len__(self) -> int:
        return len(self.time)

    def __iter__(self) -> Iterator[ReturnObservation]:
        for row in zip(self.time.tolist(), self.ret.tolist(),
                       self.past_value.tolist(), self.current_value.tolist()):
            yield ReturnObservation(*row)

    def __getitem__(self, item) -> ReturnSeries:
        return ReturnSeries(self.time[item], self.ret[item], self.past_value[item],
                            self.current_value[item], 0)

    @property
    def drop_fraction(self) -> float:
        total = len(self) + self.dropped
        return self.dropped / total if total else 0.0


def _as_series(obs: ReturnSeries | Sequence[ReturnObservation]) -> ReturnSeries:
    if isinstance(obs, ReturnSeries):
        return obs
    return ReturnSeries.from_observations(obs)


def _check_history(history: Trades, tau: int):
    if tau <= 0:
        raise ParameterError(f"lag must be positive, got {tau}")
    if not history.is_sorted():
        raise InputOrderError("history must be sorted by time ascending")


def past_price(history: Trades | Sequence[Trade], t: int, tau: int) -> float:
    """Price of the last trade at or before ``t - tau``."""
    h = as_trades(history)
    _check_history(h, tau)
    i = int(np.searchsorted(h.time, int(t) - int(tau), side="right")) - 1
    if i < 0:
        raise InsufficientHistoryError(f"no trade at or before {int(t) - int(tau)}")
    return float(h.price[i])


def build_return_series(trades: Trades | Sequence[Trade], history: Trades | Sequence[Trade],
                        tau: int) -> ReturnSeries:
    """Return observations for ``trades`` with past prices looked up in
    ``history``.  Trades without a past price are dropped and counted."""
    t = as_trades(trades)
    h = as_trades(history)
    _check_history(h, tau)
    idx = np.searchsorted(h.time, t.time - np.int64(tau), side="right") - 1
    keep = idx >= 0
    past_p = h.price[idx[keep]]
    return ReturnSeries(
        time=t.time[keep],
        ret=t.price[keep] / past_p,
        past_value=past_p * t.volume[keep],
        current_value=t.value[keep],
        dropped=int(len(t) - np.count_nonzero(keep)),
    )


@dataclass(frozen=True)
class ReturnAggregate:
    """Sums over one interval's return observations."""

    count: int
    value_sum: float
    value_sq_sum: float
    past_sum: float
    past_sq_sum: float
    cross_sum: float
    ret_sum: float
    ret_sq_sum: float

    @classmethod
    def from_series(cls, obs: ReturnSeries | Sequence[ReturnObservation]) -> ReturnAggregate:
        s = _as_series(obs)
        c, co, r = s.current_value, s.past_value, s.ret
        return cls(len(s), float(c.sum()), float((c * c).sum()), float(co.sum()),
                   float((co * co).sum()), float((c * co).sum()), float(r.sum()),
                   float((r * r).sum()))


def aggregate_returns(obs: ReturnSeries, grid: IntervalGrid) -> dict[int, ReturnAggregate]:
    """Per-interval :class:`ReturnAggregate`, keyed by the interval of each
    observation's own (current) time.  ``obs`` must be time-sorted."""
    if len(obs) == 0:
        return {}
    if np.any(obs.time[1:] < obs.time[:-1]):
        raise InputOrderError("return observations must be sorted by time ascending")
    keys = grid.indices(obs.time)
    starts = group_starts(keys)
    counts = np.diff(np.append(starts, len(obs)))
    c, co, r = obs.current_value, obs.past_value, obs.ret
    cols = [grouped_sum(x, starts) for x in (c, c * c, co, co * co, c * co, r, r * r)]
    return {
        int(keys[s]): ReturnAggregate(int(counts[g]), *(float(col[g]) for col in cols))
        for g, s in enumerate(starts.tolist())
    }


@dataclass(frozen=True)
class ReturnStats:
    h1: float
    h2m: float
    v2: float
    past_mean: float
    past_second: float
    phi2: float
    corr_c_co: float
    value_mean: float
    value_vol: float
    freq_mean: float
    freq_second: float
    count: int
    degenerate: bool = False

    @property
    def freq_var(self) -> float:
        return max(self.freq_second - self.freq_mean ** 2, 0.0)


def return_stats_from_aggregate(agg: ReturnAggregate) -> ReturnStats:
    n = agg.count
    if n < 1:
        raise UndefinedStatisticError("return statistics are undefined without observations")
    c1 = agg.value_sum / n
    c2 = agg.value_sq_sum / n
    co1 = agg.past_sum / n
    co2 = agg.past_sq_sum / n
    h1 = agg.value_sum / agg.past_sum
    freq_mean = agg.ret_sum / n
    freq_second = agg.ret_sq_sum / n
    if n == 1:
        return ReturnStats(h1, h1 * h1, 0.0, co1, co2, 0.0, 0.0, c1, 0.0,
                           freq_mean, freq_second, n, degenerate=True)
    omega_c = max(c2 - c1 * c1, 0.0)
    phi2 = max(co2 - co1 * co1, 0.0)
    corr = agg.cross_sum / n - c1 * co1
    cross = 2.0 * h1 * corr
    v2 = (omega_c + h1 * h1 * phi2 - cross) / co2
    h2m = (c2 + 2.0 * h1 * h1 * phi2 - cross) / co2
    return ReturnStats(
        h1=h1,
        h2m=h2m,
        v2=max(v2, 0.0),
        past_mean=co1,
        past_second=co2,
        phi2=phi2,
        corr_c_co=corr,
        value_mean=c1,
        value_vol=omega_c,
        freq_mean=freq_mean,
        freq_second=freq_second,
        count=n,
    )


def return_stats(obs: ReturnSeries | Sequence[ReturnObservation]) -> ReturnStats:
    """Value-weighted average return and its volatility decomposition."""
    return return_stats_from_aggregate(ReturnAggregate.from_series(obs))


def direct_return_volatility(obs: ReturnSeries | Sequence[ReturnObservation]) -> float:
    """``sum_i (r_i - h1)**2 * Co_i**2 / sum_j Co_j**2`` on the raw observations."""
    s = _as_series(obs)
    if len(s) == 0:
        raise UndefinedStatisticError("return volatility is undefined without observations")
    h1 = float(np.sum(s.ret * s.past_value) / np.sum(s.past_value))
    w = s.past_value ** 2
    return float(np.sum((s.ret - h1) ** 2 * w) / np.sum(w))
