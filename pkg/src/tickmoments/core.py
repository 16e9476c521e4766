"""Trades, the interval partition of the time axis, and per-interval power sums.

Times are integer nanoseconds since the epoch.  Interval ``k`` of a grid with
origin ``t0`` and width ``delta`` is the half-open range
``[t0 + k*delta - delta/2, t0 + k*delta + delta/2)``, so every timestamp has
exactly one home interval.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import InputOrderError, ParameterError

N_MAX_LIMIT = 8
PRICE_IDENTITY_RTOL = 1e-9

# Below this mean group length numpy's pairwise sum degenerates to a plain
# loop anyway, so the vectorised reduceat path loses nothing.
_PAIRWISE_BLOCK = 128


@dataclass(frozen=True)
class Trade:
    """A single executed deal: ``value == price * volume``."""

    time: int
    price: float
    volume: float
    value: float

    def __post_init__(self):
        if not (self.price > 0 and self.volume > 0 and self.value > 0):
            raise ParameterError(
                f"trade at {self.time} needs positive price, volume and value")
        if abs(self.value - self.price * self.volume) > PRICE_IDENTITY_RTOL * self.value:
            raise ParameterError(
                f"trade at {self.time}: value {self.value!r} != price*volume")

    @classmethod
    def of(cls, time: int, price: float, volume: float) -> Trade:
        """Build a trade from price and volume, deriving the value."""
        price = float(price)
        volume = float(volume)
        return cls(int(time), price, volume, price * volume)


@dataclass(frozen=True, eq=False)
class Trades:
    """Column-oriented, immutable batch of trades.

    Prefer this over lists of :class:`Trade` for anything beyond a handful of
    ticks; every engine accepts either form.
    """

    time: np.ndarray
    price: np.ndarray
    volume: np.ndarray
    value: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name in ("time", "price", "volume", "value"):
            arr = getattr(self, name)
            arr.setflags(write=False)
        n = len(self.time)
        if not (len(self.price) == len(self.volume) == len(self.value) == n):
            raise ParameterError("trade columns must have equal length")

    @classmethod
    def from_arrays(cls, time, price, volume, *, validate: bool = True) -> Trades:
        time = np.array(time, dtype=np.int64)
        price = np.array(price, dtype=np.float64)
        volume = np.array(volume, dtype=np.float64)
        if validate and len(price):
            if not (np.all(np.isfinite(price)) and np.all(np.isfinite(volume))):
                raise ParameterError("prices and volumes must be finite")
            if not (np.all(price > 0) and np.all(volume > 0)):
                raise ParameterError("prices and volumes must be positive")
        return cls(time, price, volume, price * volume)

    @classmethod
    def from_records(cls, trades: Iterable[Trade]) -> Trades:
        trades = list(trades)
        return cls(
            np.array([t.time for t in trades], dtype=np.int64),
            np.array([t.price for t in trades], dtype=np.float64),
            np.array([t.volume for t in trades], dtype=np.float64),
            np.array([t.value for t in trades], dtype=np.float64),
        )

    @classmethod
    def empty(cls) -> Trades:
        return cls.from_arrays([], [], [])

    def __len__(self) -> int:
        return len(self.time)

    def __iter__(self) -> Iterator[Trade]:
        for t, p, u, c in zip(self.time.tolist(), self.price.tolist(),
                              self.volume.tolist(), self.value.tolist()):
            yield Trade(t, p, u, c)

    def __getitem__(self, item):
        if isinstance(item, (int, np.integer)):
            return Trade(int(self.time[item]), float(self.price[item]),
                         float(self.volume[item]), float(self.value[item]))
        return Trades(self.time[item], self.price[item], self.volume[item], self.value[item])

    def is_sorted(self) -> bool:
        return bool(np.all(self.time[1:] >= self.time[:-1]))

    def sorted(self) -> Trades:
        """Stable sort by time (ties keep input order)."""
        order = np.argsort(self.time, kind="stable")
        return self[order]

    def concat(self, other: Trades) -> Trades:
        return Trades(np.concatenate([self.time, other.time]),
                      np.concatenate([self.price, other.price]),
                      np.concatenate([self.volume, other.volume]),
                      np.concatenate([self.value, other.value]))


def as_trades(trades: Trades | Sequence[Trade]) -> Trades:
    if isinstance(trades, Trades):
        return trades
    return Trades.from_records(trades)


@dataclass(frozen=True)
class IntervalGrid:
    """Partition of the time axis into intervals of ``width`` ns centred on
    ``origin + k*width``."""

    origin: int
    width: int

    def __post_init__(self):
        if self.width <= 0:
            raise ParameterError(f"grid width must be positive, got {self.width}")

    def index_of(self, time: int) -> int:
        # k = floor((t - t0)/w + 1/2), in exact integer arithmetic
        return (2 * (int(time) - self.origin) + self.width) // (2 * self.width)

    def indices(self, times: np.ndarray) -> np.ndarray:
        times = np.asarray(times, dtype=np.int64)
        return (2 * (times - np.int64(self.origin)) + np.int64(self.width)) // np.int64(2 * self.width)

    def center(self, k: int) -> int:
        return self.origin + self.width * int(k)

    def bounds(self, k: int) -> tuple[float, float]:
        """Half-open ``[lo, hi)`` bounds; may be half-integer for odd widths."""
        c = self.center(k)
        return c - self.width / 2, c + self.width / 2

    def contains(self, k: int, time: int) -> bool:
        lo2 = 2 * self.center(k) - self.width
        return lo2 <= 2 * int(time) < lo2 + 2 * self.width


def assign_interval(time: int, grid: IntervalGrid) -> int:
    """Index ``k`` of the interval holding ``time``; boundaries go up."""
    return grid.index_of(time)


@dataclass(frozen=True)
class IntervalAggregate:
    """Power sums of trade value, volume and price over one interval.

    ``value_power_sums[n-1]`` is the sum of ``value**n`` over the interval's
    trades, for ``n = 1..n_max``; likewise for volume and price.  The price
    sums feed the conventional (equal-weight) moments kept for contrast.
    """

    interval_index: int
    count: int
    value_power_sums: tuple[float, ...]
    volume_power_sums: tuple[float, ...]
    joint_sum_cu: float
    price_power_sums: tuple[float, ...]

    @property
    def n_max(self) -> int:
        return len(self.value_power_sums)

    def value_sum(self, n: int = 1) -> float:
        return self.value_power_sums[n - 1]

    def volume_sum(self, n: int = 1) -> float:
        return self.volume_power_sums[n - 1]

    def price_sum(self, n: int = 1) -> float:
        return self.price_power_sums[n - 1]

    def merge(self, other: IntervalAggregate) -> IntervalAggregate:
        if other.interval_index != self.interval_index or other.n_max != self.n_max:
            raise ParameterError("can only merge aggregates of the same interval and order")
        add = lambda a, b: tuple(x + y for x, y in zip(a, b))
        return IntervalAggregate(
            self.interval_index,
            self.count + other.count,
            add(self.value_power_sums, other.value_power_sums),
            add(self.volume_power_sums, other.volume_power_sums),
            self.joint_sum_cu + other.joint_sum_cu,
            add(self.price_power_sums, other.price_power_sums),
        )

    @classmethod
    def from_trades(cls, trades: Trades | Sequence[Trade], interval_index: int = 0,
                    n_max: int = 2) -> IntervalAggregate:
        """Aggregate every given trade into a single interval."""
        _check_n_max(n_max)
        t = as_trades(trades)
        if len(t) == 0:
            zeros = (0.0,) * n_max
            return cls(interval_index, 0, zeros, zeros, 0.0, zeros)
        sums = _power_sums(t, n_max, np.array([0]))
        return _aggregate_at(sums, 0, interval_index, len(t))


def _check_n_max(n_max: int):
    if not 2 <= n_max <= N_MAX_LIMIT:
        raise ParameterError(f"n_max must lie in [2, {N_MAX_LIMIT}], got {n_max}")


def group_starts(keys: np.ndarray) -> np.ndarray:
    """Start offsets of the runs of equal values in a sorted key array."""
    if len(keys) == 0:
        return np.zeros(0, dtype=np.intp)
    return np.concatenate([[0], np.flatnonzero(keys[1:] != keys[:-1]) + 1])


def grouped_sum(x: np.ndarray, starts: np.ndarray) -> np.ndarray:
    """Sum ``x`` over contiguous groups beginning at ``starts``.

    Large groups are summed one by one with numpy's pairwise summation.
    """
    n = len(x)
    if len(starts) == 0:
        return np.zeros(0)
    if n / len(starts) <= _PAIRWISE_BLOCK:
        return np.add.reduceat(x, starts)
    ends = np.append(starts[1:], n)
    return np.array([x[s:e].sum() for s, e in zip(starts.tolist(), ends.tolist())])


def _power_sums(t: Trades, n_max: int, starts: np.ndarray) -> dict:
    cols = {}
    for name, arr in (("value", t.value), ("volume", t.volume), ("price", t.price)):
        powers = []
        cur = arr
        for order in range(1, n_max + 1):
            if order > 1:
                cur = cur * arr
            powers.append(grouped_sum(cur, starts))
        cols[name] = powers
    cols["joint"] = grouped_sum(t.value * t.volume, starts)
    return cols


def _aggregate_at(sums: dict, g: int, k: int, count: int) -> IntervalAggregate:
    return IntervalAggregate(
        int(k),
        int(count),
        tuple(float(s[g]) for s in sums["value"]),
        tuple(float(s[g]) for s in sums["volume"]),
        float(sums["joint"][g]),
        tuple(float(s[g]) for s in sums["price"]),
    )


def aggregate(trades: Trades | Sequence[Trade], grid: IntervalGrid,
              n_max: int = 2) -> dict[int, IntervalAggregate]:
    """Per-interval power sums, keyed by interval index.

    Intervals without trades are absent from the result.
    """
    _check_n_max(n_max)
    t = as_trades(trades)
    if len(t) == 0:
        return {}
    if not t.is_sorted():
        raise InputOrderError("trades must be sorted by time ascending")
    keys = grid.indices(t.time)
    starts = group_starts(keys)
    counts = np.diff(np.append(starts, len(t)))
    sums = _power_sums(t, n_max, starts)
    return {
        int(keys[s]): _aggregate_at(sums, g, keys[s], counts[g])
        for g, s in enumerate(starts.tolist())
    }


def merge_aggregates(a: Mapping[int, IntervalAggregate],
                     b: Mapping[int, IntervalAggregate]) -> dict[int, IntervalAggregate]:
    """Field-wise union of two aggregate maps (associative and commutative)."""
    out = dict(a)
    for k, agg in b.items():
        out[k] = out[k].merge(agg) if k in out else agg
    return dict(sorted(out.items()))

