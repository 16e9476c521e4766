"""Secondary averaging of per-interval first moments over longer windows.

A level-``j`` series holds, per interval, the mean trade value, mean volume
and (when lagged returns were computed) the mean past value.  :func:`lift`
groups ``M`` consecutive level-``j`` intervals into one level-``j+1``
interval and treats the ``M`` mean values and volumes exactly as single
trades are treated one level down: the secondary average price is their
ratio of sums and its volatility is decomposed through their variances and
covariance.  The output series carries the window means, so lifts compose.

Windows tile the level-``j`` index range starting at the first point.  A
window that is missing some of its ``M`` intervals (no trades there, or the
trailing end of the data) is *partial*; partial windows are dropped unless
``partial="flag"``, in which case they are averaged over the points present.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
import math

from .core import IntervalAggregate, IntervalGrid
from .errors import IncompleteWindowError, ParameterError, UndefinedStatisticError
from .returns import ReturnAggregate

PARTIAL_POLICIES = ("drop", "flag")


@dataclass(frozen=True)
class LevelPoint:
    index: int
    time: int
    value_mean: float
    volume_mean: float
    past_value_mean: float | None = None
    count: int = 1
    partial: bool = False

    @property
    def price(self) -> float:
        return self.value_mean / self.volume_mean

    @property
    def ret(self) -> float | None:
        if self.past_value_mean is None:
            return None
        return self.value_mean / self.past_value_mean


@dataclass(frozen=True)
class LevelSeries:
    level: int
    grid: IntervalGrid
    points: tuple[LevelPoint, ...]
    dropped_windows: int = 0

    def __post_init__(self):
        if self.level < 1:
            raise ParameterError("levels are numbered from 1")
        object.__setattr__(self, "points", tuple(self.points))
        for a, b in zip(self.points, self.points[1:]):
            if b.index <= a.index:
                raise ParameterError("level points must have strictly increasing indices")
        for p in self.points:
            if not (p.value_mean > 0 and p.volume_mean > 0):
                raise ParameterError(f"non-positive mean at index {p.index}")
            if p.past_value_mean is not None and not p.past_value_mean > 0:
                raise ParameterError(f"non-positive past-value mean at index {p.index}")

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class SecondaryStats:
    """Statistics of one window of level-``j`` first moments.

    ``*_moments`` hold the window means of the first and second powers, e.g.
    ``value_moments = (mean C_k, mean C_k**2)``.  ``corr_*`` are covariances.
    Return fields are ``None`` when some point lacks a past-value mean.
    """

    index: int
    time: int
    n_points: int
    partial: bool
    a2_price: float
    sigma2_price: float
    value_moments: tuple[float, float]
    volume_moments: tuple[float, float]
    omega_c2: float
    omega_u2: float
    corr_cu2: float
    joint_cu2: float
    h2_return: float | None = None
    v2_return: float | None = None
    past_moments: tuple[float, float] | None = None
    phi_2sq: float | None = None
    corr_cco2: float | None = None
    joint_cco2: float | None = field(default=None, repr=False)


@dataclass(frozen=True)
class _Moments:
    first: float
    second: float
    total: float

    @property
    def vol(self) -> float:
        return max(self.second - self.first * self.first, 0.0)


def _moments(xs: Sequence[float]) -> _Moments:
    m = len(xs)
    total = math.fsum(xs)
    return _Moments(total / m, math.fsum(x * x for x in xs) / m, total)


def _covariance(xs, ys, mx: _Moments, my: _Moments) -> tuple[float, float]:
    joint = math.fsum(x * y for x, y in zip(xs, ys)) / len(xs)
    return joint, joint - mx.first * my.first


def _decomposed_vol(omega_num: float, ratio: float, omega_den: float, cov: float,
                    den_second: float) -> float:
    v = (omega_num + ratio * ratio * omega_den - 2.0 * ratio * cov) / den_second
    return max(v, 0.0)


def secondary_price_stats(window: Sequence[LevelPoint]) -> tuple[float, float]:
    """Secondary average price and the volatility of the window's average prices."""
    if not window:
        raise UndefinedStatisticError("secondary price statistics need at least one point")
    c = [p.value_mean for p in window]
    u = [p.volume_mean for p in window]
    mc, mu = _moments(c), _moments(u)
    a2 = mc.total / mu.total
    if len(window) == 1:
        return a2, 0.0
    _, cov = _covariance(c, u, mc, mu)
    return a2, _decomposed_vol(mc.vol, a2, mu.vol, cov, mu.second)


def secondary_return_stats(window: Sequence[LevelPoint]) -> tuple[float, float]:
    """Secondary average return and the volatility of the window's average returns."""
    if not window:
        raise UndefinedStatisticError("secondary return statistics need at least one point")
    if any(p.past_value_mean is None for p in window):
        raise IncompleteWindowError("every point needs a past-value mean")
    c = [p.value_mean for p in window]
    co = [p.past_value_mean for p in window]
    mc, mo = _moments(c), _moments(co)
    h2 = mc.total / mo.total
    if len(window) == 1:
        return h2, 0.0
    _, cov = _covariance(c, co, mc, mo)
    return h2, _decomposed_vol(mc.vol, h2, mo.vol, cov, mo.second)


def window_stats(window: Sequence[LevelPoint], index: int = 0, time: int = 0,
                 partial: bool = False) -> SecondaryStats:
    """Full :class:`SecondaryStats` record for one window."""
    if not window:
        raise UndefinedStatisticError("empty window")
    c = [p.value_mean for p in window]
    u = [p.volume_mean for p in window]
    mc, mu = _moments(c), _moments(u)
    joint_cu, cov_cu = _covariance(c, u, mc, mu)
    a2, sigma2 = secondary_price_stats(window)
    single = len(window) == 1
    stats = dict(
        index=index, time=time, n_points=len(window), partial=partial,
        a2_price=a2, sigma2_price=sigma2,
        value_moments=(mc.first, mc.second), volume_moments=(mu.first, mu.second),
        omega_c2=0.0 if single else mc.vol, omega_u2=0.0 if single else mu.vol,
        corr_cu2=0.0 if single else cov_cu, joint_cu2=joint_cu,
    )
    if all(p.past_value_mean is not None for p in window):
        co = [p.past_value_mean for p in window]
        mo = _moments(co)
        joint_cco, cov_cco = _covariance(c, co, mc, mo)
        h2, v2 = secondary_return_stats(window)
        stats.update(
            h2_return=h2, v2_return=v2, past_moments=(mo.first, mo.second),
            phi_2sq=0.0 if single else mo.vol, corr_cco2=0.0 if single else cov_cco,
            joint_cco2=joint_cco,
        )
    return SecondaryStats(**stats)


def level_series(aggregates: Mapping[int, IntervalAggregate], grid: IntervalGrid,
                 return_aggregates: Mapping[int, ReturnAggregate] | None = None) -> LevelSeries:
    """Level-1 series of per-interval means.

    An interval gets a past-value mean only when every one of its trades had
    a lagged price, so that value and past value average the same trades.
    """
    return_aggregates = return_aggregates or {}
    points = []
    for k in sorted(aggregates):
        agg = aggregates[k]
        if agg.count < 1:
            continue
        ra = return_aggregates.get(k)
        past = ra.past_sum / ra.count if ra is not None and ra.count == agg.count else None
        points.append(LevelPoint(
            index=k,
            time=grid.center(k),
            value_mean=agg.value_sum(1) / agg.count,
            volume_mean=agg.volume_sum(1) / agg.count,
            past_value_mean=past,
            count=agg.count,
        ))
    return LevelSeries(1, grid, tuple(points))


def lift(series: LevelSeries, factor: int,
         partial: str = "drop") -> tuple[LevelSeries, list[SecondaryStats]]:
    """Average ``factor`` consecutive intervals into one interval of the next level."""
    if factor < 2:
        raise ParameterError(f"lift factor must be >= 2, got {factor}")
    if partial not in PARTIAL_POLICIES:
        raise ParameterError(f"partial policy must be one of {PARTIAL_POLICIES}, got {partial!r}")
    width = series.grid.width
    if not series.points:
        grid = IntervalGrid(series.grid.origin, factor * width)
        return LevelSeries(series.level + 1, grid, ()), []
    base = series.points[0].index
    # the new interval 0 spans exactly the old intervals base .. base+factor-1;
    # its centre is floored to whole nanoseconds when (factor-1)*width is odd
    grid = IntervalGrid(series.grid.center(base) + ((factor - 1) * width) // 2,
                        factor * width)

    windows: dict[int, list[LevelPoint]] = {}
    for p in series.points:
        windows.setdefault((p.index - base) // factor, []).append(p)

    points, stats, dropped = [], [], 0
    for w, members in windows.items():
        is_partial = len(members) < factor
        if is_partial and partial == "drop":
            dropped += 1
            continue
        st = window_stats(members, index=w, time=grid.center(w), partial=is_partial)
        stats.append(st)
        points.append(LevelPoint(
            index=w,
            time=st.time,
            value_mean=st.value_moments[0],
            volume_mean=st.volume_moments[0],
            past_value_mean=st.past_moments[0] if st.past_moments else None,
            count=sum(p.count for p in members),
            partial=is_partial,
        ))
    return LevelSeries(series.level + 1, grid, tuple(points), dropped), stats


def lift_levels(series: LevelSeries, factors: Sequence[int],
                partial: str = "drop") -> list[tuple[LevelSeries, list[SecondaryStats]]]:
    """Apply :func:`lift` repeatedly, once per factor."""
    out = []
    for m in factors:
        series, stats = lift(series, m, partial)
        out.append((series, stats))
    return out
