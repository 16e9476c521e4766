"""End-to-end run: trades -> interval statistics -> hierarchy levels -> VaR."""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
import logging
import os
from pathlib import Path
import re

from .core import IntervalGrid, N_MAX_LIMIT, Trades, aggregate
from .errors import DataError, ParameterError, UndefinedStatisticError
from .hierarchy import PARTIAL_POLICIES, LevelSeries, SecondaryStats, level_series, lift
from .io import write_json, write_table
from .moments import PriceStats, market_price_stats, trade_moments
from .returns import ReturnStats, aggregate_returns, build_return_series, return_stats_from_aggregate
from .risk import compare_var

log = logging.getLogger(__name__)

_UNITS_NS = {"ns": 1, "us": 10**3, "ms": 10**6, "s": 10**9, "m": 60 * 10**9,
             "h": 3600 * 10**9, "d": 86400 * 10**9}
_DURATION = re.compile(r"^\s*(\d+(?:\.\d*)?|\.\d+)\s*(ns|us|ms|s|m|h|d)?\s*$")


def parse_duration(text: str) -> int:
    """``"250ms"`` -> 250_000_000.  A bare number is nanoseconds."""
    m = _DURATION.match(str(text))
    if not m:
        raise ParameterError(f"bad duration {text!r}; use e.g. 500ms, 1.5s, 5m")
    try:
        ns = Decimal(m.group(1)) * _UNITS_NS[m.group(2) or "ns"]
    except InvalidOperation:
        raise ParameterError(f"bad duration {text!r}") from None
    if ns != ns.to_integral_value():
        raise ParameterError(f"duration {text!r} is not a whole number of nanoseconds")
    return int(ns)


@dataclass(frozen=True)
class RunConfig:
    delta: int
    tau: int | None = None
    origin: int | None = None
    levels: tuple[int, ...] = ()
    n_max: int = 2
    alphas: tuple[float, ...] = (0.01, 0.05)
    fmt: str = "json"
    partial: str = "drop"
    input_path: str | None = None
    out_dir: str | None = None

    def __post_init__(self):
        if self.delta <= 0:
            raise ParameterError("delta must be positive")
        if self.tau is not None and self.tau <= 0:
            raise ParameterError("tau must be positive")
        if any(m < 2 for m in self.levels):
            raise ParameterError("every level factor must be >= 2")
        if not 2 <= self.n_max <= N_MAX_LIMIT:
            raise ParameterError(f"nmax must lie in [2, {N_MAX_LIMIT}]")
        if any(not 0 < a < 1 for a in self.alphas):
            raise ParameterError("alphas must lie in (0, 1)")
        if self.fmt not in ("json", "csv"):
            raise ParameterError("format must be json or csv")
        if self.partial not in PARTIAL_POLICIES:
            raise ParameterError(f"partial policy must be one of {PARTIAL_POLICIES}")


@dataclass
class IntervalResult:
    index: int
    time: int
    count: int
    price: PriceStats | None = None
    moments: object = None
    returns: ReturnStats | None = None
    ret_count: int = 0


@dataclass
class Report:
    config: RunConfig
    grid: IntervalGrid
    intervals: list[IntervalResult]
    levels: list[tuple[LevelSeries, list[SecondaryStats]]]
    diagnostics: dict = field(default_factory=dict)


def run(trades: Trades, config: RunConfig) -> Report:
    """Compute every statistic for a time-sorted trade batch."""
    if len(trades) == 0:
        raise DataError("no trades to analyse")
    if not trades.is_sorted():
        trades = trades.sorted()
    origin = int(trades.time[0]) if config.origin is None else config.origin
    grid = IntervalGrid(origin, config.delta)
    aggs = aggregate(trades, grid, config.n_max)
    if not aggs:
        raise DataError("no usable intervals")

    ret_aggs = {}
    series = None
    if config.tau is not None:
        series = build_return_series(trades, trades, config.tau)
        ret_aggs = aggregate_returns(series, grid)

    k_lo, k_hi = min(aggs), max(aggs)
    intervals = []
    degenerate = 0
    for k in range(k_lo, k_hi + 1):
        agg = aggs.get(k)
        res = IntervalResult(k, grid.center(k), agg.count if agg else 0)
        if agg is not None:
            res.moments = trade_moments(agg)
            res.price = market_price_stats(agg, res.moments)
            degenerate += res.price.degenerate
            ra = ret_aggs.get(k)
            if ra is not None:
                res.returns = return_stats_from_aggregate(ra)
                res.ret_count = ra.count
        intervals.append(res)

    levels = []
    cur = level_series(aggs, grid, ret_aggs)
    for m in config.levels:
        cur, stats = lift(cur, m, config.partial)
        levels.append((cur, stats))

    diagnostics = {
        "trades": len(trades),
        "origin": origin,
        "delta_ns": config.delta,
        "intervals_nonempty": len(aggs),
        "intervals_empty": (k_hi - k_lo + 1) - len(aggs),
        "intervals_degenerate": degenerate,
        "levels": [
            {"level": s.level, "factor": m, "width_ns": s.grid.width,
             "windows": len(st), "windows_dropped": s.dropped_windows,
             "windows_partial": sum(x.partial for x in st)}
            for (s, st), m in zip(levels, config.levels)
        ],
    }
    if series is not None:
        diagnostics["returns"] = {
            "tau_ns": config.tau,
            "observations": len(series),
            "dropped": series.dropped,
            "drop_fraction": series.drop_fraction,
        }
    return Report(config, grid, intervals, levels, diagnostics)


INTERVAL_COLUMNS = [
    "k", "t", "count", "value_mean", "value_second", "volume_mean", "volume_second",
    "value_vol", "volume_vol", "corr_cu", "joint_mean", "a1", "a2", "sigma2", "p22",
    "freq_mean", "freq_second", "freq_var", "degenerate",
]
RETURN_COLUMNS = [
    "ret_count", "ret_dropped", "h1", "h2m", "v2", "past_mean", "past_second", "phi2",
    "corr_c_co", "ret_freq_mean", "ret_freq_second", "ret_freq_var",
]
LEVEL_COLUMNS = [
    "index", "t", "n_points", "partial", "a2_price", "sigma2_price",
    "value_mean", "value_second", "volume_mean", "volume_second",
    "omega_c2", "omega_u2", "corr_cu2", "joint_cu2",
    "h2_return", "v2_return", "past_mean", "past_second", "phi_2sq", "corr_cco2", "joint_cco2",
]
VAR_COLUMNS = ["k", "t", "kind", "alpha", "var_frequency", "var_market", "divergence"]


def interval_rows(report: Report) -> list[dict]:
    with_returns = report.config.tau is not None
    rows = []
    for r in report.intervals:
        row = {"k": r.index, "t": r.time, "count": r.count}
        if r.price is not None:
            tm, ps = r.moments, r.price
            row.update(
                value_mean=tm.value_mean, value_second=tm.value_second,
                volume_mean=tm.volume_mean, volume_second=tm.volume_second,
                value_vol=tm.value_vol, volume_vol=tm.volume_vol,
                corr_cu=tm.corr_cu, joint_mean=tm.joint_mean,
                a1=ps.a1, a2=ps.a2, sigma2=ps.sigma2, p22=ps.p22,
                freq_mean=ps.freq_mean, freq_second=ps.freq_second, freq_var=ps.freq_var,
                degenerate=ps.degenerate,
            )
        if with_returns:
            row["ret_count"] = r.ret_count
            row["ret_dropped"] = r.count - r.ret_count
            if r.returns is not None:
                rs = r.returns
                row.update(
                    h1=rs.h1, h2m=rs.h2m, v2=rs.v2, past_mean=rs.past_mean,
                    past_second=rs.past_second, phi2=rs.phi2, corr_c_co=rs.corr_c_co,
                    ret_freq_mean=rs.freq_mean, ret_freq_second=rs.freq_second,
                    ret_freq_var=rs.freq_var,
                )
        rows.append(row)
    return rows


def level_rows(stats: list[SecondaryStats]) -> list[dict]:
    rows = []
    for s in stats:
        row = {
            "index": s.index, "t": s.time, "n_points": s.n_points, "partial": s.partial,
            "a2_price": s.a2_price, "sigma2_price": s.sigma2_price,
            "value_mean": s.value_moments[0], "value_second": s.value_moments[1],
            "volume_mean": s.volume_moments[0], "volume_second": s.volume_moments[1],
            "omega_c2": s.omega_c2, "omega_u2": s.omega_u2,
            "corr_cu2": s.corr_cu2, "joint_cu2": s.joint_cu2,
            "h2_return": s.h2_return, "v2_return": s.v2_return,
            "phi_2sq": s.phi_2sq, "corr_cco2": s.corr_cco2, "joint_cco2": s.joint_cco2,
        }
        if s.past_moments is not None:
            row["past_mean"], row["past_second"] = s.past_moments
        rows.append(row)
    return rows


def var_rows(report: Report) -> list[dict]:
    rows = []
    for r in report.intervals:
        for kind, stats in (("price", r.price), ("return", r.returns)):
            if kind == "return" and report.config.tau is None:
                continue
            for alpha in report.config.alphas:
                row = {"k": r.index, "t": r.time, "kind": kind, "alpha": alpha}
                try:
                    v = compare_var(stats, alpha)
                except UndefinedStatisticError:
                    pass
                else:
                    row.update(var_frequency=v.var_frequency, var_market=v.var_market,
                               divergence=v.divergence)
                rows.append(row)
    return rows


def write_report(report: Report, out_dir: str | os.PathLike) -> list[Path]:
    """Write every table plus ``diagnostics.json``; returns the paths written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fmt = report.config.fmt
    columns = INTERVAL_COLUMNS + (RETURN_COLUMNS if report.config.tau is not None else [])
    written = []

    def table(name, rows, cols):
        path = out / f"{name}.{fmt}"
        write_table(rows, cols, path, fmt)
        written.append(path)

    table("intervals", interval_rows(report), columns)
    for series, stats in report.levels:
        table(f"level{series.level}", level_rows(stats), LEVEL_COLUMNS)
    table("var", var_rows(report), VAR_COLUMNS)
    path = out / "diagnostics.json"
    write_json(report.diagnostics, path)
    written.append(path)
    return written
