"""Market-based statistical moments of price and return from trade ticks.

Per interval, price statistics are weighted by trade volume (VWAP and its
volume-squared-weighted volatility) and return statistics by the past value
of each trade; both are also available in their equal-weight form for
contrast.  Per-interval first moments can be re-averaged over longer windows,
level after level.
"""

from .core import (
    IntervalAggregate,
    IntervalGrid,
    Trade,
    Trades,
    aggregate,
    assign_interval,
    merge_aggregates,
)
from .errors import (
    DataError,
    IncompleteWindowError,
    InputOrderError,
    InsufficientHistoryError,
    ParameterError,
    TickMomentsError,
    UndefinedStatisticError,
)
from .hierarchy import (
    LevelPoint,
    LevelSeries,
    SecondaryStats,
    level_series,
    lift,
    lift_levels,
    secondary_price_stats,
    secondary_return_stats,
)
from .moments import (
    PriceStats,
    TradeMoments,
    direct_price_volatility,
    frequency_moment,
    market_price_stats,
    price_stats,
    trade_moments,
    vwap,
    weight_function,
    weighted_price_moment,
)
from .returns import (
    ReturnAggregate,
    ReturnObservation,
    ReturnSeries,
    ReturnStats,
    aggregate_returns,
    build_return_series,
    direct_return_volatility,
    past_price,
    return_stats,
)
from .io import IngestResult, ingest, write_trades
from .pipeline import Report, RunConfig, parse_duration, run, write_report
from .risk import VarReport, compare_var, gaussian_var, normal_quantile
from .synth import GenConfig, generate

__version__ = "0.1.0"
