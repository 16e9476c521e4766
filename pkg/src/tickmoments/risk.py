"""Two-moment (Gaussian) Value-at-Risk from equal-weight vs market-based moments.

VaR here is the alpha-quantile of the level itself (price or gross return),
not a positive loss figure: a 5% VaR of 98.1 on a price means a 5% chance of
the price falling below 98.1 under the Gaussian fit.
"""

from __future__ import annotations

from dataclasses import dataclass
import math
from statistics import NormalDist

from .errors import ParameterError, UndefinedStatisticError
from .moments import PriceStats
from .returns import ReturnStats

_STANDARD_NORMAL = NormalDist()


def _check_alpha(alpha: float):
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"confidence level must lie in (0, 1), got {alpha}")


def normal_quantile(alpha: float) -> float:
    """Standard normal quantile (Wichura's AS241, ~1e-16 relative accuracy)."""
    _check_alpha(alpha)
    return _STANDARD_NORMAL.inv_cdf(alpha)


def gaussian_var(mean: float, vol2: float, alpha: float) -> float:
    _check_alpha(alpha)
    if not vol2 >= 0:
        raise ParameterError(f"variance must be non-negative, got {vol2}")
    if vol2 == 0:
        return float(mean)
    return mean + normal_quantile(alpha) * math.sqrt(vol2)


@dataclass(frozen=True)
class VarReport:
    confidence: float
    var_frequency: float
    var_market: float
    divergence: float
    kind: str


def compare_var(stats: PriceStats | ReturnStats | None, alpha: float) -> VarReport:
    """Gaussian VaR from the equal-weight moments next to the market-based one."""
    _check_alpha(alpha)
    if stats is None:
        raise UndefinedStatisticError("no statistics for this interval")
    if stats.degenerate:
        raise UndefinedStatisticError("single-observation interval has no spread")
    if isinstance(stats, PriceStats):
        market, kind = (stats.a1, stats.sigma2), "price"
    elif isinstance(stats, ReturnStats):
        market, kind = (stats.h1, stats.v2), "return"
    else:
        raise ParameterError(f"unsupported statistics type {type(stats).__name__}")
    var_f = gaussian_var(stats.freq_mean, stats.freq_var, alpha)
    var_m = gaussian_var(*market, alpha)
    return VarReport(alpha, var_f, var_m, var_m - var_f, kind)
