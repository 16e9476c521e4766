"""Seeded synthetic trade streams.

Randomness comes from SplitMix64 used as a counter-based generator: draw
``j`` of a stream with seed ``s`` is ``mix(s + (j + 1) * 0x9E3779B97F4A7C15)``
modulo 2**64, where ``mix`` is the standard SplitMix64 finaliser.  A draw
becomes a uniform on (0, 1) as ``((z >> 11) + 0.5) / 2**53``, and standard
normals use the cosine branch of Box-Muller on two consecutive uniforms.
Tick ``i`` consumes draws ``4i .. 4i+3``: the first pair drives the price
log-step, the second pair the idiosyncratic volume shock.

Prices follow ``p_i = p0 * exp(s * (z_1 + ... + z_i))`` (so ``p_0 = p0``);
volumes are lognormal, ``u_i = u0 * exp(g * (rho * z_i + sqrt(1 - rho**2) * e_i))``.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .core import Trades
from .errors import ParameterError

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
_MUL2 = np.uint64(0x94D049BB133111EB)


def splitmix64(seed: int, n: int, offset: int = 0) -> np.ndarray:
    """Draws ``offset .. offset+n-1`` of the SplitMix64 stream for ``seed``."""
    counter = np.arange(offset + 1, offset + n + 1, dtype=np.uint64)
    z = np.uint64(seed % 2**64) + counter * _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _MUL1
    z = (z ^ (z >> np.uint64(27))) * _MUL2
    return z ^ (z >> np.uint64(31))


def uniforms(seed: int, n: int, offset: int = 0) -> np.ndarray:
    z = splitmix64(seed, n, offset)
    return ((z >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    count: int = 1000
    tick_spacing: int = 1_000_000_000
    start: int = 0
    p0: float = 100.0
    s: float = 0.001
    u0: float = 1.0
    g: float = 0.5
    rho: float = 0.0

    def __post_init__(self):
        problems = []
        if self.count < 1:
            problems.append("count must be >= 1")
        if self.tick_spacing <= 0:
            problems.append("tick_spacing must be positive")
        if not (self.s >= 0 and self.g >= 0):
            problems.append("s and g must be non-negative")
        if not (self.p0 > 0 and self.u0 > 0):
            problems.append("p0 and u0 must be positive")
        if not -1.0 <= self.rho <= 1.0:
            problems.append("rho must lie in [-1, 1]")
        if problems:
            raise ParameterError("; ".join(problems))


def generate(cfg: GenConfig) -> Trades:
    n = cfg.count
    u = uniforms(cfg.seed, 4 * n).reshape(n, 4)
    two_pi = 2.0 * math.pi
    z_price = np.sqrt(-2.0 * np.log(u[:, 0])) * np.cos(two_pi * u[:, 1])
    z_vol = np.sqrt(-2.0 * np.log(u[:, 2])) * np.cos(two_pi * u[:, 3])

    if cfg.s > 0:
        steps = cfg.s * z_price
        steps[0] = 0.0
        price = cfg.p0 * np.exp(np.cumsum(steps))
    else:
        price = np.full(n, float(cfg.p0))

    if cfg.g > 0:
        shock = cfg.rho * z_price + math.sqrt(1.0 - cfg.rho * cfg.rho) * z_vol
        volume = cfg.u0 * np.exp(cfg.g * shock)
    else:
        volume = np.full(n, float(cfg.u0))

    time = cfg.start + np.arange(n, dtype=np.int64) * np.int64(cfg.tick_spacing)
    return Trades.from_arrays(time, price, volume)
