"""Trade CSV ingest/export and report serialisation.

Trade files are UTF-8, comma separated, unquoted, with the header
``time,price,volume``; ``time`` is integer nanoseconds since the epoch.
Report floats are written with 17 significant digits so they read back to
the identical double.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
import json
import logging
import math
import os

import numpy as np

from .core import Trades
from .errors import DataError

log = logging.getLogger(__name__)

HEADER = ("time", "price", "volume")


@dataclass(frozen=True)
class IngestResult:
    trades: Trades
    rows_read: int
    rejected: int
    reordered: bool


def ingest(path: str | os.PathLike) -> IngestResult:
    """Read and validate a trade CSV.

    Malformed rows raise :class:`DataError` with the line number.  Rows with
    a non-positive or non-finite price or volume are skipped and counted in
    ``rejected``.  Out-of-order timestamps are stably re-sorted with a warning.
    """
    times: list[int] = []
    prices: list[float] = []
    volumes: list[float] = []
    rejected = 0
    with open(path, encoding="utf-8", newline="") as fh:
        header = fh.readline()
        if not header.strip():
            log.warning("%s: empty file, no trades", path)
            return IngestResult(Trades.empty(), 0, 0, False)
        if tuple(c.strip() for c in header.lstrip("\ufeff").split(",")) != HEADER:
            raise DataError(f"expected header {','.join(HEADER)!r}, got {header.strip()!r}", line=1)
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 3 or "_" in line:
                raise DataError(f"malformed row {line!r}", line=lineno)
            try:
                t = int(parts[0])
                p = float(parts[1])
                u = float(parts[2])
            except ValueError:
                raise DataError(f"malformed row {line!r}", line=lineno) from None
            if not (p > 0 and u > 0 and math.isfinite(p) and math.isfinite(u)):
                rejected += 1
                continue
            times.append(t)
            prices.append(p)
            volumes.append(u)
    if rejected:
        log.warning("%s: rejected %d row(s) with non-positive or non-finite price/volume",
                    path, rejected)
    trades = Trades.from_arrays(times, prices, volumes, validate=False)
    if not trades:
        log.warning("%s: no usable trades", path)
    reordered = not trades.is_sorted()
    if reordered:
        log.warning("%s: timestamps not monotone, re-sorting", path)
        trades = trades.sorted()
    return IngestResult(trades, len(times) + rejected, rejected, reordered)


def fmt_float(x: float) -> str:
    return format(x, ".17g")


def write_trades(trades: Trades, path: str | os.PathLike):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(HEADER) + "\n")
        for t, p, u in zip(trades.time.tolist(), trades.price.tolist(), trades.volume.tolist()):
            fh.write(f"{t},{fmt_float(p)},{fmt_float(u)}\n")


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return fmt_float(float(v)) if math.isfinite(v) else ""
    return str(v)


def to_json(v, indent: str = "") -> str:
    """JSON text with explicit nulls and 17-significant-digit floats."""
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt_float(float(v)) if math.isfinite(v) else "null"
    if isinstance(v, str):
        return json.dumps(v)
    inner = indent + "  "
    if isinstance(v, Mapping):
        if not v:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {to_json(x, inner)}" for k, x in v.items()]
        return "{\n" + ",\n".join(items) + "\n" + indent + "}"
    if isinstance(v, Sequence):
        if not v:
            return "[]"
        # rows of flat records stay on one line each
        if all(isinstance(x, Mapping) for x in v):
            rows = ["{" + ", ".join(f"{json.dumps(str(k))}: {to_json(y)}" for k, y in x.items()) + "}"
                    for x in v]
            return "[\n" + ",\n".join(inner + r for r in rows) + "\n" + indent + "]"
        return "[" + ", ".join(to_json(x, inner) for x in v) + "]"
    raise TypeError(f"cannot serialise {type(v).__name__}")


def write_table(rows: Sequence[Mapping], columns: Sequence[str], path: str | os.PathLike, fmt: str):
    if fmt == "csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(",".join(columns) + "\n")
            for row in rows:
                fh.write(",".join(_csv_cell(row.get(c)) for c in columns) + "\n")
    elif fmt == "json":
        ordered = [{c: row.get(c) for c in columns} for row in rows]
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(to_json(ordered) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")


def write_json(obj, path: str | os.PathLike):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_json(obj) + "\n")
