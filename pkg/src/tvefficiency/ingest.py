"""Loading of price/return series and descriptive statistics."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Sequence

import numpy as np

__all__ = [
    "DataError",
    "PriceSeries",
    "ReturnSeries",
    "DescriptiveStats",
    "load_csv",
    "to_log_returns",
    "describe",
]

_MISSING = {"", "na", "nan", "null", "none", "."}


class DataError(ValueError):
    """Raised when an input series violates its contract."""


def _check_dates(dates: Sequence[str]) -> None:
    for i in range(1, len(dates)):
        if not dates[i] > dates[i - 1]:
            raise DataError(f"non-monotone dates at row {i + 1}: {dates[i - 1]!r} -> {dates[i]!r}")


@dataclass(frozen=True)
class PriceSeries:
    """Dated price-index levels (strictly positive)."""

    dates: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "dates", tuple(str(d) for d in self.dates))
        object.__setattr__(self, "values", values)
        values.setflags(write=False)
        if values.ndim != 1 or len(values) != len(self.dates):
            raise DataError("dates and values must be 1-D sequences of equal length")
        if len(values) < 2:
            raise DataError("price series needs at least 2 observations")
        bad = np.flatnonzero(~(values > 0))
        if bad.size:
            raise DataError(f"non-positive price at row {bad[0] + 1}")
        _check_dates(self.dates)

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class ReturnSeries:
    """Dated log returns ``x_t``."""

    dates: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "dates", tuple(str(d) for d in self.dates))
        object.__setattr__(self, "values", values)
        values.setflags(write=False)
        if values.ndim != 1 or len(values) != len(self.dates):
            raise DataError("dates and values must be 1-D sequences of equal length")
        bad = np.flatnonzero(~np.isfinite(values))
        if bad.size:
            raise DataError(f"non-finite return at row {bad[0] + 1}")
        _check_dates(self.dates)

    def __len__(self) -> int:
        return len(self.values)

    @classmethod
    def from_array(cls, values, start: int = 1) -> "ReturnSeries":
        """Wrap a bare array with zero-padded integer labels (``t0001``, ...)."""
        values = np.asarray(values, dtype=float)
        width = max(4, len(str(start + len(values))))
        dates = tuple(f"t{start + i:0{width}d}" for i in range(len(values)))
        return cls(dates, values)

    def scaled(self, c: float, shift: float = 0.0) -> "ReturnSeries":
        return ReturnSeries(self.dates, c * self.values + shift)


@dataclass(frozen=True)
class DescriptiveStats:
    mean: float
    sd: float
    min: float
    max: float
    n: int

    def as_dict(self) -> dict:
        return {"n": self.n, "mean": self.mean, "sd": self.sd, "min": self.min, "max": self.max}


def load_csv(
    path: str | Path,
    date_col: str = "date",
    value_col: str = "value",
    value_kind: Literal["prices", "returns"] = "prices",
) -> PriceSeries | ReturnSeries:
    """Read a two-column series from a CSV file with a header row.

    Rows are numbered from 1 starting at the first data row. Missing values
    abort the load; nothing is imputed.
    """
    if value_kind not in ("prices", "returns"):
        raise ValueError(f"value_kind must be 'prices' or 'returns', got {value_kind!r}")
    path = Path(path)
    if not path.is_file():
        raise DataError(f"input file not found: {path}")

    dates: list[str] = []
    values: list[float] = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DataError(f"{path}: empty file")
        for col in (date_col, value_col):
            if col not in reader.fieldnames:
                raise DataError(f"{path}: column {col!r} not in header {reader.fieldnames}")
        for row_no, row in enumerate(reader, start=1):
            raw_date = (row.get(date_col) or "").strip()
            raw_value = (row.get(value_col) or "").strip()
            if raw_date.lower() in _MISSING or raw_value.lower() in _MISSING:
                raise DataError(f"missing value at row {row_no}")
            try:
                v = float(raw_value)
            except ValueError:
                raise DataError(f"parse failure at row {row_no}: {raw_value!r} is not numeric") from None
            if not math.isfinite(v):
                raise DataError(f"non-finite value at row {row_no}")
            if value_kind == "prices" and v <= 0:
                raise DataError(f"non-positive price at row {row_no}")
            if dates and not raw_date > dates[-1]:
                raise DataError(f"non-monotone dates at row {row_no}: {dates[-1]!r} -> {raw_date!r}")
            dates.append(raw_date)
            values.append(v)

    if value_kind == "prices":
        return PriceSeries(tuple(dates), np.array(values))
    return ReturnSeries(tuple(dates), np.array(values))


def to_log_returns(p: PriceSeries) -> ReturnSeries:
    """Log first differences; each return is labelled with the later date."""
    if len(p) < 2:
        raise DataError("series too short for log returns")
    return ReturnSeries(p.dates[1:], np.diff(np.log(p.values)))


def describe(r: ReturnSeries) -> DescriptiveStats:
    """Mean, sample SD (n-1 denominator), min, max and count."""
    x = np.asarray(r.values, dtype=float)
    if len(x) < 2:
        raise DataError("series too short to describe")
    return DescriptiveStats(
        mean=float(x.mean()),
        sd=float(x.std(ddof=1)),
        min=float(x.min()),
        max=float(x.max()),
        n=int(len(x)),
    )
