"""ADF-GLS (Elliott-Rothenberg-Stock) unit-root test with MBIC/MAIC lag choice."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np

from .ingest import ReturnSeries

__all__ = [
    "UnitRootResult",
    "normalize_trend",
    "default_c_bar",
    "default_max_lag",
    "gls_detrend",
    "df_regression",
    "mic_profile",
    "adf_gls",
    "ur_critical_values",
    "LEVELS",
]

LEVELS = (0.01, 0.05, 0.10)
_TREND_ALIASES = {
    "c": "constant",
    "constant": "constant",
    "ct": "constant+trend",
    "trend": "constant+trend",
    "constant+trend": "constant+trend",
}


def normalize_trend(trend_model: str) -> str:
    try:
        return _TREND_ALIASES[str(trend_model).lower()]
    except KeyError:
        raise ValueError(f"unknown trend model {trend_model!r}; use 'c' or 'ct'") from None


def default_c_bar(trend_model: str) -> float:
    return -7.0 if normalize_trend(trend_model) == "constant" else -13.5


def default_max_lag(T: int) -> int:
    """Schwert rule ``floor(12 (T/100)^(1/4))``."""
    return int(math.floor(12.0 * (T / 100.0) ** 0.25))


@dataclass(frozen=True)
class UnitRootResult:
    """ADF-GLS outcome.

    ``phi_hat`` is ``1 + df_slope``: the coefficient on the lagged level in the
    levels form of the DF regression, which equals the sum of the implied AR
    coefficients of the detrended series.
    """

    statistic: float
    lag: int
    phi_hat: float
    df_slope: float
    trend_model: str
    c_bar: float
    max_lag: int
    criterion: str
    nobs: int
    critical_values: dict[float, float]
    reject: dict[float, bool]
    ic_profile: dict[int, float] = field(repr=False, default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "lag": self.lag,
            "phi_hat": self.phi_hat,
            "df_slope": self.df_slope,
            "trend_model": self.trend_model,
            "c_bar": self.c_bar,
            "max_lag": self.max_lag,
            "criterion": self.criterion,
            "nobs": self.nobs,
            "critical_values": {f"{k:.2f}": v for k, v in self.critical_values.items()},
            "reject": {f"{k:.2f}": v for k, v in self.reject.items()},
        }


def _deterministics(T, trend_model):
    if normalize_trend(trend_model) == "constant":
        return np.ones((T, 1))
    return np.column_stack([np.ones(T), np.arange(1, T + 1, dtype=float)])


def _quasi_difference(a, abar):
    out = np.array(a, dtype=float, copy=True)
    out[1:] = a[1:] - abar * a[:-1]
    return out


def gls_detrend(r: ReturnSeries | np.ndarray, trend_model: str = "ct", c_bar: float | None = None) -> np.ndarray:
    """Remove deterministics estimated on quasi-differenced data.

    With ``abar = 1 + c_bar/T`` the series and the deterministic regressors
    are quasi-differenced (first observation kept in levels), ``delta`` is
    the OLS coefficient of one on the other, and ``y - z'delta`` is returned.
    """
    y = np.asarray(getattr(r, "values", r), dtype=float)
    T = len(y)
    if T < 10:
        raise ValueError("gls_detrend needs at least 10 observations")
    if c_bar is None:
        c_bar = default_c_bar(trend_model)
    if not c_bar < 0:
        raise ValueError("c_bar must be negative")
    abar = 1.0 + c_bar / T
    z = _deterministics(T, trend_model)
    zq = _quasi_difference(z, abar)
    yq = _quasi_difference(y, abar)
    if np.linalg.matrix_rank(zq) < zq.shape[1]:
        raise np.linalg.LinAlgError("degenerate deterministic regressor matrix")
    delta, *_ = np.linalg.lstsq(zq, yq, rcond=None)
    return y - z @ delta


def _df_design(yd, k, first):
    """Regressors for ``dy[i]``, ``i = first..T-2``: ``yd[i]`` then ``dy[i-1..i-k]``."""
    dy = np.diff(yd)
    idx = np.arange(first, len(dy))
    cols = [yd[idx]] + [dy[idx - j] for j in range(1, k + 1)]
    return np.column_stack(cols), dy[idx]


def df_regression(yd: np.ndarray, k: int, first: int | None = None):
    """DF regression without deterministics on an already detrended series.

    Returns ``(slope, t_stat, rss, X, target)`` where slope is the coefficient
    on the lagged level.
    """
    first = k if first is None else first
    X, y = _df_design(np.asarray(yd, dtype=float), k, first)
    n, p = X.shape
    if n <= p + 1:
        raise ValueError("insufficient observations after lagging")
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    e = y - X @ coef
    rss = float(e @ e)
    s2 = rss / (n - p)
    xtx_inv = np.linalg.inv(X.T @ X)
    se = math.sqrt(s2 * xtx_inv[0, 0])
    return float(coef[0]), float(coef[0] / se), rss, X, y


def mic_profile(yd: np.ndarray, max_lag: int, criterion: str = "mbic") -> dict[int, float]:
    """Modified information criterion for each lag 0..max_lag on a common sample.

    ``MIC(k) = ln(s2_k) + C_n (tau_k + k) / n`` with ``s2_k = RSS_k/n``,
    ``tau_k = b0^2 sum(yd_{t-1}^2) / s2_k`` and ``C_n = ln(n)`` (MBIC) or 2 (MAIC).
    """
    crit = criterion.lower()
    if crit not in ("mbic", "maic"):
        raise ValueError("criterion must be 'mbic' or 'maic'")
    out = {}
    for k in range(max_lag + 1):
        b0, _, rss, X, _ = df_regression(yd, k, first=max_lag)
        n = X.shape[0]
        s2 = rss / n
        tau = b0 * b0 * float(X[:, 0] @ X[:, 0]) / s2
        cn = math.log(n) if crit == "mbic" else 2.0
        out[k] = math.log(s2) + cn * (tau + k) / n
    return out


def adf_gls(
    r: ReturnSeries | np.ndarray,
    max_lag: int | None = None,
    trend_model: str = "ct",
    c_bar: float | None = None,
    criterion: str = "mbic",
) -> UnitRootResult:
    """ADF-GLS test.

    The lag is chosen on a common sample (the first ``max_lag`` differences
    dropped for every candidate); the reported regression is then re-run on
    all observations available at the chosen lag.

    Parameters
    ----------
    r : ReturnSeries or array
    max_lag : int, optional
        Defaults to ``floor(12 (T/100)^(1/4))``.
    trend_model : {"c", "ct"}
    c_bar : float, optional
        Local-to-unity constant; -7 (constant) or -13.5 (constant+trend).
    criterion : {"mbic", "maic"}
    """
    y = np.asarray(getattr(r, "values", r), dtype=float)
    T = len(y)
    tm = normalize_trend(trend_model)
    if c_bar is None:
        c_bar = default_c_bar(tm)
    if max_lag is None:
        max_lag = default_max_lag(T)
    if max_lag < 0:
        raise ValueError("max_lag must be >= 0")
    if T - 1 - max_lag <= max_lag + 3:
        raise ValueError("insufficient observations after lagging")
    yd = gls_detrend(y, tm, c_bar)
    prof = mic_profile(yd, max_lag, criterion)
    lag = min(prof, key=lambda k: (prof[k], k))
    slope, tstat, _, X, _ = df_regression(yd, lag)
    cvs = {lvl: ur_critical_values(tm, lvl) for lvl in LEVELS}
    return UnitRootResult(
        statistic=tstat,
        lag=int(lag),
        phi_hat=1.0 + slope,
        df_slope=slope,
        trend_model=tm,
        c_bar=float(c_bar),
        max_lag=int(max_lag),
        criterion=criterion.lower(),
        nobs=int(X.shape[0]),
        critical_values=cvs,
        reject={lvl: bool(tstat < cv) for lvl, cv in cvs.items()},
        ic_profile=prof,
    )


@lru_cache(maxsize=None)
def _cv_table() -> dict[tuple[str, float], float]:
    text = resources.files("tvefficiency.data").joinpath("ur_critical_values.csv").read_text(encoding="utf-8")
    rows = csv.DictReader(line for line in text.splitlines() if not line.startswith("#"))
    return {(row["trend_model"], round(float(row["level"]), 4)): float(row["value"]) for row in rows}


def ur_critical_values(trend_model: str, level: float) -> float:
    """Asymptotic ADF-GLS critical value from the bundled table."""
    tm = normalize_trend(trend_model)
    key = (tm, round(float(level), 4))
    table = _cv_table()
    if key not in table:
        raise ValueError(f"unsupported level {level}; choose one of {LEVELS}")
    return table[key]
