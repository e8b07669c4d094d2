"""Hansen's cumulative-score test of parameter constancy for an OLS AR fit."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from ._util import bartlett_weights
from .armodel import ARFit

__all__ = ["ConstancyResult", "hansen_scores", "hansen_lc", "lc_critical_value", "LEVELS"]

LEVELS = (0.01, 0.05, 0.10)


@dataclass(frozen=True)
class ConstancyResult:
    lc_joint: float
    lc_individual: np.ndarray
    m: int
    include_variance: bool
    robust: bool
    critical_values: dict[float, float]
    reject: dict[float, bool]

    def as_dict(self) -> dict:
        return {
            "lc_joint": self.lc_joint,
            "lc_individual": self.lc_individual.tolist(),
            "m": self.m,
            "include_variance": self.include_variance,
            "robust_v": self.robust,
            "critical_values": {f"{k:.2f}": v for k, v in self.critical_values.items()},
            "reject": {f"{k:.2f}": v for k, v in self.reject.items()},
        }


def hansen_scores(X: np.ndarray, e: np.ndarray, include_variance: bool = True) -> np.ndarray:
    """First-order-condition scores, one column per tested parameter.

    Regressor-times-residual for every coefficient and, when requested,
    ``e_t^2 - sigma2`` with ``sigma2 = e'e/n`` for the error variance.
    """
    X = np.asarray(X, dtype=float)
    e = np.asarray(e, dtype=float)
    f = X * e[:, None]
    if include_variance:
        f = np.column_stack([f, e * e - (e @ e) / len(e)])
    return f


def hansen_lc(
    fit: ARFit,
    include_variance: bool = True,
    robust: bool = False,
    bandwidth: int | None = None,
) -> ConstancyResult:
    """Joint and individual L statistics.

    ``L_C = (1/n) sum_t S_t' V^{-1} S_t`` with ``S_t`` the cumulated scores
    and ``V = sum_t f_t f_t'``. ``robust=True`` replaces ``V`` by a Bartlett
    long-run sum of the scores (bandwidth defaults to the fit's HAC bandwidth).
    """
    X, e = fit.design, fit.residuals
    n, k = X.shape
    if n < 10 * (fit.order + 2):
        raise ValueError(f"need at least {10 * (fit.order + 2)} observations for the constancy test, have {n}")
    f = hansen_scores(X, e, include_variance)
    S = np.cumsum(f, axis=0)
    # OLS orthogonality: coefficient scores sum to zero over the full sample.
    scale = np.sqrt((f[:, :k] ** 2).sum(axis=0)) * np.sqrt(n) + 1e-300
    if np.any(np.abs(S[-1, :k]) > 1e-8 * scale):
        raise ArithmeticError("coefficient scores do not sum to zero; fit is not an OLS solution")
    V = f.T @ f
    if robust:
        bw = fit.bandwidth if bandwidth is None else int(bandwidth)
        w = bartlett_weights(bw)
        for j in range(1, min(bw, n - 1) + 1):
            g = f[j:].T @ f[:-j]
            V += w[j] * (g + g.T)
    try:
        Vinv = np.linalg.inv(V)
    except np.linalg.LinAlgError:
        raise np.linalg.LinAlgError("singular score covariance V") from None
    joint = float(np.einsum("ti,ij,tj->", S, Vinv, S) / n)
    indiv = (S**2).sum(axis=0) / (n * np.diag(V))
    m = f.shape[1]
    cvs = {lvl: lc_critical_value(m, lvl) for lvl in LEVELS}
    return ConstancyResult(
        lc_joint=max(joint, 0.0),
        lc_individual=indiv,
        m=m,
        include_variance=include_variance,
        robust=robust,
        critical_values=cvs,
        reject={lvl: bool(joint > cv) for lvl, cv in cvs.items()},
    )


@lru_cache(maxsize=None)
def _lc_table() -> dict[tuple[int, float], float]:
    text = resources.files("tvefficiency.data").joinpath("lc_critical_values.csv").read_text(encoding="utf-8")
    rows = csv.DictReader(line for line in text.splitlines() if not line.startswith("#"))
    return {(int(row["m"]), round(float(row["level"]), 4)): float(row["value"]) for row in rows}


def lc_critical_value(m: int, level: float) -> float:
    """Asymptotic critical value of the L_C statistic with ``m`` parameters."""
    if not 1 <= int(m) <= 20 or int(m) != m:
        raise ValueError(f"unsupported m={m}; tables cover 1..20")
    key = (int(m), round(float(level), 4))
    table = _lc_table()
    if key not in table:
        raise ValueError(f"unsupported level {level}; choose one of {LEVELS}")
    return table[key]
