"""Fixed-coefficient AR(q) fits: OLS, SBIC order choice, Newey-West HAC covariance."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._util import bartlett_weights, lag_design
from .ingest import ReturnSeries

__all__ = [
    "ARFit",
    "fit_ar_ols",
    "select_order_sbic",
    "sbic_profile",
    "newey_west_cov",
    "nw_auto_bandwidth",
    "nw_plugin_bandwidth",
]


class SingularDesignError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class ARFit:
    """OLS estimate of ``x_t = a0 + a1 x_{t-1} + ... + aq x_{t-q} + u_t``.

    Attributes
    ----------
    order : int
    intercept : float
    coeffs : ndarray, shape (q,)
    residuals : ndarray, shape (n_used,)
    sigma2 : float
        ``RSS / (n_used - q - 1)``.
    hac_cov : ndarray, shape (q+1, q+1)
        Newey-West covariance of ``(a0, a1, ..., aq)``.
    hac_se : ndarray
    r2_adj : float
    sbic : float
        ``ln(RSS/n) + (q+1) ln(n)/n`` on this fit's own sample.
    n_used : int
    bandwidth : int
        Bartlett lag truncation used for ``hac_cov``.
    design : ndarray, shape (n_used, q+1)
        Regressor matrix, constant first.
    target : ndarray, shape (n_used,)
    """

    order: int
    intercept: float
    coeffs: np.ndarray
    residuals: np.ndarray
    sigma2: float
    hac_cov: np.ndarray
    hac_se: np.ndarray
    r2_adj: float
    sbic: float
    n_used: int
    bandwidth: int
    design: np.ndarray = field(repr=False)
    target: np.ndarray = field(repr=False)

    @property
    def params(self) -> np.ndarray:
        return np.concatenate([[self.intercept], self.coeffs])

    def as_dict(self) -> dict:
        return {
            "order": self.order,
            "intercept": self.intercept,
            "coeffs": self.coeffs.tolist(),
            "hac_se": self.hac_se.tolist(),
            "hac_bandwidth": self.bandwidth,
            "sigma2": self.sigma2,
            "r2_adj": self.r2_adj,
            "sbic": self.sbic,
            "n_used": self.n_used,
        }


def nw_auto_bandwidth(T: int) -> int:
    """Rule-of-thumb Bartlett truncation ``floor(4 (T/100)^(2/9))``."""
    if T < 10:
        raise ValueError("nw_auto_bandwidth needs T >= 10")
    return int(math.floor(4.0 * (T / 100.0) ** (2.0 / 9.0)))


def nw_plugin_bandwidth(scores: np.ndarray, has_const: bool = True) -> int:
    """Newey-West (1994) data-driven Bartlett bandwidth.

    ``scores`` is the ``n x k`` matrix of ``x_t * e_t``. The constant's score
    gets zero weight when ``has_const`` (its column is assumed first).
    """
    scores = np.asarray(scores, dtype=float)
    n, k = scores.shape
    w = np.ones(k)
    if has_const and k > 1:
        w[0] = 0.0
    h = scores @ w
    pre = int(math.floor(4.0 * (n / 100.0) ** (2.0 / 9.0)))
    sig = np.array([h[j:] @ h[: n - j] / n for j in range(pre + 1)])
    s0 = sig[0] + 2.0 * sig[1:].sum()
    s1 = 2.0 * (np.arange(1, pre + 1) * sig[1:]).sum()
    if s0 <= 0:
        return 0
    gamma = 1.1447 * ((s1 / s0) ** 2) ** (1.0 / 3.0)
    return int(min(math.floor(gamma * n ** (1.0 / 3.0)), n - 1))


def _xtx_inv(X):
    xtx = X.T @ X
    try:
        if np.linalg.cond(xtx) > 1e14:
            raise np.linalg.LinAlgError
        return np.linalg.inv(xtx)
    except np.linalg.LinAlgError:
        raise SingularDesignError("singular design matrix (X'X not invertible)") from None


def newey_west_cov(X: np.ndarray, e: np.ndarray, bandwidth: int) -> np.ndarray:
    """Bartlett-kernel HAC covariance ``(X'X)^-1 Omega (X'X)^-1``.

    No small-sample degrees-of-freedom scaling is applied, so ``bandwidth=0``
    is exactly White's HC0 estimator.
    """
    X = np.asarray(X, dtype=float)
    e = np.asarray(e, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if bandwidth < 0:
        raise ValueError("bandwidth must be >= 0")
    if X.shape[0] != len(e):
        raise ValueError("rows(X) must equal len(e)")
    bread = _xtx_inv(X)
    s = X * e[:, None]
    w = bartlett_weights(bandwidth)
    omega = s.T @ s
    for j in range(1, min(bandwidth, len(e) - 1) + 1):
        gam = s[j:].T @ s[:-j]
        omega += w[j] * (gam + gam.T)
    cov = bread @ omega @ bread
    return 0.5 * (cov + cov.T)


def _ols(X, y):
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    return coef, y - X @ coef


def fit_ar_ols(r: ReturnSeries | np.ndarray, q: int, bandwidth: int | str | None = None) -> ARFit:
    """OLS fit of an AR(q) with intercept.

    Parameters
    ----------
    r : ReturnSeries or array
    q : int
        Autoregressive order, ``q >= 1``.
    bandwidth : int, "nw1994" or None
        Bartlett truncation for the HAC covariance. ``None`` uses
        :func:`nw_auto_bandwidth` on the number of usable observations;
        ``"nw1994"`` uses the data-driven plug-in rule.
    """
    x = np.asarray(getattr(r, "values", r), dtype=float)
    T = len(x)
    if q < 1:
        raise ValueError("q must be >= 1")
    if T <= 3 * (q + 1):
        raise ValueError(f"series too short for AR({q}): T={T} must exceed {3 * (q + 1)}")
    lags, y = lag_design(x, q)
    n = len(y)
    X = np.column_stack([np.ones(n), lags])
    _xtx_inv(X)
    coef, resid = _ols(X, y)
    k = q + 1
    rss = float(resid @ resid)
    tss = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - rss / tss if tss > 0 else 0.0
    r2_adj = 1.0 - (1.0 - r2) * (n - 1) / (n - k)
    if bandwidth is None:
        bw = nw_auto_bandwidth(n)
    elif bandwidth == "nw1994":
        bw = nw_plugin_bandwidth(X * resid[:, None])
    else:
        bw = int(bandwidth)
    cov = newey_west_cov(X, resid, bw)
    return ARFit(
        order=q,
        intercept=float(coef[0]),
        coeffs=coef[1:].copy(),
        residuals=resid,
        sigma2=rss / (n - k),
        hac_cov=cov,
        hac_se=np.sqrt(np.clip(np.diag(cov), 0.0, None)),
        r2_adj=float(r2_adj),
        sbic=_sbic(rss, n, k),
        n_used=n,
        bandwidth=bw,
        design=X,
        target=y,
    )


def _sbic(rss, n, k):
    if rss <= 0:
        return -math.inf
    return math.log(rss / n) + k * math.log(n) / n


def sbic_profile(r: ReturnSeries | np.ndarray, q_max: int) -> dict[int, float]:
    """SBIC for each order 1..q_max, all on the sample that drops q_max initial values."""
    x = np.asarray(getattr(r, "values", r), dtype=float)
    if q_max < 1:
        raise ValueError("q_max must be >= 1")
    if len(x) - q_max <= 3 * (q_max + 1):
        raise ValueError(f"series too short for q_max={q_max}")
    out = {}
    for q in range(1, q_max + 1):
        lags, y = lag_design(x, q, start=q_max)
        X = np.column_stack([np.ones(len(y)), lags])
        _xtx_inv(X)
        _, resid = _ols(X, y)
        out[q] = _sbic(float(resid @ resid), len(y), q + 1)
    return out


def select_order_sbic(r: ReturnSeries | np.ndarray, q_max: int = 12) -> int:
    """Order in 1..q_max minimising SBIC; ties go to the smaller order."""
    prof = sbic_profile(r, q_max)
    best_q, best = 1, prof[1]
    for q in range(2, q_max + 1):
        if prof[q] < best:
            best_q, best = q, prof[q]
    return best_q
