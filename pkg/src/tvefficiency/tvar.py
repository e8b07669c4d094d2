"""Time-varying AR(q) with random-walk slopes and a time-invariant intercept.

Model, with ``z_t = (x_{t-1}, ..., x_{t-q})``::

    x_t       = a0 + z_t' a_t + u_t,      u_t ~ N(0, s2)
    a_t       = a_{t-1} + v_t,            v_t ~ N(0, delta2 * s2 * I)
    a_1, a0   ~ N(0, kappa * s2)          (kappa large: diffuse start)

Two backends compute the same posterior means and covariances:

* ``estimate_tvar_stacked`` solves one penalised least-squares problem in
  all unknowns ``(a_1, ..., a_n, a0)``;
* ``estimate_tvar_kalman`` runs a Kalman filter on the state ``(a0, a_t)``
  followed by a fixed-interval smoother (Durbin-Koopman recursion for the
  means, Rauch-Tung-Striebel form for the covariances).

The log-likelihood is the diffuse (de Jong) form with ``s2`` concentrated
out; it is identical for both backends.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np
from scipy import linalg, stats

from ._util import bartlett_weights, lag_design
from .armodel import nw_auto_bandwidth
from .ingest import DataError, ReturnSeries

__all__ = [
    "SmoothingConfig",
    "TVARPath",
    "Bands",
    "SmoothingWarning",
    "estimate_tvar_stacked",
    "estimate_tvar_kalman",
    "estimate_tvar",
    "kalman_smoother",
    "kalman_loglik",
    "select_smoothing",
    "coefficient_bands",
    "dispersion_ratio",
    "fluctuates_wildly",
    "DEFAULT_PRIOR_VAR",
    "LN_DELTA2_BOUNDS",
]

DEFAULT_PRIOR_VAR = 1e6
LN_DELTA2_BOUNDS = (-20.0, 5.0)
DEFAULT_DELTA2 = 0.01
DENSE_MAX_UNKNOWNS = 1000


class SmoothingWarning(UserWarning):
    """Likelihood for the smoothing parameter is flat or peaks at a bound."""


@dataclass(frozen=True)
class SmoothingConfig:
    """Smoothness of the coefficient paths.

    ``delta2`` is the coefficient-innovation variance relative to the
    observation variance, so ``sigma_v2 = delta2 * sigma_u2``.
    ``sigma_u2`` is filled in by estimation.
    """

    delta2: float = DEFAULT_DELTA2
    selection: Literal["fixed", "max_likelihood"] = "fixed"
    sigma_u2: float | None = None
    prior_var: float = DEFAULT_PRIOR_VAR
    profile: tuple[tuple[float, float], ...] = field(default=(), repr=False)
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if not (self.delta2 > 0 and math.isfinite(self.delta2)):
            raise ValueError("delta2 must be a positive finite number")
        if self.selection not in ("fixed", "max_likelihood"):
            raise ValueError("selection must be 'fixed' or 'max_likelihood'")
        if not self.prior_var > 0:
            raise ValueError("prior_var must be positive")

    @property
    def sigma_v2(self) -> float | None:
        return None if self.sigma_u2 is None else self.delta2 * self.sigma_u2

    def as_dict(self) -> dict:
        return {
            "delta2": self.delta2,
            "ln_delta2": math.log(self.delta2),
            "selection": self.selection,
            "sigma_u2": self.sigma_u2,
            "sigma_v2": self.sigma_v2,
            "prior_var": self.prior_var,
            "notes": list(self.notes),
            "profile": [{"ln_delta2": a, "loglik": b} for a, b in self.profile],
        }


@dataclass(frozen=True)
class TVARPath:
    """Smoothed coefficient paths.

    ``coeff_paths[i, l-1]`` is the lag-``l`` coefficient in period
    ``dates[i]``; the first ``q`` observations of the input only serve as
    lags, so ``len(dates) == T - q``. ``cov_blocks[i]`` is the posterior
    covariance of the slope vector in that period.
    """

    order: int
    intercept: float
    intercept_se: float
    dates: tuple[str, ...]
    coeff_paths: np.ndarray
    cov_blocks: np.ndarray
    loglik: float
    sigma_u2: float
    config: SmoothingConfig
    backend: str
    residuals: np.ndarray = field(repr=False)
    lags: np.ndarray = field(repr=False)
    target: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not np.all(np.isfinite(self.coeff_paths)):
            raise ArithmeticError("non-finite smoothed coefficients")

    @property
    def n(self) -> int:
        return self.coeff_paths.shape[0]

    @property
    def se(self) -> np.ndarray:
        return np.sqrt(np.clip(np.diagonal(self.cov_blocks, axis1=1, axis2=2), 0.0, None))


@dataclass(frozen=True)
class Bands:
    level: float
    z: float
    kind: str
    lower: np.ndarray
    upper: np.ndarray
    se: np.ndarray


def _prepare(r, q):
    x = np.asarray(getattr(r, "values", r), dtype=float)
    if x.ndim != 1:
        raise ValueError("expected a 1-D return series")
    if not np.all(np.isfinite(x)):
        raise DataError("non-finite values in return series")
    if q < 1:
        raise ValueError("q must be >= 1")
    if len(x) <= 5 * q:
        raise ValueError(f"series too short: T={len(x)} must exceed 5q={5 * q}")
    lags, y = lag_design(x, q)
    X = np.column_stack([np.ones(len(y)), lags])
    if np.linalg.matrix_rank(X) < q + 1:
        raise np.linalg.LinAlgError("singular system: lagged returns are collinear with the intercept")
    dates = getattr(r, "dates", None)
    if dates is None:
        dates = ReturnSeries.from_array(x).dates
    return y, lags, tuple(dates[q:])


def _diffuse_loglik(rss, logdet_gram, n, q, delta2):
    ne = n - (q + 1)
    s2 = rss / ne
    return -0.5 * (ne * (math.log(2 * math.pi) + 1.0 + math.log(s2)) + q * (n - 1) * math.log(delta2) + logdet_gram), s2


# --------------------------------------------------------------------------
# stacked least squares


def _stacked_rows(y, lags, delta2, kappa):
    """Dense stacked system ``A theta ~ b``; unknowns ordered ``a_1..a_n, a0``."""
    n, q = lags.shape
    N = n * q + 1
    nrow = n + (n - 1) * q + q + 1
    A = np.zeros((nrow, N))
    b = np.zeros(nrow)
    rows = np.arange(n)
    for ell in range(q):
        A[rows, rows * q + ell] = lags[:, ell]
    A[rows, N - 1] = 1.0
    b[:n] = y
    inv_d = 1.0 / math.sqrt(delta2)
    k = n
    for t in range(1, n):
        for ell in range(q):
            A[k, t * q + ell] = inv_d
            A[k, (t - 1) * q + ell] = -inv_d
            k += 1
    inv_k = 1.0 / math.sqrt(kappa)
    for ell in range(q):
        A[k, ell] = inv_k
        k += 1
    A[k, N - 1] = inv_k
    return A, b


def _solve_dense(y, lags, delta2, kappa):
    n, q = lags.shape
    A, b = _stacked_rows(y, lags, delta2, kappa)
    Qm, R = np.linalg.qr(A)
    theta = linalg.solve_triangular(R, Qm.T @ b)
    resid = b - A @ theta
    Rinv = linalg.solve_triangular(R, np.eye(R.shape[0]))
    ginv = Rinv @ Rinv.T
    logdet = 2.0 * float(np.log(np.abs(np.diag(R))).sum())
    blocks = np.empty((n, q, q))
    for t in range(n):
        sl = slice(t * q, (t + 1) * q)
        blocks[t] = ginv[sl, sl]
    return theta, float(resid @ resid), logdet, blocks, float(ginv[-1, -1])


def _banded_gram(lags, delta2, kappa):
    """Upper banded storage (``u = q``) of the slope block of the Gram matrix."""
    n, q = lags.shape
    N = n * q
    ab = np.zeros((q + 1, N))
    z = lags.reshape(-1)
    cnt = np.full(n, 2.0)
    cnt[0] = cnt[-1] = 1.0
    if n == 1:
        cnt[0] = 0.0
    diag = z * z + np.repeat(cnt, q) / delta2
    diag[:q] += 1.0 / kappa
    ab[q] = diag
    for d in range(1, q):
        off = np.zeros(N)
        for ell in range(q - d):
            j = np.arange(n) * q + ell + d
            off[j] = lags[:, ell] * lags[:, ell + d]
        ab[q - d] = off
    off = np.zeros(N)
    off[q:] = -1.0 / delta2
    ab[0] = off
    return ab


def _takahashi_band(U, u):
    """Band of ``(U'U)^-1`` from upper banded Cholesky factor ``U`` (scipy layout).

    Returns ``Z`` with ``Z[d, i] = inv[i, i+d]`` for ``d = 0..u``.
    """
    N = U.shape[1]
    Ud = [U[u].tolist()] + [U[u - d].tolist() for d in range(1, u + 1)]
    # Ud[d][j] holds U[j-d, j]; row i, column i+d therefore lives at Ud[d][i+d].
    Z = [[0.0] * N for _ in range(u + 1)]

    def zget(a, c):
        if a > c:
            a, c = c, a
        return Z[c - a][a]

    for i in range(N - 1, -1, -1):
        uii = Ud[0][i]
        kmax = min(i + u, N - 1)
        uik = [Ud[k - i][k] for k in range(i + 1, kmax + 1)]
        for j in range(kmax, i, -1):
            s = 0.0
            for idx, k in enumerate(range(i + 1, kmax + 1)):
                s += uik[idx] * zget(k, j)
            Z[j - i][i] = -s / uii
        s = 0.0
        for idx, k in enumerate(range(i + 1, kmax + 1)):
            s += uik[idx] * Z[k - i][i]
        Z[0][i] = 1.0 / (uii * uii) - s / uii
    return np.array(Z)


def _solve_banded(y, lags, delta2, kappa):
    n, q = lags.shape
    ab = _banded_gram(lags, delta2, kappa)
    U = linalg.cholesky_banded(ab, lower=False)
    c = lags.reshape(-1)
    rB = (lags * y[:, None]).reshape(-1)
    sol = linalg.cho_solve_banded((U, False), np.column_stack([c, rB]))
    w, v = sol[:, 0], sol[:, 1]
    s = n + 1.0 / kappa - c @ w
    a0 = (y.sum() - c @ v) / s
    alpha = v - w * a0
    theta = np.concatenate([alpha, [a0]])
    paths = alpha.reshape(n, q)
    e_obs = y - a0 - (lags * paths).sum(axis=1)
    d = np.diff(paths, axis=0)
    rss = float(e_obs @ e_obs + (d * d).sum() / delta2 + (paths[0] @ paths[0] + a0 * a0) / kappa)
    logdet = 2.0 * float(np.log(U[q]).sum()) + math.log(s)
    Z = _takahashi_band(U, q)
    blocks = np.empty((n, q, q))
    wb = w.reshape(n, q)
    for a in range(q):
        blocks[:, a, a] = Z[0, a::q]
        for bb in range(a + 1, q):
            vals = Z[bb - a, a::q]
            blocks[:, a, bb] = vals
            blocks[:, bb, a] = vals
    blocks += wb[:, :, None] * wb[:, None, :] / s
    return theta, rss, logdet, blocks, 1.0 / s


def estimate_tvar_stacked(
    r: ReturnSeries | np.ndarray,
    q: int,
    cfg: SmoothingConfig | None = None,
    method: Literal["auto", "dense", "banded"] = "auto",
) -> TVARPath:
    """Posterior-mean coefficient paths from one penalised least-squares solve.

    Observation rows ``x_t - a0 - z_t'a_t`` and smoothness rows
    ``(a_t - a_{t-1}) / sqrt(delta2)`` are stacked with weak prior rows on
    ``a_1`` and ``a0``. ``method="dense"`` uses a QR factorisation of the
    stacked matrix; ``"banded"`` a banded Cholesky of the slope block with the
    intercept eliminated by a Schur complement and covariance blocks by
    selected inversion. ``"auto"`` switches to banded above
    ``DENSE_MAX_UNKNOWNS`` unknowns.
    """
    cfg = cfg or SmoothingConfig()
    y, lags, dates = _prepare(r, q)
    n = len(y)
    if method == "auto":
        method = "dense" if n * q + 1 <= DENSE_MAX_UNKNOWNS else "banded"
    solver = {"dense": _solve_dense, "banded": _solve_banded}.get(method)
    if solver is None:
        raise ValueError(f"unknown method {method!r}")
    theta, rss, logdet, blocks, var0 = solver(y, lags, cfg.delta2, cfg.prior_var)
    ll, s2 = _diffuse_loglik(rss, logdet, n, q, cfg.delta2)
    paths = theta[:-1].reshape(n, q)
    a0 = float(theta[-1])
    return TVARPath(
        order=q,
        intercept=a0,
        intercept_se=math.sqrt(var0 * s2),
        dates=dates,
        coeff_paths=paths,
        cov_blocks=blocks * s2,
        loglik=ll,
        sigma_u2=s2,
        config=replace(cfg, sigma_u2=s2),
        backend=f"stacked-{method}",
        residuals=y - a0 - (lags * paths).sum(axis=1),
        lags=lags,
        target=y,
    )


# --------------------------------------------------------------------------
# Kalman filter / smoother


def kalman_smoother(y, Z, delta2, kappa=DEFAULT_PRIOR_VAR, want_cov=True, smooth=True):
    """Batched Kalman filter and Durbin-Koopman smoother, unit observation variance.

    Parameters
    ----------
    y : array (B, n)
    Z : array (B, n, m) or (n, m)
        Observation rows; the first state has no innovation (intercept).
    delta2 : float or array (B,)
        Innovation variance of states ``1..m-1``.
    kappa : float
        Initial state variance.

    Returns
    -------
    dict with ``rss`` and ``sum_log_f`` (each (B,)), and when ``smooth`` the
    smoothed states ``mean`` (B, n, m) plus ``cov`` (B, n, m, m) when
    ``want_cov``.
    """
    y = np.atleast_2d(np.asarray(y, dtype=float))
    B, n = y.shape
    Z = np.asarray(Z, dtype=float)
    if Z.ndim == 2:
        Z = np.broadcast_to(Z, (B,) + Z.shape)
    m = Z.shape[-1]
    d2 = np.broadcast_to(np.asarray(delta2, dtype=float), (B,))
    qdiag = np.zeros((B, m))
    qdiag[:, 1:] = d2[:, None]
    idx = np.arange(m)

    a = np.zeros((B, m))
    P = np.zeros((B, m, m))
    P[:, idx, idx] = kappa
    rss = np.zeros(B)
    slf = np.zeros(B)
    if smooth:
        a_pred = np.empty((B, n, m))
        P_pred = np.empty((B, n, m, m))
        v_all = np.empty((B, n))
        F_all = np.empty((B, n))
        K_all = np.empty((B, n, m))
    for t in range(n):
        z = Z[:, t]
        v = y[:, t] - np.einsum("bm,bm->b", z, a)
        Pz = np.einsum("bij,bj->bi", P, z)
        F = np.einsum("bi,bi->b", z, Pz) + 1.0
        K = Pz / F[:, None]
        if smooth:
            a_pred[:, t] = a
            P_pred[:, t] = P
            v_all[:, t] = v
            F_all[:, t] = F
            K_all[:, t] = K
        rss += v * v / F
        slf += np.log(F)
        a = a + K * v[:, None]
        P = P - K[:, :, None] * Pz[:, None, :]
        P = 0.5 * (P + np.swapaxes(P, 1, 2))
        P[:, idx, idx] += qdiag
    out = {"rss": rss, "sum_log_f": slf}
    if not smooth:
        return out

    mean = np.empty((B, n, m))
    r = np.zeros((B, m))
    for t in range(n - 1, -1, -1):
        z = Z[:, t]
        # r_{t-1} = z v/F + L' r_t with L = I - K z'
        r = z * (v_all[:, t] / F_all[:, t])[:, None] + r - z * np.einsum("bi,bi->b", K_all[:, t], r)[:, None]
        mean[:, t] = a_pred[:, t] + np.einsum("bij,bj->bi", P_pred[:, t], r)
    out["mean"] = mean
    if want_cov:
        # RTS form V_t = J V_{t+1} J' + Q - Q M Q, M = P_{t+1|t}^{-1}, J = I - Q M;
        # avoids P - P N P, which loses precision while P is still diffuse.
        cov = np.empty((B, n, m, m))
        V = P - qdiag[:, :, None] * np.eye(m)
        cov[:, n - 1] = V
        for t in range(n - 2, -1, -1):
            M = np.linalg.inv(P_pred[:, t + 1])
            QM = qdiag[:, :, None] * M
            J = np.eye(m) - QM
            V = J @ V @ np.swapaxes(J, 1, 2) - QM * qdiag[:, None, :]
            V[:, idx, idx] += qdiag
            V = 0.5 * (V + np.swapaxes(V, 1, 2))
            cov[:, t] = V
        out["cov"] = cov
    return out


def kalman_loglik(y, lags, delta2, kappa=DEFAULT_PRIOR_VAR):
    """Concentrated diffuse log-likelihood for one series over a vector of ``delta2``.

    Returns ``(loglik, sigma_u2)`` arrays aligned with ``delta2``.
    """
    d2 = np.atleast_1d(np.asarray(delta2, dtype=float))
    n, q = lags.shape
    Z = np.column_stack([np.ones(n), lags])
    yb = np.broadcast_to(y, (len(d2), n))
    res = kalman_smoother(yb, Z, d2, kappa, smooth=False)
    ne = n - (q + 1)
    s2 = res["rss"] / ne
    logdet = res["sum_log_f"] - (q + 1) * math.log(kappa)
    ll = -0.5 * (ne * (math.log(2 * math.pi) + 1.0 + np.log(s2)) + logdet)
    return ll, s2


def estimate_tvar_kalman(r: ReturnSeries | np.ndarray, q: int, cfg: SmoothingConfig | None = None) -> TVARPath:
    """Posterior-mean coefficient paths from the Kalman smoother.

    The state is ``(a0, a_{1,t}, ..., a_{q,t})`` with identity transition and
    innovation covariance ``diag(0, delta2, ..., delta2)``; the intercept is
    the zero-innovation component. Initial variance ``cfg.prior_var``.
    """
    cfg = cfg or SmoothingConfig()
    y, lags, dates = _prepare(r, q)
    n = len(y)
    Z = np.column_stack([np.ones(n), lags])
    res = kalman_smoother(y[None], Z, cfg.delta2, cfg.prior_var, want_cov=True)
    logdet = float(res["sum_log_f"][0]) - (q + 1) * math.log(cfg.prior_var)
    ll, s2 = _diffuse_loglik(float(res["rss"][0]), logdet, n, q, 1.0)
    mean = res["mean"][0]
    cov = res["cov"][0]
    paths = mean[:, 1:].copy()
    a0 = float(mean[-1, 0])
    return TVARPath(
        order=q,
        intercept=a0,
        intercept_se=math.sqrt(max(float(cov[-1, 0, 0]), 0.0) * s2),
        dates=dates,
        coeff_paths=paths,
        cov_blocks=cov[:, 1:, 1:] * s2,
        loglik=ll,
        sigma_u2=s2,
        config=replace(cfg, sigma_u2=s2),
        backend="kalman",
        residuals=y - a0 - (lags * paths).sum(axis=1),
        lags=lags,
        target=y,
    )


def estimate_tvar(r, q, cfg=None, backend: str = "kalman") -> TVARPath:
    if backend == "kalman":
        return estimate_tvar_kalman(r, q, cfg)
    if backend == "stacked":
        return estimate_tvar_stacked(r, q, cfg)
    raise ValueError(f"unknown backend {backend!r}")


# --------------------------------------------------------------------------
# smoothing selection


def select_smoothing(
    r: ReturnSeries | np.ndarray,
    q: int,
    bounds: tuple[float, float] = LN_DELTA2_BOUNDS,
    grid_step: float = 0.5,
    refine_points: int = 21,
    refine_rounds: int = 2,
    prior_var: float = DEFAULT_PRIOR_VAR,
    flat_tol: float = 1e-6,
    warn: bool = True,
) -> SmoothingConfig:
    """Maximum-likelihood choice of ``delta2`` with ``sigma_u2`` concentrated out.

    An ascending grid on ``ln delta2`` over ``bounds`` is scanned first; the
    first point within ``1e-9`` of the best value wins. The bracket around it
    is then refined by ``refine_rounds`` finer grids. A maximum on the lower
    bound means no detectable time variation; a flat profile falls back to
    ``delta2 = 0.01``. Both cases are recorded in ``notes`` and, unless
    ``warn=False``, emitted as :class:`SmoothingWarning`.
    """
    y, lags, _ = _prepare(r, q)
    lo, hi = bounds
    grid = np.arange(lo, hi + 0.5 * grid_step, grid_step)
    ll, _ = kalman_loglik(y, lags, np.exp(grid), prior_var)
    evaluated = dict(zip(grid.tolist(), ll.tolist()))
    notes = []

    def first_argmax(vals):
        best = np.nanmax(vals)
        return int(np.flatnonzero(vals >= best - 1e-9 * (1.0 + abs(best)))[0])

    if not np.all(np.isfinite(ll)) and not np.any(np.isfinite(ll)):
        raise ArithmeticError("log-likelihood is not finite anywhere on the grid")
    i = first_argmax(ll)
    if np.nanmax(ll) - np.nanmin(ll) < flat_tol:
        best = math.log(DEFAULT_DELTA2)
        notes.append("flat likelihood; using default delta2=0.01")
    elif i == 0:
        best = float(grid[0])
        notes.append("likelihood maximised at the lower bound of ln(delta2); no time variation detected")
    else:
        a = float(grid[i - 1])
        b = float(grid[min(i + 1, len(grid) - 1)])
        best = float(grid[i])
        for _ in range(refine_rounds):
            fine = np.linspace(a, b, refine_points)
            fll, _ = kalman_loglik(y, lags, np.exp(fine), prior_var)
            evaluated.update(zip(fine.tolist(), fll.tolist()))
            j = first_argmax(fll)
            best = float(fine[j])
            step = fine[1] - fine[0]
            a, b = max(best - step, lo), min(best + step, hi)
        if i == len(grid) - 1 and best >= hi - 1e-12:
            notes.append("likelihood maximised at the upper bound of ln(delta2)")
    for msg in notes if warn else ():
        warnings.warn(msg, SmoothingWarning, stacklevel=2)
    d2 = math.exp(best)
    ll_best, s2 = kalman_loglik(y, lags, [d2], prior_var)
    evaluated[best] = float(ll_best[0])
    profile = tuple(sorted(evaluated.items()))
    return SmoothingConfig(
        delta2=d2,
        selection="max_likelihood",
        sigma_u2=float(s2[0]),
        prior_var=prior_var,
        profile=profile,
        notes=tuple(notes),
    )


# --------------------------------------------------------------------------
# bands


def _hac_blocks(path: TVARPath, bandwidth: int | None):
    """Sandwich covariance blocks with Bartlett-weighted observation scores."""
    n, q = path.coeff_paths.shape
    if n * q + 1 > 4 * DENSE_MAX_UNKNOWNS:
        raise NotImplementedError(f"HAC bands are only available for up to {4 * DENSE_MAX_UNKNOWNS} unknowns")
    cfg = path.config
    A, _ = _stacked_rows(path.target, path.lags, cfg.delta2, cfg.prior_var)
    G = A.T @ A
    Ginv = np.linalg.inv(G)
    Aobs, Apen = A[:n], A[n:]
    S = Aobs * path.residuals[:, None]
    bw = nw_auto_bandwidth(n) if bandwidth is None else int(bandwidth)
    w = bartlett_weights(bw)
    WS = S.copy()
    for j in range(1, min(bw, n - 1) + 1):
        WS[j:] += w[j] * S[:-j]
        WS[:-j] += w[j] * S[j:]
    M = S.T @ WS + path.sigma_u2 * (Apen.T @ Apen)
    H = M @ Ginv
    blocks = np.empty((n, q, q))
    for t in range(n):
        sl = slice(t * q, (t + 1) * q)
        blocks[t] = Ginv[sl, :] @ H[:, sl]
    return 0.5 * (blocks + np.swapaxes(blocks, 1, 2)), bw


def coefficient_bands(path: TVARPath, level: float = 0.95, hac: bool = False, bandwidth: int | None = None) -> Bands:
    """Pointwise normal intervals ``a_t +/- z * se_t``.

    ``hac=True`` replaces the model-implied covariance by a sandwich in which
    the observation-row scores get Bartlett (Newey-West) weighting.
    """
    if not 0 < level < 1:
        raise ValueError("level must lie in (0, 1)")
    z = float(stats.norm.ppf(0.5 + level / 2.0))
    if hac:
        blocks, bw = _hac_blocks(path, bandwidth)
        kind = f"hac(bartlett,{bw})"
    else:
        blocks, kind = path.cov_blocks, "model"
    se = np.sqrt(np.clip(np.diagonal(blocks, axis1=1, axis2=2), 0.0, None))
    return Bands(level, z, kind, path.coeff_paths - z * se, path.coeff_paths + z * se, se)


def dispersion_ratio(path: TVARPath) -> np.ndarray:
    """Per-lag ratio of the path's SD across periods to its mean per-period SE."""
    return path.coeff_paths.std(axis=0) / path.se.mean(axis=0)


def fluctuates_wildly(path: TVARPath, factor: float = 3.0) -> bool:
    """True when the first-lag path moves by more than ``factor`` typical standard errors."""
    return bool(dispersion_ratio(path)[0] > factor)
