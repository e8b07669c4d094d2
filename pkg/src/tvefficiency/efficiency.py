"""Time-varying impulse responses and long-run multipliers from a TV-AR path.

For period ``t`` the coefficients are frozen at their smoothed values and the
local AR(q) is inverted into MA(inf) weights ``beta_{k,t}``. Their sum is the
long-run multiplier ``phi_t = 1 / (1 - sum_l a_{l,t})``; ``phi_t = 1`` (all
``beta_k = 0`` for ``k >= 1``) is the efficient-market benchmark.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from ._util import lag_design
from .tvar import SmoothingConfig, TVARPath, _prepare, kalman_smoother

__all__ = [
    "ImpulseSurface",
    "EfficiencyPath",
    "BootstrapResult",
    "NonStationaryError",
    "companion_matrices",
    "spectral_radius",
    "local_stationarity",
    "impulse_surface",
    "long_run_multipliers",
    "lr_gradient",
    "delta_method_se",
    "bootstrap_joint_zero_test",
]


class NonStationaryError(ValueError):
    """The frozen-coefficient AR of a period has a root on or outside the unit circle."""


@dataclass(frozen=True)
class ImpulseSurface:
    dates: tuple[str, ...]
    values: np.ndarray  # (n, K+1), first column 1

    @property
    def horizons(self) -> int:
        return self.values.shape[1] - 1


@dataclass(frozen=True)
class EfficiencyPath:
    """Long-run multipliers per period.

    Non-stationary periods carry ``phi = nan`` (and nan se/bands) with
    ``locally_stationary = False``.
    """

    dates: tuple[str, ...]
    phi_inf: np.ndarray
    se: np.ndarray
    level: float
    lower: np.ndarray
    upper: np.ndarray
    locally_stationary: np.ndarray
    deviation: np.ndarray

    @property
    def bands(self) -> dict[float, tuple[np.ndarray, np.ndarray]]:
        return {self.level: (self.lower, self.upper)}


@dataclass(frozen=True)
class BootstrapResult:
    p_value: float
    p_value_mean: float
    observed_sup: float
    observed_mean: float
    reps: int
    dropped: int
    seed: int
    statistic: str

    def as_dict(self) -> dict:
        return {
            "p_value": self.p_value,
            "p_value_mean_norm": self.p_value_mean,
            "observed_sup_norm": self.observed_sup,
            "observed_mean_norm": self.observed_mean,
            "statistic": self.statistic,
            "reps": self.reps,
            "dropped": self.dropped,
            "seed": self.seed,
        }


def _coeffs(path_or_array) -> np.ndarray:
    a = getattr(path_or_array, "coeff_paths", path_or_array)
    a = np.asarray(a, dtype=float)
    return a[None, :] if a.ndim == 1 else a


def companion_matrices(alpha: np.ndarray) -> np.ndarray:
    """Stack of ``q x q`` companion matrices, one per row of ``alpha``."""
    alpha = _coeffs(alpha)
    n, q = alpha.shape
    C = np.zeros((n, q, q))
    C[:, 0, :] = alpha
    if q > 1:
        C[:, np.arange(1, q), np.arange(q - 1)] = 1.0
    return C


def spectral_radius(alpha) -> np.ndarray:
    alpha = _coeffs(alpha)
    if alpha.shape[1] == 1:
        return np.abs(alpha[:, 0])
    return np.abs(np.linalg.eigvals(companion_matrices(alpha))).max(axis=1)


def local_stationarity(path: TVARPath | np.ndarray) -> np.ndarray:
    """True where every companion eigenvalue has modulus below one."""
    return spectral_radius(path) < 1.0


def impulse_surface(path: TVARPath | np.ndarray, K: int = 60) -> ImpulseSurface:
    """``beta_{0,t} = 1``, ``beta_{k,t} = sum_{j=1..min(k,q)} beta_{k-j,t} a_{j,t}``."""
    if K < 1:
        raise ValueError("K must be >= 1")
    alpha = _coeffs(path)
    n, q = alpha.shape
    beta = np.zeros((n, K + 1))
    beta[:, 0] = 1.0
    for k in range(1, K + 1):
        for j in range(1, min(k, q) + 1):
            beta[:, k] += beta[:, k - j] * alpha[:, j - 1]
    dates = getattr(path, "dates", tuple(str(i) for i in range(n)))
    return ImpulseSurface(tuple(dates), beta)


def lr_gradient(alpha) -> np.ndarray:
    """Gradient of ``1/(1 - sum(alpha))``; every component equals ``phi^2``."""
    alpha = np.asarray(alpha, dtype=float)
    g = 1.0 / (1.0 - alpha.sum()) ** 2
    return np.full(alpha.shape, g)


def delta_method_se(alpha_t, cov_t) -> float:
    """Delta-method standard error of the long-run multiplier for one period."""
    alpha_t = np.atleast_1d(np.asarray(alpha_t, dtype=float))
    cov_t = np.atleast_2d(np.asarray(cov_t, dtype=float))
    if not local_stationarity(alpha_t)[0]:
        raise NonStationaryError("period is not locally stationary")
    g = lr_gradient(alpha_t)
    return math.sqrt(max(float(g @ cov_t @ g), 0.0))


def long_run_multipliers(path: TVARPath, level: float = 0.95) -> EfficiencyPath:
    """Long-run multipliers with delta-method standard errors and normal bands."""
    if not 0 < level < 1:
        raise ValueError("level must lie in (0, 1)")
    alpha = _coeffs(path)
    n = alpha.shape[0]
    ok = local_stationarity(alpha)
    phi = np.full(n, np.nan)
    se = np.full(n, np.nan)
    denom = 1.0 - alpha.sum(axis=1)
    phi[ok] = 1.0 / denom[ok]
    cov = getattr(path, "cov_blocks", None)
    if cov is not None:
        g2 = phi[ok] ** 2
        se[ok] = np.sqrt(np.clip(g2 * g2 * cov[ok].sum(axis=(1, 2)), 0.0, None))
    z = float(stats.norm.ppf(0.5 + level / 2.0))
    dates = getattr(path, "dates", tuple(str(i) for i in range(n)))
    return EfficiencyPath(
        dates=tuple(dates),
        phi_inf=phi,
        se=se,
        level=level,
        lower=phi - z * se,
        upper=phi + z * se,
        locally_stationary=ok,
        deviation=np.abs(phi - 1.0),
    )


def _norm_stats(paths):
    norms = np.sqrt((paths * paths).sum(axis=-1))
    return norms.max(axis=-1), norms.mean(axis=-1)


def _bootstrap_chunk(e, mu, q, delta2, kappa, children):
    T = len(e)
    ys, Zs = [], []
    for child in children:
        rng = np.random.default_rng(child)
        x = mu + e[rng.integers(0, T, size=T)]
        lags, y = lag_design(x, q)
        ys.append(y)
        Zs.append(np.column_stack([np.ones(len(y)), lags]))
    res = kalman_smoother(np.array(ys), np.array(Zs), delta2, kappa, want_cov=False)
    return _norm_stats(res["mean"][:, :, 1:])


def bootstrap_joint_zero_test(
    r,
    q: int,
    cfg: SmoothingConfig,
    reps: int = 999,
    seed: int = 0,
    statistic: str = "sup",
    threads: int | None = None,
    chunk: int = 100,
) -> BootstrapResult:
    """Bootstrap p-value for "all TV-AR slope paths are zero".

    Under the null the returns are i.i.d.; bootstrap series resample the
    demeaned returns with replacement (mean added back), the TV-AR is
    re-smoothed with the same ``delta2`` and the statistic
    ``sup_t ||a_t||`` (or ``mean_t ||a_t||``) is compared with its observed
    value: ``p = (1 + #{boot >= observed}) / (valid reps + 1)``.

    Replicate ``b`` draws from ``SeedSequence(seed).spawn(reps)[b]``, so the
    result does not depend on chunking or thread count. Threads default to
    ``TVAR_THREADS`` (1 if unset).
    """
    if reps < 99:
        raise ValueError("reps must be >= 99")
    if statistic not in ("sup", "mean"):
        raise ValueError("statistic must be 'sup' or 'mean'")
    x = np.asarray(getattr(r, "values", r), dtype=float)
    y, lags, _ = _prepare(x, q)
    Z = np.column_stack([np.ones(len(y)), lags])
    obs = kalman_smoother(y[None], Z, cfg.delta2, cfg.prior_var, want_cov=False)
    obs_sup, obs_mean = (float(v[0]) for v in _norm_stats(obs["mean"][:, :, 1:]))

    mu = float(x.mean())
    e = x - mu
    children = np.random.SeedSequence(seed).spawn(reps)
    batches = [children[i : i + chunk] for i in range(0, reps, chunk)]
    if threads is None:
        threads = int(os.environ.get("TVAR_THREADS", "1") or 1)
    threads = max(1, threads)

    def run(batch):
        return _bootstrap_chunk(e, mu, q, cfg.delta2, cfg.prior_var, batch)

    if threads == 1:
        parts = [run(b) for b in batches]
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(run, batches))
    sup = np.concatenate([p[0] for p in parts])
    mean = np.concatenate([p[1] for p in parts])
    valid = np.isfinite(sup) & np.isfinite(mean)
    dropped = int((~valid).sum())
    if dropped > 0.05 * reps:
        raise RuntimeError(f"bootstrap aborted: {dropped} of {reps} replicates failed")
    nv = int(valid.sum())
    p_sup = (1 + int((sup[valid] >= obs_sup).sum())) / (nv + 1)
    p_mean = (1 + int((mean[valid] >= obs_mean).sum())) / (nv + 1)
    return BootstrapResult(
        p_value=p_sup if statistic == "sup" else p_mean,
        p_value_mean=p_mean,
        observed_sup=obs_sup,
        observed_mean=obs_mean,
        reps=reps,
        dropped=dropped,
        seed=seed,
        statistic=statistic,
    )
