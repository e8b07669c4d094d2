import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from tvefficiency.stationarity import (
    LEVELS,
    adf_gls,
    default_max_lag,
    df_regression,
    gls_detrend,
    mic_profile,
    ur_critical_values,
)

from conftest import ar1_series


def gls_oracle(y, trend, c_bar):
    """Quasi-difference regression via explicit normal equations."""
    T = len(y)
    a = 1.0 + c_bar / T
    t = np.arange(1, T + 1, dtype=float)
    z = np.ones((T, 1)) if trend == "c" else np.column_stack([np.ones(T), t])
    yq = np.empty(T)
    zq = np.empty_like(z)
    yq[0], zq[0] = y[0], z[0]
    for i in range(1, T):
        yq[i] = y[i] - a * y[i - 1]
        zq[i] = z[i] - a * z[i - 1]
    delta = np.linalg.solve(zq.T @ zq, zq.T @ yq)
    return y - z @ delta


def dickey_fuller_oracle(yd):
    """t-ratio of dy_t on yd_{t-1}, no deterministics, via scalar formulas."""
    x, dy = yd[:-1], np.diff(yd)
    b = (x @ dy) / (x @ x)
    e = dy - b * x
    s2 = (e @ e) / (len(dy) - 1)
    return b / np.sqrt(s2 / (x @ x))


def test_zero_series_detrends_to_zero():
    assert_allclose(gls_detrend(np.zeros(30), "ct"), 0.0)


def test_linear_trend_absorbed():
    y = 3.0 + 0.25 * np.arange(1, 101)
    assert_allclose(gls_detrend(y, "constant+trend"), 0.0, atol=1e-8)


@pytest.mark.parametrize("trend, c_bar", [("ct", -13.5), ("c", -7.0)])
def test_gls_detrend_matches_normal_equations(trend, c_bar):
    r = ar1_series(0.6, 200, seed=11, intercept=0.3)
    assert_allclose(gls_detrend(r, trend, c_bar), gls_oracle(r.values, trend, c_bar), rtol=1e-10, atol=1e-10)


def test_gls_detrend_contract():
    with pytest.raises(ValueError):
        gls_detrend(np.zeros(9))
    with pytest.raises(ValueError):
        gls_detrend(np.zeros(20), c_bar=1.0)


def test_max_lag_zero_is_plain_df():
    r = ar1_series(0.8, 300, seed=5)
    res = adf_gls(r, max_lag=0, trend_model="ct")
    yd = gls_oracle(r.values, "ct", -13.5)
    assert res.lag == 0
    assert_allclose(res.statistic, dickey_fuller_oracle(yd), rtol=1e-10)
    assert_allclose(res.phi_hat, 1.0 + res.df_slope)


def test_selected_lag_is_exhaustive_argmin():
    r = ar1_series(0.5, 400, seed=8)
    res = adf_gls(r, max_lag=8)
    yd = gls_detrend(r, "ct")
    prof = mic_profile(yd, 8)
    assert prof == res.ic_profile
    assert res.lag == min(range(9), key=lambda k: prof[k])
    assert res.lag <= res.max_lag
    for lvl in LEVELS:
        assert res.reject[lvl] == (res.statistic < res.critical_values[lvl])


def test_mic_profile_formula():
    r = ar1_series(0.5, 150, seed=9)
    yd = gls_detrend(r, "ct")
    prof = mic_profile(yd, 4, "mbic")
    b0, _, rss, X, _ = df_regression(yd, 2, first=4)
    n = X.shape[0]
    s2 = rss / n
    tau = b0**2 * (X[:, 0] @ X[:, 0]) / s2
    assert_allclose(prof[2], np.log(s2) + np.log(n) * (tau + 2) / n, rtol=1e-12)
    maic = mic_profile(yd, 4, "maic")
    assert_allclose(maic[2], np.log(s2) + 2 * (tau + 2) / n, rtol=1e-12)
    with pytest.raises(ValueError):
        mic_profile(yd, 4, "aic")


def test_lag_zero_reachable():
    # On random walks with white-noise increments MBIC usually stops at lag 0.
    lags = [adf_gls(np.cumsum(np.random.default_rng(s).standard_normal(300))).lag for s in range(20)]
    assert lags.count(0) >= 10


@settings(max_examples=20, deadline=None)
@given(st.floats(1e-3, 1e3) | st.floats(-1e3, -1e-3))
def test_scale_invariance(c):
    r = ar1_series(0.4, 200, seed=21)
    a, b = adf_gls(r, max_lag=6), adf_gls(r.values * c, max_lag=6)
    assert a.lag == b.lag
    assert_allclose([a.statistic, a.phi_hat], [b.statistic, b.phi_hat], rtol=1e-8)


def test_default_max_lag_schwert():
    assert default_max_lag(100) == 12
    assert default_max_lag(608) == 18


def test_critical_values_table():
    assert ur_critical_values("constant+trend", 0.01) == -3.42
    assert ur_critical_values("ct", 0.01) == -3.42
    for tm in ("c", "ct"):
        vals = [ur_critical_values(tm, lvl) for lvl in LEVELS]
        assert vals == sorted(vals)
    with pytest.raises(ValueError, match="unsupported level"):
        ur_critical_values("constant+trend", 0.50)


def test_critical_values_small_monte_carlo():
    """Independent check of the frozen table: finite-sample lag-0 quantiles at T=500."""
    g = np.random.default_rng(77)
    stats = {"c": [], "ct": []}
    for _ in range(2000):
        y = np.cumsum(g.standard_normal(500))
        for tm in stats:
            stats[tm].append(adf_gls(y, max_lag=0, trend_model=tm).statistic)
    for tm, s in stats.items():
        for lvl in LEVELS:
            assert abs(np.quantile(s, lvl) - ur_critical_values(tm, lvl)) < 0.12


def test_random_walk_size():
    children = np.random.SeedSequence(600).spawn(500)
    rejections = 0
    for c in children:
        y = np.cumsum(np.random.default_rng(c).standard_normal(600))
        rejections += adf_gls(y).reject[0.05]
    assert rejections <= 50


def test_insufficient_observations():
    with pytest.raises(ValueError, match="insufficient"):
        adf_gls(np.random.default_rng(0).standard_normal(20), max_lag=8)
