import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from tvefficiency.armodel import fit_ar_ols
from tvefficiency.constancy import LEVELS, hansen_lc, hansen_scores, lc_critical_value

from conftest import ar1_series


def lc_double_loop(X, e):
    """L_C by explicit loops: scores, cumulative sums and the quadratic form."""
    n, k = X.shape
    s2 = sum(v * v for v in e) / n
    f = [[X[t, i] * e[t] for i in range(k)] + [e[t] * e[t] - s2] for t in range(n)]
    m = k + 1
    V = np.zeros((m, m))
    for t in range(n):
        for i in range(m):
            for j in range(m):
                V[i, j] += f[t][i] * f[t][j]
    Vinv = np.linalg.inv(V)
    total = 0.0
    S = [0.0] * m
    for t in range(n):
        for i in range(m):
            S[i] += f[t][i]
        for i in range(m):
            for j in range(m):
                total += S[i] * Vinv[i, j] * S[j]
    return total / n


def test_joint_statistic_double_loop_oracle():
    r = ar1_series(0.3, 31, seed=4)
    fit = fit_ar_ols(r, 1)
    res = hansen_lc(fit)
    assert res.m == 3
    assert_allclose(res.lc_joint, lc_double_loop(fit.design, fit.residuals), rtol=1e-12)


def test_individual_and_nonnegative():
    fit = fit_ar_ols(ar1_series(0.3, 200, seed=2), 1)
    res = hansen_lc(fit)
    f = hansen_scores(fit.design, fit.residuals)
    S = np.cumsum(f, axis=0)
    n = len(f)
    expect = [(S[:, i] ** 2).sum() / (n * (f[:, i] ** 2).sum()) for i in range(3)]
    assert_allclose(res.lc_individual, expect, rtol=1e-12)
    assert res.lc_joint >= 0 and np.all(res.lc_individual >= 0)
    for lvl in LEVELS:
        assert res.reject[lvl] == (res.lc_joint > res.critical_values[lvl])


def test_coefficient_scores_sum_to_zero():
    fit = fit_ar_ols(ar1_series(0.3, 200, seed=2), 1)
    f = hansen_scores(fit.design, fit.residuals)
    assert_allclose(f.sum(axis=0), 0.0, atol=1e-10)


def test_non_ols_fit_is_refused():
    fit = fit_ar_ols(ar1_series(0.3, 200, seed=2), 1)
    fit.residuals[:] = fit.residuals + 0.1
    with pytest.raises(ArithmeticError):
        hansen_lc(fit)


def test_without_variance_and_robust():
    fit = fit_ar_ols(ar1_series(0.3, 300, seed=6), 1)
    a = hansen_lc(fit, include_variance=False)
    assert a.m == 2 and a.critical_values[0.05] == lc_critical_value(2, 0.05)
    b = hansen_lc(fit, robust=True, bandwidth=0)
    assert_allclose(b.lc_joint, hansen_lc(fit).lc_joint, rtol=1e-12)


def test_sample_size_guard():
    fit = fit_ar_ols(ar1_series(0.3, 25, seed=1), 1)
    with pytest.raises(ValueError, match="at least 30"):
        hansen_lc(fit)


@settings(max_examples=20, deadline=None)
@given(st.floats(1e-3, 1e3) | st.floats(-1e3, -1e-3))
def test_scale_invariance(c):
    r = ar1_series(0.2, 150, seed=13)
    a = hansen_lc(fit_ar_ols(r, 1)).lc_joint
    b = hansen_lc(fit_ar_ols(r.values * c, 1)).lc_joint
    assert_allclose(a, b, rtol=1e-8)


def test_critical_value_table():
    assert 0.4 < lc_critical_value(1, 0.05) < 0.5
    for lvl in LEVELS:
        col = [lc_critical_value(m, lvl) for m in range(1, 21)]
        assert all(np.diff(col) > 0)
    with pytest.raises(ValueError, match="unsupported m"):
        lc_critical_value(25, 0.05)
    with pytest.raises(ValueError, match="unsupported level"):
        lc_critical_value(1, 0.2)


@pytest.mark.parametrize("m", [1, 3])
def test_critical_values_against_discretized_bridges(m):
    """Independent oracle: random-walk bridges on a 400-point grid."""
    g = np.random.default_rng(31 + m)
    n, reps = 400, 20000
    draws = np.empty(reps)
    for i in range(0, reps, 2000):
        w = np.cumsum(g.standard_normal((2000, m, n)), axis=2) / np.sqrt(n)
        u = np.arange(1, n + 1) / n
        b = w - u * w[:, :, -1:]
        draws[i : i + 2000] = (b**2).sum(axis=1).mean(axis=1)
    for lvl in LEVELS:
        assert_allclose(np.quantile(draws, 1 - lvl), lc_critical_value(m, lvl), rtol=0.05)
