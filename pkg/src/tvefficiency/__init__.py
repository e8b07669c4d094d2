"""Time-varying degree of stock-market efficiency from a price-index series.

The package estimates an AR model whose slope coefficients follow independent
random walks (with a time-invariant intercept), then turns the per-period
coefficients into impulse responses and long-run multipliers.  A long-run
multiplier of one corresponds to an efficient market.
"""

__version__ = "0.1.0"

from .ingest import PriceSeries, ReturnSeries, DescriptiveStats, load_csv, to_log_returns, describe
from .stationarity import UnitRootResult, gls_detrend, adf_gls, ur_critical_values
from .armodel import ARFit, fit_ar_ols, select_order_sbic, newey_west_cov, nw_auto_bandwidth
from .constancy import ConstancyResult, hansen_lc, lc_critical_value
from .tvar import (
    SmoothingConfig,
    TVARPath,
    estimate_tvar_stacked,
    estimate_tvar_kalman,
    select_smoothing,
    coefficient_bands,
    fluctuates_wildly,
)
from .efficiency import (
    ImpulseSurface,
    EfficiencyPath,
    local_stationarity,
    impulse_surface,
    long_run_multipliers,
    delta_method_se,
    bootstrap_joint_zero_test,
)

__all__ = [
    "PriceSeries",
    "ReturnSeries",
    "DescriptiveStats",
    "load_csv",
    "to_log_returns",
    "describe",
    "UnitRootResult",
    "gls_detrend",
    "adf_gls",
    "ur_critical_values",
    "ARFit",
    "fit_ar_ols",
    "select_order_sbic",
    "newey_west_cov",
    "nw_auto_bandwidth",
    "ConstancyResult",
    "hansen_lc",
    "lc_critical_value",
    "SmoothingConfig",
    "TVARPath",
    "estimate_tvar_stacked",
    "estimate_tvar_kalman",
    "select_smoothing",
    "coefficient_bands",
    "fluctuates_wildly",
    "ImpulseSurface",
    "EfficiencyPath",
    "local_stationarity",
    "impulse_surface",
    "long_run_multipliers",
    "delta_method_se",
    "bootstrap_joint_zero_test",
]
