"""End-to-end analysis: returns -> unit root -> AR fit -> constancy -> TV-AR -> efficiency."""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .armodel import fit_ar_ols, sbic_profile, select_order_sbic
from .constancy import hansen_lc
from .efficiency import bootstrap_joint_zero_test, impulse_surface, long_run_multipliers
from .events import load_events, overlay
from .ingest import PriceSeries, describe, load_csv, to_log_returns
from .stationarity import adf_gls, normalize_trend
from .tvar import (
    SmoothingConfig,
    coefficient_bands,
    dispersion_ratio,
    estimate_tvar_kalman,
    estimate_tvar_stacked,
    select_smoothing,
)

log = logging.getLogger(__name__)

OUTPUT_FILES = ("report.json", "descriptive.csv", "tvar_coefficients.csv", "impulse_surface.csv", "efficiency.csv")
BACKEND_TOL = 1e-6


class ConfigError(ValueError):
    pass


class StageError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


class UnitRootNotRejected(StageError):
    pass


@dataclass
class PipelineConfig:
    input: str = ""
    date_col: str = "date"
    value_col: str = "value"
    value_kind: str = "prices"
    trend: str = "ct"
    max_lag: int | None = None
    qmax: int = 12
    delta2: float | str = "auto"
    horizons: int = 60
    boot_reps: int = 999
    seed: int = 0
    level: float = 0.95
    out: str = "out"
    backend: str = "both"
    force: bool = False

    def validate(self) -> None:
        if not self.input:
            raise ConfigError("no input file given")
        if not Path(self.input).is_file():
            raise ConfigError(f"input file not found: {self.input}")
        if self.value_kind not in ("prices", "returns"):
            raise ConfigError("value_kind must be 'prices' or 'returns'")
        try:
            normalize_trend(self.trend)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if int(self.qmax) < 1:
            raise ConfigError("qmax must be >= 1")
        if self.max_lag is not None and int(self.max_lag) < 0:
            raise ConfigError("max_lag must be >= 0")
        if self.delta2 != "auto" and not float(self.delta2) > 0:
            raise ConfigError("delta2 must be 'auto' or a positive number")
        if int(self.horizons) < 1:
            raise ConfigError("horizons must be >= 1")
        if int(self.boot_reps) != 0 and int(self.boot_reps) < 99:
            raise ConfigError("boot_reps must be 0 (skip) or >= 99")
        if not 0 < float(self.level) < 1:
            raise ConfigError("level must lie in (0, 1)")
        if self.backend not in ("stacked", "kalman", "both"):
            raise ConfigError("backend must be stacked, kalman or both")


@dataclass
class PipelineResult:
    report: dict
    out_dir: Path
    files: list[Path] = field(default_factory=list)


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def _fmt(v) -> str:
    v = float(v)
    return repr(v) if math.isfinite(v) else "nan"


def _stage(name):
    def deco(fn):
        def wrapper(*args, **kwargs):
            log.info("stage %s", name)
            try:
                return fn(*args, **kwargs)
            except StageError:
                raise
            except Exception as exc:
                raise StageError(name, f"{type(exc).__name__}: {exc}") from exc

        return wrapper

    return deco


@_stage("ingest")
def _ingest(cfg):
    series = load_csv(cfg.input, cfg.date_col, cfg.value_col, cfg.value_kind)
    return to_log_returns(series) if isinstance(series, PriceSeries) else series


@_stage("describe")
def _describe(r):
    return describe(r)


@_stage("adf_gls")
def _unit_root(r, cfg):
    return adf_gls(r, max_lag=cfg.max_lag, trend_model=cfg.trend)


@_stage("select_order_sbic")
def _order(r, cfg):
    return select_order_sbic(r, cfg.qmax), sbic_profile(r, cfg.qmax)


@_stage("fit_ar_ols")
def _fit(r, q):
    return fit_ar_ols(r, q)


@_stage("hansen_lc")
def _constancy(fit):
    return hansen_lc(fit)


@_stage("select_smoothing")
def _smoothing(r, q, cfg):
    if cfg.delta2 == "auto":
        return select_smoothing(r, q, warn=False)
    return SmoothingConfig(delta2=float(cfg.delta2))


@_stage("estimate_tvar")
def _tvar(r, q, smooth, backend):
    paths = {}
    if backend in ("stacked", "both"):
        paths["stacked"] = estimate_tvar_stacked(r, q, smooth)
    if backend in ("kalman", "both"):
        paths["kalman"] = estimate_tvar_kalman(r, q, smooth)
    diff = None
    if len(paths) == 2:
        diff = float(np.abs(paths["stacked"].coeff_paths - paths["kalman"].coeff_paths).max())
        if not diff <= BACKEND_TOL:
            raise StageError("estimate_tvar", f"stacked and Kalman paths disagree by {diff:.3e} (> {BACKEND_TOL})")
    main = paths.get("kalman") or paths["stacked"]
    return main, diff


@_stage("efficiency")
def _efficiency(path, cfg):
    bands = coefficient_bands(path, cfg.level)
    try:
        hac = coefficient_bands(path, cfg.level, hac=True)
    except NotImplementedError:
        hac = None
    return bands, hac, impulse_surface(path, cfg.horizons), long_run_multipliers(path, cfg.level)


@_stage("bootstrap")
def _bootstrap(r, q, smooth, cfg):
    if int(cfg.boot_reps) == 0:
        return None
    return bootstrap_joint_zero_test(r, q, smooth, reps=int(cfg.boot_reps), seed=int(cfg.seed))


def emit_report(cfg: PipelineConfig, stages: dict) -> dict:
    """Assemble the JSON report from stage results (no I/O)."""
    r = stages["returns"]
    path = stages["tvar"]
    eff = stages["efficiency"]
    ok = eff.locally_stationary
    phi_by_date = {d: float(p) for d, p in zip(eff.dates, eff.phi_inf)}
    report = {
        "tool": {"name": "tvefficiency", "version": __version__},
        "config": asdict(cfg),
        "sample": {"first": r.dates[0], "last": r.dates[-1], "n_returns": len(r)},
        "descriptive": stages["describe"].as_dict(),
        "unit_root": stages["unit_root"].as_dict(),
        "order_selection": {
            "criterion": "sbic",
            "q_max": int(cfg.qmax),
            "profile": {str(k): v for k, v in stages["sbic_profile"].items()},
            "selected": stages["order"],
        },
        "ar_fit": stages["ar_fit"].as_dict(),
        "constancy": stages["constancy"].as_dict(),
        "smoothing": stages["smoothing"].as_dict(),
        "tvar": {
            "backend": cfg.backend,
            "reported_backend": path.backend,
            "backend_max_abs_diff": stages["backend_diff"],
            "order": path.order,
            "intercept": path.intercept,
            "intercept_se": path.intercept_se,
            "loglik": path.loglik,
            "sigma_u2": path.sigma_u2,
            "n_periods": path.n,
            "dispersion_ratio": dispersion_ratio(path).tolist(),
            "hac_bands": stages["hac_kind"],
        },
        "efficiency": {
            "level": eff.level,
            "horizons": int(cfg.horizons),
            "n_stationary": int(ok.sum()),
            "n_nonstationary": int((~ok).sum()),
            "phi_mean": float(np.nanmean(eff.phi_inf)) if ok.any() else None,
            "phi_min": float(np.nanmin(eff.phi_inf)) if ok.any() else None,
            "phi_max": float(np.nanmax(eff.phi_inf)) if ok.any() else None,
        },
        "bootstrap": stages["bootstrap"].as_dict() if stages["bootstrap"] is not None else None,
        "annotations": overlay(load_events(), eff.dates, phi_by_date),
        "warnings": list(stages["warnings"]),
    }
    return _clean(report)


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_outputs(out_dir: Path, report: dict, stages: dict) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    files = [out_dir / name for name in OUTPUT_FILES]
    files[0].write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    d, ur = stages["describe"], stages["unit_root"]
    _write_csv(
        files[1],
        ["n", "mean", "sd", "min", "max", "adf_gls", "lag", "phi_hat"],
        [[d.n, _fmt(d.mean), _fmt(d.sd), _fmt(d.min), _fmt(d.max), _fmt(ur.statistic), ur.lag, _fmt(ur.phi_hat)]],
    )

    path, bands, hac = stages["tvar"], stages["bands"], stages["hac"]
    q = path.order
    header = ["date"] + [f"alpha_{i}" for i in range(1, q + 1)] + [f"se_{i}" for i in range(1, q + 1)]
    if hac is not None:
        header += [f"se_hac_{i}" for i in range(1, q + 1)]
    rows = []
    for t, date in enumerate(path.dates):
        row = [date] + [_fmt(v) for v in path.coeff_paths[t]] + [_fmt(v) for v in bands.se[t]]
        if hac is not None:
            row += [_fmt(v) for v in hac.se[t]]
        rows.append(row)
    _write_csv(files[2], header, rows)

    surf = stages["surface"]
    _write_csv(
        files[3],
        ["date", "horizon", "beta"],
        ([date, k, _fmt(surf.values[t, k])] for t, date in enumerate(surf.dates) for k in range(surf.values.shape[1])),
    )

    eff = stages["efficiency"]
    _write_csv(
        files[4],
        ["date", "phi", "se", "lo", "hi", "stationary_flag", "deviation"],
        (
            [date, _fmt(eff.phi_inf[t]), _fmt(eff.se[t]), _fmt(eff.lower[t]), _fmt(eff.upper[t]), int(eff.locally_stationary[t]), _fmt(eff.deviation[t])]
            for t, date in enumerate(eff.dates)
        ),
    )
    return files


def run_pipeline(cfg: PipelineConfig) -> PipelineResult:
    """Run every stage and write the five output files to ``cfg.out``.

    Raises :class:`ConfigError` before any computation on a bad config,
    :class:`UnitRootNotRejected` when the unit root is not rejected at 5%
    and ``cfg.force`` is false, and :class:`StageError` naming the failing
    stage otherwise.
    """
    cfg.validate()
    warnings_: list[str] = []
    stages: dict = {"warnings": warnings_}
    r = _ingest(cfg)
    stages["returns"] = r
    stages["describe"] = _describe(r)
    ur = _unit_root(r, cfg)
    stages["unit_root"] = ur
    if not ur.reject[0.05]:
        msg = f"ADF-GLS does not reject a unit root at 5% (statistic {ur.statistic:.4f}); series may be nonstationary"
        if not cfg.force:
            raise UnitRootNotRejected("adf_gls", msg + "; rerun with --force to continue")
        log.warning(msg)
        warnings_.append(msg)
    q, prof = _order(r, cfg)
    stages["order"], stages["sbic_profile"] = q, prof
    fit = _fit(r, q)
    stages["ar_fit"] = fit
    stages["constancy"] = _constancy(fit)
    smooth = _smoothing(r, q, cfg)
    warnings_.extend(smooth.notes)
    path, diff = _tvar(r, q, smooth, cfg.backend)
    stages["smoothing"] = path.config
    stages["tvar"], stages["backend_diff"] = path, diff
    bands, hac, surf, eff = _efficiency(path, cfg)
    stages.update(bands=bands, hac=hac, surface=surf, efficiency=eff, hac_kind=hac.kind if hac else None)
    if (~eff.locally_stationary).any():
        warnings_.append(f"{int((~eff.locally_stationary).sum())} period(s) not locally stationary; phi left blank")
    stages["bootstrap"] = _bootstrap(r, q, path.config, cfg)
    report = emit_report(cfg, stages)
    out_dir = Path(cfg.out)
    files = write_outputs(out_dir, report, stages)
    return PipelineResult(report=report, out_dir=out_dir, files=files)
