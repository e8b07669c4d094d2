"""Regenerate the bundled critical-value tables by simulation.

    python -m tvefficiency.calibrate [--reps 100000] [--seed 20121001]

ADF-GLS: quantiles of the lag-0 DF-GLS t statistic on Gaussian random walks
of length 2000. The 1% constant+trend cell is pinned to -3.42 afterwards.

L_C: quantiles of ``int_0^1 B(r)'B(r) dr`` for an m-dimensional Brownian
bridge, drawn from its Karhunen-Loeve series
``sum_k chi2_m / (k pi)^2`` truncated at 500 terms plus the tail mean.
"""

from __future__ import annotations

import argparse
import math
from pathlib import Path

import numpy as np

UR_PINNED = {("constant+trend", 0.01): -3.42}
LEVELS = (0.01, 0.05, 0.10)


def simulate_dfgls_null(trend_model: str, T: int = 2000, reps: int = 100_000, seed: int = 0, chunk: int = 1000) -> np.ndarray:
    """Lag-0 DF-GLS t statistics for ``reps`` driftless random walks."""
    from .stationarity import _deterministics, _quasi_difference, default_c_bar

    rng = np.random.default_rng(seed)
    abar = 1.0 + default_c_bar(trend_model) / T
    z = _deterministics(T, trend_model)
    zq = _quasi_difference(z, abar)
    proj = np.linalg.solve(zq.T @ zq, zq.T)
    out = np.empty(reps)
    done = 0
    while done < reps:
        b = min(chunk, reps - done)
        y = np.cumsum(rng.standard_normal((b, T)), axis=1)
        yq = y.copy()
        yq[:, 1:] -= abar * y[:, :-1]
        delta = yq @ proj.T
        yd = y - delta @ z.T
        lag = yd[:, :-1]
        dy = np.diff(yd, axis=1)
        sxx = (lag * lag).sum(axis=1)
        slope = (lag * dy).sum(axis=1) / sxx
        resid = dy - slope[:, None] * lag
        s2 = (resid * resid).sum(axis=1) / (T - 2)
        out[done : done + b] = slope / np.sqrt(s2 / sxx)
        done += b
    return out


def simulate_bridge_functional(m: int, reps: int = 100_000, seed: int = 0, terms: int = 500, chunk: int = 5000) -> np.ndarray:
    """Draws of ``int B'B`` for an m-dimensional Brownian bridge (series form)."""
    rng = np.random.default_rng(seed)
    k = np.arange(1, terms + 1)
    w = 1.0 / (k * math.pi) ** 2
    tail = m * (1.0 / 6.0 - w.sum())
    out = np.empty(reps)
    done = 0
    while done < reps:
        b = min(chunk, reps - done)
        out[done : done + b] = rng.chisquare(m, size=(b, terms)) @ w + tail
        done += b
    return out


def build_ur_table(reps: int, seed: int) -> list[tuple[str, float, float, str]]:
    rows = []
    for i, tm in enumerate(("constant", "constant+trend")):
        stats = simulate_dfgls_null(tm, reps=reps, seed=seed + i)
        for lvl in LEVELS:
            sim = float(np.quantile(stats, lvl))
            if (tm, lvl) in UR_PINNED:
                rows.append((tm, lvl, UR_PINNED[(tm, lvl)], f"pinned (simulated {sim:.4f})"))
            else:
                rows.append((tm, lvl, round(sim, 4), "simulated"))
    return rows


def build_lc_table(reps: int, seed: int, m_max: int = 20) -> list[tuple[int, float, float]]:
    rows = []
    for m in range(1, m_max + 1):
        draws = simulate_bridge_functional(m, reps=reps, seed=seed + m)
        for lvl in LEVELS:
            rows.append((m, lvl, round(float(np.quantile(draws, 1.0 - lvl)), 4)))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=20121001)
    ap.add_argument("--out", type=Path, default=Path(__file__).with_name("data"))
    args = ap.parse_args(argv)

    ur = build_ur_table(args.reps, args.seed)
    with open(args.out / "ur_critical_values.csv", "w", encoding="utf-8") as fh:
        fh.write(f"# ADF-GLS asymptotic critical values; T=2000, reps={args.reps}, seed={args.seed}\n")
        fh.write("trend_model,level,value,source\n")
        for tm, lvl, val, src in ur:
            fh.write(f"{tm},{lvl:.2f},{val:.4f},{src}\n")

    lc = build_lc_table(args.reps, args.seed)
    with open(args.out / "lc_critical_values.csv", "w", encoding="utf-8") as fh:
        fh.write(f"# Hansen L_C asymptotic critical values; reps={args.reps}, seed={args.seed}\n")
        fh.write("m,level,value\n")
        for m, lvl, val in lc:
            fh.write(f"{m},{lvl:.2f},{val:.4f}\n")


if __name__ == "__main__":
    main()
