import json
import time

import numpy as np
import pytest
from numpy.testing import assert_allclose

from tvefficiency.armodel import fit_ar_ols
from tvefficiency.cli import demo_input
from tvefficiency.constancy import hansen_lc
from tvefficiency.events import Event, load_events, overlay
from tvefficiency.ingest import describe, load_csv, to_log_returns
from tvefficiency.simlab import (
    BURN_IN,
    FIXTURE_MOMENTS,
    StationarityExhausted,
    SyntheticSpec,
    calibrated_fixture,
    monte_carlo_recovery,
    simulate_tvar,
)


def test_constant_ols_consistency():
    x, paths = simulate_tvar(SyntheticSpec(T=10000, levels=(0.4,), seed=1))
    assert abs(fit_ar_ols(x, 1).coeffs[0] - 0.4) < 0.02
    assert_allclose(paths, 0.4)


def test_noise_free_is_constant():
    x, _ = simulate_tvar(SyntheticSpec(T=50, levels=(0.0,), intercept=0.7, sigma_u=0.0))
    assert_allclose(x.values, 0.7)


def test_determinism_and_shapes():
    spec = SyntheticSpec(T=300, q=2, coeff_path_kind="random_walk", levels=(0.2, 0.1), sigma_v=0.02, seed=9)
    (a, pa), (b, pb) = simulate_tvar(spec), simulate_tvar(spec)
    assert a.values.tobytes() == b.values.tobytes() and pa.tobytes() == pb.tobytes()
    assert len(a) == 300 and pa.shape == (300, 2)
    assert np.all(np.abs(pa.sum(axis=1)) < 1)


@pytest.mark.parametrize("kind", ["sinusoidal", "single_break"])
def test_deterministic_paths(kind):
    spec = SyntheticSpec(T=400, coeff_path_kind=kind, levels=(0.3,), amplitudes=(0.2,), break_levels=(-0.1,), break_frac=0.25)
    _, paths = simulate_tvar(spec)
    if kind == "sinusoidal":
        t = np.arange(BURN_IN, BURN_IN + 400)
        assert_allclose(paths[:, 0], 0.3 + 0.2 * np.sin(2 * np.pi * t / 240.0))
    else:
        assert_allclose(paths[:100, 0], 0.3)
        assert_allclose(paths[100:, 0], -0.1)


def test_exhaustion_and_validation():
    with pytest.raises(StationarityExhausted):
        simulate_tvar(SyntheticSpec(T=600, coeff_path_kind="random_walk", levels=(0.0,), sigma_v=0.3, max_retries=5))
    with pytest.raises(ValueError):
        SyntheticSpec(coeff_path_kind="garch")
    with pytest.raises(ValueError):
        SyntheticSpec(q=2, levels=(0.1, 0.2, 0.3))


def test_constant_dgp_passes_constancy_at_nominal_size():
    rej = 0
    for c in np.random.SeedSequence(1).spawn(100):
        x, _ = simulate_tvar(SyntheticSpec(T=600, levels=(0.3,), seed=int(c.generate_state(1)[0])))
        rej += hansen_lc(fit_ar_ols(x, 1)).reject[0.05]
    assert rej <= 12


def test_recovery_smoke_and_report(tmp_path):
    spec = SyntheticSpec(T=600, coeff_path_kind="random_walk", levels=(0.3,), sigma_v=0.05, seed=3)
    t0 = time.perf_counter()
    rep = monte_carlo_recovery(spec, 20)
    assert time.perf_counter() - t0 < 60
    assert rep.failures == 0 and len(rep.rmse) == 20
    rep.to_json(tmp_path / "r.json")
    rep.to_csv(tmp_path / "r.csv")
    d = json.loads((tmp_path / "r.json").read_text())
    assert d["reps"] == 20 and d["rmse"]["median"] == pytest.approx(np.median(rep.rmse))
    assert len((tmp_path / "r.csv").read_text().splitlines()) == 21
    with pytest.raises(ValueError):
        monte_carlo_recovery(spec, 19)


def test_constant_path_no_overfitting():
    rep = monte_carlo_recovery(SyntheticSpec(T=600, levels=(0.3,), seed=4), 30)
    assert np.median(rep.rmse) <= 2 * np.median(rep.rmse_ols)


def test_recovery_improves_with_length():
    med = []
    for T in (200, 600, 2000):
        spec = SyntheticSpec(T=T, coeff_path_kind="constant", levels=(0.3,), seed=50)
        med.append(np.mean(monte_carlo_recovery(spec, 50).rmse))
    assert med[1] <= 1.1 * med[0] and med[2] <= 1.1 * med[1]


def test_calibrated_fixture_matches_table_moments():
    p = calibrated_fixture()
    d = describe(to_log_returns(p))
    assert d.n == FIXTURE_MOMENTS["n"]
    for key in ("mean", "sd", "min", "max"):
        assert round(getattr(d, key), 4) == FIXTURE_MOMENTS[key]
    bundled = load_csv(demo_input(), value_col="price")
    assert bundled.dates == p.dates
    assert_allclose(bundled.values, p.values, rtol=1e-15)


def test_events():
    ev = load_events()
    assert len(ev) == 8
    labels = {e.label for e in ev}
    assert "Black Monday" in labels
    with pytest.raises(ValueError):
        Event("bad", "x", "2000:05", "2000:01")
    rows = overlay(ev, ("1990:01", "1999:12"), {"1997:07": 1.5})
    starts = {r["start"] for r in rows}
    assert "2008:10" not in starts and "1997:07" in starts
    assert "1986:12" in starts  # bubble straddles the window start
    assert [r["phi_at_start"] for r in rows if r["start"] == "1997:07"] == [1.5]
    assert overlay(ev, ()) == []
