import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from tvefficiency.ingest import (
    DataError,
    PriceSeries,
    ReturnSeries,
    describe,
    load_csv,
    to_log_returns,
)


def write(tmp_path, text, name="p.csv"):
    f = tmp_path / name
    f.write_text(text, encoding="utf-8")
    return f


def test_load_three_prices(tmp_path):
    f = write(tmp_path, "date,close\n2000:01,100\n2000:02,110\n2000:03,99\n")
    p = load_csv(f, value_col="close")
    assert isinstance(p, PriceSeries)
    assert len(p) == 3
    assert p.dates == ("2000:01", "2000:02", "2000:03")
    assert_allclose(p.values, [100, 110, 99])


def test_load_returns_kind(tmp_path):
    f = write(tmp_path, "date,value\n2000:01,0.1\n2000:02,-0.2\n")
    r = load_csv(f, value_kind="returns")
    assert isinstance(r, ReturnSeries)
    assert_allclose(r.values, [0.1, -0.2])


@pytest.mark.parametrize(
    "body, message",
    [
        ("2000:01,100\n2000:02,0\n", "non-positive price at row 2"),
        ("2000:01,100\n2000:01,101\n", "non-monotone dates at row 2"),
        ("2000:01,100\n2000:02,abc\n", "parse failure at row 2"),
        ("2000:01,100\n2000:02,\n2000:03,5\n", "missing value at row 2"),
        ("2000:01,100\n2000:02,NA\n", "missing value at row 2"),
    ],
)
def test_load_errors_carry_row_numbers(tmp_path, body, message):
    f = write(tmp_path, "date,value\n" + body)
    with pytest.raises(DataError, match=message):
        load_csv(f)


def test_load_missing_column_and_file(tmp_path):
    f = write(tmp_path, "date,value\n2000:01,1\n")
    with pytest.raises(DataError, match="column 'close'"):
        load_csv(f, value_col="close")
    with pytest.raises(DataError, match="not found"):
        load_csv(tmp_path / "nope.csv")


def test_price_series_invariants():
    with pytest.raises(DataError):
        PriceSeries(("a",), np.array([1.0]))
    with pytest.raises(DataError):
        PriceSeries(("a", "b"), np.array([1.0, -1.0]))
    with pytest.raises(DataError):
        PriceSeries(("b", "a"), np.array([1.0, 2.0]))


def test_log_returns_examples():
    assert_allclose(to_log_returns(PriceSeries(("a", "b", "c"), np.array([3.0, 3.0, 3.0]))).values, [0, 0])
    e = math.e
    assert_allclose(to_log_returns(PriceSeries(("a", "b", "c"), np.array([1.0, e, e * e]))).values, [1, 1], rtol=1e-15)
    r = to_log_returns(PriceSeries(("a", "b", "c"), np.array([100.0, 110.0, 99.0])))
    # hand arithmetic: ln 1.1 and ln 0.9
    assert_allclose(r.values, [0.0953101798043249, -0.1053605156578263], rtol=1e-12)
    assert r.dates == ("b", "c")


def test_describe_symmetric_pair():
    d = describe(ReturnSeries.from_array([1.0, -1.0]))
    assert (d.mean, d.min, d.max, d.n) == (0.0, -1.0, 1.0, 2)
    assert_allclose(d.sd, math.sqrt(2))


def test_describe_too_short():
    with pytest.raises(DataError):
        describe(ReturnSeries.from_array([1.0]))


prices = st.lists(st.floats(0.01, 1e4, allow_nan=False), min_size=2, max_size=60)


@given(prices)
def test_round_trip_exp_cumsum(vals):
    p = PriceSeries(tuple(f"{i:05d}" for i in range(len(vals))), np.array(vals))
    r = to_log_returns(p)
    back = p.values[0] * np.exp(np.concatenate([[0.0], np.cumsum(r.values)]))
    assert len(r) == len(p) - 1
    assert_allclose(back, p.values, rtol=1e-12)


@settings(max_examples=50)
@given(st.lists(st.floats(-1, 1, allow_nan=False), min_size=2, max_size=80), st.randoms(use_true_random=False))
def test_describe_permutation_and_formula(vals, rnd):
    shuffled = list(vals)
    rnd.shuffle(shuffled)
    a, b = describe(ReturnSeries.from_array(vals)), describe(ReturnSeries.from_array(shuffled))
    x = np.array(vals)
    n = len(x)
    mean = sum(vals) / n
    sd = math.sqrt(sum((v - mean) ** 2 for v in vals) / (n - 1))
    for d in (a, b):
        assert d.n == n and d.min == x.min() and d.max == x.max()
        assert_allclose([d.mean, d.sd], [mean, sd], rtol=1e-9, atol=1e-12)
        assert d.min <= d.mean + 1e-15 and d.mean <= d.max + 1e-15
