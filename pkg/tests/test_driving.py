import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quasislit.driving import (knot_seminorm, lip_seminorm, load_driver_csv, make_driver,
                               random_walk_driver, reverse_driver, save_driver_csv)


def brute_seminorm(t, v):
    best = 0.0
    for i in range(len(t)):
        for j in range(i + 1, len(t)):
            best = max(best, abs(v[j] - v[i]) / math.sqrt(t[j] - t[i]))
    return best


def test_family_values():
    assert make_driver("sqrt_forward", 1, 1)(0.25) == pytest.approx(0.5, abs=1e-15)
    assert make_driver("constant", 0, 1)(0.7) == 0.0
    assert make_driver("sqrt_backward", 2, 1)(1.0) == pytest.approx(-2.0, abs=1e-15)
    assert make_driver("sqrt", 1, 1).family == "sqrt_forward"


@pytest.mark.parametrize("family", ["sqrt_forward", "sqrt_backward", "constant"])
def test_starts_at_zero(family):
    assert make_driver(family, 1.5, 2.0)(0.0) == 0.0


def test_domain_errors():
    d = make_driver("sqrt_forward", 1, 1)
    with pytest.raises(ValueError):
        d(1.5)
    with pytest.raises(ValueError):
        d(-0.1)
    with pytest.raises(ValueError):
        make_driver("sqrt_forward", -1, 1)
    with pytest.raises(ValueError):
        make_driver("sampled", samples=np.empty((0, 2)))
    with pytest.raises(ValueError):
        make_driver("sampled", samples=([0, 0.5, 0.4], [0, 1, 2]))
    with pytest.raises(ValueError):
        make_driver("nope", 1, 1)


def test_sampled_normalized_to_zero_start():
    d = make_driver("sampled", samples=([0.0, 0.5, 1.0], [3.0, 3.5, 2.0]))
    assert d(0.0) == 0.0
    assert d(0.5) == pytest.approx(0.5)
    assert d(0.75) == pytest.approx(-0.25)


def test_seminorm_examples():
    assert lip_seminorm(make_driver("constant", 0, 1), 64) == 0.0
    assert lip_seminorm(make_driver("sqrt_forward", 1, 1), 257) == pytest.approx(1.0, rel=1e-12)
    lin = make_driver("piecewise_linear", samples=([0.0, 1.0], [0.0, 1.0]))
    t = np.linspace(0, 1, 65)
    assert lip_seminorm(lin, 65) == pytest.approx(brute_seminorm(t, lin(t)), rel=1e-14)
    assert lip_seminorm(lin, 65) == pytest.approx(1.0, rel=1e-14)


def test_knot_seminorm_matches_brute_force():
    rng = np.random.default_rng(3)
    t = np.concatenate([[0.0], np.sort(rng.uniform(0, 2, 30))])
    v = rng.normal(size=31)
    assert knot_seminorm(t, v) == pytest.approx(brute_seminorm(t, v), rel=1e-14)


def test_piecewise_linear_sup_on_knots():
    # dense evaluation of the interpolant never beats the knot value
    rng = np.random.default_rng(7)
    d = random_walk_driver(1.3, 1.0, 16, seed=2)
    tt = np.sort(rng.uniform(0, 1, 400))
    tt[0] = 0.0
    assert brute_seminorm(tt, d(tt)) <= d.nominal_seminorm * (1 + 1e-9)


def test_dyadic_estimate_large_grid():
    d = make_driver("sqrt_forward", 2.0, 1.0)
    assert lip_seminorm(d, 8193) == pytest.approx(2.0, rel=1e-12)


def test_nested_grids_monotone():
    d = random_walk_driver(1.0, 1.0, 40, seed=5)
    vals = [lip_seminorm(d, 2**k + 1) for k in range(2, 10)]
    assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("family", ["sqrt_forward", "sqrt_backward", "constant", "random"])
@pytest.mark.parametrize("n", [2, 17, 300])
def test_grid_seminorm_below_nominal(family, n):
    d = random_walk_driver(2.5, 1.0, 50, 1) if family == "random" else make_driver(family, 2.5, 1.0)
    assert lip_seminorm(d, n) <= d.nominal_seminorm * (1 + 1e-9)


def test_random_walk_exact_seminorm():
    d = random_walk_driver(3.0, 1.0, 64, seed=11)
    assert knot_seminorm(d.knots_t, d.knots_v) == pytest.approx(3.0, rel=1e-12)
    assert lip_seminorm(d, 65) == pytest.approx(3.0, rel=1e-12)


def test_reverse_sqrt():
    d = make_driver("sqrt_forward", 1.3, 1.0)
    b = reverse_driver(d, 1.0)
    s = np.linspace(0, 1, 11)
    np.testing.assert_allclose(b(s), 1.3 * (1 - np.sqrt(1 - s)), atol=1e-15)
    assert b(0.0) == 0.0
    assert np.all(reverse_driver(make_driver("constant", 0, 1), 0.5)(s / 2) == 0)


def test_reverse_errors():
    d = make_driver("sqrt_forward", 1, 1)
    with pytest.raises(ValueError):
        reverse_driver(d, 0.0)
    with pytest.raises(ValueError):
        reverse_driver(d, 1.5)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), t=st.floats(0.05, 1.0),
       family=st.sampled_from(["sqrt_forward", "sqrt_backward", "random"]))
def test_reverse_is_involution(seed, t, family):
    d = random_walk_driver(1.7, 1.0, 20, seed) if family == "random" else make_driver(family, 1.7, 1.0)
    rr = reverse_driver(reverse_driver(d, t), t)
    s = np.linspace(0, t, 23)
    np.testing.assert_allclose(rr(s), d(s), atol=1e-13)
    b = reverse_driver(d, t)
    assert b(t) == pytest.approx(d(t), abs=1e-14)
    assert lip_seminorm(b, 33) <= lip_seminorm(d, 33) * (1 + 1e-9) or \
        lip_seminorm(b, 33) <= d.nominal_seminorm * (1 + 1e-9)


def test_reverse_seminorm_matching_grid():
    # beta on [0, t] is lambda on [0, t] read backwards: same pair set on a matching grid
    d = random_walk_driver(2.0, 1.0, 32, seed=9)
    b = reverse_driver(d, 1.0)
    assert lip_seminorm(b, 129) == pytest.approx(lip_seminorm(d, 129), rel=1e-12)


def test_csv_roundtrip(tmp_path):
    d = random_walk_driver(1.0, 1.0, 10, seed=4)
    path = tmp_path / "drv.csv"
    save_driver_csv(d, path)
    e = load_driver_csv(path)
    t = np.linspace(0, 1, 37)
    np.testing.assert_allclose(e(t), d(t), atol=1e-15)
    assert e.nominal_seminorm == pytest.approx(d.nominal_seminorm, rel=1e-12)


def test_csv_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("time,value\n0,0\n1,1\n")
    with pytest.raises(ValueError):
        load_driver_csv(bad)
    unsorted = tmp_path / "unsorted.csv"
    unsorted.write_text("t,lambda\n0,0\n0.6,1\n0.5,0\n")
    with pytest.raises(ValueError):
        load_driver_csv(unsorted)
    late = tmp_path / "late.csv"
    late.write_text("t,lambda\n0.1,0\n0.6,1\n")
    with pytest.raises(ValueError):
        load_driver_csv(late)
    empty = tmp_path / "empty.csv"
    empty.write_text("t,lambda\n")
    with pytest.raises(ValueError):
        load_driver_csv(empty)
