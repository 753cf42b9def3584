import json

import numpy as np
import pytest

from quasislit.driving import make_driver
from quasislit.flow import trace_curve
from quasislit.verify import (FAIL, INCONCLUSIVE, PASS, SweepConfig, VerificationReport,
                              estimate_holder, run_suite, verify_comparison, verify_cone,
                              verify_flow_bounds, verify_winding)

SMALL = SweepConfig(sigmas=(1.0, 3.5), ts=(1.0,), y0s=(1e-2,), n_random=2)


def test_default_suite_passes(default_report):
    assert default_report.passed, [e for e in default_report.failures][:5]
    summary = default_report.summary()
    for name in ("cone_L", "flow_Y_upper", "winding_pointwise", "comparison_exact",
                 "v_envelope", "holder_capacity", "bounds_alpha_identity"):
        assert summary[name][PASS] > 0
    # part (ii) of the cone bound only applies below 8/pi
    assert summary["cone_small_sigma"][INCONCLUSIVE] > 0


def test_zero_driver_cone_exact():
    rep = verify_cone(SweepConfig(sigmas=(0.0,), families=("constant",)))
    assert rep.passed
    assert all(e.measured == 0.0 for e in rep.entries if e.check == "cone_zero_driver")


def test_supercritical_is_inconclusive():
    with pytest.raises(ValueError):
        SweepConfig(sigmas=(4.2,))
    cfg = SweepConfig(sigmas=(4.2,), ts=(0.1,), y0s=(1e-2,), families=("sqrt_forward",),
                      allow_supercritical=True)
    rep = verify_cone(cfg)
    rows = [e for e in rep.entries if e.check == "cone_L"]
    assert rows and all(e.status == INCONCLUSIVE for e in rows)


def test_config_errors():
    with pytest.raises(ValueError):
        SweepConfig(families=())
    with pytest.raises(ValueError):
        SweepConfig(sigmas=(-1.0,))
    with pytest.raises(ValueError):
        SweepConfig(families=("levy",)).drivers()
    with pytest.raises(ValueError):
        verify_winding(make_driver("constant", 0, 1), 0.0, 1.0, [1e-2, 1e-3])


def test_config_roundtrip(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"sigmas": [1.0, 2.0], "ts": [0.5], "seed": 3,
                             "opts": {"tol": 5e-4}}))
    cfg = SweepConfig.load(p)
    assert cfg.sigmas == (1.0, 2.0) and cfg.seed == 3 and cfg.opts.tol == 5e-4


def test_report_outputs(tmp_path):
    rep = verify_flow_bounds(SMALL)
    assert rep.passed
    text = rep.to_json(tmp_path / "r.json")
    data = json.loads(text)
    assert data == json.loads((tmp_path / "r.json").read_text())
    rep.to_csv(tmp_path / "s.csv")
    head = (tmp_path / "s.csv").read_text().splitlines()[0]
    assert head.split(",")[0] == "check"


def test_reports_reproducible():
    a = run_suite(SMALL, holder=False).to_json()
    b = run_suite(SMALL, holder=False).to_json()
    assert a == b


def test_entry_order_independent():
    rep = verify_flow_bounds(SMALL)
    shuffled = VerificationReport(list(reversed(rep.entries))).sorted()
    assert shuffled.to_json() == rep.sorted().to_json()


def test_comparison_checks():
    rep = verify_comparison(2.0, 1.0)
    assert rep.passed
    assert {e.check for e in rep.entries} >= {"comparison_exact", "comparison_smaller_forcing"}


def test_winding_zero_driver():
    rep = verify_winding(make_driver("constant", 0, 1), 0.0, 1.0, [1e-2, 1e-3, 1e-4, 1e-5])
    assert rep.passed
    assert all(e.measured == 0.0 for e in rep.entries if e.check == "winding_pointwise")


def test_holder_zero_driver_full_window():
    # sqrt singularity is at t = 0, so the window must reach down to it
    t = np.linspace(1e-6, 1.0, 257)
    c = trace_curve(make_driver("constant", 0, 1), t)
    alpha, se = estimate_holder(c)
    assert alpha == pytest.approx(0.5, abs=0.02)


def test_holder_errors():
    c = trace_curve(make_driver("constant", 0, 1), np.linspace(0.1, 1, 20))
    with pytest.raises(ValueError):
        estimate_holder(c)
    c = trace_curve(make_driver("constant", 0, 1), np.r_[np.linspace(0.1, 0.5, 20),
                                                         np.linspace(0.6, 1, 20)])
    with pytest.raises(ValueError):
        estimate_holder(c)
    with pytest.raises(ValueError):
        estimate_holder(c, (0.0, 1.0))


def test_failure_is_reported():
    from quasislit.verify import _entry
    assert _entry("x", 2.0, 1.0, 0.5).status == FAIL
    assert _entry("x", 1.4, 1.0, 0.5).status == PASS
    assert _entry("x", 0.9, 1.0, 0.0, lower=True).status == FAIL
    assert _entry("x", 0.0, 0.0, 0.0, lower=True, strict=True).status == FAIL
