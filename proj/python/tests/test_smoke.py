import math

import pytest

import optdesign

INTERVAL = {"region": {"lower": [0], "upper": [1]}}
SQUARE = {"region": {"lower": [0, 0], "upper": [1, 1]}}


def weight_at(design, point):
    for x, w in zip(design["support"], design["weights"]):
        if all(abs(a - b) < 1e-9 for a, b in zip(x, point)):
            return w
    return 0.0


def test_one_factor_d_optimum():
    res = optdesign.optimize(INTERVAL, [1, 1], "D")
    assert res["certificate"]["passed"]
    assert weight_at(res["design"], [0]) == pytest.approx(0.5, abs=1e-9)


def test_imse_row_and_transfer():
    res = optdesign.optimize(SQUARE, [1, 3, 3], "IMSE")
    d = res["design"]
    assert weight_at(d, [0, 0]) == pytest.approx(0.236, abs=1e-3)
    assert weight_at(d, [0, 1]) == pytest.approx(0.382, abs=1e-3)
    moved = optdesign.transfer(
        SQUARE, [1, 3, 3], d, {"name": "reflect:1,2", "param_mode": "intercept_rescaled"}, criterion="IMSE"
    )
    assert moved["beta"][1] == pytest.approx(-3 / 7, rel=1e-15)
    assert moved["certificate"]["passed"]
    assert weight_at(moved["design"], [1, 1]) == pytest.approx(0.236, abs=1e-3)


def test_check_rejects_lopsided_design():
    cert = optdesign.check(INTERVAL, [1, 1], {"support": [[0], [1]], "weights": [0.4, 0.6]})
    assert not cert["passed"]


def test_closed_forms():
    assert optdesign.w_star_beta1_zero(0.0) == 0.25
    assert optdesign.classify_region(2, 2) == "B1"
    d = optdesign.equal_slopes_closed_form(0.0)
    assert all(w == pytest.approx(0.25) for w in d["weights"])


def test_maximin():
    res = optdesign.maximin(per_decade=4, include_limit=True)
    assert res["w"] == pytest.approx((3 - math.sqrt(3)) / 6, abs=1e-4)
    assert res["min_efficiency"] == pytest.approx(math.sqrt(3) / 2, abs=1e-3)


def test_errors_are_raised():
    with pytest.raises(optdesign.DesignError, match="NonpositiveLinearComponent"):
        optdesign.optimize(INTERVAL, [1, -2])
    with pytest.raises(optdesign.DesignError, match="InvalidInput"):
        optdesign.reproduce("table9")
