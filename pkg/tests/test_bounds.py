import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from multibasis import bounds
from multibasis.codebook import WeightDistribution, build_code, weight_distribution

# 50-digit mpmath evaluations of the Golay union sums at 5 dB and of the
# Gaussian tail integral at 3, frozen here
GOLAY_UNION_FER_5DB = 1.8733233177252396348e-4
GOLAY_UNION_BER_5DB = 6.2600274689907889041e-5
Q3 = 1.3498980316300945267e-3


def test_q_function():
    assert bounds.q_function(0.0) == 0.5
    assert bounds.q_function(-40.0) == pytest.approx(1.0, abs=1e-300)
    assert abs(bounds.q_function(3.0) - Q3) <= 1e-10 * Q3


@given(st.floats(0, 10))
def test_q_function_relative_accuracy(x):
    import mpmath
    mpmath.mp.dps = 30
    ref = float(mpmath.erfc(mpmath.mpf(x) / mpmath.sqrt(2)) / 2)
    assert abs(float(bounds.q_function(x)) - ref) <= 1e-10 * ref


def test_union_empty_sum():
    code = build_code("golay24")
    only_zero = WeightDistribution(np.array([1] + [0] * 24))
    assert bounds.union_bound(only_zero, code, 3.0, "fer") == 0.0
    with pytest.raises(ValueError):
        bounds.union_bound(None, code, 3.0)


def test_union_golay_oracle():
    code = build_code("golay24")
    wd = weight_distribution(code)
    assert bounds.union_bound(wd, code, 5.0, "fer") == pytest.approx(GOLAY_UNION_FER_5DB, rel=1e-12)
    assert bounds.union_bound(wd, code, 5.0, "ber") == pytest.approx(GOLAY_UNION_BER_5DB, rel=1e-12)


def test_union_fer_above_ber():
    code = build_code("golay24")
    wd = weight_distribution(code)
    for snr in np.arange(0, 8.5, 0.5):
        assert bounds.union_bound(wd, code, snr, "fer") >= bounds.union_bound(wd, code, snr, "ber")
    assert bounds.union_bound(wd, code, -10.0, "fer") == 1.0


def test_e0_at_zero_and_shape():
    rate = 24 / 47
    for snr in (0.0, 3.0, 6.0):
        assert abs(bounds.e0(0.0, snr, rate, check=True)) < 1e-12
        grid = np.linspace(0, 1, 101)
        vals = np.array([bounds.e0(r, snr, rate) for r in grid])
        assert (np.diff(vals) >= -1e-13).all()
        assert (np.diff(vals, 2) <= 1e-12).all()


def test_e0_quadratures_agree():
    for snr in (0.0, 4.0, 8.0):
        for rho in (0.1, 0.5, 1.0):
            bounds.e0(rho, snr, 0.5, check=True)


def test_quadrature_mismatch_raises(monkeypatch):
    monkeypatch.setattr(bounds, "_e0_integral_direct", lambda rho, s2: 0.5)
    with pytest.raises(bounds.QuadratureError):
        bounds.e0(0.5, 3.0, 0.5, check=True)


def test_gallager_bound_monotone_and_bounded():
    vals = [bounds.gallager_bound(47, 24 / 47, s) for s in np.arange(0, 8.5, 0.5)]
    assert all(0 < v <= 1 for v in vals)
    assert all(b <= a for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        bounds.gallager_bound(47, 1.2, 3.0)


def test_gallager_exponential_in_n():
    logs = [math.log(bounds.gallager_bound(n, 0.5, 4.0)) for n in (47, 94, 188)]
    slope = (logs[2] - logs[0]) / (188 - 47)
    assert logs[1] == pytest.approx(logs[0] + slope * 47, rel=0.01)
    assert slope < 0


def test_gallager_optimum_beats_grid():
    ex, rho = bounds.gallager_exponent(0.5, 4.0)
    grid = max(bounds.e0(r, 4.0, 0.5) - r * 0.5 * math.log(2) for r in np.linspace(0, 1, 1001))
    assert ex >= grid - 1e-15 and 0 <= rho <= 1


def test_bound_curve_csv():
    code = build_code("golay24")
    wd = weight_distribution(code)
    curves = [bounds.bound_curve(k, [3.0, 4.0], code, wd)
              for k in ("union_ber", "union_fer", "gallager_fer")]
    text = bounds.curves_to_csv(curves)
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    assert lines[0] == "snr_db,kind,value" and len(lines) == 7
    with pytest.raises(ValueError):
        bounds.bound_curve("sphere", [3.0], code, wd)
