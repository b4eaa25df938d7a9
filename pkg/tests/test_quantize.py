import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lcp.errors import OutOfRange
from lcp.quantize import (
    ACTIVE_POWER,
    ChannelSpec,
    VOLTAGE,
    dequantize,
    lca_round,
    lca_round_array,
    quantize,
    quantize_array,
)

# Appliance state powers in watts and their integer roundings.
STATE_POWERS = [
    (1027.14, 1027),
    (1001.78, 1002),
    (775.38, 775),
    (41.94, 42),
    (123.71, 124),
    (165.04, 165),
    (172.29, 172),
    (249.95, 250),
]


def test_voltage():
    assert quantize(120.13, VOLTAGE) == 12013
    assert quantize(120.134, VOLTAGE) == 12013


@pytest.mark.parametrize("watts, expected", STATE_POWERS)
def test_state_powers(watts, expected):
    assert quantize(watts, ACTIVE_POWER) == expected


def test_out_of_range():
    with pytest.raises(OutOfRange):
        quantize(400.00, VOLTAGE)
    assert quantize(400.00, VOLTAGE, clamp=True) == 32767
    assert quantize(-1e6, ACTIVE_POWER, clamp=True) == -32768


def test_half_away_from_zero():
    p = ChannelSpec("x", 1)
    assert quantize(0.25, p) == 3
    assert quantize(-0.25, p) == -3
    assert quantize(1.005, ChannelSpec("y", 2)) == 101
    assert quantize(2.5, ACTIVE_POWER) == 3


def test_non_finite():
    with pytest.raises(ValueError):
        quantize(float("nan"), VOLTAGE)


def test_decimal_places_bounds():
    with pytest.raises(ValueError):
        ChannelSpec("x", 5)


def test_dequantize():
    assert dequantize(12013, VOLTAGE) == 120.13
    assert dequantize(0, VOLTAGE) == 0
    assert dequantize(0, ACTIVE_POWER) == 0


def test_dequantize_error_bound(rng):
    for dp in range(5):
        spec = ChannelSpec("x", dp)
        x = rng.uniform(-32768 / 10**dp, 32767 / 10**dp, 5000)
        back = dequantize(quantize_array(x, spec), spec)
        assert np.all(np.abs(back - x) <= 0.5 * 10.0**-dp + 1e-9)


@given(st.integers(-32768, 32767), st.integers(0, 4))
def test_grid_identity(v, dp):
    spec = ChannelSpec("x", dp)
    assert quantize(dequantize(v, spec), spec) == v


@given(st.floats(-300, 300), st.floats(-300, 300))
def test_monotone(a, b):
    lo, hi = sorted((a, b))
    assert quantize(lo, VOLTAGE) <= quantize(hi, VOLTAGE)


def test_lca_examples():
    assert lca_round(1027) == 1025
    assert lca_round(123) == 125
    assert lca_round(0) == 0
    assert lca_round(-123) == -125
    assert lca_round(-1027) == -1025
    assert lca_round(32767) == 32765
    assert lca_round(-32768) == -32765


def test_lca_exhaustive():
    v = np.arange(-32768, 32768)
    out = lca_round_array(v).astype(np.int64)
    assert np.all(out % 5 == 0)
    dist = np.abs(out - v)
    assert dist[v != -32768].max() <= 2
    assert np.array_equal(lca_round_array(out), out)
    assert all(lca_round(int(x)) == int(y) for x, y in zip(v[::97], out[::97]))


def test_lca_applied_by_quantize():
    spec = ChannelSpec("P", 0, lca=True)
    assert quantize(1027.14, spec) == 1025
    assert quantize(123.71, spec) == 125
