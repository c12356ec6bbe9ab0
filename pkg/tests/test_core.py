import numpy as np
import pytest
from hypothesis import given, strategies as st

from colortiger.core import (
    LinearImage,
    angular_distance,
    apply_white_balance,
    normalize,
    rb_chromaticity,
)
from colortiger.errors import ZeroChannelError, ZeroVectorError

from helpers import image_from_rows

positive_channel = st.floats(min_value=1e-6, max_value=1e6,
                             allow_nan=False, allow_infinity=False)
triplets = st.tuples(positive_channel, positive_channel, positive_channel)


def test_normalize_examples():
    np.testing.assert_allclose(normalize((2, 4, 6)),
                               [0.2673, 0.5345, 0.8018], atol=5e-5)
    np.testing.assert_allclose(normalize((1, 1, 1)),
                               [0.5774, 0.5774, 0.5774], atol=5e-5)


def test_normalize_zero_vector():
    with pytest.raises(ZeroVectorError):
        normalize((0, 0, 0))


def test_normalize_rejects_negative():
    with pytest.raises(ValueError):
        normalize((1, -1, 0))


@given(triplets)
def test_normalize_idempotent(v):
    once = normalize(v)
    np.testing.assert_allclose(normalize(once), once, rtol=0, atol=1e-12)


@given(triplets)
def test_normalize_unit_norm(v):
    assert abs(np.linalg.norm(normalize(v)) - 1.0) < 1e-9


def test_angular_distance_examples():
    assert angular_distance((1, 2, 3), (2, 4, 6)) == pytest.approx(0.0, abs=1e-9)
    assert angular_distance((1, 0, 0), (0, 1, 0)) == pytest.approx(90.0, abs=1e-9)
    assert angular_distance((1, 1, 0), (1, 0, 0)) == pytest.approx(45.0, abs=1e-9)


@given(triplets, triplets)
def test_angular_distance_symmetric(a, b):
    assert angular_distance(a, b) == pytest.approx(angular_distance(b, a), abs=1e-9)


@given(triplets, triplets, st.floats(min_value=1e-3, max_value=1e3))
def test_angular_distance_scale_invariant(a, b, s):
    # Tolerance sits above the arccos quantization floor near zero angle.
    scaled = np.asarray(a) * s
    assert angular_distance(scaled, b) == pytest.approx(angular_distance(a, b), abs=2e-6)


@given(triplets)
def test_angular_distance_range(v):
    assert 0.0 <= angular_distance(v, (1, 1, 1)) <= 180.0


def test_angular_distance_clamps_rounding():
    # Nearly parallel unit vectors must never produce NaN from arccos.
    a = normalize((1, 1, 1))
    assert np.isfinite(angular_distance(a, a * (1 + 1e-16)))


def test_rb_chromaticity_examples():
    assert rb_chromaticity((1, 1, 1)) == pytest.approx((1 / 3, 1 / 3))
    assert rb_chromaticity((2, 1, 1)) == pytest.approx((0.5, 0.25))
    assert rb_chromaticity((0, 1, 0)) == pytest.approx((0.0, 0.0))


def test_rb_chromaticity_zero_sum():
    with pytest.raises(ZeroVectorError):
        rb_chromaticity((0, 0, 0))


@given(triplets, st.floats(min_value=1e-3, max_value=1e3))
def test_rb_chromaticity_scale_invariant(v, s):
    base = rb_chromaticity(v)
    scaled = rb_chromaticity(np.asarray(v) * s)
    assert scaled.r == pytest.approx(base.r, abs=1e-9)
    assert scaled.b == pytest.approx(base.b, abs=1e-9)


@given(triplets)
def test_rb_chromaticity_in_simplex(v):
    c = rb_chromaticity(v)
    assert c.r >= 0 and c.b >= 0 and c.r + c.b <= 1 + 1e-12


def test_white_balance_makes_illuminant_achromatic():
    e = normalize((0.8, 1.0, 0.6))
    img = image_from_rows([e, e, e])
    out = apply_white_balance(img, e)
    for px in out.pixels.reshape(-1, 3):
        assert px[0] == pytest.approx(px[1], rel=1e-12)
        assert px[2] == pytest.approx(px[1], rel=1e-12)


def test_white_balance_identity_illuminant():
    img = image_from_rows([(0.1, 0.5, 0.9), (0.4, 0.4, 0.2)])
    out = apply_white_balance(img, np.ones(3) / np.sqrt(3))
    np.testing.assert_allclose(out.pixels, img.pixels, rtol=1e-12)


def test_white_balance_round_trip():
    rng = np.random.default_rng(3)
    img = image_from_rows(1.0 - rng.random((5, 3)))
    e = np.array([0.7, 1.1, 0.9])
    back = apply_white_balance(apply_white_balance(img, e), 1.0 / e)
    np.testing.assert_allclose(back.pixels, img.pixels, rtol=1e-9)


def test_white_balance_preserves_invalid_pixels():
    pixels = np.array([[[2.0, 2.0, 2.0], [4.0, 4.0, 4.0]]])
    valid = np.array([[True, False]])
    out = apply_white_balance(LinearImage(pixels, valid), (2.0, 1.0, 1.0))
    assert out.pixels[0, 0, 0] == pytest.approx(1.0)       # corrected
    np.testing.assert_array_equal(out.pixels[0, 1], [4.0, 4.0, 4.0])  # untouched
    np.testing.assert_array_equal(out.valid, valid)


def test_white_balance_zero_channel():
    img = image_from_rows([(1, 1, 1)])
    with pytest.raises(ZeroChannelError):
        apply_white_balance(img, (1.0, 0.0, 1.0))


def test_linear_image_validation():
    with pytest.raises(ValueError):
        LinearImage.from_pixels(np.zeros((0, 4, 3)))
    with pytest.raises(ValueError):
        LinearImage.from_pixels(-np.ones((2, 2, 3)))
    with pytest.raises(ValueError):
        LinearImage(np.ones((2, 2, 3)), np.ones((3, 3), dtype=bool))


def test_linear_image_is_frozen():
    img = image_from_rows([(1, 2, 3)])
    with pytest.raises(ValueError):
        img.pixels[0, 0, 0] = 5.0
