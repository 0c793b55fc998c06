import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from compactseg.fields import EmptyRegion, as_field, as_label_field, as_mask, inner_product, threshold


def finite(shape):
    return arrays(np.float64, shape, elements=st.floats(-1e3, 1e3, allow_nan=False))


def test_inner_product_counts_pixels():
    assert inner_product(np.ones((4, 4)), np.ones((4, 4))) == 16


def test_inner_product_with_zeros(rng):
    assert inner_product(rng.normal(size=(5, 3)), np.zeros((5, 3))) == 0


def test_inner_product_hand_sum():
    assert inner_product([[1, 2], [3, 4]], [[4, 3], [2, 1]]) == 20


def test_inner_product_shape_mismatch():
    with pytest.raises(ValueError):
        inner_product(np.ones((2, 3)), np.ones((3, 2)))


@given(finite((4, 5)), finite((4, 5)))
def test_inner_product_commutes(a, b):
    assert inner_product(a, b) == pytest.approx(inner_product(b, a), rel=1e-12, abs=1e-9)


@given(finite((3, 3)), finite((3, 3)), finite((3, 3)), st.floats(-10, 10))
def test_inner_product_bilinear(a, b, c, t):
    lhs = inner_product(a + t * b, c)
    rhs = inner_product(a, c) + t * inner_product(b, c)
    scale = float(np.sum(np.abs(a * c)) + abs(t) * np.sum(np.abs(b * c)))
    assert abs(lhs - rhs) <= 1e-12 * scale + 1e-300


# entries are 0 or large enough that their squares do not underflow
_nonsubnormal = st.one_of(st.just(0.0), st.floats(1e-100, 1e3), st.floats(-1e3, -1e-100))


@given(arrays(np.float64, (4, 4), elements=_nonsubnormal))
def test_inner_product_positive_definite(a):
    v = inner_product(a, a)
    assert v >= 0
    assert (v == 0) == (not a.any())


def test_threshold_is_strict():
    assert not threshold(np.full((3, 3), 0.5), 0.5).any()


def test_threshold_small_example():
    np.testing.assert_array_equal(threshold([[0.2, 0.8]], 0.5), [[0, 1]])


def test_threshold_of_sigmoid_matches_sign(rng):
    x = rng.normal(size=(8, 8))
    u = 1.0 / (1.0 + np.exp(-x))
    np.testing.assert_array_equal(threshold(u, 0.5), (x > 0).astype(np.uint8))


@given(arrays(np.uint8, (5, 6), elements=st.integers(0, 1)))
def test_threshold_idempotent_on_masks(mask):
    np.testing.assert_array_equal(threshold(mask.astype(np.float64), 0.5), mask)


def test_field_rejects_nonfinite():
    with pytest.raises(ValueError):
        as_field([[1.0, np.nan]])
    with pytest.raises(ValueError):
        as_field(np.ones(4))


def test_mask_rejects_non_binary():
    with pytest.raises(ValueError):
        as_mask([[0, 2]])
    assert as_mask([[0.0, 1.0]]).dtype == np.uint8


def test_label_field_range():
    with pytest.raises(ValueError):
        as_label_field([[1.5]])
    as_label_field([[0.0, 1.0]])


def test_empty_region_is_value_error():
    assert issubclass(EmptyRegion, ValueError)
