import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from facepredict.dataset import RawImage
from facepredict.imageproc import NormParams, denormalize, normalize, resize_bilinear


def test_resize_constant():
    img = RawImage(5, 5, np.full((5, 5), 42, dtype=np.uint8))
    for w, h in [(1, 1), (3, 7), (64, 64)]:
        assert np.all(resize_bilinear(img, w, h) == 42)


def test_resize_ramp():
    out = resize_bilinear(np.array([[0.0, 1.0], [0.0, 1.0]]), 3, 3)
    np.testing.assert_array_equal(out, [[0, 0.5, 1]] * 3)


def test_resize_identity(rng):
    x = rng.uniform(0, 255, size=(8, 8))
    np.testing.assert_array_equal(resize_bilinear(x, 8, 8), x)


def test_resize_to_single_pixel_takes_origin():
    x = np.arange(12.0).reshape(3, 4)
    assert resize_bilinear(x, 1, 1)[0, 0] == 0.0


def test_resize_matches_separable_interp(rng):
    # oracle: np.interp along rows then columns with the align-corners grid
    x = rng.uniform(0, 255, size=(7, 5))
    out = resize_bilinear(x, 11, 4)
    xs = np.linspace(0, 4, 11)
    ys = np.linspace(0, 6, 4)
    rows = np.array([np.interp(xs, np.arange(5), r) for r in x])
    expect = np.array([np.interp(ys, np.arange(7), c) for c in rows.T]).T
    np.testing.assert_allclose(out, expect, atol=1e-10)


@settings(max_examples=60, deadline=None)
@given(arrays(np.uint8, st.tuples(st.integers(1, 9), st.integers(1, 9))),
       st.integers(1, 20), st.integers(1, 20))
def test_resize_envelope(img, w, h):
    out = resize_bilinear(img, w, h)
    assert out.shape == (h, w)
    assert out.min() >= img.min() - 1e-9
    assert out.max() <= img.max() + 1e-9


def test_normalize_constant():
    out, p = normalize(np.full((4, 4), 9.0))
    assert np.all(out == 0)
    assert p == NormParams(9.0, 0.0)


def test_normalize_two_points():
    out, p = normalize(np.array([[0.0, 2.0]]))
    np.testing.assert_array_equal(out, [[-1, 1]])
    assert (p.mean, p.std) == (1.0, 1.0)


def test_normalize_moments(rng):
    for _ in range(100):
        x = rng.uniform(0, 255, size=rng.integers(2, 30, size=2))
        out, _ = normalize(x)
        assert abs(out.mean()) < 1e-12
        assert abs(out.std() - 1) < 1e-12


@settings(max_examples=100, deadline=None)
@given(arrays(np.uint8, st.tuples(st.integers(1, 16), st.integers(1, 16))))
def test_normalize_round_trip_8bit(img):
    out, p = normalize(img)
    if p.std <= 1e-8:
        return
    back = denormalize(out, p)
    assert np.max(np.abs(back.data.astype(int) - img.astype(int))) <= 1


def test_denormalize_constant_and_clamp():
    img = denormalize(np.zeros((3, 3)), NormParams(100.0, 5.0))
    assert np.all(img.data == 100)
    assert denormalize(np.full((1, 1), 1e6), NormParams(10.0, 2.0)).data[0, 0] == 255
    assert denormalize(np.full((1, 1), -1e6), NormParams(10.0, 2.0)).data[0, 0] == 0


def test_denormalize_rounds_half_away_from_zero():
    img = denormalize(np.array([[0.5, 1.5, 2.5]]), NormParams(0.0, 1.0))
    assert img.data.tolist() == [[1, 2, 3]]


def test_resize_rejects_empty_target():
    with pytest.raises(ValueError):
        resize_bilinear(np.zeros((2, 2)), 0, 3)
