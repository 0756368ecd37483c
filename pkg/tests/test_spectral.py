import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from facepredict.errors import ImageTooSmall, LengthMismatch, NonNegligibleImaginary
from facepredict.spectral import (
    GridMeta,
    SpectralGrid,
    StftConfig,
    grid_to_vector,
    hann_window,
    stft_forward,
    stft_inverse,
    vector_to_grid,
)


def naive_dft2(x):
    """Direct double sum, no FFT."""
    n = x.shape[0]
    out = np.zeros((n, n), dtype=complex)
    for u in range(n):
        for v in range(n):
            acc = 0j
            for i in range(n):
                for j in range(n):
                    acc += x[i, j] * np.exp(-2j * np.pi * (u * i + v * j) / n)
            out[u, v] = acc
    return out


def test_hann_values():
    w = hann_window(16)
    assert w[0] == 0.0 and w[8] == 1.0
    np.testing.assert_allclose(hann_window(4), [0, 0.5, 1, 0.5], atol=1e-15)


@pytest.mark.parametrize("n", [2, 4, 8, 16, 32])
def test_hann_overlap_sums(n):
    # Hann at hop n/2 overlap-adds to exactly 1 away from the edges
    w = hann_window(n)
    hop = n // 2
    acc = np.zeros(6 * n)
    for s in range(0, 5 * n + 1, hop):
        acc[s:s + n] += w
    interior = acc[n:5 * n]
    np.testing.assert_allclose(interior, 1.0, atol=1e-12)
    acc2 = np.zeros(6 * n)
    for s in range(0, 5 * n + 1, hop):
        acc2[s:s + n] += w ** 2
    # squared Hann at 50% overlap is periodic in hop and strictly positive
    inner = acc2[n:5 * n]
    np.testing.assert_allclose(inner[:hop], inner[hop:2 * hop], atol=1e-12)
    assert inner.min() > 0


def test_block_count():
    grid = stft_forward(np.zeros((64, 64)), StftConfig(16, 8))
    meta = grid.meta
    # one extra lattice row/column from the top/left pad that keeps row/col 0 recoverable
    assert (meta.padded_h, meta.padded_w) == (72, 72)
    assert grid.blocks.shape == (8, 8, 16, 16)
    assert meta.n_blocks == 64


def test_zero_image_zero_spectrum():
    grid = stft_forward(np.zeros((40, 24)))
    assert not np.any(grid.blocks)


def test_constant_image_block_is_window_dft():
    w = hann_window(16)
    expect = naive_dft2(np.outer(w, w))
    grid = stft_forward(np.ones((64, 64)), StftConfig(16, 8))
    assert abs(expect[0, 0] - 64.0) < 1e-9  # (sum w)^2 = 8^2
    for by, bx in [(0, 0), (3, 5), (7, 7)]:
        np.testing.assert_allclose(grid.blocks[by, bx], expect, atol=1e-9)


def test_forward_matches_naive_dft(rng):
    x = rng.normal(size=(12, 12))
    cfg = StftConfig(4, 2)
    grid = stft_forward(x, cfg)
    padded = np.pad(x, ((2, grid.meta.padded_h - 14), (2, grid.meta.padded_w - 14)), mode="reflect")
    w2 = np.outer(hann_window(4), hann_window(4))
    for by in range(grid.meta.blocks_y):
        for bx in range(grid.meta.blocks_x):
            blk = padded[2 * by:2 * by + 4, 2 * bx:2 * bx + 4] * w2
            np.testing.assert_allclose(grid.blocks[by, bx], naive_dft2(blk), atol=1e-10)


def test_round_trip_random(rng):
    for _ in range(20):
        x = rng.normal(size=(64, 64))
        rms = np.sqrt(np.mean((stft_inverse(stft_forward(x)) - x) ** 2))
        assert rms < 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(16, 50), st.integers(16, 50), st.sampled_from([(16, 8), (4, 2), (8, 4)]), st.integers(0, 2**32 - 1))
def test_round_trip_any_size(h, w, bh, seed):
    x = np.random.default_rng(seed).normal(size=(h, w))
    y = stft_inverse(stft_forward(x, StftConfig(*bh)))
    assert y.shape == x.shape
    assert np.sqrt(np.mean((y - x) ** 2)) < 1e-9


def test_linearity(rng):
    x, y = rng.normal(size=(2, 64, 64))
    a, b = 1.7, -0.3
    lhs = stft_forward(a * x + b * y).blocks
    rhs = a * stft_forward(x).blocks + b * stft_forward(y).blocks
    np.testing.assert_allclose(lhs, rhs, atol=1e-10, rtol=0)


def test_parseval_per_block(rng):
    x = rng.normal(size=(32, 32))
    cfg = StftConfig(16, 8)
    grid = stft_forward(x, cfg)
    padded = np.pad(x, ((8, grid.meta.padded_h - 40), (8, grid.meta.padded_w - 40)), mode="reflect")
    w2 = np.outer(hann_window(16), hann_window(16))
    for by in range(grid.meta.blocks_y):
        for bx in range(grid.meta.blocks_x):
            blk = padded[8 * by:8 * by + 16, 8 * bx:8 * bx + 16] * w2
            spec_energy = np.sum(np.abs(grid.blocks[by, bx]) ** 2)
            assert abs(spec_energy - 256 * np.sum(blk ** 2)) <= 1e-10 * spec_energy


def test_too_small():
    with pytest.raises(ImageTooSmall):
        stft_forward(np.zeros((15, 64)))


def test_config_invariants():
    with pytest.raises(ValueError):
        StftConfig(15, 7)
    with pytest.raises(ValueError):
        StftConfig(16, 4)


def test_inverse_zero_grid():
    meta = GridMeta.for_image(30, 20, StftConfig(8, 4))
    grid = SpectralGrid(meta, np.zeros((meta.blocks_y, meta.blocks_x, 8, 8), dtype=complex))
    out = stft_inverse(grid)
    assert out.shape == (20, 30) and not np.any(out)


def test_inverse_rejects_corruption(rng):
    grid = stft_forward(rng.normal(size=(32, 32)))
    bad = SpectralGrid(grid.meta, grid.blocks.copy())
    bad.blocks[1, 1, 3, 3] = np.nan
    with pytest.raises(NonNegligibleImaginary):
        stft_inverse(bad)
    # breaking conjugate symmetry leaves an imaginary residue
    skew = SpectralGrid(grid.meta, grid.blocks.copy())
    skew.blocks[0, 0, 1, 2] += 50.0
    with pytest.raises(NonNegligibleImaginary):
        stft_inverse(skew)


def test_vector_layout():
    meta = GridMeta(StftConfig(2, 1), 2, 2, 2, 2, 0, 0)
    grid = SpectralGrid(meta, np.array([1 + 2j, 0, 0, 0]).reshape(1, 1, 2, 2))
    np.testing.assert_array_equal(grid_to_vector(grid), [1, 0, 0, 0, 2, 0, 0, 0])


def test_vector_length_formula():
    meta = GridMeta(StftConfig(16, 8), 64, 64, 64, 64, 0, 0)
    assert meta.n_blocks == 49
    assert meta.vector_length == 49 * 256 * 2 == 25088
    meta64 = stft_forward(np.zeros((64, 64))).meta
    assert meta64.vector_length == 64 * 256 * 2


def test_vector_bijection(rng):
    meta = GridMeta.for_image(40, 33, StftConfig(8, 4))
    shape = (meta.blocks_y, meta.blocks_x, 8, 8)
    for _ in range(100):
        g = SpectralGrid(meta, rng.normal(size=shape) + 1j * rng.normal(size=shape))
        v = grid_to_vector(g)
        assert v.size == meta.vector_length
        back = vector_to_grid(v, meta)
        assert np.array_equal(back.blocks, g.blocks)
        assert np.array_equal(grid_to_vector(back), v)


def test_vector_length_mismatch():
    meta = GridMeta.for_image(16, 16, StftConfig(16, 8))
    with pytest.raises(LengthMismatch):
        vector_to_grid(np.zeros(meta.vector_length - 1), meta)
