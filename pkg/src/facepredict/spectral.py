"""Blockwise 2-D short-time Fourier transform with a periodic Hann window.

Blocks sit on a ``hop`` lattice over a reflect-padded canvas. The canvas gets
``hop`` pixels of padding on the top/left so that every original pixel lies
inside at least one block at nonzero window weight (the periodic Hann window
is exactly zero at index 0), plus the minimal right/bottom padding that makes
the lattice fit. Inversion is weighted overlap-add normalized by the summed
squared window, which is exact wherever that sum is positive.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ImageTooSmall, LengthMismatch, NonNegligibleImaginary

IMAG_TOL = 1e-6
DIVISOR_FLOOR = 1e-12


@dataclass(frozen=True)
class StftConfig:
    block: int = 16
    hop: int = 8

    def __post_init__(self):
        if self.block < 2 or self.block % 2:
            raise ValueError(f"block must be even and >= 2, got {self.block}")
        if self.hop != self.block // 2:
            raise ValueError(f"hop must equal block/2 ({self.block // 2}), got {self.hop}")


@dataclass(frozen=True)
class GridMeta:
    """Everything needed to rebuild a SpectralGrid from its flat vector."""

    config: StftConfig
    orig_w: int
    orig_h: int
    padded_w: int
    padded_h: int
    pad_left: int
    pad_top: int

    @property
    def blocks_x(self) -> int:
        return (self.padded_w - self.config.block) // self.config.hop + 1

    @property
    def blocks_y(self) -> int:
        return (self.padded_h - self.config.block) // self.config.hop + 1

    @property
    def n_blocks(self) -> int:
        return self.blocks_x * self.blocks_y

    @property
    def vector_length(self) -> int:
        return self.n_blocks * self.config.block ** 2 * 2

    @classmethod
    def for_image(cls, width: int, height: int, cfg: StftConfig) -> "GridMeta":
        if width < cfg.block or height < cfg.block:
            raise ImageTooSmall(f"{width}x{height} smaller than block {cfg.block}")

        def padded(n):
            total = cfg.hop + n
            return total + (-(total - cfg.block)) % cfg.hop

        return cls(cfg, width, height, padded(width), padded(height), cfg.hop, cfg.hop)


@dataclass
class SpectralGrid:
    meta: GridMeta
    blocks: np.ndarray  # complex128, (blocks_y, blocks_x, block, block)

    @property
    def config(self) -> StftConfig:
        return self.meta.config


def hann_window(n: int) -> np.ndarray:
    if n < 2:
        raise ValueError("window length must be >= 2")
    return 0.5 * (1.0 - np.cos(2.0 * np.pi * np.arange(n) / n))


def _window2d(block: int) -> np.ndarray:
    w = hann_window(block)
    return np.outer(w, w)


def _pad(image: np.ndarray, meta: GridMeta) -> np.ndarray:
    pad_bottom = meta.padded_h - meta.orig_h - meta.pad_top
    pad_right = meta.padded_w - meta.orig_w - meta.pad_left
    return np.pad(image, ((meta.pad_top, pad_bottom), (meta.pad_left, pad_right)), mode="reflect")


def _frames(canvas: np.ndarray, meta: GridMeta) -> np.ndarray:
    b, hop = meta.config.block, meta.config.hop
    view = np.lib.stride_tricks.sliding_window_view(canvas, (b, b))
    return view[::hop, ::hop]


def stft_forward(image, cfg: StftConfig = StftConfig()) -> SpectralGrid:
    x = np.asarray(image, dtype=np.float64)
    h, w = x.shape
    meta = GridMeta.for_image(w, h, cfg)
    frames = _frames(_pad(x, meta), meta) * _window2d(cfg.block)
    return SpectralGrid(meta, np.fft.fft2(frames, axes=(-2, -1)))


def stft_inverse(grid: SpectralGrid) -> np.ndarray:
    meta = grid.meta
    b, hop = meta.config.block, meta.config.hop
    if not np.all(np.isfinite(grid.blocks)):
        raise NonNegligibleImaginary("spectral grid holds non-finite coefficients")
    frames = np.fft.ifft2(grid.blocks, axes=(-2, -1))
    residue = float(np.max(np.abs(frames.imag))) if frames.size else 0.0
    if residue >= IMAG_TOL:
        raise NonNegligibleImaginary(f"imaginary residue {residue:.3g} after inverse DFT")
    win = _window2d(b)
    canvas = np.zeros((meta.padded_h, meta.padded_w))
    weight = np.zeros_like(canvas)
    for by in range(meta.blocks_y):
        for bx in range(meta.blocks_x):
            ys, xs = by * hop, bx * hop
            canvas[ys:ys + b, xs:xs + b] += frames[by, bx].real * win
            weight[ys:ys + b, xs:xs + b] += win * win
    out = canvas / np.maximum(weight, DIVISOR_FLOOR)
    return out[meta.pad_top:meta.pad_top + meta.orig_h, meta.pad_left:meta.pad_left + meta.orig_w]


def grid_to_vector(grid: SpectralGrid) -> np.ndarray:
    """Reals of every block (row-major) followed by all imaginaries."""
    flat = grid.blocks.reshape(-1)
    return np.concatenate([flat.real, flat.imag])


def vector_to_grid(vec, meta: GridMeta) -> SpectralGrid:
    v = np.asarray(vec, dtype=np.float64)
    if v.ndim != 1 or v.size != meta.vector_length:
        raise LengthMismatch(f"vector length {v.size} != {meta.vector_length}")
    half = v.size // 2
    b = meta.config.block
    blocks = (v[:half] + 1j * v[half:]).reshape(meta.blocks_y, meta.blocks_x, b, b)
    return SpectralGrid(meta, blocks)


def image_to_vector(image, cfg: StftConfig) -> np.ndarray:
    return grid_to_vector(stft_forward(image, cfg))


def vector_to_image(vec, meta: GridMeta) -> np.ndarray:
    return stft_inverse(vector_to_grid(vec, meta))
