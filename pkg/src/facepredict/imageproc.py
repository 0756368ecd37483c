"""Resizing, per-image z-score normalization and the way back to 8-bit."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import RawImage

EPS = 1e-8


@dataclass(frozen=True)
class NormParams:
    mean: float
    std: float

    @property
    def scale(self) -> float:
        return max(self.std, EPS)


def _axis_weights(src: int, dst: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if dst == 1:
        coord = np.zeros(1)
    else:
        coord = np.arange(dst) * ((src - 1) / (dst - 1))
    lo = np.minimum(np.floor(coord).astype(np.int64), src - 1)
    hi = np.minimum(lo + 1, src - 1)
    frac = coord - lo
    return lo, hi, frac


def resize_bilinear(image, out_w: int, out_h: int) -> np.ndarray:
    """Align-corners bilinear resize; returns a float64 array (out_h, out_w).

    ``image`` may be a RawImage or any 2-D array.
    """
    if out_w < 1 or out_h < 1:
        raise ValueError(f"bad output size {out_w}x{out_h}")
    src = np.asarray(image.data if isinstance(image, RawImage) else image, dtype=np.float64)
    h, w = src.shape
    if (h, w) == (out_h, out_w):
        return src.copy()
    y0, y1, fy = _axis_weights(h, out_h)
    x0, x1, fx = _axis_weights(w, out_w)
    top = src[y0][:, x0] * (1 - fx) + src[y0][:, x1] * fx
    bot = src[y1][:, x0] * (1 - fx) + src[y1][:, x1] * fx
    return top * (1 - fy)[:, None] + bot * fy[:, None]


def normalize(image) -> tuple[np.ndarray, NormParams]:
    """Z-score an image with its own mean and population std."""
    x = np.asarray(image, dtype=np.float64)
    if x.size == 0:
        raise ValueError("empty image")
    mean = float(x.mean())
    centered = x - mean
    std = float(np.sqrt(np.mean(centered * centered)))
    params = NormParams(mean, std)
    out = centered / params.scale
    # re-center: division can leave O(1e-17) drift, keep |mean| far below 1e-12
    out -= out.mean()
    return out, params


def denormalize(tensor, params: NormParams) -> RawImage:
    t = np.asarray(tensor, dtype=np.float64)
    vals = t * params.scale + params.mean
    vals = np.sign(vals) * np.floor(np.abs(vals) + 0.5)  # half away from zero
    vals = np.clip(np.nan_to_num(vals, nan=0.0), 0, 255)
    h, w = t.shape
    return RawImage(w, h, vals.astype(np.uint8))


def prepare(image: RawImage, size: int) -> tuple[np.ndarray, NormParams]:
    """Resize to ``size`` x ``size`` and normalize."""
    return normalize(resize_bilinear(image, size, size))
