"""Synthetic "aging" corpora: per-subject linear morphs between two smooth fields."""
from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .dataset import RawImage, write_pgm

FIXTURE_SIZE = 64
FIRST_AGE = 2
AGE_STEP = 3
# Integer wave vectors (cycles per image). Every field lies in the span of
# their 18 cos/sin patterns, which keeps the corpus low-rank.
WAVES = ((1, 0), (0, 1), (1, 1), (1, -1), (2, 0), (0, 2), (2, 1), (1, 2), (2, -1))
AMPLITUDE = 100.0
OFFSET = 128.0


def smooth_field(rng: np.random.Generator, size: int = FIXTURE_SIZE) -> np.ndarray:
    """Random mixture of low-frequency sinusoids scaled to max |value| = 1."""
    yy, xx = np.mgrid[0:size, 0:size] / size
    field = np.zeros((size, size))
    for fx, fy in WAVES:
        amp = rng.normal()
        phase = rng.uniform(0, 2 * np.pi)
        field += amp * np.cos(2 * np.pi * (fx * xx + fy * yy) + phase)
    return field / np.max(np.abs(field))


def subject_frames(seed: int, index: int, length: int, size: int = FIXTURE_SIZE) -> list[np.ndarray]:
    """8-bit frames ``(1 - a_t) * A + a_t * B`` for ``a_t = t / (length - 1)``."""
    rng = np.random.default_rng([seed, index])
    a = OFFSET + AMPLITUDE * smooth_field(rng, size)
    b = OFFSET + AMPLITUDE * smooth_field(rng, size)
    frames = []
    for t in range(length):
        alpha = t / (length - 1) if length > 1 else 0.0
        img = (1 - alpha) * a + alpha * b
        frames.append(np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8))
    return frames


def make_fixture(out_dir: str | os.PathLike, subjects: int = 50, length: int = 6,
                 seed: int = 42, size: int = FIXTURE_SIZE) -> list[Path]:
    """Write ``subjects * length`` PGMs named ``<id>A<age>.pgm``; returns their paths."""
    if subjects < 1 or length < 1:
        raise ValueError("subjects and length must be >= 1")
    if FIRST_AGE + AGE_STEP * (length - 1) > 120:
        raise ValueError(f"length {length} runs past age 120")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    width = max(3, len(str(subjects)))
    paths = []
    for s in range(subjects):
        sid = f"{s + 1:0{width}d}"
        for t, frame in enumerate(subject_frames(seed, s, length, size)):
            path = out / f"{sid}A{FIRST_AGE + AGE_STEP * t:02d}.pgm"
            write_pgm(path, RawImage(size, size, frame))
            paths.append(path)
    return paths
