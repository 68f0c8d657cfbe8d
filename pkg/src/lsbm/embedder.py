"""LSB-matching (±1) embedding simulator.

Randomness for pixel ``n`` comes from words ``3n, 3n+1, 3n+2`` of a Philox
counter stream keyed by the seed, so the outcome for a pixel does not depend
on how the image is traversed or split across workers.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .pixel_model import GrayImage, QuantizedPmf

_WORDS_PER_PIXEL = 3
_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class EmbedConfig:
    rate: float
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.rate <= 1:
            raise ValueError(f"embedding rate must lie in [0, 1], got {self.rate}")
        if not 0 <= self.seed <= _SEED_MASK:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass
class EmbedReport:
    pixels_carrying: int
    pixels_changed: int
    change_positions: np.ndarray | None = None


def pixel_stream(seed: int, n_pixels: int, start: int = 0):
    """Per-pixel uniforms for the carry decision, message bits and ±1 directions
    for pixels ``start .. start + n_pixels - 1``."""
    gen = np.random.Philox(key=seed)
    if start:
        # Philox yields 4 words per counter step
        gen.advance(start * _WORDS_PER_PIXEL // 4)
        skip = (start * _WORDS_PER_PIXEL) % 4
        if skip:
            gen.random_raw(skip)
    words = gen.random_raw(n_pixels * _WORDS_PER_PIXEL).reshape(n_pixels, _WORDS_PER_PIXEL)
    carry_u = (words[:, 0] >> np.uint64(11)).astype(np.float64) * 2.0**-53
    message = (words[:, 1] & np.uint64(1)).astype(np.int64)
    up = (words[:, 2] & np.uint64(1)).astype(bool)
    return carry_u, message, up


def embed_lsb_matching(cover: GrayImage, config: EmbedConfig, record_positions: bool = False):
    """Embed a random message at ``config.rate`` bits per pixel.

    Each pixel carries a bit with probability ``rate``. A carrying pixel whose
    LSB already equals its bit is left alone; otherwise it moves by +1 or -1
    with equal probability (forced inward at 0 and at the top level).

    Returns ``(stego, report)``.
    """
    c = cover.flat()
    n = c.size
    carry_u, message, up = pixel_stream(config.seed, n)
    carrying = carry_u < config.rate
    mismatch = carrying & ((c & 1) != message)

    step = np.where(up, 1, -1)
    step = np.where(c == 0, 1, step)
    step = np.where(c == cover.max_value, -1, step)
    s = np.where(mismatch, c + step, c)

    positions = np.flatnonzero(mismatch) if record_positions else None
    report = EmbedReport(int(carrying.sum()), int(mismatch.sum()), positions)
    stego = GrayImage(s.reshape(cover.pixels.shape), cover.bit_depth)
    return stego, report


def message_bits(seed: int, n_pixels: int) -> np.ndarray:
    """Regenerate the message bit stream the embedder used for ``seed``."""
    return pixel_stream(seed, n_pixels)[1]


def carrying_mask(config: EmbedConfig, n_pixels: int) -> np.ndarray:
    return pixel_stream(config.seed, n_pixels)[0] < config.rate


def empirical_pmf(images: Sequence[GrayImage]) -> QuantizedPmf:
    """Normalized histogram over all pixels of ``images``."""
    if len(images) == 0:
        raise ValueError("need at least one image")
    bit_depth = images[0].bit_depth
    counts = np.zeros(2**bit_depth, dtype=np.int64)
    for img in images:
        if img.bit_depth != bit_depth:
            raise ValueError("images differ in bit depth")
        counts += np.bincount(img.flat(), minlength=2**bit_depth)
    return QuantizedPmf(bit_depth, counts / counts.sum())
