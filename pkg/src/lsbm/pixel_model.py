"""Quantized Gaussian cover model and the LSB-matching stego pmf.

A cover pixel is ``quantize(theta + noise)`` with Gaussian noise of standard
deviation ``sigma``. Tails beyond the dynamic range are folded into the first
and last grayscale level so every pmf is exactly normalized.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

NORMALIZATION_TOL = 1e-9


@dataclass(frozen=True)
class PixelParams:
    theta: float
    sigma: float

    def __post_init__(self):
        if not math.isfinite(self.theta):
            raise ValueError(f"theta must be finite, got {self.theta}")
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise ValueError(f"sigma must be positive and finite, got {self.sigma}")


@dataclass(frozen=True, eq=False)
class QuantizedPmf:
    bit_depth: int
    mass: np.ndarray

    def __post_init__(self):
        mass = np.asarray(self.mass, dtype=float)
        if self.bit_depth < 1:
            raise ValueError("bit_depth must be >= 1")
        if mass.shape != (2**self.bit_depth,):
            raise ValueError(f"expected {2**self.bit_depth} entries, got {mass.shape}")
        if np.any(mass < 0) or np.any(mass > 1):
            raise ValueError("pmf entries must lie in [0, 1]")
        if abs(math.fsum(mass) - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"pmf sums to {math.fsum(mass)!r}, not 1")
        mass.flags.writeable = False
        object.__setattr__(self, "mass", mass)

    @property
    def levels(self) -> np.ndarray:
        return np.arange(2**self.bit_depth)

    def mean(self) -> float:
        return float(np.dot(self.levels, self.mass))

    def variance(self) -> float:
        k = self.levels
        m = self.mean()
        return float(np.dot((k - m) ** 2, self.mass))


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Row-major grid of integer pixels in ``[0, 2**bit_depth - 1]``."""

    pixels: np.ndarray
    bit_depth: int = 8

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2 or px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError(f"pixels must be a non-empty 2-D grid, got shape {px.shape}")
        if not np.issubdtype(px.dtype, np.integer):
            if not np.all(np.equal(np.mod(px, 1), 0)):
                raise ValueError("pixels must be integers")
        px = px.astype(np.int64)
        top = 2**self.bit_depth - 1
        if px.min() < 0 or px.max() > top:
            raise ValueError(f"pixels must lie in [0, {top}]")
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def size(self) -> int:
        return self.pixels.size

    @property
    def max_value(self) -> int:
        return 2**self.bit_depth - 1

    def flat(self) -> np.ndarray:
        return self.pixels.ravel()

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.bit_depth == other.bit_depth and np.array_equal(self.pixels, other.pixels)


def quantize(y, bit_depth: int = 8):
    """Unit-step quantizer: ``k`` such that ``y`` lies in ``[k - 1/2, k + 1/2)``,
    clamped to the dynamic range. Accepts scalars or arrays."""
    arr = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("quantize requires finite input")
    k = np.clip(np.floor(arr + 0.5), 0, 2**bit_depth - 1).astype(np.int64)
    if k.ndim == 0:
        return int(k)
    return k


def _bin_masses(k: np.ndarray, theta, sigma, top: int) -> np.ndarray:
    # Differences are taken on the tail closer to zero so far bins keep relative precision.
    k = np.asarray(k, dtype=float)
    lo = (k - 0.5 - theta) / sigma
    hi = (k + 0.5 - theta) / sigma
    lo = np.where(k <= 0, -np.inf, lo)
    hi = np.where(k >= top, np.inf, hi)
    upper_side = (k - theta) >= 0
    left = ndtr(hi) - ndtr(lo)
    right = ndtr(-lo) - ndtr(-hi)
    return np.where(upper_side, right, left)


def pmf_window(theta, sigma, lo: int, hi: int, bit_depth: int = 8) -> np.ndarray:
    """Cover masses for levels ``lo..hi`` (inclusive); edge levels of the full
    range absorb the clamped tails. ``theta``/``sigma`` may be column arrays."""
    k = np.arange(lo, hi + 1)
    return _bin_masses(k, theta, sigma, 2**bit_depth - 1)


def cover_pmf(params: PixelParams, bit_depth: int = 8) -> QuantizedPmf:
    top = 2**bit_depth - 1
    if not 0 <= params.theta <= top:
        raise ValueError(f"theta={params.theta} outside the dynamic range [0, {top}]")
    mass = pmf_window(params.theta, params.sigma, 0, top, bit_depth)
    return QuantizedPmf(bit_depth, mass)


def stego_window(p: np.ndarray, rate: float, low_edge: bool, high_edge: bool) -> np.ndarray:
    """Apply the ±1 mixing to masses ``p`` (last axis = levels).

    Neighbours outside the window are taken as zero, except at a true edge of
    the dynamic range where the edge mass is reflected.
    """
    p = np.asarray(p, dtype=float)
    zero = np.zeros(p.shape[:-1] + (1,))
    left_pad = p[..., :1] if low_edge else zero
    right_pad = p[..., -1:] if high_edge else zero
    below = np.concatenate([left_pad, p[..., :-1]], axis=-1)
    above = np.concatenate([p[..., 1:], right_pad], axis=-1)
    return (rate / 4) * (below + above) + (1 - rate / 2) * p


def stego_pmf(cover: QuantizedPmf, rate: float) -> QuantizedPmf:
    """Pmf of a stego pixel after LSB matching at ``rate`` bits per pixel.

    ``rate`` may go up to 2, the case where every pixel is moved by ±1.
    """
    if not 0 <= rate <= 2:
        raise ValueError(f"rate must lie in [0, 2], got {rate}")
    if rate == 0:
        return QuantizedPmf(cover.bit_depth, cover.mass.copy())
    q = stego_window(cover.mass, rate, True, True)
    return QuantizedPmf(cover.bit_depth, q)
