"""Known-parameter likelihood-ratio test for LSB matching.

The per-pixel log-LR is ``log(exp(d) + exp(-d))`` with ``d = (z - theta) /
sigma**2``; additive constants that do not depend on the hypothesis are left
out everywhere, including in the moments, so statistic, threshold and power
share one convention.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from .pixel_model import GrayImage, PixelParams, cover_pmf, pmf_window, stego_window

# Omitted tail mass beyond 12 sigma is below 1e-30; the extra 2 levels cover the ±1 shifts.
SUPPORT_SIGMAS = 12.0
SUPPORT_PAD = 2


class Hypothesis(enum.Enum):
    H0 = "H0"
    H1 = "H1"

    def __str__(self):
        return self.value


class OutOfSupportError(ValueError):
    """The cover pmf underflows at the requested level."""


@dataclass(frozen=True, eq=False)
class ParamField:
    """Per-pixel expectations and noise deviations, flat row-major order."""

    theta: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        theta = np.ascontiguousarray(self.theta, dtype=float).ravel()
        sigma = np.broadcast_to(np.asarray(self.sigma, dtype=float).ravel(), theta.shape).copy()
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "sigma", sigma)

    @classmethod
    def constant(cls, theta: float, sigma: float, n: int) -> "ParamField":
        return cls(np.full(n, float(theta)), np.full(n, float(sigma)))

    def __len__(self):
        return self.theta.size

    def __getitem__(self, i) -> PixelParams:
        return PixelParams(float(self.theta[i]), float(self.sigma[i]))


@dataclass(frozen=True)
class MomentSet:
    mu0: float
    mu2: float
    var0: float
    var2: float
    n: int

    def __post_init__(self):
        if self.var0 < 0 or self.var2 < 0:
            raise ValueError("variances must be non-negative")


@dataclass(frozen=True)
class TestOutcome:
    statistic: float
    threshold: float
    alpha0: float | None
    decision: Hypothesis


def _logcosh2(d):
    # log(e^d + e^-d) = |d| + log1p(e^{-2|d|})
    a = np.abs(d)
    return a + np.log1p(np.exp(-2.0 * a))


def log_lr(z, theta, sigma):
    """Vectorized per-pixel log-LR."""
    d = (np.asarray(z, dtype=float) - theta) / np.square(sigma)
    return _logcosh2(d)


def log_lr_pixel(z: int, params: PixelParams) -> float:
    return float(log_lr(z, params.theta, params.sigma))


def exact_lr_pixel(z: int, params: PixelParams, bit_depth: int = 8) -> float:
    """Likelihood ratio for the all-pixels-moved case from exact cover masses:
    ``(p[z-1] + p[z+1]) / (2 p[z])``."""
    top = 2**bit_depth - 1
    if not 1 <= z <= top - 1:
        raise ValueError(f"z={z} must be an interior level in [1, {top - 1}]")
    p = cover_pmf(params, bit_depth).mass
    if p[z] <= 0 or not math.isfinite(1.0 / p[z]):
        raise OutOfSupportError(f"cover mass at z={z} underflows for {params}")
    return (p[z - 1] + p[z + 1]) / (2.0 * p[z])


def _support(theta: float, sigma: float, top: int):
    lo = max(0, math.ceil(theta - SUPPORT_SIGMAS * sigma - SUPPORT_PAD))
    hi = min(top, math.floor(theta + SUPPORT_SIGMAS * sigma + SUPPORT_PAD))
    return lo, hi


def pixel_moments(theta: float, sigma: float, bit_depth: int = 8):
    """``(mean0, mean2, var0, var2)`` of the log-LR for one pixel under the cover
    pmf and under the fully-moved stego pmf."""
    top = 2**bit_depth - 1
    lo, hi = _support(theta, sigma, top)
    p = pmf_window(theta, sigma, lo, hi, bit_depth)
    q = stego_window(p, 2.0, lo == 0, hi == top)
    lam = log_lr(np.arange(lo, hi + 1), theta, sigma)
    m0 = math.fsum(p * lam)
    m2 = math.fsum(q * lam)
    s0 = math.fsum(p * lam * lam) - m0 * m0
    s2 = math.fsum(q * lam * lam) - m2 * m2
    return m0, m2, max(s0, 0.0), max(s2, 0.0)


def moments_r2(field: ParamField, bit_depth: int = 8) -> MomentSet:
    """Mean expectations and mean variances of the log-LR over ``field``."""
    if len(field) == 0:
        raise ValueError("empty parameter field")
    if np.any(field.sigma <= 0):
        raise ValueError("all sigma must be positive")
    top = 2**bit_depth - 1
    if np.any(field.theta < 0) or np.any(field.theta > top):
        raise ValueError("theta outside the dynamic range")
    pairs = np.stack([field.theta, field.sigma], axis=1)
    uniq, counts = np.unique(pairs, axis=0, return_counts=True)
    acc = np.array([pixel_moments(t, s, bit_depth) for t, s in uniq])
    w = counts / counts.sum()
    m0, m2, v0, v2 = (w[:, None] * acc).sum(axis=0)
    return MomentSet(float(m0), float(m2), float(v0), float(v2), len(field))


def moments_general(m: MomentSet, rate: float):
    """``(mu_R, var_R)`` of the log-LR when a fraction ``rate/2`` of pixels
    is moved by ±1 (law of total expectation / variance)."""
    if not 0 <= rate <= 2:
        raise ValueError(f"rate must lie in [0, 2], got {rate}")
    if rate == 0:
        return m.mu0, m.var0
    if rate == 2:
        return m.mu2, m.var2
    w = rate / 2
    mu_r = w * m.mu2 + (1 - w) * m.mu0
    var_r = w * (m.var2 + m.mu2**2) + (1 - w) * (m.var0 + m.mu0**2) - mu_r**2
    return mu_r, max(var_r, 0.0)


def normalized_statistic(image: GrayImage, field: ParamField, moments: MomentSet) -> float:
    z = image.flat()
    if len(field) != z.size:
        raise ValueError(f"field has {len(field)} entries, image has {z.size} pixels")
    if moments.var0 <= 0:
        raise ValueError("var0 must be positive to normalize")
    n = z.size
    total = float(np.sum(log_lr(z, field.theta, field.sigma)))
    return (total - n * moments.mu0) / math.sqrt(n * moments.var0)


def normalized_statistics(z: np.ndarray, field: ParamField, moments: MomentSet) -> np.ndarray:
    """Row-wise statistic for a batch ``z`` of shape ``(trials, N)``."""
    n = z.shape[-1]
    totals = np.sum(log_lr(z, field.theta, field.sigma), axis=-1)
    return (totals - n * moments.mu0) / math.sqrt(n * moments.var0)


def _check_alpha(alpha0: float):
    if not 0 < alpha0 < 1:
        raise ValueError(f"alpha0 must lie in (0, 1), got {alpha0}")


def threshold(alpha0: float) -> float:
    """Threshold on the normalized statistic giving false-alarm rate ``alpha0``."""
    _check_alpha(alpha0)
    # -ndtri(a) keeps precision for small alpha where 1 - a would round
    return float(-ndtri(alpha0))


def power_r2(alpha0: float, m: MomentSet, n: int) -> float:
    """Asymptotic power when every pixel is moved by ±1."""
    _check_alpha(alpha0)
    if m.var2 <= 0 or m.var0 <= 0:
        raise ValueError("degenerate log-LR variance")
    s0, s2 = math.sqrt(m.var0), math.sqrt(m.var2)
    arg = (s0 / s2) * threshold(alpha0) + math.sqrt(n) * (m.mu0 - m.mu2) / s2
    return float(1.0 - ndtr(arg))


def power_general(alpha0: float, m: MomentSet, n: int, rate: float) -> float:
    """Asymptotic power at embedding rate ``rate``.

    The mean shift is ``sqrt(n) * (mu_R - mu0)``, i.e. ``(rate/2) sqrt(n)
    (mu2 - mu0)``, which reduces to :func:`power_r2` at ``rate == 2``.
    """
    _check_alpha(alpha0)
    if m.var0 <= 0:
        raise ValueError("degenerate log-LR variance")
    if rate == 0:
        return alpha0
    mu_r, var_r = moments_general(m, rate)
    if var_r <= 0:
        raise ValueError("degenerate log-LR variance")
    s0, sr = math.sqrt(m.var0), math.sqrt(var_r)
    arg = (s0 / sr) * threshold(alpha0) + (rate / 2) * math.sqrt(n) * (m.mu0 - m.mu2) / sr
    return float(1.0 - ndtr(arg))


def decide(statistic: float, threshold: float, alpha0: float | None) -> TestOutcome:
    decision = Hypothesis.H1 if statistic > threshold else Hypothesis.H0
    return TestOutcome(float(statistic), float(threshold), alpha0, decision)
