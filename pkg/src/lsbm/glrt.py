"""Practical detector: local WS-style estimates plugged into the log-LR.

Expectations come from the 3x3 predictor kernel, deviations from the spread of
the four 4-connected neighbours. The outer one-pixel border has no complete
neighbourhood and is excluded from the statistic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lrt import TestOutcome, decide
from .pixel_model import GrayImage

KERNEL = np.array([[-1.0, 2.0, -1.0], [2.0, 0.0, 2.0], [-1.0, 2.0, -1.0]]) / 4.0
DEFAULT_ALPHA_STAB = 0.25
LOG2 = math.log(2.0)


@dataclass(frozen=True, eq=False)
class EstimatedField:
    theta_hat: np.ndarray
    sigma_hat: np.ndarray
    valid_mask: np.ndarray


@dataclass(frozen=True)
class GlrtConfig:
    alpha_stab: float = DEFAULT_ALPHA_STAB
    threshold: float = 0.0
    alpha0: float | None = None  # false-alarm level the threshold was calibrated for

    def __post_init__(self):
        if not self.alpha_stab >= 0:
            raise ValueError("alpha_stab must be non-negative")


def _interior(image: GrayImage) -> np.ndarray:
    if image.width < 3 or image.height < 3:
        raise ValueError(f"image must be at least 3x3, got {image.width}x{image.height}")
    return image.pixels.astype(float)


def _neighbours4(z: np.ndarray) -> np.ndarray:
    return np.stack([z[:-2, 1:-1], z[2:, 1:-1], z[1:-1, :-2], z[1:-1, 2:]])


def _embed_interior(values: np.ndarray, shape) -> np.ndarray:
    out = np.full(shape, np.nan)
    out[1:-1, 1:-1] = values
    return out


def _expectation_interior(z: np.ndarray) -> np.ndarray:
    cross = z[:-2, 1:-1] + z[2:, 1:-1] + z[1:-1, :-2] + z[1:-1, 2:]
    diag = z[:-2, :-2] + z[:-2, 2:] + z[2:, :-2] + z[2:, 2:]
    return (2.0 * cross - diag) / 4.0


def _sigma_interior(z: np.ndarray) -> np.ndarray:
    nb = _neighbours4(z)
    dev = nb - nb.mean(axis=0)
    return np.sqrt((dev * dev).sum(axis=0) / 4.0)


def estimate_expectation(image: GrayImage) -> np.ndarray:
    """Kernel prediction of each pixel from its 8 neighbours; NaN on the border."""
    z = _interior(image)
    return _embed_interior(_expectation_interior(z), z.shape)


def estimate_variance(image: GrayImage) -> np.ndarray:
    """Population variance of the 4-connected neighbours; NaN on the border."""
    z = _interior(image)
    return _embed_interior(_sigma_interior(z) ** 2, z.shape)


def estimate_field(image: GrayImage) -> EstimatedField:
    z = _interior(image)
    mask = np.zeros(z.shape, dtype=bool)
    mask[1:-1, 1:-1] = True
    return EstimatedField(
        _embed_interior(_expectation_interior(z), z.shape),
        _embed_interior(_sigma_interior(z), z.shape),
        mask,
    )


def estimated_log_lr(z, theta_hat, sigma_hat, alpha_stab: float = DEFAULT_ALPHA_STAB):
    """Log-LR with estimated parameters; ``alpha_stab`` is added to the
    deviation before squaring."""
    scale = np.square(alpha_stab + np.asarray(sigma_hat, dtype=float))
    d = (np.asarray(z, dtype=float) - theta_hat) / scale
    a = np.abs(d)
    out = a + np.log1p(np.exp(-2.0 * a))
    return float(out) if np.ndim(out) == 0 else out


def pixel_terms(image: GrayImage, alpha_stab: float = DEFAULT_ALPHA_STAB) -> np.ndarray:
    """Centered per-pixel contributions over the valid interior."""
    z = _interior(image)
    theta_hat = _expectation_interior(z)
    sigma_hat = _sigma_interior(z)
    if alpha_stab == 0 and np.any(sigma_hat == 0):
        raise ValueError("zero local deviation with alpha_stab=0 gives an undefined log-LR")
    scale = np.square(alpha_stab + sigma_hat)
    lam = estimated_log_lr(z[1:-1, 1:-1], theta_hat, sigma_hat, alpha_stab)
    return lam - LOG2 - 1.0 / (4.0 * scale)


def glrt_statistic(image: GrayImage, config: GlrtConfig = GlrtConfig()) -> float:
    terms = pixel_terms(image, config.alpha_stab)
    if terms.size == 0:
        raise ValueError("no valid pixels")
    return float(np.sum(terms) / math.sqrt(terms.size))


def detect(image: GrayImage, config: GlrtConfig = GlrtConfig()) -> TestOutcome:
    return decide(glrt_statistic(image, config), config.threshold, config.alpha0)


def calibrate_threshold(cover_scores, alpha0: float) -> float:
    """Empirical ``1 - alpha0`` quantile of cover-image statistics."""
    scores = np.asarray(cover_scores, dtype=float)
    if scores.size == 0:
        raise ValueError("need cover scores to calibrate")
    if not 0 < alpha0 < 1:
        raise ValueError("alpha0 must lie in (0, 1)")
    return float(np.quantile(scores, 1.0 - alpha0))
