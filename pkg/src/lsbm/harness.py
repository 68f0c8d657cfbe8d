"""Monte-Carlo verification, synthetic covers, ROC curves and experiment configs.

Every trial draws its randomness from a seed derived from ``(master_seed,
size index, trial index, stream)``, so results do not depend on how trials
are split across worker threads.
"""
from __future__ import annotations

import configparser
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np

from . import glrt, lrt
from .embedder import EmbedConfig, embed_lsb_matching
from .imageio import parse_pgm
from .lrt import ParamField
from .pixel_model import GrayImage, quantize

SCENES = ("constant", "ramp", "texture", "smooth")
MODES = ("theoretical_lrt", "practical_glrt")
RESULT_FIELDS = (
    "n_pixels",
    "alpha0",
    "rate",
    "empirical_alpha",
    "empirical_power",
    "theory_power",
    "n_trials",
)
_CHUNK = 250


@lru_cache(maxsize=1)
def bundled_texture() -> np.ndarray:
    data = resources.files("lsbm").joinpath("data/texture.pgm").read_bytes()
    return parse_pgm(data).pixels.astype(float)


def derive_seed(master_seed: int, *keys: int) -> int:
    """64-bit seed for the stream identified by ``keys`` under ``master_seed``."""
    ss = np.random.SeedSequence(master_seed, spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class SceneSpec:
    """Noise-free scene plus the noise level of the synthetic sensor.

    ``constant``: flat ``theta``. ``ramp``: ``theta`` plus ``slope`` gray
    levels per column, centred on the middle column. ``texture``: the bundled
    fixture image. ``smooth``: a random low-frequency field around ``theta``
    with peak deviation ``amplitude``, drawn from ``scene_seed``.
    """

    kind: str = "constant"
    theta: float = 128.0
    sigma: float = 1.0
    slope: float = 0.5
    amplitude: float = 60.0
    scene_seed: int = 0

    def __post_init__(self):
        if self.kind not in SCENES:
            raise ValueError(f"unknown scene {self.kind!r}; expected one of {SCENES}")
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")


def scene_expectation(spec: SceneSpec, dims, bit_depth: int = 8) -> np.ndarray:
    h, w = dims
    top = 2**bit_depth - 1
    if spec.kind == "constant":
        theta = np.full((h, w), float(spec.theta))
    elif spec.kind == "ramp":
        cols = np.arange(w) - (w - 1) / 2
        theta = np.broadcast_to(spec.theta + spec.slope * cols, (h, w)).copy()
    elif spec.kind == "texture":
        tex = bundled_texture()
        if h == 1:
            theta = np.resize(tex.ravel(), w)[None, :]
        else:
            theta = tex[np.ix_(np.arange(h) % tex.shape[0], np.arange(w) % tex.shape[1])]
    else:
        rng = np.random.default_rng(spec.scene_seed)
        y, x = np.mgrid[0:h, 0:w]
        span = max(h, w)
        field_ = np.zeros((h, w))
        for _ in range(3):
            fx, fy = rng.uniform(0.3, 2.0, size=2) / span
            phase = rng.uniform(0, 2 * np.pi)
            field_ += np.cos(2 * np.pi * (fx * x + fy * y) + phase)
        field_ /= 3
        theta = spec.theta + spec.amplitude * field_
    return np.clip(theta, 0, top)


def synth_cover(spec: SceneSpec, dims, seed: int, bit_depth: int = 8):
    """Draw ``quantize(theta + noise)`` over ``dims = (height, width)``.

    Returns ``(image, field)`` where ``field`` holds the true parameters.
    """
    theta = scene_expectation(spec, dims, bit_depth)
    rng = np.random.default_rng(seed)
    y = theta + spec.sigma * rng.standard_normal(theta.shape)
    image = GrayImage(quantize(y, bit_depth), bit_depth)
    return image, ParamField(theta, np.full(theta.size, spec.sigma))


def smooth_corpus_spec(index: int, master_seed: int, sigma: float = 1.0) -> SceneSpec:
    """Scene for image ``index`` of a seeded corpus of smooth synthetic covers."""
    rng = np.random.default_rng(derive_seed(master_seed, index, 99))
    return SceneSpec(
        kind="smooth",
        theta=float(rng.uniform(80, 175)),
        sigma=sigma,
        amplitude=float(rng.uniform(10, 30)),
        scene_seed=derive_seed(master_seed, index, 98),
    )


def smooth_corpus(n_images: int, master_seed: int, dims=(64, 64), sigma: float = 1.0):
    """Seeded list of smooth-scene covers with Gaussian noise ``sigma``."""
    return [
        synth_cover(smooth_corpus_spec(i, master_seed, sigma), dims, derive_seed(master_seed, i, 0))[0]
        for i in range(n_images)
    ]


@dataclass
class ExperimentConfig:
    mode: str = "theoretical_lrt"
    scene: SceneSpec = field(default_factory=SceneSpec)
    n_trials: int = 10_000
    sizes: list = field(default_factory=lambda: [(1, 1000)])
    rates: list = field(default_factory=lambda: [0.0, 0.1])
    alphas: list = field(default_factory=lambda: [0.1, 0.01])
    master_seed: int = 0
    alpha_stab: float = glrt.DEFAULT_ALPHA_STAB

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.n_trials < 1:
            raise ValueError("n_trials must be >= 1")
        if not all(0 <= r <= 1 for r in self.rates):
            raise ValueError("rates must lie in [0, 1]")
        if not all(0 < a < 1 for a in self.alphas):
            raise ValueError("alphas must lie in (0, 1)")
        self.sizes = [tuple(int(v) for v in s) for s in self.sizes]
        for h, w in self.sizes:
            if h < 1 or w < 1:
                raise ValueError(f"bad size {h}x{w}")
            if self.mode == "practical_glrt" and (h < 3 or w < 3):
                raise ValueError("practical_glrt needs images of at least 3x3")
            if self.mode == "theoretical_lrt" and self.scene.sigma <= 0:
                raise ValueError("theoretical_lrt needs sigma > 0")


def _parse_size(token: str):
    token = token.strip().lower()
    if "x" in token:
        w, h = token.split("x")
        return int(h), int(w)
    return 1, int(token)


def _floats(value: str):
    return [float(v) for v in value.split(",") if v.strip()]


def parse_config(text: str) -> ExperimentConfig:
    """Parse the flat ``key = value`` experiment format (see README)."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string("[experiment]\n" + text)
    except configparser.Error as exc:
        raise ValueError(f"malformed config: {exc}") from exc
    sec = cp["experiment"]
    known = {
        "mode", "scene", "theta", "sigma", "slope", "amplitude", "scene_seed",
        "n_trials", "sizes", "rates", "alphas", "master_seed", "alpha_stab",
    }
    unknown = set(sec) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    scene = SceneSpec(
        kind=sec.get("scene", "constant"),
        theta=sec.getfloat("theta", 128.0),
        sigma=sec.getfloat("sigma", 1.0),
        slope=sec.getfloat("slope", 0.5),
        amplitude=sec.getfloat("amplitude", 60.0),
        scene_seed=sec.getint("scene_seed", 0),
    )
    return ExperimentConfig(
        mode=sec.get("mode", "theoretical_lrt"),
        scene=scene,
        n_trials=sec.getint("n_trials", 10_000),
        sizes=[_parse_size(t) for t in sec.get("sizes", "1000").split(",") if t.strip()],
        rates=_floats(sec.get("rates", "0, 0.1")),
        alphas=_floats(sec.get("alphas", "0.1, 0.01")),
        master_seed=sec.getint("master_seed", 0),
        alpha_stab=sec.getfloat("alpha_stab", glrt.DEFAULT_ALPHA_STAB),
    )


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def _trial_block(config: ExperimentConfig, size_index: int, dims, stat, trials):
    """Cover statistic and per-rate stego statistics for ``trials``."""
    cover_stats = np.empty(len(trials))
    stego_stats = np.empty((len(trials), len(config.rates)))
    for row, i in enumerate(trials):
        cover, _ = synth_cover(config.scene, dims, derive_seed(config.master_seed, size_index, i, 0))
        cover_stats[row] = stat(cover)
        for j, rate in enumerate(config.rates):
            if rate == 0:
                stego_stats[row, j] = cover_stats[row]
                continue
            seed = derive_seed(config.master_seed, size_index, i, 1 + j)
            stego, _ = embed_lsb_matching(cover, EmbedConfig(rate, seed))
            stego_stats[row, j] = stat(stego)
    return cover_stats, stego_stats


def run_trials(config: ExperimentConfig, size_index: int, workers: int = 1):
    """Statistics for every trial at ``config.sizes[size_index]``.

    Returns ``(cover_stats, stego_stats, moments)``; ``moments`` is None in
    practical mode.
    """
    dims = config.sizes[size_index]
    moments = None
    if config.mode == "theoretical_lrt":
        theta = scene_expectation(config.scene, dims)
        pfield = ParamField(theta, np.full(theta.size, config.scene.sigma))
        moments = lrt.moments_r2(pfield)

        def stat(img):
            return lrt.normalized_statistic(img, pfield, moments)

    else:
        gcfg = glrt.GlrtConfig(alpha_stab=config.alpha_stab)

        def stat(img):
            return glrt.glrt_statistic(img, gcfg)

    blocks = [range(s, min(s + _CHUNK, config.n_trials)) for s in range(0, config.n_trials, _CHUNK)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _trial_block(config, size_index, dims, stat, b), blocks))
    else:
        parts = [_trial_block(config, size_index, dims, stat, b) for b in blocks]
    cover = np.concatenate([p[0] for p in parts])
    stego = np.concatenate([p[1] for p in parts])
    return cover, stego, moments


def mc_verify(config: ExperimentConfig, workers: int = 1) -> list[dict]:
    """Empirical false-alarm rate and power next to the asymptotic prediction.

    In theoretical mode the threshold is the normal quantile and the
    prediction comes from the closed-form power; in practical mode the
    threshold is the empirical cover quantile and no prediction exists.
    """
    rows = []
    for si, (h, w) in enumerate(config.sizes):
        cover, stego, moments = run_trials(config, si, workers)
        n = h * w
        for alpha0 in config.alphas:
            if moments is not None:
                thr = lrt.threshold(alpha0)
            else:
                thr = glrt.calibrate_threshold(cover, alpha0)
            emp_alpha = float(np.mean(cover > thr))
            for j, rate in enumerate(config.rates):
                if moments is not None:
                    theory = lrt.power_general(alpha0, moments, n, rate)
                else:
                    theory = math.nan
                rows.append(
                    {
                        "n_pixels": n,
                        "alpha0": alpha0,
                        "rate": rate,
                        "empirical_alpha": emp_alpha,
                        "empirical_power": float(np.mean(stego[:, j] > thr)),
                        "theory_power": theory,
                        "n_trials": config.n_trials,
                    }
                )
    return rows


def binomial_se(rate: float, n_trials: int) -> float:
    """Standard error of an empirical rate over ``n_trials`` Bernoulli trials."""
    return math.sqrt(rate * (1 - rate) / n_trials)


@dataclass(frozen=True)
class RocCurve:
    points: list
    auc: float


def roc_from_scores(cover_scores, stego_scores) -> RocCurve:
    """Empirical ROC (stego = positive class) swept over every pooled score.

    Tied cover/stego scores produce a diagonal segment, i.e. half credit in
    the trapezoidal AUC.
    """
    c = np.asarray(cover_scores, dtype=float)
    s = np.asarray(stego_scores, dtype=float)
    if c.size == 0 or s.size == 0:
        raise ValueError("cover and stego score lists must be non-empty")
    thresholds = np.unique(np.concatenate([c, s]))[::-1]
    c_sorted, s_sorted = np.sort(c), np.sort(s)
    fp = c.size - np.searchsorted(c_sorted, thresholds, side="left")
    tp = s.size - np.searchsorted(s_sorted, thresholds, side="left")
    fp = np.concatenate([[0], fp]).tolist()
    tp = np.concatenate([[0], tp]).tolist()
    # integer numerator keeps the AUC identical to the pairwise win count
    numer = sum((fp[i] - fp[i - 1]) * (tp[i] + tp[i - 1]) for i in range(1, len(fp)))
    auc = numer / (2 * c.size * s.size)
    points = [(f / c.size, t / s.size) for f, t in zip(fp, tp)]
    return RocCurve(points, auc)
