import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lsbm.embedder import empirical_pmf
from lsbm.harness import (
    ExperimentConfig,
    SceneSpec,
    binomial_se,
    bundled_texture,
    derive_seed,
    mc_verify,
    parse_config,
    roc_from_scores,
    scene_expectation,
    synth_cover,
)
from lsbm.pixel_model import PixelParams, cover_pmf

from test_embedder import pooled_chisquare


def brute_auc(cover, stego):
    wins = sum(1 for c in cover for s in stego if s > c)
    ties = sum(1 for c in cover for s in stego if s == c)
    return (2 * wins + ties) / (2 * len(cover) * len(stego))


def test_constant_scene_without_noise():
    img, field = synth_cover(SceneSpec("constant", theta=128, sigma=0), (4, 5), seed=1)
    assert np.all(img.pixels == 128)
    assert len(field) == 20


def test_constant_scene_distribution():
    img, field = synth_cover(SceneSpec("constant", theta=128, sigma=2), (1000, 1000), seed=2)
    counts = np.bincount(img.flat(), minlength=256)
    assert pooled_chisquare(counts, cover_pmf(PixelParams(128, 2)).mass).pvalue > 0.01
    assert np.all(field.theta == 128) and np.all(field.sigma == 2)


def test_synth_reproducible():
    spec = SceneSpec("ramp", theta=120, sigma=1.5, slope=0.3)
    a, _ = synth_cover(spec, (16, 16), seed=9)
    b, _ = synth_cover(spec, (16, 16), seed=9)
    c, _ = synth_cover(spec, (16, 16), seed=10)
    assert a == b and a != c


def test_ramp_scene():
    theta = scene_expectation(SceneSpec("ramp", theta=100, slope=2.0), (2, 5))
    assert theta[0].tolist() == [96, 98, 100, 102, 104]


def test_texture_scene():
    tex = bundled_texture()
    assert tex.shape == (128, 128)
    assert 0 < tex.min() and tex.max() < 255
    strip = scene_expectation(SceneSpec("texture"), (1, 300))
    assert np.array_equal(strip[0, :200], tex.ravel()[:200])
    tiled = scene_expectation(SceneSpec("texture"), (130, 2))
    assert np.array_equal(tiled[128], tex[0, :2])


def test_smooth_scene_in_range():
    theta = scene_expectation(SceneSpec("smooth", theta=20, amplitude=80, scene_seed=3), (32, 32))
    assert theta.min() >= 0 and theta.max() <= 255


def test_unknown_scene():
    with pytest.raises(ValueError):
        SceneSpec("checkerboard")


def test_derive_seed_distinct():
    seeds = {derive_seed(5, i, j) for i in range(50) for j in range(3)}
    assert len(seeds) == 150
    assert derive_seed(5, 1, 2) == derive_seed(5, 1, 2)


def test_binomial_se_halves_with_four_times_trials():
    assert binomial_se(0.1, 10_000) / binomial_se(0.1, 20_000) == pytest.approx(math.sqrt(2))


def test_mc_verify_zero_rate_row():
    cfg = ExperimentConfig(
        scene=SceneSpec("constant", theta=128, sigma=0.7), n_trials=300,
        sizes=[(1, 200)], rates=[0.0, 0.5], alphas=[0.1], master_seed=3,
    )
    rows = mc_verify(cfg)
    zero = [r for r in rows if r["rate"] == 0.0][0]
    assert zero["empirical_power"] == zero["empirical_alpha"]
    assert zero["theory_power"] == 0.1
    assert all(r["n_pixels"] == 200 and r["n_trials"] == 300 for r in rows)


def test_mc_verify_practical_mode():
    cfg = ExperimentConfig(
        mode="practical_glrt", scene=SceneSpec("texture", sigma=1.0), n_trials=60,
        sizes=[(16, 16)], rates=[1.0], alphas=[0.1], master_seed=4,
    )
    (row,) = mc_verify(cfg)
    assert math.isnan(row["theory_power"])
    assert row["empirical_alpha"] <= 0.1 + 1 / 60


def test_mc_verify_worker_invariance():
    cfg = ExperimentConfig(
        scene=SceneSpec("texture", sigma=1.0), n_trials=700, sizes=[(1, 64), (1, 32)],
        rates=[0.3, 1.0], alphas=[0.1, 0.01], master_seed=8,
    )
    assert mc_verify(cfg) == mc_verify(cfg, workers=4)


def test_parse_config():
    cfg = parse_config(
        """
        # Fig. 2 style run
        mode = theoretical_lrt
        scene = constant
        theta = 127.5
        sigma = 0.5
        n_trials = 500   # small
        sizes = 1000, 64x32
        rates = 0, 0.1
        alphas = 0.1, 0.01
        master_seed = 99
        """
    )
    assert cfg.scene == SceneSpec("constant", theta=127.5, sigma=0.5)
    assert cfg.sizes == [(1, 1000), (32, 64)]
    assert cfg.rates == [0.0, 0.1] and cfg.alphas == [0.1, 0.01]
    assert (cfg.n_trials, cfg.master_seed) == (500, 99)


@pytest.mark.parametrize(
    "text",
    ["bogus = 1", "rates = 0, 1.5", "alphas = 0", "mode = magic", "n_trials = 0", "sizes = 2x2\nmode = practical_glrt", "theta = abc", "no equals sign"],
)
def test_parse_config_rejects(text):
    with pytest.raises(ValueError):
        parse_config(text)


def test_roc_examples():
    assert roc_from_scores([0, 0], [1, 1]).auc == 1.0
    assert roc_from_scores([0.3, 1.2, 5], [0.3, 1.2, 5]).auc == 0.5
    assert roc_from_scores([1, 3], [2, 4]).auc == 0.75


def test_roc_empty():
    with pytest.raises(ValueError):
        roc_from_scores([], [1.0])
    with pytest.raises(ValueError):
        roc_from_scores([1.0], [])


score_lists = st.lists(st.integers(-5, 5).map(float) | st.floats(-3, 3), min_size=1, max_size=100)


@given(cover=score_lists, stego=score_lists)
def test_roc_auc_equals_pairwise_win_rate(cover, stego):
    curve = roc_from_scores(cover, stego)
    assert curve.auc == brute_auc(cover, stego)
    pts = curve.points
    assert pts[0] == (0.0, 0.0) and pts[-1] == (1.0, 1.0)
    assert all(a[0] <= b[0] and a[1] <= b[1] for a, b in zip(pts, pts[1:]))
    # trapezoidal area over the points agrees up to rounding
    area = sum(Fraction(b[0] - a[0]) * Fraction(a[1] + b[1]) / 2 for a, b in zip(pts, pts[1:]))
    assert float(area) == pytest.approx(curve.auc, abs=1e-12)
