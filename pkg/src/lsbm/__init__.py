"""Likelihood-ratio steganalysis of LSB matching under a quantized Gaussian pixel model."""
from .embedder import EmbedConfig, EmbedReport, embed_lsb_matching, empirical_pmf
from .glrt import GlrtConfig, detect, glrt_statistic
from .harness import ExperimentConfig, SceneSpec, mc_verify, roc_from_scores, synth_cover
from .imageio import export_csv, load_pgm, save_pgm
from .lrt import (
    Hypothesis,
    MomentSet,
    ParamField,
    TestOutcome,
    decide,
    log_lr_pixel,
    moments_general,
    moments_r2,
    normalized_statistic,
    power_general,
    power_r2,
    threshold,
)
from .pixel_model import GrayImage, PixelParams, QuantizedPmf, cover_pmf, quantize, stego_pmf

__version__ = "0.1.0"
