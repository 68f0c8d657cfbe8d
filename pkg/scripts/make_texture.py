"""Regenerate the bundled 128x128 test texture (src/lsbm/data/texture.pgm).

The texture stands in for a natural image: smooth shading, a few soft edges
and some fine detail, kept away from saturation.
"""
import argparse
from pathlib import Path

import numpy as np
from scipy.ndimage import gaussian_filter

from lsbm.imageio import save_pgm
from lsbm.pixel_model import GrayImage

OUT = Path(__file__).resolve().parents[1] / "src" / "lsbm" / "data" / "texture.pgm"


def make_texture(size=128, seed=2012):
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:size, 0:size] / size
    shading = 120 + 50 * np.sin(2.1 * np.pi * x + 0.4) * np.cos(1.3 * np.pi * y - 0.2)
    blobs = gaussian_filter(rng.normal(size=(size, size)), 6) * 300
    edges = 35 * (np.hypot(x - 0.62, y - 0.38) < 0.22) - 25 * (x + 0.5 * y > 1.15)
    detail = gaussian_filter(rng.normal(size=(size, size)), 1.2) * 12
    img = gaussian_filter(shading + blobs + edges, 1.0) + detail
    return np.clip(np.rint(img), 30, 225).astype(np.uint8)


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=OUT)
    args = ap.parse_args()
    tex = make_texture()
    save_pgm(GrayImage(tex), args.out)
    print(f"wrote {args.out} min={tex.min()} max={tex.max()} mean={tex.mean():.1f}")
