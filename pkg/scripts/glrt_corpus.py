"""Practical detector on a synthetic smooth-scene corpus.

Reports the cover-score distribution and the AUC at several embedding rates
and stabilizer values, which is the quickest way to see how the estimated
noise level interacts with the embedding.
"""
import argparse

import numpy as np

from lsbm.embedder import EmbedConfig, embed_lsb_matching
from lsbm.glrt import GlrtConfig, glrt_statistic
from lsbm.harness import derive_seed, roc_from_scores, smooth_corpus


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--images", type=int, default=500)
    ap.add_argument("--size", type=int, default=64)
    ap.add_argument("--sigma", type=float, default=1.0)
    ap.add_argument("--rates", type=float, nargs="+", default=[0.25, 0.5, 1.0])
    ap.add_argument("--alpha-stab", type=float, nargs="+", default=[0.25, 1.0])
    ap.add_argument("--seed", type=int, default=2012)
    args = ap.parse_args()

    covers = smooth_corpus(args.images, args.seed, dims=(args.size, args.size), sigma=args.sigma)
    stegos = {
        r: [embed_lsb_matching(c, EmbedConfig(r, derive_seed(args.seed, 8, i)))[0] for i, c in enumerate(covers)]
        for r in args.rates
    }
    for a in args.alpha_stab:
        cfg = GlrtConfig(alpha_stab=a)
        h0 = np.array([glrt_statistic(c, cfg) for c in covers])
        aucs = [roc_from_scores(h0, [glrt_statistic(s, cfg) for s in stegos[r]]).auc for r in args.rates]
        auc_txt = "  ".join(f"R={r}: {v:.3f}" for r, v in zip(args.rates, aucs))
        print(f"alpha_stab={a}: cover mean {h0.mean():.3f} sd {h0.std(ddof=1):.3f} | AUC {auc_txt}")


if __name__ == "__main__":
    main()
