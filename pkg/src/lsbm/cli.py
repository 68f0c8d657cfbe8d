"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 unreadable or malformed data.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import glrt, harness, lrt
from .embedder import EmbedConfig, embed_lsb_matching
from .imageio import PgmError, export_csv, load_pgm, read_scores, save_pgm

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text: str):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _int_list(text: str):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _load(path):
    try:
        return load_pgm(path)
    except (OSError, PgmError) as exc:
        raise DataError(f"{path}: {exc}") from exc


def cmd_embed(args):
    cover = _load(args.inp)
    try:
        config = EmbedConfig(args.rate, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    stego, report = embed_lsb_matching(cover, config)
    save_pgm(stego, args.out)
    summary = {
        "pixels": cover.size,
        "pixels_carrying": report.pixels_carrying,
        "pixels_changed": report.pixels_changed,
        "rate": args.rate,
        "seed": args.seed,
    }
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
    print(" ".join(f"{k}={v}" for k, v in summary.items()))


def cmd_detect(args):
    image = _load(args.inp)
    try:
        config = glrt.GlrtConfig(alpha_stab=args.alpha_stab, threshold=args.threshold)
        outcome = glrt.detect(image, config)
    except ValueError as exc:
        raise DataError(f"{args.inp}: {exc}") from exc
    print(f"statistic={outcome.statistic!r} decision={outcome.decision}")
    if args.verbose:
        print(
            f"{args.inp}: {image.width}x{image.height}, threshold {outcome.threshold}, "
            f"alpha_stab {args.alpha_stab}",
            file=sys.stderr,
        )


def _score_file(path, config):
    return glrt.glrt_statistic(_load(path), config)


def cmd_scan(args):
    root = Path(args.dir)
    if not root.is_dir():
        raise DataError(f"{root}: not a directory")
    files = sorted(p for p in root.iterdir() if p.suffix.lower() == ".pgm" and p.is_file())
    config = glrt.GlrtConfig(alpha_stab=args.alpha_stab)
    try:
        if args.workers > 1:
            with ThreadPoolExecutor(max_workers=args.workers) as pool:
                scores = list(pool.map(lambda p: _score_file(p, config), files))
        else:
            scores = [_score_file(p, config) for p in files]
    except ValueError as exc:
        raise DataError(str(exc)) from exc
    rows = [{"filename": p.name, "statistic": s} for p, s in zip(files, scores)]
    export_csv(rows, args.out, ["filename", "statistic"])
    digest = hashlib.sha256()
    for p in files:
        digest.update(p.name.encode())
        digest.update(p.read_bytes())
    print(f"images={len(files)} corpus_sha256={digest.hexdigest()}")


def cmd_roc(args):
    try:
        cover = read_scores(args.cover, args.column)
        stego = read_scores(args.stego, args.column)
        curve = harness.roc_from_scores(cover, stego)
    except (OSError, ValueError) as exc:
        raise DataError(str(exc)) from exc
    rows = [{"false_alarm": f, "detection": d} for f, d in curve.points]
    export_csv(rows, args.out, ["false_alarm", "detection"])
    print(f"auc={curve.auc!r}")


def cmd_power_curve(args):
    if not args.sigma > 0:
        raise UsageError("--sigma must be positive")
    if not all(0 < a < 1 for a in args.alpha):
        raise UsageError("--alpha values must lie in (0, 1)")
    if not all(0 <= r <= 1 for r in args.rates):
        raise UsageError("--rates must lie in [0, 1]")
    rows = []
    for n in args.n:
        m = lrt.moments_r2(lrt.ParamField.constant(args.theta, args.sigma, 1))
        for alpha0 in args.alpha:
            for rate in args.rates:
                rows.append(
                    {
                        "n_pixels": n,
                        "alpha0": alpha0,
                        "rate": rate,
                        "power": lrt.power_general(alpha0, m, n, rate),
                    }
                )
    fields = ["n_pixels", "alpha0", "rate", "power"]
    if args.out:
        export_csv(rows, args.out, fields)
    else:
        print(",".join(fields))
        for r in rows:
            print(",".join(repr(r[k]) if isinstance(r[k], float) else str(r[k]) for k in fields))


def cmd_mc_verify(args):
    try:
        config = harness.load_config(args.config)
    except OSError as exc:
        raise DataError(f"{args.config}: {exc}") from exc
    except ValueError as exc:
        raise DataError(f"{args.config}: {exc}") from exc
    rows = harness.mc_verify(config, workers=args.workers)
    export_csv(rows, args.out, harness.RESULT_FIELDS)
    print(f"rows={len(rows)} out={os.fspath(args.out)}")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="lsbm", description="LSB-matching steganalysis by likelihood-ratio testing.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("embed", help="simulate LSB matching on a PGM cover")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--report", help="also write the embedding report as JSON")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("detect", help="practical GLRT statistic and decision for one image")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--alpha-stab", type=float, default=glrt.DEFAULT_ALPHA_STAB)
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("scan", help="score every .pgm in a directory")
    p.add_argument("--dir", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--alpha-stab", type=float, default=glrt.DEFAULT_ALPHA_STAB)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("roc", help="empirical ROC from cover and stego score CSVs")
    p.add_argument("--cover", required=True)
    p.add_argument("--stego", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--column", help="score column (default: statistic, else last column)")
    p.set_defaults(func=cmd_roc)

    p = sub.add_parser("power-curve", help="asymptotic power of the known-parameter test")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--n", type=_int_list, required=True, help="pixel counts, comma-separated")
    p.add_argument("--alpha", type=_float_list, required=True, help="false-alarm levels")
    p.add_argument("--rates", type=_float_list, required=True, help="embedding rates")
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_power_curve)

    p = sub.add_parser("mc-verify", help="Monte-Carlo check of false-alarm rate and power")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_mc_verify)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        args.func(args)
    except UsageError as exc:
        print(f"lsbm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"lsbm: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"lsbm: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
