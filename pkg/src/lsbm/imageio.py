"""Binary PGM (P5, 8-bit) and CSV I/O."""
from __future__ import annotations

import csv
import os
from typing import Iterable, Mapping, Sequence

import numpy as np

from .pixel_model import GrayImage


class PgmError(ValueError):
    pass


class UnsupportedFormatError(PgmError):
    pass


class MalformedHeaderError(PgmError):
    pass


class UnsupportedMaxvalError(PgmError):
    pass


class TruncatedDataError(PgmError):
    pass


def _header_tokens(data: bytes, count: int):
    """Read ``count`` whitespace-separated header tokens after the magic number,
    skipping ``#`` comments. Returns the tokens and the offset of the raster."""
    tokens = []
    i = 2
    n = len(data)
    while len(tokens) < count:
        while i < n and data[i : i + 1].isspace():
            i += 1
        if i >= n:
            raise MalformedHeaderError("header ends prematurely")
        if data[i : i + 1] == b"#":
            while i < n and data[i : i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        start = i
        while i < n and not data[i : i + 1].isspace() and data[i : i + 1] != b"#":
            i += 1
        tokens.append(data[start:i])
    # exactly one whitespace byte separates maxval from the raster
    if i < n and not data[i : i + 1].isspace():
        raise MalformedHeaderError("missing whitespace after maxval")
    return tokens, i + 1


def parse_pgm(data: bytes) -> GrayImage:
    magic = data[:2]
    if magic != b"P5":
        if magic in (b"P1", b"P2", b"P3", b"P4", b"P6"):
            raise UnsupportedFormatError(f"only binary P5 PGM is supported, got {magic.decode()}")
        raise UnsupportedFormatError("not a PGM file")
    tokens, offset = _header_tokens(data, 3)
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError as exc:
        raise MalformedHeaderError(f"non-numeric header field in {tokens!r}") from exc
    if width <= 0 or height <= 0:
        raise MalformedHeaderError(f"bad dimensions {width}x{height}")
    if maxval != 255:
        raise UnsupportedMaxvalError(f"maxval must be 255, got {maxval}")
    need = width * height
    raster = data[offset : offset + need]
    if len(raster) < need:
        raise TruncatedDataError(f"expected {need} pixel bytes, found {len(raster)}")
    px = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return GrayImage(px, 8)


def load_pgm(path) -> GrayImage:
    with open(path, "rb") as fh:
        return parse_pgm(fh.read())


def pgm_bytes(image: GrayImage) -> bytes:
    if image.bit_depth != 8:
        raise ValueError("only 8-bit images can be written as PGM")
    header = f"P5\n{image.width} {image.height}\n255\n".encode("ascii")
    return header + image.pixels.astype(np.uint8).tobytes()


def save_pgm(image: GrayImage, path):
    with open(path, "wb") as fh:
        fh.write(pgm_bytes(image))


def _cell(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def export_csv(rows: Iterable[Mapping], path, fieldnames: Sequence[str]):
    """Write ``rows`` with a header line. Floats use the shortest repr that
    round-trips exactly."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(fieldnames)
        for row in rows:
            writer.writerow([_cell(row[k]) for k in fieldnames])


def read_scores(path, column: str | None = None) -> list[float]:
    """Read one numeric column from a CSV with a header row. Defaults to
    ``statistic`` when present, otherwise the last column."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ValueError(f"{os.fspath(path)}: empty CSV")
        if column is None:
            column = "statistic" if "statistic" in reader.fieldnames else reader.fieldnames[-1]
        if column not in reader.fieldnames:
            raise ValueError(f"{os.fspath(path)}: no column {column!r}")
        return [float(row[column]) for row in reader]
