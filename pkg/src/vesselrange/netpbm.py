"""Minimal binary PGM (P5) / PPM (P6) reading and writing."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import MaskFormatError

__all__ = ["read_pnm", "write_pgm", "write_ppm", "encode_pgm", "encode_ppm"]


def _tokens(data: bytes, count: int):
    """Read ``count`` whitespace separated header tokens, skipping comments."""
    tokens = []
    pos = 0
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos < n and data[pos : pos + 1] == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise MaskFormatError("truncated header")
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates the header from the raster
    if pos >= n or not data[pos : pos + 1].isspace():
        raise MaskFormatError("truncated header")
    return tokens, pos + 1


def read_pnm(source) -> np.ndarray:
    """Parse an 8-bit P5 or P6 image from a path or bytes.

    Returns an ``(h, w)`` uint8 array for P5 and ``(h, w, 3)`` for P6.
    """
    data = source if isinstance(source, (bytes, bytearray)) else Path(source).read_bytes()
    if len(data) < 2 or data[:2] not in (b"P5", b"P6"):
        raise MaskFormatError("not a binary PGM/PPM file (expected P5 or P6 magic)")
    channels = 1 if data[:2] == b"P5" else 3
    tokens, offset = _tokens(data[2:], 3)
    offset += 2
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise MaskFormatError(f"non-integer header fields {tokens!r}") from None
    if width <= 0 or height <= 0:
        raise MaskFormatError(f"invalid image size {width}x{height}")
    if maxval != 255:
        raise MaskFormatError(f"only 8-bit images are supported, maxval={maxval}")
    expected = width * height * channels
    raster = data[offset:]
    if len(raster) < expected:
        raise MaskFormatError(f"truncated raster: expected {expected} bytes, found {len(raster)}")
    if len(raster) > expected:
        raise MaskFormatError(f"trailing data after raster ({len(raster) - expected} bytes)")
    arr = np.frombuffer(raster, dtype=np.uint8)
    shape = (height, width) if channels == 1 else (height, width, 3)
    return arr.reshape(shape).copy()


def encode_pgm(image: np.ndarray) -> bytes:
    img = np.ascontiguousarray(image, dtype=np.uint8)
    h, w = img.shape
    return b"P5\n%d %d\n255\n" % (w, h) + img.tobytes()


def encode_ppm(image: np.ndarray) -> bytes:
    img = np.ascontiguousarray(image, dtype=np.uint8)
    h, w, _ = img.shape
    return b"P6\n%d %d\n255\n" % (w, h) + img.tobytes()


def write_pgm(path, image: np.ndarray) -> None:
    Path(path).write_bytes(encode_pgm(image))


def write_ppm(path, image: np.ndarray) -> None:
    Path(path).write_bytes(encode_ppm(image))
