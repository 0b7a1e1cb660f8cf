"""Grid import/export.

Two formats:

* PRGF, a flat binary: magic ``PRGF``, version u32 little-endian, width u16,
  height u16, then width*height float64 little-endian, row-major.
* 8-bit binary PGM (P5) for human inspection; values are linearly mapped to
  [0, 255] and the mapping is recorded in the comment line as
  ``# scale=<s> offset=<o>`` meaning ``pixel = round((value - o) * s)``.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

PRGF_MAGIC = b"PRGF"
PRGF_VERSION = 1


class FormatError(ValueError):
    """File does not match the expected on-disk format."""


def write_prgf(path, grid: np.ndarray) -> None:
    a = np.asarray(grid, dtype=np.float64)
    if a.ndim != 2:
        raise FormatError(f"PRGF stores 2-D grids, got shape {a.shape}")
    h, w = a.shape
    if not (0 < w <= 0xFFFF and 0 < h <= 0xFFFF):
        raise FormatError(f"grid {w}x{h} exceeds PRGF u16 dimensions")
    with open(path, "wb") as f:
        f.write(PRGF_MAGIC)
        f.write(struct.pack("<IHH", PRGF_VERSION, w, h))
        f.write(a.astype("<f8", copy=False).tobytes(order="C"))


def read_prgf(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if raw[:4] != PRGF_MAGIC:
        raise FormatError(f"{path}: bad magic {raw[:4]!r}")
    version, w, h = struct.unpack_from("<IHH", raw, 4)
    if version != PRGF_VERSION:
        raise FormatError(f"{path}: unsupported PRGF version {version}")
    need = 12 + 8 * w * h
    if len(raw) != need:
        raise FormatError(f"{path}: expected {need} bytes, found {len(raw)}")
    return np.frombuffer(raw, dtype="<f8", offset=12).reshape(h, w).copy()


def write_pgm(path, grid: np.ndarray) -> None:
    """8-bit P5 export with the linear scaling recorded in the comment."""
    a = np.asarray(grid, dtype=np.float64)
    if a.ndim != 2:
        raise FormatError(f"PGM stores 2-D grids, got shape {a.shape}")
    lo = float(a.min()) if a.size else 0.0
    hi = float(a.max()) if a.size else 0.0
    scale = 255.0 / (hi - lo) if hi > lo else 1.0
    pix = np.rint((a - lo) * scale).clip(0, 255).astype(np.uint8)
    h, w = a.shape
    header = f"P5\n# scale={scale!r} offset={lo!r}\n{w} {h}\n255\n"
    with open(path, "wb") as f:
        f.write(header.encode("ascii"))
        f.write(pix.tobytes(order="C"))


def read_pgm(path) -> tuple[np.ndarray, float, float]:
    """Read a P5 file written by :func:`write_pgm`.

    Returns (pixels as float64 in [0,255], scale, offset); scale/offset are
    1.0/0.0 when no mapping comment is present.
    """
    raw = Path(path).read_bytes()
    if not raw.startswith(b"P5"):
        raise FormatError(f"{path}: not a binary PGM")
    pos, fields, scale, offset = 2, [], 1.0, 0.0
    while len(fields) < 3:
        while pos < len(raw) and raw[pos] in b" \t\r\n":
            pos += 1
        if pos < len(raw) and raw[pos:pos + 1] == b"#":
            end = raw.index(b"\n", pos)
            comment = raw[pos + 1:end].decode("ascii", "replace").strip()
            for part in comment.split():
                if part.startswith("scale="):
                    scale = float(part[6:])
                elif part.startswith("offset="):
                    offset = float(part[7:])
            pos = end + 1
            continue
        start = pos
        while pos < len(raw) and raw[pos] not in b" \t\r\n":
            pos += 1
        fields.append(int(raw[start:pos]))
    w, h, maxval = fields
    if maxval != 255:
        raise FormatError(f"{path}: only maxval 255 supported, got {maxval}")
    pos += 1  # single whitespace after maxval
    pix = np.frombuffer(raw, dtype=np.uint8, count=w * h, offset=pos)
    return pix.reshape(h, w).astype(np.float64), scale, offset
