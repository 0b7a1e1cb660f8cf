"""Autocorrelation arithmetic on fixed centered grids.

Conventions used throughout the package:

* canvases are square with an even side W; the zero lag of an
  autocorrelation sits at integer index (W//2, W//2),
* autocorrelations are *linear* (non-circular): the canvas is embedded in a
  2W x 2W zero grid before transforming, and the centered W x W window of
  the result is returned.  The crop is lossless whenever the object support
  fits the centered W/2 x W/2 "safe box",
* Fourier moduli live on the padded 2W x 2W grid with the zero frequency at
  index (0, 0) (plain FFT layout),
* array axis 0 is y (rows), axis 1 is x (columns).

All arithmetic is double precision; the 1e-9 tolerances quoted in the test
suite are not reachable in single precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft


class DimensionError(ValueError):
    """Grid is non-square, odd-sized, or mismatched with its partner."""


def _as_grid(data, name: str) -> np.ndarray:
    a = np.array(data, dtype=np.float64, order="C")  # owned copy
    if a.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {a.shape}")
    h, w = a.shape
    if h != w:
        raise DimensionError(f"{name} must be square, got {h}x{w}")
    if w == 0 or w % 2:
        raise DimensionError(f"{name} side must be even and positive, got {w}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite values")
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Image:
    """Nonnegative intensity grid on a square, even-sided canvas."""

    data: np.ndarray

    def __post_init__(self):
        a = _as_grid(self.data, "Image")
        if a.min() < 0.0:
            raise ValueError("Image intensities must be >= 0")
        object.__setattr__(self, "data", a)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True)
class Autocorrelation:
    """Centered real grid holding a (possibly disk-masked) autocorrelation.

    ``truncated`` is set when the source support was too large for the
    centered crop to be lossless.
    """

    data: np.ndarray
    truncated: bool = field(default=False)

    def __post_init__(self):
        object.__setattr__(self, "data", _as_grid(self.data, "Autocorrelation"))

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def center(self) -> tuple[int, int]:
        return (self.data.shape[0] // 2, self.data.shape[1] // 2)


@dataclass(frozen=True)
class DiskMask:
    """Keep-inside disk of radius ``radius_px`` around ``center`` (row, col).

    A pixel is kept iff its Euclidean distance from the center is <= the
    radius, so nested radii give nested kept sets.
    """

    radius_px: float
    center: tuple[int, int]

    def __post_init__(self):
        if not np.isfinite(self.radius_px) or self.radius_px < 0:
            raise ValueError(f"mask radius must be >= 0, got {self.radius_px}")
        object.__setattr__(self, "center", (int(self.center[0]), int(self.center[1])))

    def kept(self, shape: tuple[int, int]) -> np.ndarray:
        """Boolean grid of pixels inside the disk."""
        cy, cx = self.center
        yy = np.arange(shape[0])[:, None] - cy
        xx = np.arange(shape[1])[None, :] - cx
        return yy * yy + xx * xx <= self.radius_px * self.radius_px


@dataclass(frozen=True)
class FourierModulus:
    """Nonnegative spectral magnitudes on the padded 2W x 2W grid."""

    data: np.ndarray

    def __post_init__(self):
        a = _as_grid(self.data, "FourierModulus")
        if a.min() < 0.0:
            raise ValueError("FourierModulus values must be >= 0")
        object.__setattr__(self, "data", a)

    @property
    def size(self) -> int:
        return self.data.shape[0]


def flip180(a: np.ndarray) -> np.ndarray:
    """Reverse both axes (the centrosymmetric twin of an image)."""
    return np.flip(np.flip(a, axis=0), axis=1)


# ---------------------------------------------------------------------------
# autocorrelation
# ---------------------------------------------------------------------------

def _support_bbox(a: np.ndarray):
    """(y0, y1, x0, x1) half-open bounding box of nonzero pixels, or None."""
    ys = np.flatnonzero(a.any(axis=1))
    if ys.size == 0:
        return None
    xs = np.flatnonzero(a.any(axis=0))
    return int(ys[0]), int(ys[-1]) + 1, int(xs[0]), int(xs[-1]) + 1


def _canonical_embed(x: np.ndarray, pad: int, dtype=np.float64) -> tuple[np.ndarray, int, int]:
    """Embed the support of ``x`` in a pad x pad zero grid in canonical pose.

    The support bounding box is centered on the grid and the orientation is
    fixed by lexicographic comparison against the 180-degree twin.  Because
    the autocorrelation is blind to global translation and flips, computing
    it from the canonical pose makes those invariances hold bit-exactly, not
    just to rounding.
    """
    out = np.zeros((pad, pad), dtype=dtype)
    box = _support_bbox(x)
    if box is None:
        return out, 0, 0
    y0, y1, x0, x1 = box
    sub = x[y0:y1, x0:x1]
    twin = flip180(sub)
    flat, tflat = sub.ravel(), twin.ravel()
    neq = np.flatnonzero(flat != tflat)
    if neq.size and tflat[neq[0]] > flat[neq[0]]:
        sub = twin
    h, w = sub.shape
    r0 = pad // 2 - h // 2
    c0 = pad // 2 - w // 2
    out[r0:r0 + h, c0:c0 + w] = sub
    return out, h, w


def _autocorr_values(x: np.ndarray, dtype=np.float64) -> tuple[np.ndarray, bool]:
    """Centered W x W linear autocorrelation of a W x W array.

    Returns the value grid and a truncation flag (True when lags outside the
    centered window were lost).  dtype float32 selects a complex64 transform
    path; float64 the complex128 one.
    """
    w = x.shape[0]
    pad = 2 * w
    emb, bh, bw = _canonical_embed(x, pad, dtype=dtype)
    cdtype = np.complex64 if dtype == np.float32 else np.complex128
    spec = sfft.fft2(emb.astype(cdtype))
    power = spec.real * spec.real + spec.imag * spec.imag
    full = sfft.ifft2(power).real
    full = sfft.fftshift(full)           # zero lag now at (pad//2, pad//2)
    lo = w // 2
    ac = full[lo:lo + w, lo:lo + w].copy()   # zero lag at (w//2, w//2)
    # lags beyond the support extent are exactly zero in exact arithmetic;
    # scrub the FFT rounding noise there so masks that keep the whole
    # support are true no-ops.
    c = w // 2
    ky = np.arange(w)[:, None] - c
    kx = np.arange(w)[None, :] - c
    ac[(np.abs(ky) > bh - 1) | (np.abs(kx) > bw - 1)] = 0.0
    truncated = bh > w // 2 or bw > w // 2
    return ac.astype(dtype, copy=False), truncated


def autocorrelate(img: Image | np.ndarray) -> Autocorrelation:
    """Linear autocorrelation of an image, on the same-size centered grid.

    The canvas is zero-padded to 2W x 2W, the squared spectral magnitude is
    inverse-transformed, and the centered W x W window is returned with the
    zero lag at (W//2, W//2).  Pure and deterministic; the result is
    invariant (bit-exactly) under translations that keep the support inside
    the safe box and under 180-degree flips.
    """
    x = img.data if isinstance(img, Image) else _as_grid(img, "image")
    vals, truncated = _autocorr_values(np.asarray(x, dtype=np.float64))
    return Autocorrelation(vals, truncated=truncated)


def modulus_from_autocorrelation(ac: Autocorrelation | np.ndarray) -> FourierModulus:
    """Fourier modulus estimate from a (possibly masked) autocorrelation.

    The W x W autocorrelation is embedded centered in a 2W x 2W zero grid
    and transformed; negative lobes of the real spectrum (which appear when
    the autocorrelation was eroded) are clamped to zero before the square
    root.  For an unmasked autocorrelation of x this equals |DFT(pad(x))|
    up to rounding.
    """
    a = ac.data if isinstance(ac, Autocorrelation) else _as_grid(ac, "autocorrelation")
    w = a.shape[0]
    pad = 2 * w
    emb = np.zeros((pad, pad), dtype=np.float64)
    lo = w // 2
    emb[lo:lo + w, lo:lo + w] = a
    emb = sfft.ifftshift(emb)            # zero lag to index (0, 0)
    spec = sfft.fft2(emb).real
    np.maximum(spec, 0.0, out=spec)
    return FourierModulus(np.sqrt(spec))


def apply_disk_mask(ac: Autocorrelation, mask: DiskMask) -> Autocorrelation:
    """Erase the autocorrelation outside the disk; inside is bit-identical."""
    if mask.center != ac.center:
        raise ValueError(f"mask center {mask.center} != grid center {ac.center}")
    keep = mask.kept(ac.data.shape)
    out = np.where(keep, ac.data, 0.0)
    return Autocorrelation(out, truncated=ac.truncated)


def centrosymmetry_residual(ac: Autocorrelation | np.ndarray) -> float:
    """Worst asymmetry |a[c+k] - a[c-k]| over paired lags, relative to max|a|.

    Returns 0.0 for the all-zero grid.  Row/column 0 of an even grid has no
    mirror partner and is excluded.
    """
    a = ac.data if isinstance(ac, Autocorrelation) else np.asarray(ac, dtype=np.float64)
    peak = np.abs(a).max()
    if peak == 0.0:
        return 0.0
    core = a[1:, 1:]
    return float(np.abs(core - flip180(core)).max() / peak)
