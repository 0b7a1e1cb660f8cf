"""acphase: image reconstruction from complete or disk-masked autocorrelations."""

__version__ = "0.1.0"

from .grids import (
    Autocorrelation,
    DimensionError,
    DiskMask,
    FourierModulus,
    Image,
    apply_disk_mask,
    autocorrelate,
    centrosymmetry_residual,
    flip180,
    modulus_from_autocorrelation,
)
from .hio import HioConfig, RetrievalResult, fourier_error, hio_step, run_hio

__all__ = [
    "Autocorrelation",
    "DimensionError",
    "DiskMask",
    "FourierModulus",
    "HioConfig",
    "Image",
    "RetrievalResult",
    "apply_disk_mask",
    "autocorrelate",
    "centrosymmetry_residual",
    "flip180",
    "fourier_error",
    "hio_step",
    "modulus_from_autocorrelation",
    "run_hio",
]
