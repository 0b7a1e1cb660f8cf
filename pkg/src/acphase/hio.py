"""Hybrid Input-Output phase retrieval with multi-trial random restarts.

Operates on the padded 2W x 2W grid produced by
:func:`acphase.grids.modulus_from_autocorrelation`.  Object-domain
constraints are nonnegativity plus a centered square support box (the
autocorrelation extent bounds the object extent at twice the object size,
so the default box side is half the canvas).

The feedback iterate itself never satisfies the measurement, so each trial
reports the constraint-restricted modulus projection of its final state:
the estimate that is actually displayed and scored.  Raw final iterates are
kept as snapshots for diagnostics.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

from .grids import FourierModulus, Image
from .seeds import STREAM_TRIAL, derive_seed


@dataclass(frozen=True)
class HioConfig:
    """Knobs for one retrieval attempt (all trials share them).

    beta is the feedback strength of the input-output update; the
    conventional 0.9 is the default.  support_box is the side of the
    centered square support in padded-grid pixels.
    """

    beta: float = 0.9
    iterations: int = 400
    trials: int = 20
    support_box: int | None = None     # None: half the canvas (W // 2)
    seed: int = 0
    phase_epsilon: float = 1e-12
    polish_iterations: int = 0         # trailing error-reduction steps

    def __post_init__(self):
        if not 0.0 < self.beta <= 1.0:
            raise ValueError(f"beta must be in (0, 1], got {self.beta}")
        if self.iterations < 1 or self.trials < 1:
            raise ValueError("iterations and trials must be >= 1")
        if self.polish_iterations < 0:
            raise ValueError("polish_iterations must be >= 0")

    def box_side(self, padded: int) -> int:
        side = padded // 4 if self.support_box is None else int(self.support_box)
        if not 0 < side <= padded:
            raise ValueError(f"support_box {side} outside (0, {padded}]")
        return side


@dataclass(frozen=True)
class TrialOutcome:
    final_fourier_error: float
    snapshot_id: int


@dataclass(frozen=True)
class RetrievalResult:
    """Best-of-trials output plus per-trial diagnostics.

    ``estimates[i]`` is the constrained estimate of trial i on the padded
    grid, ``snapshots[i]`` the raw final feedback iterate, ``traces[i]``
    (when recorded) the constrained-estimate Fourier error after every
    iteration.
    """

    best_image: Image
    per_trial: tuple[TrialOutcome, ...]
    best_trial_index: int
    estimates: tuple[np.ndarray, ...]
    snapshots: tuple[np.ndarray, ...]
    traces: tuple[np.ndarray, ...] | None = field(default=None)


def _support_mask(padded: int, side: int) -> np.ndarray:
    m = np.zeros((padded, padded), dtype=bool)
    lo = (padded - side) // 2
    m[lo:lo + side, lo:lo + side] = True
    return m


def fourier_error(iterate: np.ndarray, modulus: FourierModulus) -> float:
    """Relative modulus residual sqrt(sum(|DFT(g)| - M)^2 / sum M^2)."""
    m = modulus.data
    if iterate.shape != m.shape:
        raise ValueError(f"iterate {iterate.shape} vs modulus {m.shape}")
    denom = float(np.sum(m * m))
    if denom == 0.0:
        raise ZeroDivisionError("all-zero modulus: Fourier error undefined")
    mag = np.abs(sfft.fft2(iterate))
    return float(np.sqrt(np.sum((mag - m) ** 2) / denom))


def _project_modulus(g: np.ndarray, m: np.ndarray, eps: float) -> np.ndarray:
    spec = sfft.fft2(g)
    mag = np.abs(spec)
    # near-zero amplitudes get phase 1 so the update stays deterministic
    phase = np.where(mag > eps, spec / np.where(mag > eps, mag, 1.0), 1.0)
    return sfft.ifft2(m * phase).real


def hio_step(current: np.ndarray, modulus: FourierModulus, cfg: HioConfig) -> np.ndarray:
    """One Fienup HIO update of the padded real iterate."""
    m = modulus.data
    if current.shape != m.shape:
        raise ValueError(f"iterate {current.shape} vs modulus {m.shape}")
    support = _support_mask(m.shape[0], cfg.box_side(m.shape[0]))
    g2 = _project_modulus(current, m, cfg.phase_epsilon)
    good = (g2 >= 0.0) & support
    return np.where(good, g2, current - cfg.beta * g2)


def _constrained(g2: np.ndarray, support: np.ndarray) -> np.ndarray:
    return np.where((g2 >= 0.0) & support, g2, 0.0)


def _run_trial(modulus: np.ndarray, fm: FourierModulus, support: np.ndarray,
               side: int, cfg: HioConfig, trial_seed: int, record_trace: bool):
    rng = np.random.default_rng(trial_seed)
    g = np.zeros_like(modulus)
    lo = (modulus.shape[0] - side) // 2
    g[lo:lo + side, lo:lo + side] = rng.random((side, side))
    n_total = cfg.iterations + cfg.polish_iterations
    trace = np.empty(n_total, dtype=np.float64) if record_trace else None
    for it in range(cfg.iterations):
        g2 = _project_modulus(g, modulus, cfg.phase_epsilon)
        good = (g2 >= 0.0) & support
        if record_trace:
            trace[it] = fourier_error(np.where(good, g2, 0.0), fm)
        g = np.where(good, g2, g - cfg.beta * g2)
    for it in range(cfg.polish_iterations):
        # error reduction: keep the projection only where constraints hold
        g = _constrained(_project_modulus(g, modulus, cfg.phase_epsilon), support)
        if record_trace:
            trace[cfg.iterations + it] = fourier_error(g, fm)
    estimate = _constrained(_project_modulus(g, modulus, cfg.phase_epsilon), support)
    err = fourier_error(estimate, fm)
    return estimate, g, err, trace


def run_hio(modulus: FourierModulus, cfg: HioConfig,
            record_traces: bool = False, threads: int = 1) -> RetrievalResult:
    """Multi-trial HIO; returns the lowest-residual estimate cropped to canvas.

    Each trial starts from i.i.d. uniform [0, 1) values inside the support
    box, seeded per trial from cfg.seed, so results do not depend on
    execution order or thread count.  Trials are ranked by the Fourier
    residual of their constrained estimates (ground truth is never
    consulted); ties go to the lowest trial index.
    """
    m = modulus.data
    padded = m.shape[0]
    side = cfg.box_side(padded)
    support = _support_mask(padded, side)
    trial_seeds = [derive_seed(cfg.seed, STREAM_TRIAL, i) for i in range(cfg.trials)]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outs = list(pool.map(
                lambda s: _run_trial(m, modulus, support, side, cfg, s, record_traces),
                trial_seeds))
    else:
        outs = [_run_trial(m, modulus, support, side, cfg, s, record_traces)
                for s in trial_seeds]

    errors = [o[2] for o in outs]
    best = int(np.argmin(errors))   # argmin takes the first minimum on ties
    canvas = padded // 2
    lo = (padded - canvas) // 2
    crop = outs[best][0][lo:lo + canvas, lo:lo + canvas]
    return RetrievalResult(
        best_image=Image(np.maximum(crop, 0.0)),
        per_trial=tuple(TrialOutcome(float(e), i) for i, e in enumerate(errors)),
        best_trial_index=best,
        estimates=tuple(o[0] for o in outs),
        snapshots=tuple(o[1] for o in outs),
        traces=tuple(o[3] for o in outs) if record_traces else None,
    )


def write_trace_csv(path, result: RetrievalResult) -> None:
    """Per-trial error traces as CSV: trial, iteration, fourier_error."""
    if result.traces is None:
        raise ValueError("run_hio was called without record_traces")
    with open(path, "w", encoding="ascii", newline="\n") as f:
        f.write("trial,iteration,fourier_error\n")
        for t, trace in enumerate(result.traces):
            for i, e in enumerate(trace, start=1):
                f.write(f"{t},{i},{e:.12g}\n")
