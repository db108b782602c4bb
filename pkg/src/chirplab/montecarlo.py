"""Vectorized Monte-Carlo trial engine shared by calibration and the sweeps.

Seed splitting: every (sf, beta, snr) evaluation owns an independent Philox
stream derived from SeedSequence([master_seed, stream_tag, sf, beta_milli,
snr_centi_db + SNR_OFFSET]). The key depends only on the evaluation's
parameters, never on visit order, so bisection paths and row order cannot
change results and any single CSV row is reproducible on its own.
"""
from __future__ import annotations

import numpy as np

from .channel import add_noise
from .chirps import LoraParams, ReductionFactor, _base_ramp
from .modem import bit_errors, decide_symbols

# Stream tags decouple experiments that share a master seed.
TAG_PEAK = 0
TAG_BER = 1
TAG_CALIBRATION = 2

SNR_OFFSET = 1 << 24  # keeps the snr entropy word non-negative
_CHUNK = 8192


def derive_rng(master_seed: int, tag: int, sf: int, beta: float, snr_db: float) -> np.random.Generator:
    """Philox generator for one (sf, beta, snr) evaluation under a master seed."""
    entropy = [int(master_seed), int(tag), int(sf), round(beta * 1000), round(snr_db * 100) + SNR_OFFSET]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def _noisy_windows(ramp: np.ndarray, symbols: np.ndarray, m: int, snr_db: float,
                   rng: np.random.Generator) -> np.ndarray:
    n = len(ramp)
    rows = ramp[(np.arange(m)[None, :] + symbols[:, None]) % n]
    return add_noise(rows, snr_db, rng)


def run_error_trials(params: LoraParams, rf: ReductionFactor, snr_db: float, trials: int,
                     master_seed: int, tag: int = TAG_BER) -> tuple[float, float]:
    """Transmit random symbols through AWGN and return (ser, ber).

    BER uses the natural-binary mapping, sf bits per symbol. Chunked
    internally with a fixed chunk size so results depend only on the seed.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = derive_rng(master_seed, tag, params.sf, rf.beta, snr_db)
    ramp = _base_ramp(params.n)
    m = rf.m(params)
    sym_errs = 0
    biterrs = 0
    done = 0
    while done < trials:
        count = min(_CHUNK, trials - done)
        sent = rng.integers(0, params.n, count)
        decided = decide_symbols(_noisy_windows(ramp, sent, m, snr_db, rng), params)
        sym_errs += int((decided != sent).sum())
        biterrs += bit_errors(sent, decided, params.sf)
        done += count
    return sym_errs / trials, biterrs / (trials * params.sf)


def symbol_error_rate(params: LoraParams, rf: ReductionFactor, snr_db: float, trials: int,
                      master_seed: int, tag: int = TAG_CALIBRATION) -> float:
    """Symbol error rate over `trials` random symbols; deterministic given the seed."""
    ser, _ = run_error_trials(params, rf, snr_db, trials, master_seed, tag)
    return ser


def peak_statistics(params: LoraParams, rf: ReductionFactor, snr_db: float, trials: int,
                    master_seed: int) -> tuple[float, np.ndarray]:
    """Mean transform-peak magnitude over trials, plus trial 0's full bin magnitudes."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = derive_rng(master_seed, TAG_PEAK, params.sf, rf.beta, snr_db)
    ramp = _base_ramp(params.n)
    m = rf.m(params)
    down = np.conj(ramp[:m])
    peak_sum = 0.0
    first_bins = None
    done = 0
    while done < trials:
        count = min(_CHUNK, trials - done)
        sent = rng.integers(0, params.n, count)
        windows = _noisy_windows(ramp, sent, m, snr_db, rng)
        mags = np.abs(np.fft.fft(windows * down[None, :], n=params.n, axis=1))
        if first_bins is None:
            first_bins = mags[0].copy()
        peak_sum += float(mags.max(axis=1).sum())
        done += count
    return peak_sum / trials, first_bins
