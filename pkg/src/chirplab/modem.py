"""Symbol modulation and dechirp/FFT-peak demodulation.

Dechirping multiplies a received window by the conjugate base chirp, turning
symbol k into a tone at FFT bin k. Truncated windows (reduced symbol period)
are zero-padded to n bins before the transform so the bin-to-symbol map is
independent of the reduction factor.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chirps import IqBuffer, LoraParams, ReductionFactor, _base_ramp

# Floor clamp for the SNR estimate; keeps log10 finite when the non-peak
# bins are numerically zero (noiseless input).
NOISE_FLOOR_MIN = 1e-12


class LengthMismatchError(ValueError):
    """A buffer or file does not contain the number of samples implied by its parameters."""


@dataclass(frozen=True)
class DemodResult:
    """One demodulated symbol with its transform-peak statistics."""

    symbol: int
    peak_magnitude: float
    noise_floor: float
    snr_estimate_db: float


def modulate(symbols, params: LoraParams, rf: ReductionFactor) -> IqBuffer:
    """Concatenate the first m samples of the shifted upchirp for each symbol."""
    symbols = np.asarray(symbols, dtype=np.int64)
    n = params.n
    if symbols.size and (symbols.min() < 0 or symbols.max() >= n):
        raise ValueError(f"symbols must be in [0, {n})")
    m = rf.m(params)
    if symbols.size == 0:
        return IqBuffer(np.empty(0, dtype=np.complex128), params.bw)
    ramp = _base_ramp(n)
    rows = ramp[(np.arange(m)[None, :] + symbols[:, None]) % n]
    return IqBuffer(rows.reshape(-1), params.bw)


def dechirp(window: IqBuffer, params: LoraParams) -> IqBuffer:
    """Multiply a window (at most one symbol long) by the leading base-downchirp samples."""
    n = params.n
    if len(window) > n:
        raise ValueError(f"window of {len(window)} samples exceeds symbol length {n}")
    down = np.conj(_base_ramp(n)[: len(window)])
    return IqBuffer(window.samples * down, window.sample_rate)


def spectrum_magnitude(dechirped: IqBuffer, params: LoraParams) -> np.ndarray:
    """Magnitudes of the n-point transform of a dechirped window, zero-padded to n."""
    n = params.n
    if len(dechirped) > n:
        raise ValueError(f"input of {len(dechirped)} samples exceeds transform size {n}")
    return np.abs(np.fft.fft(dechirped.samples, n=n))


def _window_spectra(windows: np.ndarray, params: LoraParams) -> np.ndarray:
    """Dechirp + transform for a (count, m) block of symbol windows."""
    m = windows.shape[1]
    down = np.conj(_base_ramp(params.n)[:m])
    return np.abs(np.fft.fft(windows * down[None, :], n=params.n, axis=1))


def decide_symbols(windows: np.ndarray, params: LoraParams) -> np.ndarray:
    """Hard symbol decisions for a (count, m) block: argmax bin per window.

    Same dechirp/transform/argmax pipeline as demodulate, without the
    peak statistics; intended for Monte-Carlo trial loops.
    """
    mags = _window_spectra(windows, params)
    return mags.argmax(axis=1)


def _results_from_spectra(mags: np.ndarray) -> list[DemodResult]:
    count, n = mags.shape
    # argmax takes the lowest bin on ties
    symbols = mags.argmax(axis=1)
    peaks = mags[np.arange(count), symbols]
    masked = mags.copy()
    masked[np.arange(count), symbols] = np.nan
    floors = np.nanmedian(masked, axis=1)
    # both clamped: a zero-signal window reports 0 dB margin instead of -inf
    snr_db = 20.0 * np.log10(np.maximum(peaks, NOISE_FLOOR_MIN) / np.maximum(floors, NOISE_FLOOR_MIN))
    return [
        DemodResult(int(s), float(p), float(f), float(d))
        for s, p, f, d in zip(symbols, peaks, floors, snr_db)
    ]


def demodulate_symbol(window: IqBuffer, params: LoraParams) -> DemodResult:
    """Decode one symbol window: peak bin, peak magnitude, and median noise floor."""
    if len(window) == 0:
        raise ValueError("cannot demodulate an empty window")
    mags = _window_spectra(window.samples[None, :], params)
    return _results_from_spectra(mags)[0]


def demodulate(buf: IqBuffer, params: LoraParams, rf: ReductionFactor, count: int) -> list[DemodResult]:
    """Slice buf into count consecutive m-sample windows and decode each."""
    m = rf.m(params)
    if count < 0:
        raise ValueError("count must be non-negative")
    if count == 0:
        return []
    if len(buf) < count * m:
        raise LengthMismatchError(
            f"buffer has {len(buf)} samples, need {count * m} for {count} symbols at beta={rf.beta}"
        )
    windows = buf.samples[: count * m].reshape(count, m)
    return _results_from_spectra(_window_spectra(windows, params))


def symbols_to_bits(symbols, sf: int) -> np.ndarray:
    """Natural-binary bit expansion, sf bits per symbol, most significant first."""
    symbols = np.asarray(symbols, dtype=np.int64)
    shifts = np.arange(sf - 1, -1, -1)
    return ((symbols[:, None] >> shifts[None, :]) & 1).reshape(-1)


def bit_errors(sent, received, sf: int) -> int:
    """Number of differing natural-binary bits between two symbol sequences."""
    diff = np.asarray(sent, dtype=np.int64) ^ np.asarray(received, dtype=np.int64)
    total = 0
    for i in range(sf):
        total += int(((diff >> i) & 1).sum())
    return total
