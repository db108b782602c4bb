"""Physical-layer packet assembly, synchronization, and airtime accounting.

Frame layout (sample-exact): preamble_len base upchirps, 2.25 base downchirps
(two full plus the first n/4 samples of a third, used only as a spacer), then
three full-period header symbols [payload length, beta index, checksum], then
the payload modulated at the reduced period. Preamble and header always use
the full symbol period; only payload symbols are truncated.

The header checksum is (length + beta_index) mod n. The beta index code is
defined by chirps.BETA_TABLE (index i encodes beta = 1 - i/8).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chirps import (
    BETA_TABLE,
    FULL_PERIOD,
    IqBuffer,
    LoraParams,
    ReductionFactor,
    _base_ramp,
)
from .modem import (
    DemodResult,
    LengthMismatchError,
    _results_from_spectra,
    _window_spectra,
    demodulate,
    modulate,
)

DEFAULT_PREAMBLE_LEN = 8
# Minimum peak-over-floor ratio for a window to count as a preamble hit;
# the max/median ratio of pure-noise spectra stays well below this.
PREAMBLE_PEAK_RATIO = 4.0


class PreambleNotFoundError(Exception):
    """No sample offset produced a qualifying run of preamble decisions."""


class ChecksumMismatchError(Exception):
    """Header checksum symbol does not match length + beta index."""


class UnknownBetaIndexError(Exception):
    """Header beta-index symbol is outside the defined code table."""


@dataclass(frozen=True)
class FrameSpec:
    """Payload symbols plus the framing parameters that wrap them."""

    payload: tuple
    rf: ReductionFactor
    preamble_len: int = DEFAULT_PREAMBLE_LEN

    def __post_init__(self):
        object.__setattr__(self, "payload", tuple(int(s) for s in self.payload))
        if self.preamble_len < 1:
            raise ValueError("preamble_len must be >= 1")

    def header_symbols(self, params: LoraParams) -> tuple[int, int, int]:
        """(length, beta index, checksum) for this spec; all in [0, n)."""
        n = params.n
        if len(self.payload) >= n:
            raise ValueError(f"payload of {len(self.payload)} symbols does not fit a length symbol (< {n})")
        length = len(self.payload)
        checksum = (length + self.rf.index) % n
        return length, self.rf.index, checksum


@dataclass(frozen=True)
class FrameDiagnostics:
    """Per-symbol demodulation results from a decoded frame."""

    header: list[DemodResult]
    payload: list[DemodResult]


@dataclass(frozen=True)
class AirtimeReport:
    """Airtime of one frame, split by section, with the truncation saving."""

    preamble_s: float
    header_s: float
    payload_s: float
    total_s: float = field(init=False)
    saving_s: float = 0.0
    effective_symbol_rate: float = 0.0
    preamble_samples: int = 0
    header_samples: int = 0
    payload_samples: int = 0

    def __post_init__(self):
        object.__setattr__(self, "total_s", self.preamble_s + self.header_s + self.payload_s)

    @property
    def total_samples(self) -> int:
        return self.preamble_samples + self.header_samples + self.payload_samples


def _downchirp_spacer(params: LoraParams) -> np.ndarray:
    n = params.n
    down = np.conj(_base_ramp(n))
    return np.concatenate([down, down, down[: n // 4]])


def build_frame(spec: FrameSpec, params: LoraParams) -> IqBuffer:
    """Assemble the full frame waveform; every section at critical sampling."""
    n = params.n
    header = spec.header_symbols(params)
    up = _base_ramp(n)
    parts = [np.tile(up, spec.preamble_len), _downchirp_spacer(params)]
    parts.append(modulate(header, params, FULL_PERIOD).samples)
    if spec.payload:
        parts.append(modulate(spec.payload, params, spec.rf).samples)
    return IqBuffer(np.concatenate(parts), params.bw)


def detect_preamble(buf: IqBuffer, params: LoraParams,
                    preamble_len: int = DEFAULT_PREAMBLE_LEN,
                    peak_ratio: float = PREAMBLE_PEAK_RATIO) -> int:
    """Locate the preamble start to integer-sample alignment.

    Slides full-symbol dechirp windows in whole-symbol steps from every
    candidate alignment in [0, n) and looks for at least preamble_len - 1
    consecutive bin-0 decisions whose peak-over-floor ratio clears
    peak_ratio. Returns the sample offset where the earliest qualifying run
    begins; raises PreambleNotFoundError when nothing qualifies.
    """
    n = params.n
    if len(buf) < n:
        raise PreambleNotFoundError("buffer shorter than one symbol")
    need = max(1, preamble_len - 1)
    best = None
    for align in range(n):
        count = (len(buf) - align) // n
        if count < need:
            continue
        windows = buf.samples[align: align + count * n].reshape(count, n)
        mags = _window_spectra(windows, params)
        peaks = mags.max(axis=1)
        hit = (mags.argmax(axis=1) == 0)
        masked = mags.copy()
        masked[np.arange(count), mags.argmax(axis=1)] = np.nan
        floors = np.maximum(np.nanmedian(masked, axis=1), 1e-30)
        hit &= (peaks / floors) >= peak_ratio
        run = 0
        for i, ok in enumerate(hit):
            run = run + 1 if ok else 0
            if run >= need:
                start = align + (i - run + 1) * n
                if best is None or start < best:
                    best = start
                break
    if best is None:
        raise PreambleNotFoundError("no preamble run found above the peak-ratio threshold")
    return best


def decode_frame(buf: IqBuffer, offset: int, params: LoraParams,
                 preamble_len: int = DEFAULT_PREAMBLE_LEN) -> tuple[list[int], ReductionFactor, FrameDiagnostics]:
    """Decode header and payload of a frame whose preamble starts at offset."""
    n = params.n
    header_start = offset + preamble_len * n + 2 * n + n // 4
    if len(buf) < header_start + 3 * n:
        raise LengthMismatchError("buffer truncated before the end of the header")
    header_windows = buf.samples[header_start: header_start + 3 * n].reshape(3, n)
    header_results = _results_from_spectra(_window_spectra(header_windows, params))
    length_sym, beta_sym, checksum_sym = (r.symbol for r in header_results)
    if (length_sym + beta_sym) % n != checksum_sym:
        raise ChecksumMismatchError(
            f"header checksum {checksum_sym} != ({length_sym} + {beta_sym}) mod {n}"
        )
    if beta_sym >= len(BETA_TABLE):
        raise UnknownBetaIndexError(f"beta index {beta_sym} outside table of {len(BETA_TABLE)} entries")
    rf = ReductionFactor.from_index(beta_sym)
    payload_start = header_start + 3 * n
    payload_buf = IqBuffer(buf.samples[payload_start:], params.bw)
    payload_results = demodulate(payload_buf, params, rf, length_sym)
    payload = [r.symbol for r in payload_results]
    return payload, rf, FrameDiagnostics(header=header_results, payload=payload_results)


def time_on_air(spec: FrameSpec, params: LoraParams) -> AirtimeReport:
    """Airtime accounting from exact integer sample counts."""
    n = params.n
    spec.header_symbols(params)  # validates payload length
    m = spec.rf.m(params)
    preamble_samples = spec.preamble_len * n + 2 * n + n // 4
    header_samples = 3 * n
    payload_samples = len(spec.payload) * m
    return AirtimeReport(
        preamble_s=preamble_samples / params.bw,
        header_s=header_samples / params.bw,
        payload_s=payload_samples / params.bw,
        saving_s=time_saving(len(spec.payload), spec.rf, params),
        effective_symbol_rate=params.bw / m,
        preamble_samples=preamble_samples,
        header_samples=header_samples,
        payload_samples=payload_samples,
    )


def time_saving(n_s: int, rf: ReductionFactor, params: LoraParams) -> float:
    """Airtime saved by truncating n_s payload symbols, net of the one-symbol header overhead.

    (n_s * (1 - beta) - 1) * t_s; negative when the overhead dominates,
    zero at the break-even point n_s * (1 - beta) = 1.
    """
    if n_s < 0:
        raise ValueError("symbol count must be non-negative")
    return (n_s * (1.0 - rf.beta) - 1.0) * params.t_s
