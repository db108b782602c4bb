"""Discrete-time chirp waveform generation.

Complex baseband, critically sampled at the chirp bandwidth (one sample per
chip), so a full symbol is n = 2**sf samples and FFT bin index equals symbol
index after dechirping.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

SPREADING_FACTORS = (7, 8, 9, 10, 11, 12)
BANDWIDTHS_HZ = (125_000.0, 250_000.0, 500_000.0)

# Allowed symbol-period reduction factors, ordered by header index code.
# Index i encodes beta = 1 - i/8; every value is an exact binary fraction,
# so m = beta * n is an exact integer for all supported sf.
BETA_TABLE = (1.0, 0.875, 0.75, 0.625, 0.5)


@dataclass(frozen=True)
class LoraParams:
    """Spreading factor, bandwidth, and the symbol timing they induce."""

    sf: int
    bw: float

    def __post_init__(self):
        if self.sf not in SPREADING_FACTORS:
            raise ValueError(f"sf must be one of {SPREADING_FACTORS}, got {self.sf}")
        if float(self.bw) not in BANDWIDTHS_HZ:
            raise ValueError(f"bw must be one of {BANDWIDTHS_HZ} Hz, got {self.bw}")
        object.__setattr__(self, "bw", float(self.bw))

    @property
    def n(self) -> int:
        """Samples (and chips, and symbol values) per full symbol: 2**sf."""
        return 1 << self.sf

    @property
    def t_s(self) -> float:
        """Full symbol period in seconds."""
        return self.n / self.bw

    @property
    def t_chip(self) -> float:
        """Chip period in seconds (one sample at critical sampling)."""
        return 1.0 / self.bw

    @property
    def chirp_rate(self) -> float:
        """Frequency sweep rate in Hz/s: bw / t_s."""
        return self.bw / self.t_s


@dataclass(frozen=True)
class ReductionFactor:
    """Symbol-period reduction factor beta and its header index code."""

    beta: float
    index: int = field(init=False)

    def __post_init__(self):
        if self.beta not in BETA_TABLE:
            raise ValueError(f"beta must be one of {BETA_TABLE}, got {self.beta}")
        object.__setattr__(self, "index", BETA_TABLE.index(self.beta))

    @classmethod
    def from_index(cls, index: int) -> "ReductionFactor":
        if not 0 <= index < len(BETA_TABLE):
            raise ValueError(f"beta index must be in [0, {len(BETA_TABLE)}), got {index}")
        return cls(BETA_TABLE[index])

    def m(self, params: LoraParams) -> int:
        """Truncated sample count: round(beta * n). Exact for all allowed beta."""
        return round(self.beta * params.n)

    def t_s_reduced(self, params: LoraParams) -> float:
        """Reduced symbol period beta * t_s in seconds."""
        return self.beta * params.t_s


FULL_PERIOD = ReductionFactor(1.0)


@dataclass
class IqBuffer:
    """A finite sequence of complex baseband samples at a fixed sample rate."""

    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.complex128)
        self.samples.setflags(write=False)

    def __len__(self) -> int:
        return len(self.samples)


@lru_cache(maxsize=None)
def _base_ramp(n: int) -> np.ndarray:
    # Phase pi*j^2/n with j^2 reduced mod 2n in integer arithmetic, keeping
    # the argument of exp small; this makes the cyclic-rotation identity
    # u0[(j+k) mod n] hold to the last bit.
    j = np.arange(n, dtype=np.int64)
    ramp = np.exp(1j * np.pi * ((j * j) % (2 * n)) / n)
    ramp.setflags(write=False)
    return ramp


def base_upchirp(params: LoraParams) -> IqBuffer:
    """Unit-modulus upchirp sweeping 0..bw over one symbol: exp(i*pi*j^2/n)."""
    return IqBuffer(_base_ramp(params.n), params.bw)


def base_downchirp(params: LoraParams) -> IqBuffer:
    """Conjugate of the base upchirp; frequency decreases linearly over the symbol."""
    return IqBuffer(np.conj(_base_ramp(params.n)), params.bw)


def shifted_upchirp(params: LoraParams, k: int) -> IqBuffer:
    """Cyclic-shifted upchirp encoding symbol k: sample[j] = upchirp[(j + k) mod n].

    Dechirping against the base downchirp collapses it to a pure tone at
    FFT bin k (phase-coherent across the wrap because n is even).
    """
    n = params.n
    if not 0 <= k < n:
        raise ValueError(f"symbol index must be in [0, {n}), got {k}")
    return IqBuffer(np.roll(_base_ramp(n), -int(k)), params.bw)


def truncate(buf: IqBuffer, rf: ReductionFactor, params: LoraParams) -> IqBuffer:
    """First m = round(beta * n) samples of buf, unchanged.

    Accepts any buffer with at least m samples so truncations compose:
    truncate(truncate(x, b1), b2) == truncate(x, b2) whenever b2 <= b1.
    """
    m = rf.m(params)
    if len(buf) < m:
        raise ValueError(f"buffer has {len(buf)} samples, need at least {m} for beta={rf.beta}")
    return IqBuffer(buf.samples[:m], buf.sample_rate)


def instantaneous_frequency(buf: IqBuffer) -> np.ndarray:
    """Per-step finite-difference frequency in Hz, one value per sample pair.

    f[j] = angle(s[j+1] * conj(s[j])) / (2*pi) * sample_rate, aliased into
    (-sample_rate/2, sample_rate/2].
    """
    if len(buf) < 2:
        raise ValueError("need at least 2 samples to difference a phase")
    s = buf.samples
    return np.angle(s[1:] * np.conj(s[:-1])) / (2.0 * np.pi) * buf.sample_rate
