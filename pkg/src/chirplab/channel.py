"""AWGN channel impairment and link-SNR estimation.

SNR convention: per complex sample over the full bandwidth. Generated chirps
have unit power, so noise variance is sigma^2 = 10**(-snr_db/10) per sample
(sigma^2/2 in each of I and Q). Noise streams come from NumPy's Philox
counter-based generator keyed by the config seed, so the same seed always
reproduces the same waveform; parallel trials must derive distinct seeds
(see montecarlo.derive_rng).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chirps import IqBuffer
from .modem import DemodResult


@dataclass(frozen=True)
class ChannelConfig:
    """Per-sample SNR in dB plus the seed that fully determines the noise."""

    snr_db: float
    seed: int


def add_noise(samples: np.ndarray, snr_db: float, rng: np.random.Generator) -> np.ndarray:
    """Add circularly-symmetric complex Gaussian noise from an existing generator."""
    sigma = 10.0 ** (-snr_db / 20.0)
    scale = sigma / np.sqrt(2.0)
    noise = rng.standard_normal(samples.shape) * scale + 1j * rng.standard_normal(samples.shape) * scale
    return samples + noise


def awgn(buf: IqBuffer, cfg: ChannelConfig) -> IqBuffer:
    """Impair a buffer with AWGN at cfg.snr_db; deterministic given cfg.seed."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(cfg.seed)))
    return IqBuffer(add_noise(buf.samples, cfg.snr_db, rng), buf.sample_rate)


def snr_estimate(results: list[DemodResult]) -> float:
    """Median per-symbol peak-over-floor SNR estimate in dB."""
    if not results:
        raise ValueError("cannot estimate SNR from an empty result sequence")
    return float(np.median([r.snr_estimate_db for r in results]))
