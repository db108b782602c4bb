"""Monte-Carlo experiment sweeps with CSV output.

Every row carries the master seed and trial count; together with the row's
own (sf, beta, snr_db) they reproduce the row exactly, because each row's
random stream is derived from those values alone (see montecarlo).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

from .chirps import BETA_TABLE, LoraParams, ReductionFactor
from .montecarlo import TAG_BER, peak_statistics, run_error_trials

PEAK_CSV_COLUMNS = ("sf", "beta", "snr_db", "mean_peak", "mean_peak_ratio_vs_beta1", "trials", "seed")
PEAK_BINS_CSV_COLUMNS = ("sf", "beta", "snr_db", "bin", "magnitude")
BER_CSV_COLUMNS = ("sf", "beta", "snr_db", "trials", "symbol_errors", "ser", "ber", "seed")


@dataclass
class ExperimentConfig:
    """Parameter grid and determinism inputs for one sweep."""

    sf_list: tuple = (7,)
    beta_list: tuple = BETA_TABLE
    snr_start_db: float = 0.0
    snr_stop_db: float = 0.0
    snr_step_db: float = 0.5
    trials: int = 1000
    seed: int = 0
    bw: float = 125_000.0
    out_csv: str = ""
    bins_csv: str = ""

    def __post_init__(self):
        self.sf_list = tuple(int(sf) for sf in self.sf_list)
        self.beta_list = tuple(float(b) for b in self.beta_list)
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.snr_step_db <= 0:
            raise ValueError("snr step must be positive")
        if self.snr_stop_db < self.snr_start_db:
            raise ValueError("snr stop must be >= snr start")
        for beta in self.beta_list:
            if beta not in BETA_TABLE:
                raise ValueError(f"beta {beta} not in allowed set {BETA_TABLE}")

    def snr_values(self) -> list[float]:
        values = []
        k = 0
        while True:
            snr = self.snr_start_db + k * self.snr_step_db
            if snr > self.snr_stop_db + 1e-9:
                return values
            values.append(snr)
            k += 1


def _write_rows(path, columns, rows):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(columns)
        writer.writerows(rows)


def run_peak_experiment(cfg: ExperimentConfig) -> list[dict]:
    """Mean transform-peak magnitude per (sf, beta, snr), normalized to beta = 1.

    The beta = 1 baseline of each (sf, snr) cell is always measured, whether
    or not it is in cfg.beta_list. When cfg.out_csv / cfg.bins_csv are set,
    writes the summary table and one representative trial's per-bin
    magnitudes for plotting.
    """
    rows = []
    bins_rows = []
    for sf in cfg.sf_list:
        params = LoraParams(sf=sf, bw=cfg.bw)
        for snr_db in cfg.snr_values():
            baseline, baseline_bins = peak_statistics(params, ReductionFactor(1.0), snr_db, cfg.trials, cfg.seed)
            for beta in cfg.beta_list:
                if beta == 1.0:
                    mean_peak, bins = baseline, baseline_bins
                else:
                    mean_peak, bins = peak_statistics(params, ReductionFactor(beta), snr_db, cfg.trials, cfg.seed)
                rows.append({
                    "sf": sf, "beta": beta, "snr_db": snr_db,
                    "mean_peak": mean_peak,
                    "mean_peak_ratio_vs_beta1": mean_peak / baseline,
                    "trials": cfg.trials, "seed": cfg.seed,
                })
                bins_rows.extend(
                    (sf, beta, snr_db, idx, float(mag)) for idx, mag in enumerate(bins)
                )
    if cfg.out_csv:
        _write_rows(cfg.out_csv, PEAK_CSV_COLUMNS, ([r[c] for c in PEAK_CSV_COLUMNS] for r in rows))
    if cfg.bins_csv:
        _write_rows(cfg.bins_csv, PEAK_BINS_CSV_COLUMNS, bins_rows)
    return rows


def run_ber_sweep(cfg: ExperimentConfig) -> list[dict]:
    """Measured SER and natural-binary BER per (sf, beta, snr)."""
    rows = []
    for sf in cfg.sf_list:
        params = LoraParams(sf=sf, bw=cfg.bw)
        for beta in cfg.beta_list:
            rf = ReductionFactor(beta)
            for snr_db in cfg.snr_values():
                ser, ber = run_error_trials(params, rf, snr_db, cfg.trials, cfg.seed, tag=TAG_BER)
                rows.append({
                    "sf": sf, "beta": beta, "snr_db": snr_db, "trials": cfg.trials,
                    "symbol_errors": round(ser * cfg.trials),
                    "ser": ser, "ber": ber, "seed": cfg.seed,
                })
    if cfg.out_csv:
        _write_rows(cfg.out_csv, BER_CSV_COLUMNS, ([r[c] for c in BER_CSV_COLUMNS] for r in rows))
    return rows
