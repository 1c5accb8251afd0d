"""Uplink channel: Rayleigh fading, path loss, log-normal shadowing, rates."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import db_to_linear


@dataclass(frozen=True)
class ChannelRealization:
    cycle: int
    gamma: np.ndarray   # normalized gain |h|^2 / (N_0 B), per device


def pathloss_db(distance_m, min_distance_m=1.0):
    """Urban-macro path loss, 128.1 + 37.6 log10(d / 1 km)."""
    d_km = np.maximum(np.asarray(distance_m, dtype=float), min_distance_m) / 1000.0
    return 128.1 + 37.6 * np.log10(d_km)


def draw_gains(population, cycle, rng, *, noise_power_w, shadowing_sigma_db=10.0,
               min_distance_m=1.0, fading=None, shadowing_db=None) -> ChannelRealization:
    """Draw fresh fading and shadowing for every device.

    ``fading`` / ``shadowing_db`` override the random draws (used to pin the
    model in tests); when omitted both are drawn from ``rng`` in that order.
    """
    n = len(population)
    if fading is None:
        fading = rng.exponential(1.0, size=n)
    if shadowing_db is None:
        shadowing_db = rng.normal(0.0, shadowing_sigma_db, size=n)
    pl = db_to_linear(-pathloss_db(population.bs_distance, min_distance_m))
    h2 = pl * db_to_linear(np.asarray(shadowing_db, dtype=float)) * np.asarray(fading, dtype=float)
    return ChannelRealization(cycle=cycle, gamma=h2 / noise_power_w)


def oma_rate(p_tx, gamma, bandwidth_hz):
    return bandwidth_hz * np.log2(1.0 + np.asarray(p_tx) * np.asarray(gamma))


def noma_rates(p_s, gamma_s, p_w, gamma_w, bandwidth_hz):
    """Rates of the strong (decoded first) and weak user of a NOMA pair."""
    snr_s = np.asarray(p_s) * np.asarray(gamma_s)
    snr_w = np.asarray(p_w) * np.asarray(gamma_w)
    r_s = bandwidth_hz * np.log2(1.0 + snr_s / (snr_w + 1.0))
    r_w = bandwidth_hz * np.log2(1.0 + snr_w)
    return r_s, r_w
