"""Traffic-predictor emulation: a noisy copy of the true active set."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PredictorDraws:
    error: float              # realized e_p
    flip_order: np.ndarray    # random permutation of device ids
    p_active: np.ndarray      # P_a candidate for every device


@dataclass(frozen=True)
class PredictionSnapshot:
    cycle: int
    predicted_active: np.ndarray   # sorted device ids
    p_active: np.ndarray           # indexed by device id, NaN where not predicted
    true_active: np.ndarray        # for metrics only
    realized_error: float

    @property
    def candidate_p_active(self):
        return self.p_active[self.predicted_active]


def truncated_normal(rng, mean, std, lo=0.0, hi=1.0, max_tries=100):
    """Rejection-sample N(mean, std^2) restricted to [lo, hi], clamping after ``max_tries``."""
    if std == 0:
        return float(np.clip(mean, lo, hi))
    x = mean
    for _ in range(max_tries):
        x = rng.normal(mean, std)
        if lo <= x <= hi:
            return float(x)
    return float(np.clip(x, lo, hi))


def draw_prediction(rng, n, mean, std, p_active_range) -> PredictorDraws:
    err = truncated_normal(rng, mean, std)
    order = rng.permutation(n)
    lo, hi = p_active_range
    return PredictorDraws(error=err, flip_order=order, p_active=rng.uniform(lo, hi, size=n))


def apply_prediction(true_active_mask, draws: PredictorDraws, cycle=0) -> PredictionSnapshot:
    """Flip ``round(e_p * N)`` device statuses chosen uniformly without replacement."""
    true_active_mask = np.asarray(true_active_mask, dtype=bool)
    n = len(true_active_mask)
    k = int(round(draws.error * n))
    predicted = true_active_mask.copy()
    flips = draws.flip_order[:k]
    predicted[flips] = ~predicted[flips]
    ids = np.flatnonzero(predicted)
    return PredictionSnapshot(
        cycle=cycle,
        predicted_active=ids,
        p_active=np.where(predicted, draws.p_active, np.nan),
        true_active=np.flatnonzero(true_active_mask),
        realized_error=draws.error,
    )


def predict(true_active, cfg, stream, cycle=0) -> PredictionSnapshot:
    """Emulate the predictor for one cycle.

    ``true_active`` may be a boolean mask of length N or a collection of ids.
    """
    mask = _as_mask(true_active, cfg.n_devices)
    draws = draw_prediction(stream, cfg.n_devices, cfg.pred_err_mean, cfg.pred_err_std, cfg.p_active_range)
    return apply_prediction(mask, draws, cycle)


def _as_mask(active, n):
    if isinstance(active, (set, frozenset)):
        active = sorted(active)
    active = np.asarray(active)
    if active.dtype == bool and active.shape == (n,):
        return active
    mask = np.zeros(n, dtype=bool)
    mask[active.astype(np.int64)] = True
    return mask
