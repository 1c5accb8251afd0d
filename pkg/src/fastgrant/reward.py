"""QoS utilities and rewards of served transmissions."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class QosSample:
    value_of_info: float
    rate_bps: float
    max_delay: float
    access_delay: float
    min_rate_bps: float = 0.0


def gompertz(d, a=1.0, b=8.0, c=0.03):
    """Delay normalization ``a - a*exp(-b*exp(-c*d))``; works elementwise."""
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise ValueError("delay must be nonnegative")
    out = a - a * np.exp(-b * np.exp(-c * d))
    return out if out.ndim else float(out)


def utility(value_of_info, rate_bps, max_delay, deltas, r_max, gompertz_params=(1.0, 8.0, 0.03)):
    """Weighted sum of value of information, normalized rate and delay term.

    The rate is normalized by ``r_max`` and clamped at 1. The delay term is
    evaluated at the device's maximum tolerable delay, not the realized one.
    """
    d1, d2, d3 = deltas
    rate_n = np.minimum(np.asarray(rate_bps, dtype=float) / r_max, 1.0)
    out = d1 * np.asarray(value_of_info, dtype=float) + d2 * rate_n + d3 * gompertz(max_delay, *gompertz_params)
    return out if np.ndim(out) else float(out)


def reward(value_of_info, rate_bps, max_delay, access_delay, min_rate_bps, deltas, r_max,
           gompertz_params=(1.0, 8.0, 0.03)):
    """Utility gated by the rate and deadline indicators."""
    u = utility(value_of_info, rate_bps, max_delay, deltas, r_max, gompertz_params)
    ok = (np.asarray(rate_bps) >= np.asarray(min_rate_bps)) & (np.asarray(access_delay) <= np.asarray(max_delay))
    out = np.where(ok, u, 0.0)
    return out if out.ndim else float(out)


def sample_reward(sample: QosSample, deltas, r_max, gompertz_params=(1.0, 8.0, 0.03)) -> float:
    return reward(sample.value_of_info, sample.rate_bps, sample.max_delay, sample.access_delay,
                  sample.min_rate_bps, deltas, r_max, gompertz_params)


def sample_utility(sample: QosSample, deltas, r_max, gompertz_params=(1.0, 8.0, 0.03)) -> float:
    return utility(sample.value_of_info, sample.rate_bps, sample.max_delay, deltas, r_max, gompertz_params)


class RewardModel:
    """Binds the utility parameters of a scenario."""

    def __init__(self, cfg):
        self.deltas = tuple(cfg.delta_weights)
        self.r_max = cfg.r_max_bps
        self.gompertz_params = (cfg.gompertz_a, cfg.gompertz_b, cfg.gompertz_c)

    def __call__(self, value_of_info, rate_bps, max_delay, access_delay, min_rate_bps):
        return reward(value_of_info, rate_bps, max_delay, access_delay, min_rate_bps,
                      self.deltas, self.r_max, self.gompertz_params)
