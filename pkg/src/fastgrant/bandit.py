"""Sleeping-bandit fast-grant scheduler.

Devices are arms; only the devices the predictor reports active are
available in a cycle. Each available arm is scored with an
availability-weighted UCB index and the top ``m`` receive a grant.
"""
from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

EXPLORATION = 8.0
MIN_T_PRIME = 2


class BanditState:
    """Per-device learning memory of the scheduler."""

    def __init__(self, n_devices: int):
        self.z = np.zeros(n_devices)
        self.n = np.zeros(n_devices, dtype=np.int64)
        self.predicted_count = np.zeros(n_devices, dtype=np.int64)
        # cycles a device was truly active; only fed when t' is not estimated
        self.active_count = np.zeros(n_devices, dtype=np.int64)
        self.ever_selected = np.zeros(n_devices, dtype=bool)

    def __len__(self):
        return len(self.z)

    def t_prime(self, ids, use_true=False):
        return (self.active_count if use_true else self.predicted_count)[ids]

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["device", "z", "n", "predicted_count"])
            for i in range(len(self)):
                w.writerow([i, repr(float(self.z[i])), int(self.n[i]), int(self.predicted_count[i])])

    @classmethod
    def from_csv(cls, path):
        rows = list(csv.DictReader(Path(path).open(newline="")))
        state = cls(len(rows))
        for row in rows:
            i = int(row["device"])
            state.z[i] = float(row["z"])
            state.n[i] = int(row["n"])
            state.predicted_count[i] = int(row["predicted_count"])
        state.ever_selected[:] = state.n > 0
        return state


def ucb_index(device, state: BanditState, p_a: float, t_prime_est: float) -> float:
    n = state.n[device]
    if n == 0:
        return math.inf
    t = max(t_prime_est, MIN_T_PRIME)
    return p_a * (state.z[device] / n + math.sqrt(EXPLORATION * math.log(t) / n))


def ucb_indices(ids, state: BanditState, p_a, t_prime):
    """Vectorized :func:`ucb_index`; never-rewarded devices score +inf."""
    ids = np.asarray(ids, dtype=np.int64)
    n = state.n[ids].astype(float)
    t = np.maximum(np.asarray(t_prime, dtype=float), MIN_T_PRIME)
    with np.errstate(divide="ignore", invalid="ignore"):
        idx = np.asarray(p_a) * (state.z[ids] / n + np.sqrt(EXPLORATION * np.log(t) / n))
    return np.where(n == 0, np.inf, idx)


def top_m(scores, m, rng):
    """Positions of the ``m`` largest scores, ties broken uniformly at random."""
    scores = np.asarray(scores, dtype=float)
    keys = rng.random(len(scores))
    order = np.lexsort((keys, -scores))
    return order[:m]


def select_cluster_heads(snapshot, state: BanditState, m: int, rng, use_true_t_prime=False):
    """Grant the ``m`` predicted-active devices with the highest index."""
    cands = snapshot.predicted_active
    if len(cands) == 0:
        return np.empty(0, dtype=np.int64)
    scores = ucb_indices(cands, state, snapshot.p_active[cands], state.t_prime(cands, use_true_t_prime))
    chosen = cands[top_m(scores, m, rng)]
    state.ever_selected[chosen] = True
    return chosen


def update_after_cycle(state: BanditState, outcomes, rho: float, predicted_ids=(), true_active_ids=None):
    """Credit rewards of one cycle.

    A CH banks its own reward plus the share ``rho`` of its partner's; the
    partner banks the remaining ``1 - rho``. Play counts move only for
    devices whose own reward was positive.
    """
    for o in outcomes:
        c = o.ch_id
        state.z[c] += o.theta_ch
        if o.theta_ch > 0:
            state.n[c] += 1
        if o.nch_id is not None:
            state.z[c] += rho * o.theta_nch
            state.z[o.nch_id] += (1.0 - rho) * o.theta_nch
            if o.theta_nch > 0:
                state.n[o.nch_id] += 1
    state.predicted_count[np.asarray(predicted_ids, dtype=np.int64)] += 1
    if true_active_ids is not None:
        state.active_count[np.asarray(true_active_ids, dtype=np.int64)] += 1
