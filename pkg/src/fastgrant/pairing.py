"""Distributed two-user NOMA pairing between granted CHs and active nCHs.

Mode 0: the CH is the weak user and looks for a stronger partner.
Mode 1: the CH is the strong user and looks for a weaker partner.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import noma_rates, oma_rate

WEAK_CH = 0
STRONG_CH = 1


@dataclass(frozen=True)
class PairingRequest:
    ch_id: int
    gamma_ch: float
    mode: int
    gamma_threshold: float


@dataclass(frozen=True)
class PairingOutcome:
    rb_index: int
    ch_id: int
    ch_was_active: bool
    nch_id: int | None
    mode_used: int
    mode_switched: bool
    r_ch: float
    r_nch: float
    theta_ch: float
    theta_nch: float
    wasted: bool


def gamma_threshold(gamma_ch, p_t, p_tol, mode):
    """Partner gain needed for a received-power gap of ``p_tol`` at equal powers."""
    if p_t <= 0:
        raise ValueError("p_t must be positive")
    gap = p_tol / p_t
    if mode == WEAK_CH:
        return gamma_ch + gap
    return max(gamma_ch - gap, 0.0)


def make_request(ch_id, gamma_ch, p_t, p_tol, mode) -> PairingRequest:
    return PairingRequest(ch_id, gamma_ch, mode, gamma_threshold(gamma_ch, p_t, p_tol, mode))


def eligible(nch_gamma, request: PairingRequest):
    if request.mode == WEAK_CH:
        return nch_gamma >= request.gamma_threshold
    return nch_gamma <= request.gamma_threshold


def associate_index(nch_ids, ch_ids, positions):
    """For each nCH, the position in ``ch_ids`` of its nearest CH.

    Distance ties go to the lower CH id.
    """
    nch_ids = np.asarray(nch_ids, dtype=np.int64)
    ch_ids = np.asarray(ch_ids, dtype=np.int64)
    if len(ch_ids) == 0 or len(nch_ids) == 0:
        return np.empty(len(nch_ids), dtype=np.int64)
    by_id = np.argsort(ch_ids, kind="stable")
    diff = positions[nch_ids][:, None, :] - positions[ch_ids[by_id]][None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    return by_id[np.argmin(d2, axis=1)]


def associate(nch_ids, ch_ids, population) -> dict:
    """Map each nCH id to the id of its nearest CH."""
    nch_ids = np.asarray(list(nch_ids), dtype=np.int64)
    ch_ids = np.asarray(list(ch_ids), dtype=np.int64)
    if len(ch_ids) == 0:
        return {}
    pos = population.positions if hasattr(population, "positions") else np.asarray(population)
    idx = associate_index(nch_ids, ch_ids, pos)
    return {int(n): int(ch_ids[j]) for n, j in zip(nch_ids, idx)}


def pair_rates(gamma_ch, gamma_nch, ch_active, mode, p_t, bandwidth_hz):
    """Rates (CH, nCH) of a consummated pair; a silent CH leaves its partner interference-free."""
    if not ch_active:
        return 0.0, float(oma_rate(p_t, gamma_nch, bandwidth_hz))
    if mode == WEAK_CH:
        r_s, r_w = noma_rates(p_t, gamma_nch, p_t, gamma_ch, bandwidth_hz)
        return float(r_w), float(r_s)
    r_s, r_w = noma_rates(p_t, gamma_ch, p_t, gamma_nch, bandwidth_hz)
    return float(r_s), float(r_w)


def build_outcome(rb, ch, ch_active, nch, mode, switched, gamma, p_t, bandwidth_hz, reward_of):
    """Assemble one RB's outcome; ``reward_of(device, rate)`` prices a transmission."""
    if nch is None:
        r_ch = float(oma_rate(p_t, gamma[ch], bandwidth_hz)) if ch_active else 0.0
        r_nch = 0.0
    else:
        r_ch, r_nch = pair_rates(gamma[ch], gamma[nch], ch_active, mode, p_t, bandwidth_hz)
    theta_ch = float(reward_of(ch, r_ch)) if ch_active else 0.0
    theta_nch = float(reward_of(nch, r_nch)) if nch is not None else 0.0
    return PairingOutcome(
        rb_index=rb, ch_id=int(ch), ch_was_active=bool(ch_active),
        nch_id=None if nch is None else int(nch), mode_used=int(mode), mode_switched=bool(switched),
        r_ch=r_ch, r_nch=r_nch, theta_ch=theta_ch, theta_nch=theta_nch,
        wasted=(not ch_active) and nch is None,
    )


def run_pairing(ch_list, ch_active, active_nchs, gamma, positions, *, p_t, p_tol, bandwidth_hz,
                default_mode=WEAK_CH, mode_switch=False, rng, reward_of=lambda i, r: 0.0):
    """One cycle of request/response pairing.

    Round 1: every CH announces ``default_mode``; its associated, eligible
    nCHs respond and it picks one uniformly. Round 2 (``mode_switch``): CHs
    left unpaired re-announce with the opposite mode, and each still
    unpaired nCH associates with the nearest re-announcing CH. The
    generator is advanced by the same amount whether or not round 2 runs.
    """
    ch_list = np.asarray(ch_list, dtype=np.int64)
    active_nchs = np.asarray(active_nchs, dtype=np.int64)
    n_ch = len(ch_list)
    u = rng.random((2, n_ch))

    partner = [None] * n_ch
    mode_used = [default_mode] * n_ch
    switched = [False] * n_ch
    rounds = [default_mode, 1 - default_mode] if mode_switch else [default_mode]
    for rnd, mode in enumerate(rounds):
        members = _round_members(ch_list, active_nchs, partner, positions)
        for j, ch in enumerate(ch_list):
            if partner[j] is not None or len(members[j]) == 0:
                continue
            thr = gamma_threshold(gamma[ch], p_t, p_tol, mode)
            g = gamma[members[j]]
            ok = members[j][g >= thr] if mode == WEAK_CH else members[j][g <= thr]
            if rnd == 1:
                switched[j] = True
                mode_used[j] = mode
            if len(ok):
                partner[j] = int(ok[min(int(u[rnd, j] * len(ok)), len(ok) - 1)])
                mode_used[j] = mode

    return [
        build_outcome(rb, int(ch), bool(ch_active[rb]), partner[rb], mode_used[rb], switched[rb],
                      gamma, p_t, bandwidth_hz, reward_of)
        for rb, ch in enumerate(ch_list)
    ]


def _round_members(ch_list, nchs, partner, positions):
    """Sorted nCHs associated with each CH still announcing in this round."""
    taken = np.array([p for p in partner if p is not None], dtype=np.int64)
    free = nchs[~np.isin(nchs, taken)]
    open_j = np.array([j for j, p in enumerate(partner) if p is None], dtype=np.int64)
    members = [np.empty(0, dtype=np.int64) for _ in range(len(ch_list))]
    if len(open_j) == 0 or len(free) == 0:
        return members
    assoc = associate_index(free, ch_list[open_j], positions)
    for k, j in enumerate(open_j):
        members[j] = np.sort(free[assoc == k])
    return members
