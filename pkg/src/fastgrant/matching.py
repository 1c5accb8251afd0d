"""Oracle schedulers: best OMA grant set and optimal CH/nCH pairing."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

MAX_BRUTE_CHS = 6
MAX_BRUTE_NCHS = 8
# weights are snapped to this dyadic grid so every partial sum is exact in
# float64 and all optimal matchings report bit-identical objectives
WEIGHT_QUANTUM = 2.0 ** -32


class InstanceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class MatchingInstance:
    ch_ids: np.ndarray
    nch_ids: np.ndarray
    weights: np.ndarray       # omega[c, n], zero where ineligible
    eligibility: np.ndarray   # bool[c, n]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", quantize(w))

    @classmethod
    def build(cls, ch_ids, nch_ids, theta, gamma, p_t, p_tol):
        """Weights ``theta_c + theta_n`` over pairs meeting the SIC power gap."""
        ch_ids = np.asarray(ch_ids, dtype=np.int64)
        nch_ids = np.asarray(nch_ids, dtype=np.int64)
        theta = np.asarray(theta, dtype=float)
        gamma = np.asarray(gamma, dtype=float)
        gap = np.abs(p_t * gamma[nch_ids][None, :] - p_t * gamma[ch_ids][:, None])
        ok = gap >= p_tol
        w = np.where(ok, theta[ch_ids][:, None] + theta[nch_ids][None, :], 0.0)
        return cls(ch_ids, nch_ids, w, ok)

    def objective(self, pairs_idx) -> float:
        return math.fsum(self.weights[c, n] for c, n in pairs_idx)


def quantize(w):
    return np.round(np.asarray(w, dtype=float) / WEIGHT_QUANTUM) * WEIGHT_QUANTUM


def best_oma(true_active, rewards_if_served, m: int) -> np.ndarray:
    """The ``m`` truly-active devices with the largest rewards, ties to the lower id.

    ``rewards_if_served`` is indexed by device id.
    """
    ids = np.asarray(sorted(true_active), dtype=np.int64) if not isinstance(true_active, np.ndarray) \
        else np.sort(true_active.astype(np.int64))
    if len(ids) == 0:
        return ids
    r = np.asarray(rewards_if_served, dtype=float)[ids]
    order = np.lexsort((ids, -r))
    return ids[order[:m]]


def _hungarian_min(cost):
    """Row assignment minimizing total cost for an n x m matrix with n <= m.

    Shortest-augmenting-path Hungarian method with dual potentials,
    O(n^2 m). Returns ``col_of_row``.
    """
    n, m = cost.shape
    u = np.zeros(n + 1)
    v = np.zeros(m + 1)
    p = np.zeros(m + 1, dtype=np.int64)       # p[j]: row (1-based) holding column j
    way = np.zeros(m + 1, dtype=np.int64)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(m + 1, np.inf)
        used = np.zeros(m + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            cur = cost[i0 - 1] - u[i0] - v[1:]
            free = ~used[1:]
            better = free & (cur < minv[1:])
            minv[1:][better] = cur[better]
            way[1:][better] = j0
            masked = np.where(free, minv[1:], np.inf)
            j1 = int(np.argmin(masked)) + 1
            delta = masked[j1 - 1]
            u[p[used]] += delta
            v[used] -= delta
            minv[~used] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    col_of_row = np.full(n, -1, dtype=np.int64)
    for j in range(1, m + 1):
        if p[j]:
            col_of_row[p[j] - 1] = j - 1
    return col_of_row


def max_weight_matching(weights):
    """Index pairs ``(row, col)`` of a maximum-weight matching; zero-weight pairs omitted."""
    w = np.asarray(weights, dtype=float)
    if w.size == 0:
        return []
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    n_r, n_c = w.shape
    if n_r <= n_c:
        keep = np.arange(n_c)
        if n_c > n_r * n_r:
            # some optimal matching only uses each row's n_r heaviest columns
            top = np.argpartition(-w, n_r - 1, axis=1)[:, :n_r]
            keep = np.unique(top)
        cols = _hungarian_min(-w[:, keep])
        pairs = [(r, int(keep[c])) for r, c in enumerate(cols)]
    else:
        rows = _hungarian_min(-w.T)
        pairs = sorted((int(r), c) for c, r in enumerate(rows))
    return [(r, c) for r, c in pairs if w[r, c] > 0]


def optimal_pairing(instance: MatchingInstance):
    """Optimal one-to-one pairing; returns ``(pairs_of_ids, objective)``."""
    idx = [(r, c) for r, c in max_weight_matching(instance.weights) if instance.eligibility[r, c]]
    rows = [r for r, _ in idx]
    cols = [c for _, c in idx]
    if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
        raise AssertionError("matching is not one-to-one")
    pairs = [(int(instance.ch_ids[r]), int(instance.nch_ids[c])) for r, c in idx]
    return pairs, instance.objective(idx)


def brute_force_matching(instance: MatchingInstance) -> float:
    """Best objective over every injective partial assignment (small instances only)."""
    w = np.asarray(instance.weights, dtype=float)
    n_c, n_n = w.shape if w.ndim == 2 else (0, 0)
    if n_c > MAX_BRUTE_CHS or n_n > MAX_BRUTE_NCHS:
        raise InstanceTooLarge(f"brute force limited to {MAX_BRUTE_CHS}x{MAX_BRUTE_NCHS}, got {n_c}x{n_n}")
    best, best_idx = 0.0, []
    for k in range(1, min(n_c, n_n) + 1):
        perms = np.array(list(itertools.permutations(range(n_n), k)), dtype=np.int64)
        for rows in itertools.combinations(range(n_c), k):
            vals = w[np.array(rows)[None, :], perms].sum(axis=1)
            j = int(np.argmax(vals))
            if vals[j] > best:
                best = vals[j]
                best_idx = list(zip(rows, perms[j].tolist()))
    return instance.objective(best_idx) if best_idx else 0.0
