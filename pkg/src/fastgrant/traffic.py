"""Device activation, pending packets, deadlines and drops."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import beta as beta_fn


class PacketExpired(LookupError):
    """The packet passed its deadline and was dropped."""


@dataclass(frozen=True)
class Packet:
    owner_id: int
    created_cycle: int
    value_of_info: float
    deadline_cycle: int


@dataclass(frozen=True)
class ActivationSchedule:
    slot_probabilities: np.ndarray
    assignment: np.ndarray          # device id -> activation slot


@dataclass(frozen=True)
class TrafficDraws:
    """Per-cycle randomness shared by every world replaying the same trajectory."""
    reactivation_u: np.ndarray
    value_of_info: np.ndarray


def beta_activation_pdf(t, T_A, alpha, beta):
    """Beta-shaped activation density on [0, T_A]."""
    t = np.asarray(t, dtype=float)
    if alpha <= 0 or beta <= 0 or T_A <= 0:
        raise ValueError("alpha, beta and T_A must be positive")
    if np.any(t < 0) or np.any(t > T_A):
        raise ValueError("t must lie in [0, T_A]")
    out = t ** (alpha - 1) * (T_A - t) ** (beta - 1) / (T_A ** (alpha + beta - 1) * beta_fn(alpha, beta))
    return out if out.ndim else float(out)


def build_activation_schedule(cfg, rng) -> ActivationSchedule:
    """Discretize the activation density over I_A slots and assign each device a slot."""
    slots = int(cfg.activation_slots)
    if slots < 1:
        raise ValueError("activation_slots must be >= 1")
    mid = (np.arange(slots) + 0.5) / slots
    probs = beta_activation_pdf(mid * slots, float(slots), cfg.beta_alpha, cfg.beta_beta)
    probs = np.atleast_1d(probs)
    probs = probs / probs.sum()
    assignment = rng.choice(slots, size=cfg.n_devices, p=probs)
    return ActivationSchedule(slot_probabilities=probs, assignment=assignment)


def draw_traffic(rng, n) -> TrafficDraws:
    return TrafficDraws(reactivation_u=rng.random(n), value_of_info=rng.random(n))


class TrafficState:
    """Pending-packet bookkeeping for one simulated world.

    Every device holds at most one pending packet. Arrays are indexed by
    device id; ``created`` and ``deadline`` are meaningless where ``active``
    is False.
    """

    def __init__(self, max_delay, schedule: ActivationSchedule, reactivation_prob: float):
        self.max_delay = np.asarray(max_delay, dtype=np.int64)
        n = len(self.max_delay)
        self.schedule = schedule
        self.reactivation_prob = float(reactivation_prob)
        self.active = np.zeros(n, dtype=bool)
        self.created = np.zeros(n, dtype=np.int64)
        self.deadline = np.zeros(n, dtype=np.int64)
        self.value = np.zeros(n, dtype=float)
        self.n_dropped = 0

    @property
    def n_devices(self):
        return len(self.max_delay)

    def active_ids(self):
        return np.flatnonzero(self.active)

    def packet(self, i) -> Packet | None:
        if not self.active[i]:
            return None
        return Packet(int(i), int(self.created[i]), float(self.value[i]), int(self.deadline[i]))

    def drop_expired(self, cycle) -> np.ndarray:
        """Remove packets whose access delay would now exceed D_i."""
        expired = np.flatnonzero(self.active & (cycle > self.deadline))
        self.active[expired] = False
        self.n_dropped += len(expired)
        return expired

    def step(self, cycle, draws: TrafficDraws) -> np.ndarray:
        """Activate devices for this cycle and return the newly active ids."""
        slots = len(self.schedule.slot_probabilities)
        if cycle < slots:
            wake = self.schedule.assignment == cycle
        else:
            wake = draws.reactivation_u < self.reactivation_prob
        new = np.flatnonzero(wake & ~self.active)
        self.active[new] = True
        self.created[new] = cycle
        self.deadline[new] = cycle + self.max_delay[new]
        self.value[new] = draws.value_of_info[new]
        return new

    def access_delay(self, ids, cycle):
        return cycle - self.created[ids]

    def clear(self, ids):
        """Remove served packets; the devices return to the inactive pool."""
        self.active[np.asarray(ids, dtype=np.int64)] = False


def step_traffic(cycle, state: TrafficState, stream) -> np.ndarray:
    """Advance ``state`` one cycle; ``stream`` is a generator or pre-drawn :class:`TrafficDraws`."""
    draws = stream if isinstance(stream, TrafficDraws) else draw_traffic(stream, state.n_devices)
    return state.step(cycle, draws)


def access_delay(packet: Packet, cycle: int) -> int:
    """Cycles elapsed since the packet became ready."""
    if cycle > packet.deadline_cycle:
        raise PacketExpired(f"packet of device {packet.owner_id} expired at cycle {packet.deadline_cycle}")
    return cycle - packet.created_cycle
