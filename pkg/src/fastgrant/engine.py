"""Per-cycle simulation loop over several scheduler variants.

All variants replay one trajectory of traffic, channel and predictor
randomness. Each variant owns its packet state and learning state, so the
worlds diverge only through scheduling decisions.
"""
from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field

import numpy as np

from . import bandit
from .channel import draw_gains, oma_rate
from .matching import MatchingInstance, best_oma, optimal_pairing
from .pairing import WEAK_CH, STRONG_CH, build_outcome, run_pairing
from .predictor import apply_prediction, draw_prediction
from .scenario import build_population, derive_stream
from .traffic import TrafficState, build_activation_schedule, draw_traffic


@dataclass(frozen=True)
class Variant:
    name: str
    ch_policy: str = "mab"          # "mab" | "best"
    pairing: str | None = None      # None | "random" | "optimal"
    mode_switch: bool | None = None  # None: take the scenario setting
    shadow_mode_switch: bool = False  # also evaluate the opposite switch setting on the same inputs

    @property
    def learns(self):
        return self.ch_policy == "mab"


VARIANTS = {
    "oma-mab": Variant("oma-mab"),
    "noma-mab": Variant("noma-mab", pairing="random"),
    "noma-mab-ms": Variant("noma-mab-ms", pairing="random", mode_switch=True),
    "noma-mab-nms": Variant("noma-mab-nms", pairing="random", mode_switch=False, shadow_mode_switch=True),
    "best-oma": Variant("best-oma", ch_policy="best"),
    "qo-best": Variant("qo-best", ch_policy="best", pairing="optimal"),
    "qo-mab": Variant("qo-mab", pairing="optimal"),
}


@dataclass
class CycleLog:
    cycle: int
    realized_error: float
    reward_sum: dict = field(default_factory=dict)
    wasted_rbs: dict = field(default_factory=dict)
    served_ids: dict = field(default_factory=dict)
    regret_increment: dict = field(default_factory=dict)


class Trace:
    """Time series and counters of one variant over one replication."""

    def __init__(self, n_cycles, n_devices):
        self.reward = np.zeros(n_cycles)
        self.wasted = np.zeros(n_cycles, dtype=np.int64)
        self.winners = np.zeros(n_cycles, dtype=np.int64)
        self.best_reward = np.zeros(n_cycles)
        self.paired = np.zeros(n_cycles, dtype=np.int64)
        self.grants = np.zeros(n_devices, dtype=np.int64)
        self.served_hist = np.zeros(n_devices, dtype=np.int64)
        self.access_delay_sum = 0
        self.max_delay_sum = 0
        # audit counters, expected to stay zero
        self.late_served = 0
        self.unpredicted_grants = 0
        self.shadow_reward = None
        self.shadow_wasted = None

    @property
    def regret(self):
        return self.best_reward - self.reward


class ScalarReward:
    """Fast single-transmission reward for one world at one cycle."""

    def __init__(self, cfg, population, traffic, cycle):
        self.d1, self.d2, self.d3 = cfg.delta_weights
        self.a, self.b, self.c = cfg.gompertz_a, cfg.gompertz_b, cfg.gompertz_c
        self.r_max = cfg.r_max_bps
        self.pop = population
        self.traffic = traffic
        self.cycle = cycle

    def __call__(self, i, rate):
        D = int(self.pop.max_delay[i])
        d = self.cycle - int(self.traffic.created[i])
        if rate < self.pop.min_rate[i] or d > D:
            return 0.0
        f = self.a - self.a * math.exp(-self.b * math.exp(-self.c * D))
        return self.d1 * self.traffic.value[i] + self.d2 * min(rate / self.r_max, 1.0) + self.d3 * f


def oma_rewards(cfg, population, traffic, gamma, cycle):
    """Reward each truly active device would earn alone on an RB (0 elsewhere)."""
    out = np.zeros(len(population))
    ids = traffic.active_ids()
    if len(ids) == 0:
        return out
    rate = oma_rate(cfg.tx_power_w, gamma[ids], cfg.bandwidth_hz)
    D = population.max_delay[ids]
    d = cycle - traffic.created[ids]
    d1, d2, d3 = cfg.delta_weights
    f = cfg.gompertz_a - cfg.gompertz_a * np.exp(-cfg.gompertz_b * np.exp(-cfg.gompertz_c * D))
    u = d1 * traffic.value[ids] + d2 * np.minimum(rate / cfg.r_max_bps, 1.0) + d3 * f
    ok = (rate >= population.min_rate[ids]) & (d <= D)
    out[ids] = np.where(ok, u, 0.0)
    return out


class World:
    """Mutable state of one variant inside one replication."""

    def __init__(self, variant: Variant, cfg, population, schedule, seed):
        self.variant = variant
        self.cfg = cfg
        self.population = population
        self.traffic = TrafficState(population.max_delay, schedule, cfg.reactivation_prob)
        self.bandit = bandit.BanditState(len(population)) if variant.learns else None
        self.tie_rng = derive_stream(seed, f"ties:{variant.name}")
        self.pair_rng = derive_stream(seed, f"pairing:{variant.name}")
        self.mode_switch = cfg.mode_switch_enabled if variant.mode_switch is None else variant.mode_switch
        self.trace = Trace(cfg.n_cycles, len(population))

    def select_chs(self, snapshot, theta_oma):
        m = self.cfg.n_rbs
        if self.variant.ch_policy == "best":
            return best_oma(self.traffic.active_ids(), theta_oma, m)
        return bandit.select_cluster_heads(snapshot, self.bandit, m, self.tie_rng,
                                           use_true_t_prime=self.cfg.t_prime == "true")

    def step(self, cycle, tdraws, gamma, pdraws) -> tuple[float, int, np.ndarray, float]:
        cfg = self.cfg
        tr = self.traffic
        tr.drop_expired(cycle)
        tr.step(cycle, tdraws)
        snapshot = apply_prediction(tr.active, pdraws, cycle)
        theta_oma = oma_rewards(cfg, self.population, tr, gamma, cycle)
        chs = self.select_chs(snapshot, theta_oma)
        ch_active = tr.active[chs]
        reward_of = ScalarReward(cfg, self.population, tr, cycle)
        p_t = cfg.tx_power_w

        if self.variant.pairing is None:
            outcomes = [build_outcome(rb, int(c), bool(a), None, cfg.default_mode, False, gamma, p_t,
                                      cfg.bandwidth_hz, reward_of)
                        for rb, (c, a) in enumerate(zip(chs, ch_active))]
        else:
            nch_mask = tr.active.copy()
            nch_mask[chs] = False
            nchs = np.flatnonzero(nch_mask)
            if self.variant.pairing == "random":
                kwargs = dict(p_t=p_t, p_tol=cfg.sic_tolerance_w, bandwidth_hz=cfg.bandwidth_hz,
                              default_mode=cfg.default_mode, reward_of=reward_of)
                if self.variant.shadow_mode_switch:
                    shadow = run_pairing(chs, ch_active, nchs, gamma, self.population.positions,
                                         mode_switch=not self.mode_switch,
                                         rng=copy.deepcopy(self.pair_rng), **kwargs)
                    self._log_shadow(cycle, shadow)
                outcomes = run_pairing(chs, ch_active, nchs, gamma, self.population.positions,
                                       mode_switch=self.mode_switch, rng=self.pair_rng, **kwargs)
            else:
                outcomes = self._optimal_outcomes(chs, ch_active, nchs, gamma, theta_oma, reward_of)

        served = [o.ch_id for o in outcomes if o.ch_was_active] + \
                 [o.nch_id for o in outcomes if o.nch_id is not None]
        served = np.asarray(served, dtype=np.int64)
        reward_sum = math.fsum(o.theta_ch + o.theta_nch for o in outcomes)
        wasted = sum(o.wasted for o in outcomes)
        best_sum = math.fsum(np.sort(theta_oma[tr.active])[::-1][:cfg.n_rbs])

        t = self.trace
        t.reward[cycle] = reward_sum
        t.wasted[cycle] = wasted
        t.winners[cycle] = len(served)
        t.best_reward[cycle] = best_sum
        t.paired[cycle] = sum(o.nch_id is not None for o in outcomes)
        np.add.at(t.grants, chs, 1)
        t.grants[[o.nch_id for o in outcomes if o.nch_id is not None]] += 1
        t.served_hist[served] += 1
        delays = cycle - tr.created[served]
        t.late_served += int(np.sum(delays > self.population.max_delay[served]))
        if self.variant.learns:
            t.unpredicted_grants += int(np.sum(~np.isin(chs, snapshot.predicted_active)))
        t.access_delay_sum += int(np.sum(delays))
        t.max_delay_sum += int(np.sum(self.population.max_delay[served]))

        if self.bandit is not None:
            bandit.update_after_cycle(self.bandit, outcomes, cfg.reward_share_rho, snapshot.predicted_active,
                                      tr.active_ids() if cfg.t_prime == "true" else None)
        tr.clear(served)
        return reward_sum, wasted, served, best_sum - reward_sum

    def _optimal_outcomes(self, chs, ch_active, nchs, gamma, theta_oma, reward_of):
        cfg = self.cfg
        p_t = cfg.tx_power_w
        inst = MatchingInstance.build(chs, nchs, theta_oma, gamma, p_t, cfg.sic_tolerance_w)
        pairs, _ = optimal_pairing(inst)
        partner = dict(pairs)
        out = []
        for rb, (c, a) in enumerate(zip(chs, ch_active)):
            n = partner.get(int(c))
            mode = cfg.default_mode if n is None else (WEAK_CH if gamma[n] >= gamma[c] else STRONG_CH)
            out.append(build_outcome(rb, int(c), bool(a), n, mode, False, gamma, p_t, cfg.bandwidth_hz, reward_of))
        return out

    def _log_shadow(self, cycle, outcomes):
        t = self.trace
        if t.shadow_reward is None:
            t.shadow_reward = np.zeros(len(t.reward))
            t.shadow_wasted = np.zeros(len(t.reward), dtype=np.int64)
        t.shadow_reward[cycle] = math.fsum(o.theta_ch + o.theta_nch for o in outcomes)
        t.shadow_wasted[cycle] = sum(o.wasted for o in outcomes)


class Simulation:
    """One seeded replication of several variants on a common trajectory."""

    def __init__(self, cfg, variants, seed=None):
        cfg.validate()
        self.cfg = cfg
        self.seed = cfg.rng_seed if seed is None else int(seed)
        self.population = build_population(cfg, self.seed)
        schedule = build_activation_schedule(cfg, derive_stream(self.seed, "activation"))
        self.schedule = schedule
        self.traffic_rng = derive_stream(self.seed, "traffic")
        self.channel_rng = derive_stream(self.seed, "channel")
        self.predictor_rng = derive_stream(self.seed, "predictor")
        variants = [VARIANTS[v] if isinstance(v, str) else v for v in variants]
        self.worlds = {v.name: World(v, cfg, self.population, schedule, self.seed) for v in variants}
        self.realized_error = np.zeros(cfg.n_cycles)
        self.cycle = 0

    def run_cycle(self) -> CycleLog:
        cfg = self.cfg
        cycle = self.cycle
        n = cfg.n_devices
        tdraws = draw_traffic(self.traffic_rng, n)
        gamma = draw_gains(self.population, cycle, self.channel_rng, noise_power_w=cfg.noise_power_w,
                           shadowing_sigma_db=cfg.shadowing_sigma_db,
                           min_distance_m=cfg.min_distance_m).gamma
        pdraws = draw_prediction(self.predictor_rng, n, cfg.pred_err_mean, cfg.pred_err_std, cfg.p_active_range)
        self.realized_error[cycle] = pdraws.error
        log = CycleLog(cycle=cycle, realized_error=pdraws.error)
        for name, world in self.worlds.items():
            r, w, served, regret = world.step(cycle, tdraws, gamma, pdraws)
            log.reward_sum[name] = r
            log.wasted_rbs[name] = w
            log.served_ids[name] = served
            log.regret_increment[name] = regret
        self.cycle += 1
        return log

    def run(self, progress=None):
        while self.cycle < self.cfg.n_cycles:
            self.run_cycle()
            if progress is not None:
                progress(self.cycle)
        return {name: w.trace for name, w in self.worlds.items()}
