"""Replicated experiments, summaries and CSV output."""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from multiprocessing import Pool
from pathlib import Path

import numpy as np

from .config import ScenarioConfig, dump_config
from .engine import Simulation

log = logging.getLogger(__name__)

SWEEP_ERRORS = (0.01, 0.1, 0.4)


@dataclass(frozen=True)
class ExperimentDef:
    name: str
    variants: tuple
    description: str
    sweep: tuple | None = None   # pred_err_mean values, if the experiment is a sweep
    figures: tuple = ()


EXPERIMENTS = {
    e.name: e for e in [
        ExperimentDef("table2", ("oma-mab", "noma-mab"),
                      "missing ratio, winners and delays of OMA vs NOMA",
                      figures=("histogram", "waste")),
        ExperimentDef("reward-curves", ("oma-mab", "noma-mab", "best-oma"),
                      "cumulative reward and regret against the best OMA oracle",
                      figures=("reward", "regret")),
        ExperimentDef("waste-curves", ("oma-mab", "noma-mab"),
                      "per-device grant histogram and cumulative wasted RBs",
                      figures=("histogram", "waste")),
        ExperimentDef("pred-error-sweep", ("oma-mab", "noma-mab"),
                      "waste and reward for average prediction errors 0.01, 0.1, 0.4",
                      sweep=SWEEP_ERRORS, figures=("waste", "reward")),
        ExperimentDef("mode-switch", ("noma-mab-nms", "noma-mab-ms"),
                      "NOMA reward with the pairing mode switch off and on",
                      figures=("reward", "waste")),
        ExperimentDef("quasi-optimal", ("qo-best", "qo-mab", "noma-mab", "best-oma", "oma-mab"),
                      "random pairing against optimal pairing of best or learned CHs",
                      figures=("reward",)),
    ]
}


@dataclass
class RunSummary:
    variant: str
    n_replications: int
    missing_ratio: float
    winners: float
    avg_max_delay: float
    avg_access_delay: float
    histogram: np.ndarray
    cumulative_reward: np.ndarray
    cumulative_regret: np.ndarray
    cumulative_waste: np.ndarray
    std: dict = field(default_factory=dict)

    def strict_vs_relaxed(self, strict_mask):
        return float(self.histogram[strict_mask].mean()), float(self.histogram[~strict_mask].mean())


@dataclass
class ExperimentResult:
    cfg: ScenarioConfig
    seeds: list
    summaries: dict       # variant -> RunSummary
    traces: list          # per replication: variant -> Trace
    strict_mask: np.ndarray


def replication_seeds(seed: int, n: int) -> list[int]:
    return [int(s) for s in np.random.SeedSequence(int(seed)).generate_state(n)]


def _run_one(args):
    cfg, variants, seed = args
    sim = Simulation(cfg, variants, seed=seed)
    traces = sim.run()
    return traces, sim.population.strict.copy()


def summarize(name, traces, n_rbs) -> RunSummary:
    """Average per-replication metrics of one variant."""
    T = len(traces[0].reward)
    miss = np.array([t.wasted.sum() / (n_rbs * T) for t in traces])
    wins = np.array([t.winners.sum() for t in traces], dtype=float)
    avg_max = np.array([t.max_delay_sum / max(t.winners.sum(), 1) for t in traces])
    avg_acc = np.array([t.access_delay_sum / max(t.winners.sum(), 1) for t in traces])

    def mean_series(f):
        return np.mean([f(t) for t in traces], axis=0)

    return RunSummary(
        variant=name,
        n_replications=len(traces),
        missing_ratio=float(miss.mean()),
        winners=float(wins.mean()),
        avg_max_delay=float(avg_max.mean()),
        avg_access_delay=float(avg_acc.mean()),
        histogram=mean_series(lambda t: t.grants),
        cumulative_reward=mean_series(lambda t: np.cumsum(t.reward)),
        cumulative_regret=mean_series(lambda t: np.cumsum(t.regret)),
        cumulative_waste=mean_series(lambda t: np.cumsum(t.wasted)),
        std={"missing_ratio": float(miss.std()), "winners": float(wins.std()),
             "avg_max_delay": float(avg_max.std()), "avg_access_delay": float(avg_acc.std())},
    )


def run_experiment(cfg: ScenarioConfig, n_replications: int = 1, variants=("oma-mab", "noma-mab"),
                   seed: int | None = None, jobs: int = 1) -> ExperimentResult:
    """Run ``n_replications`` seeded replications and average them per variant."""
    cfg.validate()
    seed = cfg.rng_seed if seed is None else seed
    seeds = replication_seeds(seed, n_replications)
    tasks = [(cfg, tuple(variants), s) for s in seeds]
    if jobs > 1 and len(tasks) > 1:
        with Pool(min(jobs, len(tasks))) as pool:
            results = pool.map(_run_one, tasks)
    else:
        results = []
        for i, task in enumerate(tasks):
            log.info("replication %d/%d (seed %d)", i + 1, len(tasks), task[2])
            results.append(_run_one(task))
    traces = [r[0] for r in results]
    names = list(traces[0])
    summaries = {v: summarize(v, [tr[v] for tr in traces], cfg.n_rbs) for v in names}
    return ExperimentResult(cfg, seeds, summaries, traces, results[0][1])


def sweep_prediction_error(cfg: ScenarioConfig, errs=SWEEP_ERRORS, n_replications=1,
                           variants=("oma-mab", "noma-mab"), seed=None, jobs=1) -> dict:
    """One experiment per average prediction error, all on the same seeds."""
    return {
        float(e): run_experiment(cfg.replace(pred_err_mean=float(e)), n_replications, variants, seed, jobs)
        for e in errs
    }


# -- output ------------------------------------------------------------------

def _fmt(x):
    return repr(float(x))


def write_series(path: Path, series: np.ndarray, per_rep=None):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if per_rep is None:
            w.writerow(["cycle", "value"])
            for t, v in enumerate(series):
                w.writerow([t, _fmt(v)])
        else:
            w.writerow(["cycle", "mean", "std"] + [f"rep{i}" for i in range(len(per_rep))])
            sd = np.std(per_rep, axis=0)
            for t in range(len(series)):
                w.writerow([t, _fmt(series[t]), _fmt(sd[t])] + [_fmt(r[t]) for r in per_rep])


SUMMARY_COLUMNS = ["system", "replications", "missing_ratio", "winners", "avg_max_delay", "avg_access_delay",
                   "missing_ratio_std", "winners_std", "avg_max_delay_std", "avg_access_delay_std"]


def write_summary(path: Path, summaries, label=lambda v: v):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for v, s in summaries.items():
            w.writerow([label(v), s.n_replications, _fmt(s.missing_ratio), _fmt(s.winners),
                        _fmt(s.avg_max_delay), _fmt(s.avg_access_delay),
                        _fmt(s.std["missing_ratio"]), _fmt(s.std["winners"]),
                        _fmt(s.std["avg_max_delay"]), _fmt(s.std["avg_access_delay"])])


def write_histogram(path: Path, summary: RunSummary, strict_mask):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["device", "qos_class", "mean_grants"])
        for i, g in enumerate(summary.histogram):
            w.writerow([i, "strict" if strict_mask[i] else "relaxed", _fmt(g)])


def write_result(outdir: Path, result: ExperimentResult, suffix: str = "") -> list[Path]:
    """Write ``<variant><suffix>_<metric>.csv`` files for every variant."""
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for v, s in result.summaries.items():
        reps = [tr[v] for tr in result.traces]
        for metric, series, per in (
            ("reward", s.cumulative_reward, [np.cumsum(t.reward) for t in reps]),
            ("regret", s.cumulative_regret, [np.cumsum(t.regret) for t in reps]),
            ("waste", s.cumulative_waste, [np.cumsum(t.wasted) for t in reps]),
        ):
            p = outdir / f"{v}{suffix}_{metric}.csv"
            write_series(p, series, per)
            written.append(p)
        if reps[0].shadow_reward is not None:
            for metric, per in (("shadow_reward", [np.cumsum(t.shadow_reward) for t in reps]),
                                ("shadow_waste", [np.cumsum(t.shadow_wasted) for t in reps])):
                p = outdir / f"{v}{suffix}_{metric}.csv"
                write_series(p, np.mean(per, axis=0), per)
                written.append(p)
        p = outdir / f"{v}{suffix}_histogram.csv"
        write_histogram(p, s, result.strict_mask)
        written.append(p)
    return written


def write_manifest(path: Path, experiment: str, cfg: ScenarioConfig, seed: int, replications: int):
    text = (
        "[run]\n"
        f"experiment = {experiment}\n"
        f"seed = {seed}\n"
        f"replications = {replications}\n"
        "\n[scenario]\n" + dump_config(cfg)
    )
    path.write_text(text)
