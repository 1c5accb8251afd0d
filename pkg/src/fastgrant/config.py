"""Scenario configuration: defaults, flat-file loading and validation."""
from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np


class ConfigError(ValueError):
    """Raised when a scenario configuration violates one of its invariants.

    ``violations`` holds one human-readable line per failed check.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid configuration: " + "; ".join(self.violations))


@dataclass(frozen=True)
class ScenarioConfig:
    # population / resources
    n_devices: int = 500          # N
    n_rbs: int = 10               # M
    n_cycles: int = 10_000        # T
    area_side_m: float = 500.0

    # radio
    bandwidth_hz: float = 360e3
    tx_power_dbm: float = 10.0
    sic_tolerance_dbm: float = 4.0
    noise_psd_dbm_hz: float = -174.0
    shadowing_sigma_db: float = 10.0
    min_distance_m: float = 1.0

    # traffic
    beta_alpha: float = 3.0
    beta_beta: float = 4.0
    activation_slots: int = 10    # I_A
    reactivation_prob: float = 0.1
    strict_delay_range: tuple = (1, 100)
    relaxed_delay_range: tuple = (150, 300)
    min_rate_bps: float = 0.0

    # utility / reward
    delta_weights: tuple = (0.2, 0.3, 0.5)
    gompertz_a: float = 1.0
    gompertz_b: float = 8.0
    gompertz_c: float = 0.03
    r_max_bps: float = 14e6
    reward_share_rho: float = 0.3

    # predictor
    pred_err_mean: float = 0.01
    pred_err_std: float = 0.04
    p_active_range: tuple = (0.8, 1.0)

    # scheduler / pairing
    default_mode: int = 0
    mode_switch_enabled: bool = True
    t_prime: str = "estimated"    # or "true"

    rng_seed: int = 1

    # -- derived quantities -------------------------------------------------

    @property
    def tx_power_w(self) -> float:
        return dbm_to_watts(self.tx_power_dbm)

    @property
    def sic_tolerance_w(self) -> float:
        return dbm_to_watts(self.sic_tolerance_dbm)

    @property
    def noise_power_w(self) -> float:
        """Thermal noise over one RB, N_0 * B, in watts."""
        return dbm_to_watts(self.noise_psd_dbm_hz) * self.bandwidth_hz

    def violations(self) -> list[str]:
        out = []
        for name in ("n_devices", "n_rbs", "n_cycles", "activation_slots"):
            if int(getattr(self, name)) < 1:
                out.append(f"{name} must be a positive count")
        if self.n_devices <= self.n_rbs:
            out.append("n_devices must exceed n_rbs (N > M)")
        if len(self.delta_weights) != 3 or abs(sum(self.delta_weights) - 1.0) > 1e-9:
            out.append(f"delta_weights must sum to 1 (got {sum(self.delta_weights):g})")
        if any(d < 0 for d in self.delta_weights):
            out.append("delta_weights must be nonnegative")
        if not 0.0 <= self.reward_share_rho <= 1.0:
            out.append("reward_share_rho must lie in [0, 1]")
        if not 0.0 <= self.pred_err_mean <= 1.0:
            out.append("pred_err_mean must lie in [0, 1]")
        if self.pred_err_std < 0:
            out.append("pred_err_std must be nonnegative")
        if not 0.0 <= self.reactivation_prob <= 1.0:
            out.append("reactivation_prob must lie in [0, 1]")
        lo, hi = self.p_active_range
        if not 0.0 <= lo <= hi <= 1.0:
            out.append("p_active_range must be a subinterval of [0, 1]")
        for name in ("strict_delay_range", "relaxed_delay_range"):
            lo, hi = getattr(self, name)
            if not 0 <= lo <= hi:
                out.append(f"{name} must be an ordered nonnegative interval")
        if self.beta_alpha <= 0 or self.beta_beta <= 0:
            out.append("beta_alpha and beta_beta must be positive")
        if self.area_side_m <= 0 or self.bandwidth_hz <= 0:
            out.append("area_side_m and bandwidth_hz must be positive")
        if self.shadowing_sigma_db < 0:
            out.append("shadowing_sigma_db must be nonnegative")
        if self.r_max_bps <= 0:
            out.append("r_max_bps must be positive")
        if self.default_mode not in (0, 1):
            out.append("default_mode must be 0 or 1")
        if self.t_prime not in ("estimated", "true"):
            out.append("t_prime must be 'estimated' or 'true'")
        return out

    def validate(self) -> "ScenarioConfig":
        bad = self.violations()
        if bad:
            raise ConfigError(bad)
        return self

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def to_items(self) -> list[tuple[str, str]]:
        return [(f.name, format_value(getattr(self, f.name))) for f in fields(self)]


def dbm_to_watts(dbm):
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(w):
    return 10.0 * np.log10(w) + 30.0


def db_to_linear(db):
    return 10.0 ** (db / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(x)


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ", ".join(format_value(v) for v in value)
    return repr(value) if isinstance(value, float) else str(value)


_FIELD_TYPES = {f.name: type(f.default) for f in fields(ScenarioConfig)}


def parse_value(name: str, text: str):
    """Convert the textual value of ``name`` to the type of its default."""
    if name not in _FIELD_TYPES:
        raise ConfigError([f"unknown parameter {name!r}"])
    kind = _FIELD_TYPES[name]
    text = text.strip()
    try:
        if kind is bool:
            low = text.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if kind is tuple:
            parts = [p for p in text.replace("(", "").replace(")", "").split(",") if p.strip()]
            return tuple(_number(p) for p in parts)
        if kind is int:
            return int(float(text)) if float(text).is_integer() else int(text)
        if kind is float:
            return float(text)
        return text
    except ValueError:
        raise ConfigError([f"cannot parse {name} = {text!r} as {kind.__name__}"]) from None


def _number(text: str):
    value = float(text)
    return int(value) if value.is_integer() and "." not in text and "e" not in text.lower() else value


def config_from_overrides(overrides: dict | None = None, base: ScenarioConfig | None = None) -> ScenarioConfig:
    base = base or ScenarioConfig()
    if not overrides:
        return base
    typed = {k: parse_value(k, v) if isinstance(v, str) else v for k, v in overrides.items()}
    return base.replace(**typed)


def parse_config_text(text: str, section: str = "scenario") -> dict:
    """Parse ``key = value`` lines; ``#`` and ``;`` start comments.

    A file without section headers is read as a single scenario section.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError:
        parser.read_string(f"[{section}]\n" + text)
    return dict(parser[section]) if parser.has_section(section) else {}


def load_config(path, validate: bool = True) -> ScenarioConfig:
    """Read a flat key-value file; absent keys keep their defaults."""
    cfg = config_from_overrides(parse_config_text(Path(path).read_text()))
    return cfg.validate() if validate else cfg


def dump_config(cfg: ScenarioConfig) -> str:
    return "".join(f"{k} = {v}\n" for k, v in cfg.to_items())
