"""Fast uplink grant scheduling for machine-type devices with NOMA pairing.

A discrete-time simulator in which a sleeping-bandit scheduler grants
resource blocks to predicted-active devices, and granted devices share
their block with a nearby active device through distributed two-user
NOMA pairing. Oracle baselines (best OMA grants, optimal pairing) run on
the same random trajectory.
"""
from .config import ConfigError, ScenarioConfig, load_config
from .engine import VARIANTS, Simulation
from .experiments import EXPERIMENTS, run_experiment, sweep_prediction_error
from .scenario import build_population, derive_stream

__all__ = [
    "ConfigError", "ScenarioConfig", "load_config", "VARIANTS", "Simulation", "EXPERIMENTS",
    "run_experiment", "sweep_prediction_error", "build_population", "derive_stream",
]
__version__ = "0.1.0"
