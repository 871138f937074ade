"""synclbe: how synchronization between coupled chaotic oscillators shapes
floating-point error growth, measured through the lower bound error between
pseudo-orbits of mathematically equivalent formulations."""

from ._version import __version__
from .systems import (
    ConfigurationError,
    CoupledPair,
    DivergenceError,
    SystemSpec,
    coupled_derivative,
    duffing,
    eval_duffing,
    eval_lorenz,
    eval_rossler,
    lorenz,
    rossler,
)
from .integrate import (
    Follower,
    IntegrationConfig,
    PseudoOrbit,
    integrate,
    integrate_ensemble,
    integrate_pair,
    rk4_step,
)
from .lbe import CrossingMetric, LbeSeries, first_crossing, lbe_between, log10_lbe, run_lbe_experiment
from .sync import SyncVerdict, attractor_diameter, auxiliary_check, phase_portrait_data, verdict_from_orbits
from .sweep import CASE_STUDIES, SweepPlan, SweepRecord, SweepResult, case_study, run_sweep

__all__ = [
    "__version__",
    "ConfigurationError",
    "DivergenceError",
    "SystemSpec",
    "CoupledPair",
    "duffing",
    "lorenz",
    "rossler",
    "eval_duffing",
    "eval_lorenz",
    "eval_rossler",
    "coupled_derivative",
    "IntegrationConfig",
    "PseudoOrbit",
    "Follower",
    "rk4_step",
    "integrate",
    "integrate_pair",
    "integrate_ensemble",
    "LbeSeries",
    "CrossingMetric",
    "lbe_between",
    "run_lbe_experiment",
    "log10_lbe",
    "first_crossing",
    "SyncVerdict",
    "auxiliary_check",
    "verdict_from_orbits",
    "phase_portrait_data",
    "attractor_diameter",
    "SweepPlan",
    "SweepRecord",
    "SweepResult",
    "run_sweep",
    "case_study",
    "CASE_STUDIES",
]
