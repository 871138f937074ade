"""Coupling-constant sweeps: LBE crossing times and sync verdicts per K.

A sweep fixes everything about a coupled pair except the coupling constant
and, for each K on a grid, runs one lower-bound-error experiment plus one
auxiliary-system synchronization check with identical initial conditions and
integration settings.  The per-K work shares a single ensemble integration
(slave variant A, slave variant B, and the auxiliary all driven by the same
master), which is bitwise identical to running the experiments separately
because followers never influence one another.

Two built-in case studies mirror the package's reference experiments:

* ``duffing-lorenz``   Duffing master driving the Lorenz y2 equation,
                       K grid 0..40
* ``rossler-duffing``  Rossler master driving the Duffing x1 equation,
                       K grid 0..400

Divergent runs are data, not failures: the record carries the divergence
step and the sweep continues.
"""

from __future__ import annotations

import hashlib
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Optional, Sequence

from ._version import __version__
from .integrate import Follower, IntegrationConfig, integrate_ensemble
from .lbe import (DEFAULT_THRESHOLD, LbeSeries, default_component, first_crossing,
                  lbe_between)
from .sync import (DEFAULT_EPSILON_REL, DEFAULT_TRANSIENT_FRACTION, SyncVerdict,
                   verdict_from_orbits)
from .systems import ConfigurationError, CoupledPair, duffing, lorenz, rossler

__all__ = [
    "SweepPlan",
    "SweepRecord",
    "SweepResult",
    "run_sweep",
    "case_study",
    "CASE_STUDIES",
    "plan_config_dict",
    "WORKERS_ENV_VAR",
]

WORKERS_ENV_VAR = "SYNCLBE_WORKERS"


@dataclass(frozen=True)
class SweepPlan:
    """Everything a sweep needs except the per-run coupling constant."""

    pair: CoupledPair
    k_values: tuple
    master_ic: tuple
    slave_ic: tuple
    aux_ic: tuple
    cfg: IntegrationConfig = field(default_factory=IntegrationConfig)
    component: Optional[int] = None
    threshold_log10: float = DEFAULT_THRESHOLD
    transient_fraction: float = DEFAULT_TRANSIENT_FRACTION
    epsilon_rel: float = DEFAULT_EPSILON_REL
    variants: tuple = ("A", "B")
    case: str = "custom"

    def __post_init__(self):
        ks = tuple(float(k) for k in self.k_values)
        if len(ks) == 0:
            raise ConfigurationError("k_values must not be empty")
        if any(k < 0.0 for k in ks):
            raise ConfigurationError(f"k_values must be nonnegative, got {ks}")
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise ConfigurationError(f"k_values must be strictly increasing, got {ks}")
        if not 0.0 <= self.transient_fraction < 1.0:
            raise ConfigurationError(
                f"transient_fraction must be in [0, 1), got {self.transient_fraction}")
        object.__setattr__(self, "k_values", ks)
        object.__setattr__(self, "master_ic", tuple(float(c) for c in self.master_ic))
        object.__setattr__(self, "slave_ic", tuple(float(c) for c in self.slave_ic))
        object.__setattr__(self, "aux_ic", tuple(float(c) for c in self.aux_ic))


@dataclass
class SweepRecord:
    """Result of one sweep grid point."""

    k: float
    crossing_index: Optional[int]
    never_crossed: bool
    saturated: bool
    max_log10_2delta: float
    synchronized: bool
    sync_metric: float
    diverged_at: Optional[int]
    verdict: Optional[SyncVerdict] = None
    series: Optional[LbeSeries] = None


@dataclass
class SweepResult:
    plan: SweepPlan
    records: list
    provenance: dict

    def record_for(self, k: float) -> SweepRecord:
        for rec in self.records:
            if rec.k == float(k):
                return rec
        raise KeyError(f"no record for k={k}")


def _run_one(plan: SweepPlan, k: float) -> SweepRecord:
    pair = plan.pair.with_k(k)
    va, vb = plan.variants
    followers = [
        Follower(pair.slave.with_variant(va), plan.slave_ic, pair.k,
                 pair.drive_source, pair.drive_target),
        Follower(pair.slave.with_variant(vb), plan.slave_ic, pair.k,
                 pair.drive_source, pair.drive_target),
        Follower(pair.slave.with_variant(va), plan.aux_ic, pair.k,
                 pair.drive_source, pair.drive_target),
    ]
    _, (orbit_a, orbit_b, orbit_aux) = integrate_ensemble(
        pair.master, plan.master_ic, followers, plan.cfg)
    component = plan.component
    if component is None:
        component = default_component(pair)
    series = lbe_between(orbit_a, orbit_b, component)
    crossing = first_crossing(series, plan.threshold_log10)
    transient = int(plan.transient_fraction * len(orbit_a))
    verdict = verdict_from_orbits(orbit_a, orbit_aux, transient,
                                  epsilon_rel=plan.epsilon_rel)
    return SweepRecord(
        k=float(k),
        crossing_index=crossing.crossing_index,
        never_crossed=crossing.never_crossed,
        saturated=series.saturated,
        max_log10_2delta=series.max_log10_2delta,
        synchronized=verdict.synchronized,
        sync_metric=verdict.metric,
        diverged_at=series.diverged_at,
        verdict=verdict,
        series=series,
    )


def _worker(args):
    plan, k = args
    return _run_one(plan, k)


def resolve_workers(workers: Optional[int] = None) -> int:
    """Worker count: explicit argument, else the SYNCLBE_WORKERS environment
    variable, else 1."""
    if workers is None:
        env = os.environ.get(WORKERS_ENV_VAR, "").strip()
        workers = int(env) if env else 1
    if workers < 1:
        raise ConfigurationError(f"worker count must be >= 1, got {workers}")
    return workers


def run_sweep(plan: SweepPlan, workers: Optional[int] = None) -> SweepResult:
    """Run the sweep; records come back in k order regardless of workers.

    Results are deterministic given the plan (the provenance timestamp is
    the only field that varies between runs).
    """
    workers = resolve_workers(workers)
    if workers == 1 or len(plan.k_values) == 1:
        records = [_run_one(plan, k) for k in plan.k_values]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(plan.k_values))) as pool:
            records = list(pool.map(_worker, [(plan, k) for k in plan.k_values]))
    return SweepResult(plan=plan, records=records, provenance=make_provenance(plan))


def plan_config_dict(plan: SweepPlan) -> dict:
    """Flat, ordered description of everything that determines the output."""
    pair = plan.pair
    d = {
        "case": plan.case,
        "master": pair.master.name,
        "slave": pair.slave.name,
        "drive_source": pair.drive_source,
        "drive_target": pair.drive_target,
        "k_values": ",".join(repr(k) for k in plan.k_values),
        "master_ic": ",".join(repr(c) for c in plan.master_ic),
        "slave_ic": ",".join(repr(c) for c in plan.slave_ic),
        "aux_ic": ",".join(repr(c) for c in plan.aux_ic),
        "step_size": repr(plan.cfg.step_size),
        "n_steps": plan.cfg.n_steps,
        "record_stride": plan.cfg.record_stride,
        "component": "" if plan.component is None else plan.component,
        "threshold_log10": repr(plan.threshold_log10),
        "transient_fraction": repr(plan.transient_fraction),
        "epsilon_rel": repr(plan.epsilon_rel),
        "variants": ",".join(plan.variants),
    }
    for name, value in sorted(pair.master.params.items()):
        d[f"master.{name}"] = repr(value)
    for name, value in sorted(pair.slave.params.items()):
        d[f"slave.{name}"] = repr(value)
    return d


def config_hash(plan: SweepPlan) -> str:
    text = "\n".join(f"{k}={v}" for k, v in sorted(plan_config_dict(plan).items()))
    return hashlib.sha256(text.encode("ascii")).hexdigest()


def make_provenance(plan: SweepPlan) -> dict:
    return {
        "config_hash": config_hash(plan),
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "build": f"synclbe {__version__}",
    }


# Initial conditions follow the reference experiments: Duffing (3, 4),
# Lorenz (1, 1, 1) with auxiliary (5, 5, 5); Rossler (1, 1, 1) with the
# Duffing slave again at (3, 4) and auxiliary (5, 6).  The K grids include
# every coupling value those experiments single out, with 40 and 400 as the
# strong-coupling demonstration points.
CASE_STUDIES = ("duffing-lorenz", "rossler-duffing")


def case_study(name: str, cfg: Optional[IntegrationConfig] = None,
               k_values: Optional[Sequence[float]] = None,
               **overrides) -> SweepPlan:
    """Fully populated sweep plan for one built-in case study."""
    if name == "duffing-lorenz":
        plan = SweepPlan(
            pair=CoupledPair(master=duffing(), slave=lorenz(),
                             drive_source=0, drive_target=1),
            k_values=(0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 40.0),
            master_ic=(3.0, 4.0),
            slave_ic=(1.0, 1.0, 1.0),
            aux_ic=(5.0, 5.0, 5.0),
            case=name,
        )
    elif name == "rossler-duffing":
        plan = SweepPlan(
            pair=CoupledPair(master=rossler(), slave=duffing(),
                             drive_source=0, drive_target=0),
            k_values=(0.0, 100.0, 200.0, 300.0, 400.0),
            master_ic=(1.0, 1.0, 1.0),
            slave_ic=(3.0, 4.0),
            aux_ic=(5.0, 6.0),
            case=name,
        )
    else:
        raise ConfigurationError(
            f"unknown case study {name!r}; available: {', '.join(CASE_STUDIES)}")
    if cfg is not None:
        plan = replace(plan, cfg=cfg)
    if k_values is not None:
        plan = replace(plan, k_values=tuple(float(k) for k in k_values))
    if overrides:
        plan = replace(plan, **overrides)
    return plan
