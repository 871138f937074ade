"""Lower bound error between pseudo-orbits of equivalent formulations.

Two mathematically equivalent formulations of the same vector field, run
from the same initial condition with the same step size and the same master
signal, disagree only through floating-point rounding.  Half their absolute
difference,

    delta_n = |a_n - b_n| / 2,

is a lower bound on the true numerical error of at least one of the two
pseudo-orbits, so a growing delta_n certifies error growth without knowing
the exact orbit.  Results are usually read as log10(2*delta_n); the value is
minus infinity wherever the two orbits agree bitwise, and a series that is
zero *everywhere* is called saturated (the formulations never produced a
representable difference).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .integrate import Follower, IntegrationConfig, PseudoOrbit, integrate_ensemble
from .systems import ConfigurationError, CoupledPair

__all__ = [
    "LbeSeries",
    "CrossingMetric",
    "lbe_between",
    "run_lbe_experiment",
    "log10_lbe",
    "first_crossing",
    "default_component",
    "DEFAULT_THRESHOLD",
]

DEFAULT_THRESHOLD = -0.3


@dataclass
class LbeSeries:
    """Per-step lower-bound-error values for one state component.

    `values[n]` is delta_n >= 0; `log10_2delta[n]` is log10(2*delta_n) with
    -inf marking exact agreement.  `saturated` is True when every delta_n is
    zero.  If either source run diverged, the series is truncated there and
    `diverged_at` carries the step index.
    """

    component: int
    values: np.ndarray
    log10_2delta: np.ndarray
    times: np.ndarray
    saturated: bool
    stride: int = 1
    diverged_at: Optional[int] = None

    def __len__(self):
        return len(self.values)

    @property
    def max_log10_2delta(self) -> float:
        """Largest log10(2*delta_n) over the series; -inf if saturated."""
        if self.saturated or len(self.log10_2delta) == 0:
            return float("-inf")
        return float(np.max(self.log10_2delta))


@dataclass(frozen=True)
class CrossingMetric:
    """First index where log10(2*delta) reaches a threshold."""

    threshold_log10: float
    crossing_index: Optional[int]
    never_crossed: bool


def log10_lbe(values) -> np.ndarray:
    """Elementwise log10(2*delta) of a series or a raw delta array; zeros map
    to -inf.

    2*delta is computed in floating point, which is exact because delta is
    stored as |a-b|/2 (a power-of-two scaling).
    """
    if isinstance(values, LbeSeries):
        values = values.values
    values = np.asarray(values, dtype=float)
    with np.errstate(divide="ignore"):
        return np.log10(2.0 * values)


def lbe_between(orbit_a: PseudoOrbit, orbit_b: PseudoOrbit, component: int) -> LbeSeries:
    """Lower bound error series between two already-computed pseudo-orbits."""
    n = min(len(orbit_a), len(orbit_b))
    if orbit_a.stride != orbit_b.stride:
        raise ConfigurationError("orbits were recorded with different strides")
    a = orbit_a.component(component)[:n]
    b = orbit_b.component(component)[:n]
    values = np.abs(a - b) * 0.5
    diverged_at = orbit_a.diverged_at
    if orbit_b.diverged_at is not None:
        diverged_at = (orbit_b.diverged_at if diverged_at is None
                       else min(diverged_at, orbit_b.diverged_at))
    return LbeSeries(
        component=component,
        values=values,
        log10_2delta=log10_lbe(values),
        times=orbit_a.times[:n],
        saturated=bool(np.all(values == 0.0)),
        stride=orbit_a.stride,
        diverged_at=diverged_at,
    )


def run_lbe_experiment(pair: CoupledPair, master_ic, slave_ic, cfg: IntegrationConfig,
                       component: Optional[int] = None,
                       variants: tuple = ("A", "B")) -> LbeSeries:
    """Integrate the coupled pair once per slave formulation and compare.

    The master is integrated once and both slave runs are driven by the same
    (bitwise identical) master stage states, so the difference between the
    two pseudo-orbits originates in the slave's formulation alone.  The
    degenerate self-comparison ``variants=("A", "A")`` is allowed; it must
    yield an identically zero, saturated series and exists for exactly that
    test.

    `component` defaults to the slave's canonical drive slot -- y2 for a
    Lorenz slave, x2 for a Duffing slave.
    """
    for v in variants:
        if v not in pair.slave.variants:
            raise ConfigurationError(
                f"slave {pair.slave.name} has no registered variant {v!r}")
    if component is None:
        component = default_component(pair)
    if not 0 <= component < pair.slave.dimension:
        raise ConfigurationError(f"component {component} out of range for "
                                 f"{pair.slave.name}")
    ic = tuple(float(c) for c in slave_ic)
    followers = [Follower(pair.slave.with_variant(v), ic, pair.k,
                          pair.drive_source, pair.drive_target) for v in variants]
    _, orbits = integrate_ensemble(pair.master, master_ic, followers, cfg)
    return lbe_between(orbits[0], orbits[1], component)


def default_component(pair: CoupledPair) -> int:
    """Component compared by default: y2 for a Lorenz slave, x2 for a
    Duffing slave (the ambiguity is real, so it stays configurable)."""
    if pair.slave.name == "duffing":
        return 1
    slot = pair.slave.drive_slot
    return slot if slot is not None else 0


def first_crossing(series: LbeSeries, threshold_log10: float = DEFAULT_THRESHOLD) -> CrossingMetric:
    """Smallest index n with log10(2*delta_n) >= threshold (first touch; the
    crossing is not required to persist)."""
    if not math.isfinite(threshold_log10):
        raise ConfigurationError(f"threshold must be finite, got {threshold_log10}")
    hits = np.nonzero(series.log10_2delta >= threshold_log10)[0]
    if hits.size == 0:
        return CrossingMetric(threshold_log10, None, True)
    return CrossingMetric(threshold_log10, int(hits[0]), False)
