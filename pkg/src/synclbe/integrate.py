"""Fixed-step, bit-deterministic classical RK4 integration.

Every orbit this package produces comes from the same arithmetic, spelled
out once in `rk4_step` and repeated verbatim inside `integrate_ensemble`:

* stage times      t1 = t, t2 = t3 = t + h2, t4 = t + h, with h2 = 0.5*h
* stage states     s_i + h2*k1_i, s_i + h2*k2_i, s_i + h*k3_i (per component)
* update           s_i + h6*((k1_i + 2.0*k2_i + 2.0*k3_i) + k4_i), h6 = h/6.0
* base time        t = n*h (recomputed, never accumulated)

Fixing the operation order makes integrations reproducible bit for bit on a
given platform, which the error analysis in `lbe` depends on.  There is no
step-size control: the experiments count iterations, and adaptive stepping
would make those counts meaningless.

Coupled runs integrate the master and any number of driven followers as one
stacked system: each follower's drive term is evaluated with the master
state of the same RK4 stage.  Followers never influence the master or each
other, so a follower's orbit is bit-identical no matter what else is
integrated alongside it -- the property used to share one master orbit
between the two formulation variants of an error experiment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .systems import ConfigurationError, CoupledPair, DivergenceError, SystemSpec, make_deriv

__all__ = [
    "IntegrationConfig",
    "PseudoOrbit",
    "Follower",
    "rk4_step",
    "integrate",
    "integrate_pair",
    "integrate_ensemble",
]

DIVERGENCE_LIMIT = 1e10


@dataclass(frozen=True)
class IntegrationConfig:
    """Step size, horizon, and recording stride for one integration."""

    step_size: float = 0.03
    n_steps: int = 30000
    record_stride: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.step_size) and self.step_size > 0.0):
            raise ConfigurationError(f"step_size must be positive, got {self.step_size}")
        if self.n_steps < 1:
            raise ConfigurationError(f"n_steps must be >= 1, got {self.n_steps}")
        if self.record_stride < 1:
            raise ConfigurationError(f"record_stride must be >= 1, got {self.record_stride}")
        if self.n_steps % self.record_stride != 0:
            raise ConfigurationError(
                f"record_stride {self.record_stride} must divide n_steps "
                f"{self.n_steps} so the final state is recorded")

    @property
    def n_recorded(self) -> int:
        return self.n_steps // self.record_stride + 1


@dataclass
class PseudoOrbit:
    """A finite-precision numerical approximation of one orbit.

    `states` holds one row per recorded step (row 0 is the initial condition,
    exactly as supplied).  If the integration blew up, `diverged_at` is the
    index of the first bad step and no states are recorded from it on.
    """

    system: SystemSpec
    states: np.ndarray
    times: np.ndarray
    stride: int = 1
    diverged_at: Optional[int] = None

    def __len__(self):
        return len(self.states)

    def component(self, index: int) -> np.ndarray:
        return self.states[:, index]


class Follower(NamedTuple):
    """A slave system driven by the master of an ensemble integration."""

    system: SystemSpec
    ic: tuple
    gain: float
    source: int
    target: int


def rk4_step(deriv_fn, state, t: float, h: float):
    """One classical Runge-Kutta step; returns the updated state tuple.

    `deriv_fn(state, t)` must return a sequence of the same length.  The
    operation order is fixed (see module docstring).
    """
    h2 = 0.5 * h
    h6 = h / 6.0
    n = len(state)
    k1 = deriv_fn(state, t)
    t2 = t + h2
    s2 = tuple(state[i] + h2 * k1[i] for i in range(n))
    k2 = deriv_fn(s2, t2)
    s3 = tuple(state[i] + h2 * k2[i] for i in range(n))
    k3 = deriv_fn(s3, t2)
    t4 = t + h
    s4 = tuple(state[i] + h * k3[i] for i in range(n))
    k4 = deriv_fn(s4, t4)
    return tuple(state[i] + h6 * ((k1[i] + 2.0 * k2[i] + 2.0 * k3[i]) + k4[i])
                 for i in range(n))


def _as_state(ic, dim, what):
    state = tuple(float(c) for c in ic)
    if len(state) != dim:
        raise ConfigurationError(f"{what} initial condition has length "
                                 f"{len(state)}, expected {dim}")
    for c in state:
        if not math.isfinite(c):
            raise ConfigurationError(f"{what} initial condition is not finite: {state}")
    return state


def _ok(state) -> bool:
    for c in state:
        if not (math.isfinite(c) and abs(c) <= DIVERGENCE_LIMIT):
            return False
    return True


def integrate_ensemble(master: SystemSpec, master_ic, followers: Sequence[Follower],
                       cfg: IntegrationConfig):
    """Integrate a master and its driven followers as one stacked system.

    Returns ``(master_orbit, follower_orbits)``.  Divergence in any member
    stops the whole ensemble and flags every orbit with the step index.
    """
    fm = make_deriv(master)
    m = _as_state(master_ic, master.dimension, master.name)
    nf = len(followers)
    ffns = []
    fstates = []
    for fo in followers:
        ffns.append(make_deriv(fo.system))
        fstates.append(_as_state(fo.ic, fo.system.dimension, fo.system.name))
        if not 0 <= fo.source < master.dimension:
            raise ConfigurationError(f"drive source {fo.source} out of range")
        if not 0 <= fo.target < fo.system.dimension:
            raise ConfigurationError(f"drive target {fo.target} out of range")

    h = cfg.step_size
    h2 = 0.5 * h
    h6 = h / 6.0
    stride = cfg.record_stride

    n_rec = cfg.n_recorded
    mrec = np.empty((n_rec, master.dimension))
    frecs = [np.empty((n_rec, fo.system.dimension)) for fo in followers]
    trec = np.empty(n_rec)
    mrec[0] = m
    for i in range(nf):
        frecs[i][0] = fstates[i]
    trec[0] = 0.0
    rows = 1

    diverged_at = None
    findex = range(nf)
    for step in range(cfg.n_steps):
        t = step * h
        t2 = t + h2
        t4 = t + h
        try:
            # stage 1
            km1 = fm(m, t)
            kf1 = []
            for i in findex:
                fo = followers[i]
                kd = ffns[i](fstates[i], t)
                if fo.gain != 0.0:
                    drive = fo.gain * m[fo.source]
                    if drive != 0.0:
                        kd = list(kd)
                        kd[fo.target] = kd[fo.target] + drive
                kf1.append(kd)
            m2 = tuple(m[j] + h2 * km1[j] for j in range(len(m)))
            f2 = [tuple(fstates[i][j] + h2 * kf1[i][j] for j in range(len(fstates[i])))
                  for i in findex]
            # stage 2
            km2 = fm(m2, t2)
            kf2 = []
            for i in findex:
                fo = followers[i]
                kd = ffns[i](f2[i], t2)
                if fo.gain != 0.0:
                    drive = fo.gain * m2[fo.source]
                    if drive != 0.0:
                        kd = list(kd)
                        kd[fo.target] = kd[fo.target] + drive
                kf2.append(kd)
            m3 = tuple(m[j] + h2 * km2[j] for j in range(len(m)))
            f3 = [tuple(fstates[i][j] + h2 * kf2[i][j] for j in range(len(fstates[i])))
                  for i in findex]
            # stage 3
            km3 = fm(m3, t2)
            kf3 = []
            for i in findex:
                fo = followers[i]
                kd = ffns[i](f3[i], t2)
                if fo.gain != 0.0:
                    drive = fo.gain * m3[fo.source]
                    if drive != 0.0:
                        kd = list(kd)
                        kd[fo.target] = kd[fo.target] + drive
                kf3.append(kd)
            m4 = tuple(m[j] + h * km3[j] for j in range(len(m)))
            f4 = [tuple(fstates[i][j] + h * kf3[i][j] for j in range(len(fstates[i])))
                  for i in findex]
            # stage 4
            km4 = fm(m4, t4)
            kf4 = []
            for i in findex:
                fo = followers[i]
                kd = ffns[i](f4[i], t4)
                if fo.gain != 0.0:
                    drive = fo.gain * m4[fo.source]
                    if drive != 0.0:
                        kd = list(kd)
                        kd[fo.target] = kd[fo.target] + drive
                kf4.append(kd)
            m = tuple(m[j] + h6 * ((km1[j] + 2.0 * km2[j] + 2.0 * km3[j]) + km4[j])
                      for j in range(len(m)))
            fstates = [tuple(fstates[i][j]
                             + h6 * ((kf1[i][j] + 2.0 * kf2[i][j] + 2.0 * kf3[i][j]) + kf4[i][j])
                             for j in range(len(fstates[i])))
                       for i in findex]
        except (OverflowError, ValueError, DivergenceError):
            diverged_at = step + 1
            break
        if not _ok(m) or not all(_ok(s) for s in fstates):
            diverged_at = step + 1
            break
        if (step + 1) % stride == 0:
            mrec[rows] = m
            for i in findex:
                frecs[i][rows] = fstates[i]
            trec[rows] = (step + 1) * h
            rows += 1

    if diverged_at is not None:
        mrec = mrec[:rows].copy()
        frecs = [r[:rows].copy() for r in frecs]
        trec = trec[:rows].copy()

    morbit = PseudoOrbit(master, mrec, trec, stride, diverged_at)
    forbits = [PseudoOrbit(followers[i].system, frecs[i], trec, stride, diverged_at)
               for i in findex]
    return morbit, forbits


def integrate(system: SystemSpec, ic, cfg: IntegrationConfig) -> PseudoOrbit:
    """Integrate a single uncoupled system."""
    orbit, _ = integrate_ensemble(system, ic, [], cfg)
    return orbit


def integrate_pair(pair: CoupledPair, master_ic, slave_ic, cfg: IntegrationConfig,
                   slave_variant: Optional[str] = None):
    """Integrate one coupled master/slave run.

    Returns ``(master_orbit, slave_orbit)``.  With k = 0 the slave orbit is
    bitwise identical to integrating the slave alone.
    """
    slave = pair.slave if slave_variant is None else pair.slave.with_variant(slave_variant)
    fo = Follower(slave, tuple(float(c) for c in slave_ic), pair.k,
                  pair.drive_source, pair.drive_target)
    morbit, forbits = integrate_ensemble(pair.master, master_ic, [fo], cfg)
    return morbit, forbits[0]
