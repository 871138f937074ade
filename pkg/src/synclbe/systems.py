"""Oscillator vector fields, formulation variants, and unidirectional coupling.

Three benchmark oscillators are built in:

* Duffing (twin-well, periodically forced, 2D, non-autonomous)
* Lorenz (sigma=10, rho=28, beta=8/3, 3D)
* Rossler (a=b=0.2, c=5.7, 3D)

Duffing and Lorenz each carry two formulation *variants*, "A" and "B".
The variants are algebraically identical -- in exact arithmetic they produce
the same derivative for every state -- but their floating-point evaluation
order differs, so in IEEE-754 doubles they can round differently:

* Lorenz  A: dy1 = -10*y1 + 10*y2      B: dy1 = 10*(y2 - y1)
* Duffing A: dx2 uses x1**3 (libm pow)  B: dx2 uses x1*x1*x1

That rounding gap is the entire signal this package measures, so the
expressions below must be evaluated exactly as written.  CPython guarantees
this: every binary float operation is a single IEEE-754 double op in
round-to-nearest-even, evaluated left to right, with no FMA contraction and
no reassociation.  Do not "simplify" these expressions or route them through
a compiler that would.

Coupling is unidirectional: the master never sees the slave, and the slave
receives a single additive drive term ``k * master_state[source]`` in one
component of its derivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Sequence

__all__ = [
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
    "make_deriv",
    "apply_drive",
    "DUFFING_DEFAULTS",
]


class ConfigurationError(ValueError):
    """Invalid system, pair, or run configuration."""


class DivergenceError(ArithmeticError):
    """A vector field was evaluated on a non-finite state."""


DUFFING_DEFAULTS = {"delta": 0.25, "gamma": 0.3, "omega": 1.0}

# Per-system metadata: dimension, component labels, canonical drive slot
# (the derivative component a drive term is added to when the system is a
# slave), and which formulation variants exist.
_REGISTRY = {
    "duffing": {
        "dimension": 2,
        "labels": ("x1", "x2"),
        "drive_slot": 0,
        "variants": ("A", "B"),
        "time_dependent": True,
    },
    "lorenz": {
        "dimension": 3,
        "labels": ("y1", "y2", "y3"),
        "drive_slot": 1,
        "variants": ("A", "B"),
        "time_dependent": False,
    },
    "rossler": {
        "dimension": 3,
        "labels": ("x1", "x2", "x3"),
        "drive_slot": None,
        "variants": ("A",),
        "time_dependent": False,
    },
}


@dataclass(frozen=True)
class SystemSpec:
    """A named vector field with parameters and a formulation variant tag."""

    name: str
    dimension: int
    params: Mapping[str, float] = field(default_factory=dict)
    variant: str = "A"
    time_dependent: bool = False

    def __post_init__(self):
        info = _REGISTRY.get(self.name)
        if info is None:
            raise ConfigurationError(
                f"unknown system {self.name!r}; available: {sorted(_REGISTRY)}"
            )
        if self.dimension != info["dimension"]:
            raise ConfigurationError(
                f"{self.name} is {info['dimension']}-dimensional, got {self.dimension}"
            )
        if self.variant not in info["variants"]:
            raise ConfigurationError(
                f"{self.name} has variants {info['variants']}, got {self.variant!r}"
            )

    @property
    def labels(self) -> tuple:
        return _REGISTRY[self.name]["labels"]

    @property
    def drive_slot(self):
        return _REGISTRY[self.name]["drive_slot"]

    @property
    def variants(self) -> tuple:
        return _REGISTRY[self.name]["variants"]

    def with_variant(self, variant: str) -> "SystemSpec":
        return replace(self, variant=variant)

    def derivative(self, state: Sequence[float], t: float = 0.0, drive: float = 0.0):
        """Evaluate the vector field (validated path; see `make_deriv` for the
        closure used in integration loops)."""
        if self.name == "duffing":
            return eval_duffing(state, t, self.params, self.variant, drive)
        if self.name == "lorenz":
            return eval_lorenz(state, self.variant, drive)
        return eval_rossler(state)


def duffing(delta: float = 0.25, gamma: float = 0.3, omega: float = 1.0,
            variant: str = "A") -> SystemSpec:
    """Twin-well forced Duffing oscillator.

    dx1 = x2
    dx2 = x1 - x1^3 - delta*x2 + gamma*cos(omega*t)

    The defaults are a standard chaotic regime.  Variant "B" replaces the
    cubic power with explicit multiplications (see module docstring).
    """
    return SystemSpec("duffing", 2,
                      {"delta": float(delta), "gamma": float(gamma),
                       "omega": float(omega)},
                      variant, time_dependent=True)


def lorenz(variant: str = "A") -> SystemSpec:
    """Lorenz system with the classical constants 10, 28, 8/3."""
    return SystemSpec("lorenz", 3, {}, variant)


def rossler() -> SystemSpec:
    """Rossler system with a = b = 0.2, c = 5.7. Single formulation; used
    only as a master."""
    return SystemSpec("rossler", 3, {})


def _check_finite(state):
    for c in state:
        if not math.isfinite(c):
            raise DivergenceError(f"non-finite state component {c!r}")


def apply_drive(deriv, slot: int, drive: float):
    """Add an already-computed drive term into one derivative component.

    A drive of exactly 0.0 is skipped so an uncoupled evaluation is
    bit-identical to the pristine vector field (adding +0.0 could flip the
    sign bit of a -0.0 component).
    """
    if drive == 0.0:
        return tuple(deriv)
    out = list(deriv)
    out[slot] = out[slot] + drive
    return tuple(out)


def eval_duffing(state, t, params=None, variant="A", drive=0.0):
    """Duffing derivative at `state`, time `t`.

    `drive` is the coupling term added to dx1 (the slot used when Duffing is
    the slave).  Variant "A" computes the cubic as ``x1**3`` (one libm pow);
    variant "B" computes ``x1*x1*x1`` (two multiplies, left to right).  Both
    then subtract left to right.  The orders are load-bearing; do not touch.
    """
    x1, x2 = state
    _check_finite(state)
    p = DUFFING_DEFAULTS if params is None else params
    delta = p["delta"]
    gamma = p["gamma"]
    omega = p["omega"]
    if variant == "A":
        dx2 = x1 - x1**3 - delta * x2 + gamma * math.cos(omega * t)
    elif variant == "B":
        dx2 = x1 - x1 * x1 * x1 - delta * x2 + gamma * math.cos(omega * t)
    else:
        raise ConfigurationError(f"duffing variant must be 'A' or 'B', got {variant!r}")
    return apply_drive((x2, dx2), 0, drive)


def eval_lorenz(state, variant="A", drive=0.0):
    """Lorenz derivative.  `drive` is added to dy2 (the slave slot).

    Variant "A" evaluates dy1 = -10*y1 + 10*y2, variant "B" evaluates
    dy1 = 10*(y2 - y1); the other components are shared.
    """
    y1, y2, y3 = state
    _check_finite(state)
    if variant == "A":
        dy1 = -10.0 * y1 + 10.0 * y2
    elif variant == "B":
        dy1 = 10.0 * (y2 - y1)
    else:
        raise ConfigurationError(f"lorenz variant must be 'A' or 'B', got {variant!r}")
    dy2 = 28.0 * y1 - y2 - y1 * y3
    dy3 = y1 * y2 - (8.0 / 3.0) * y3
    return apply_drive((dy1, dy2, dy3), 1, drive)


def eval_rossler(state):
    """Rossler derivative (no drive input, no variants)."""
    x1, x2, x3 = state
    _check_finite(state)
    return (-x2 - x3, x1 + 0.2 * x2, 0.2 + x3 * (x1 - 5.7))


def make_deriv(spec: SystemSpec) -> Callable:
    """Build a fast ``f(state, t) -> tuple`` closure for integration loops.

    The closure performs the exact same arithmetic as the checked eval
    functions but skips per-call finiteness validation (the integrator does
    its own divergence checks on the evolving states).
    """
    if spec.name == "duffing":
        delta = spec.params["delta"]
        gamma = spec.params["gamma"]
        omega = spec.params["omega"]
        cos = math.cos
        if spec.variant == "A":
            def f(state, t):
                x1, x2 = state
                return (x2, x1 - x1**3 - delta * x2 + gamma * cos(omega * t))
        else:
            def f(state, t):
                x1, x2 = state
                return (x2, x1 - x1 * x1 * x1 - delta * x2 + gamma * cos(omega * t))
        return f
    if spec.name == "lorenz":
        if spec.variant == "A":
            def f(state, t):
                y1, y2, y3 = state
                return (-10.0 * y1 + 10.0 * y2,
                        28.0 * y1 - y2 - y1 * y3,
                        y1 * y2 - (8.0 / 3.0) * y3)
        else:
            def f(state, t):
                y1, y2, y3 = state
                return (10.0 * (y2 - y1),
                        28.0 * y1 - y2 - y1 * y3,
                        y1 * y2 - (8.0 / 3.0) * y3)
        return f

    def f(state, t):
        x1, x2, x3 = state
        return (-x2 - x3, x1 + 0.2 * x2, 0.2 + x3 * (x1 - 5.7))
    return f


@dataclass(frozen=True)
class CoupledPair:
    """Master system unidirectionally driving a slave system.

    The slave derivative component `drive_target` receives the additive term
    ``k * master_state[drive_source]``, evaluated with the master state of
    the same integration stage.  The master never reads the slave.
    """

    master: SystemSpec
    slave: SystemSpec
    k: float = 0.0
    drive_source: int = 0
    drive_target: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.k) and self.k >= 0.0):
            raise ConfigurationError(f"coupling constant must be finite and >= 0, got {self.k}")
        if not 0 <= self.drive_source < self.master.dimension:
            raise ConfigurationError(
                f"drive_source {self.drive_source} out of range for "
                f"{self.master.name} (dimension {self.master.dimension})")
        if not 0 <= self.drive_target < self.slave.dimension:
            raise ConfigurationError(
                f"drive_target {self.drive_target} out of range for "
                f"{self.slave.name} (dimension {self.slave.dimension})")

    def with_k(self, k: float) -> "CoupledPair":
        return replace(self, k=float(k))

    def with_slave_variant(self, variant: str) -> "CoupledPair":
        return replace(self, slave=self.slave.with_variant(variant))


def coupled_derivative(pair: CoupledPair, master_state, slave_state, t=0.0,
                       slave_variant=None):
    """Evaluate both derivatives of a coupled pair at one instant.

    Returns ``(master_deriv, slave_deriv)``.  The drive term is added to the
    slave derivative exactly once, at ``pair.drive_target``; with k = 0 the
    slave derivative is bit-identical to the uncoupled evaluation.
    """
    slave = pair.slave if slave_variant is None else pair.slave.with_variant(slave_variant)
    md = pair.master.derivative(master_state, t)
    sd = slave.derivative(slave_state, t)
    if pair.k != 0.0:
        sd = apply_drive(sd, pair.drive_target, pair.k * master_state[pair.drive_source])
    return md, sd
