"""RK4 stepping, ensemble integration, determinism, and divergence handling."""

import math

import numpy as np
import pytest

from synclbe import (
    ConfigurationError,
    CoupledPair,
    Follower,
    IntegrationConfig,
    duffing,
    integrate,
    integrate_ensemble,
    integrate_pair,
    lorenz,
    rk4_step,
    rossler,
)
from synclbe.systems import apply_drive, make_deriv


def _case1_pair(k=0.0):
    return CoupledPair(duffing(), lorenz(), k, drive_source=0, drive_target=1)


def _case2_pair(k=0.0):
    return CoupledPair(rossler(), duffing(), k, drive_source=0, drive_target=0)


# ---------------------------------------------------------------------------
# rk4_step on analytically solvable problems


def test_zero_field_leaves_state_unchanged():
    f = lambda s, t: (0.0, 0.0, 0.0)
    state = (1.25, -3.5, 0.1)
    for n in range(50):
        state = rk4_step(f, state, n * 0.1, 0.1)
    assert state == (1.25, -3.5, 0.1)


def test_exponential_growth_single_step_accuracy():
    f = lambda s, t: (s[0],)
    x = rk4_step(f, (1.0,), 0.0, 0.1)[0]
    assert abs(x - math.exp(0.1)) < 1e-7


def _global_error_exp(h: float) -> float:
    f = lambda s, t: (s[0],)
    n = round(1.0 / h)
    state = (1.0,)
    for i in range(n):
        state = rk4_step(f, state, i * h, h)
    return abs(state[0] - math.e)


def test_fourth_order_convergence_on_exponential():
    e1 = _global_error_exp(0.1)
    e2 = _global_error_exp(0.05)
    order = math.log2(e1 / e2)
    assert 3.9 <= order <= 4.1


def test_tracks_sine_for_cosine_field():
    f = lambda s, t: (math.cos(t),)
    state = (0.0,)
    h = 0.001
    worst = 0.0
    for i in range(10000):
        state = rk4_step(f, state, i * h, h)
        worst = max(worst, abs(state[0] - math.sin((i + 1) * h)))
    assert worst < 1e-8


# ---------------------------------------------------------------------------
# configuration validation


def test_config_rejects_bad_values():
    with pytest.raises(ConfigurationError):
        IntegrationConfig(step_size=0.0)
    with pytest.raises(ConfigurationError):
        IntegrationConfig(step_size=-0.01)
    with pytest.raises(ConfigurationError):
        IntegrationConfig(n_steps=0)
    with pytest.raises(ConfigurationError):
        IntegrationConfig(record_stride=0)
    with pytest.raises(ConfigurationError, match="divide"):
        IntegrationConfig(n_steps=10, record_stride=7)


def test_bad_initial_conditions_rejected():
    cfg = IntegrationConfig(0.03, 10)
    with pytest.raises(ConfigurationError, match="length"):
        integrate(lorenz(), (1.0, 1.0), cfg)
    with pytest.raises(ConfigurationError, match="finite"):
        integrate(lorenz(), (1.0, float("nan"), 1.0), cfg)


# ---------------------------------------------------------------------------
# recording semantics


def test_initial_condition_recorded_exactly():
    cfg = IntegrationConfig(0.03, 10)
    orbit = integrate(lorenz(), (0.1, 0.2, 0.3), cfg)
    assert tuple(orbit.states[0]) == (0.1, 0.2, 0.3)
    assert orbit.times[0] == 0.0
    assert len(orbit) == 11


def test_record_stride_subsamples_without_dropping_final_state():
    full = integrate(lorenz(), (1.0, 1.0, 1.0), IntegrationConfig(0.03, 1000, 1))
    strided = integrate(lorenz(), (1.0, 1.0, 1.0), IntegrationConfig(0.03, 1000, 10))
    assert len(strided) == 101
    assert np.array_equal(strided.states, full.states[::10])
    assert np.array_equal(strided.times, full.times[::10])
    assert np.array_equal(strided.states[-1], full.states[-1])


# ---------------------------------------------------------------------------
# determinism and bitwise equivalences


def test_integration_is_bitwise_deterministic():
    cfg = IntegrationConfig(0.03, 2000)
    pair = _case1_pair(12.5)
    m1, s1 = integrate_pair(pair, (3.0, 4.0), (1.0, 1.0, 1.0), cfg)
    m2, s2 = integrate_pair(pair, (3.0, 4.0), (1.0, 1.0, 1.0), cfg)
    assert np.array_equal(m1.states, m2.states)
    assert np.array_equal(s1.states, s2.states)


def test_stacked_single_system_formulation_is_bitwise_identical():
    # Integrating (master, slave) as one 5-dimensional system via rk4_step
    # must reproduce integrate_pair exactly: they are the same computation.
    k = 7.0
    fm = make_deriv(duffing())
    fs = make_deriv(lorenz("A"))

    def stacked(state, t):
        m = state[:2]
        s = state[2:]
        md = fm(m, t)
        sd = fs(s, t)
        drive = k * m[0]
        if drive != 0.0:
            sd = apply_drive(sd, 1, drive)
        return md + sd

    cfg = IntegrationConfig(0.03, 500)
    morbit, sorbit = integrate_pair(_case1_pair(k), (3.0, 4.0), (1.0, 1.0, 1.0), cfg)
    state = (3.0, 4.0, 1.0, 1.0, 1.0)
    for n in range(cfg.n_steps):
        state = rk4_step(stacked, state, n * cfg.step_size, cfg.step_size)
        assert tuple(morbit.states[n + 1]) == state[:2]
        assert tuple(sorbit.states[n + 1]) == state[2:]


def test_zero_coupling_isolates_slave_bitwise():
    cfg = IntegrationConfig(0.03, 1500)
    _, slave_coupled = integrate_pair(_case1_pair(0.0), (3.0, 4.0), (1.0, 1.0, 1.0), cfg)
    slave_alone = integrate(lorenz("A"), (1.0, 1.0, 1.0), cfg)
    assert np.array_equal(slave_coupled.states, slave_alone.states)


def test_follower_orbit_independent_of_other_followers():
    cfg = IntegrationConfig(0.03, 1000)
    fo = Follower(lorenz("A"), (1.0, 1.0, 1.0), 25.0, 0, 1)
    extra1 = Follower(lorenz("B"), (1.0, 1.0, 1.0), 25.0, 0, 1)
    extra2 = Follower(lorenz("A"), (5.0, 5.0, 5.0), 25.0, 0, 1)
    _, (only,) = integrate_ensemble(duffing(), (3.0, 4.0), [fo], cfg)
    _, (together, _, _) = integrate_ensemble(duffing(), (3.0, 4.0),
                                             [fo, extra1, extra2], cfg)
    assert np.array_equal(only.states, together.states)


# ---------------------------------------------------------------------------
# divergence handling


def test_threshold_divergence_flags_and_truncates():
    cfg = IntegrationConfig(0.03, 1000)
    morbit, sorbit = integrate_pair(_case2_pair(1e9), (1.0, 1.0, 1.0), (3.0, 4.0), cfg)
    assert sorbit.diverged_at is not None
    assert morbit.diverged_at == sorbit.diverged_at
    # nothing recorded at or past the divergence step, nothing non-finite kept
    assert len(sorbit) <= sorbit.diverged_at
    assert np.all(np.isfinite(sorbit.states))
    assert np.all(np.abs(sorbit.states) <= 1e10)


def test_overflow_inside_a_stage_is_caught_for_both_variants():
    cfg = IntegrationConfig(0.03, 10)
    for variant in ("A", "B"):
        orbit = integrate(duffing(variant=variant), (1e103, 0.0), cfg)
        assert orbit.diverged_at == 1
        assert len(orbit) == 1  # only the initial condition


def test_constant_orbit_at_rossler_fixed_point():
    # closed-form equilibrium of the Rossler field (root of 0.2*c^2 - 5.7*c + 0.2)
    x3 = (5.7 - math.sqrt(5.7 * 5.7 - 4 * 0.2 * 0.2)) / 0.4
    fp = (0.2 * x3, -x3, x3)
    orbit = integrate(rossler(), fp, IntegrationConfig(0.03, 100))
    assert float(np.max(np.abs(orbit.states - np.array(fp)))) < 1e-12


def test_lorenz_stays_bounded_over_long_run():
    cfg = IntegrationConfig(0.03, 100000)
    _, slave = integrate_pair(_case1_pair(0.0), (3.0, 4.0), (1.0, 1.0, 1.0), cfg)
    assert slave.diverged_at is None
    assert float(np.max(np.abs(slave.states))) < 100.0
