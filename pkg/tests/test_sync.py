"""Auxiliary-system synchronization detection.

The K=0 and strong-coupling behavior of the duffing-lorenz pair anchors
these tests.  With the default parameters the measured synchronization onset
for that pair sits near K = 55, so the strong-coupling checks here use
K = 100, comfortably past onset (the K = 40 demonstration point belongs to
the acceptance suite).
"""

import numpy as np
import pytest

from synclbe import (
    ConfigurationError,
    CoupledPair,
    IntegrationConfig,
    attractor_diameter,
    auxiliary_check,
    duffing,
    integrate_pair,
    lorenz,
    phase_portrait_data,
    rossler,
    verdict_from_orbits,
)
from synclbe.sync import auxiliary_run

CFG = IntegrationConfig(0.03, 30000)


def _pair(k):
    return CoupledPair(duffing(), lorenz(), k, drive_source=0, drive_target=1)


@pytest.fixture(scope="module")
def k0_run():
    return auxiliary_run(_pair(0.0), (3.0, 4.0), (1.0, 1.0, 1.0), (5.0, 5.0, 5.0), CFG)


@pytest.fixture(scope="module")
def k100_run():
    return auxiliary_run(_pair(100.0), (3.0, 4.0), (1.0, 1.0, 1.0), (5.0, 5.0, 5.0), CFG)


def test_reflexivity_identical_copies_synchronize_exactly():
    cfg = IntegrationConfig(0.03, 2000)
    verdict = auxiliary_check(_pair(0.0), (3.0, 4.0), (1.0, 1.0, 1.0), (1.0, 1.0, 1.0),
                              cfg, allow_equal_ics=True)
    assert verdict.metric == 0.0
    assert verdict.synchronized


def test_equal_ics_rejected_without_bypass():
    with pytest.raises(ConfigurationError, match="vacuous"):
        auxiliary_check(_pair(0.0), (3.0, 4.0), (1.0, 1.0, 1.0), (1.0, 1.0, 1.0),
                        IntegrationConfig(0.03, 100))


def test_uncoupled_chaotic_copies_do_not_synchronize(k0_run):
    verdict, slave_orbit, _ = k0_run
    assert not verdict.synchronized
    window = slave_orbit.states[verdict.transient_steps:]
    assert verdict.metric > 0.3 * attractor_diameter(window)


def test_strong_coupling_synchronizes_past_onset(k0_run, k100_run):
    verdict0 = k0_run[0]
    verdict100 = k100_run[0]
    assert verdict100.synchronized
    assert verdict100.metric < 1e-3 * verdict0.metric


def test_phase_portrait_diagonal_when_synchronized(k100_run):
    _, slave_orbit, aux_orbit = k100_run
    portrait = phase_portrait_data(slave_orbit, aux_orbit, 1)
    tail = portrait[len(portrait) // 2:]
    assert float(np.max(np.abs(tail[:, 0] - tail[:, 1]))) < 1e-6


def test_phase_portrait_scattered_when_unsynchronized(k0_run):
    _, slave_orbit, aux_orbit = k0_run
    portrait = phase_portrait_data(slave_orbit, aux_orbit, 1)
    tail = portrait[len(portrait) // 2:]
    spread = float(np.max(np.abs(tail[:, 0] - tail[:, 1])))
    assert spread > 0.3 * attractor_diameter(slave_orbit.states)


def test_phase_portrait_validates_lengths_and_component():
    cfg_a = IntegrationConfig(0.03, 100)
    cfg_b = IntegrationConfig(0.03, 200)
    _, a = integrate_pair(_pair(0.0), (3.0, 4.0), (1.0, 1.0, 1.0), cfg_a)
    _, b = integrate_pair(_pair(0.0), (3.0, 4.0), (1.0, 1.0, 1.0), cfg_b)
    with pytest.raises(ConfigurationError, match="lengths"):
        phase_portrait_data(a, b, 1)
    with pytest.raises(ConfigurationError, match="component"):
        phase_portrait_data(a, a, 5)


def test_widening_the_window_never_flips_false_to_true(k0_run):
    _, slave_orbit, aux_orbit = k0_run
    narrow = verdict_from_orbits(slave_orbit, aux_orbit, transient_steps=20000)
    wide = verdict_from_orbits(slave_orbit, aux_orbit, transient_steps=10000)
    # the supremum over a superset cannot be smaller
    assert wide.metric >= narrow.metric
    if not narrow.synchronized:
        assert not (wide.metric < narrow.epsilon)


def test_transient_bounds_validated(k0_run):
    _, slave_orbit, aux_orbit = k0_run
    with pytest.raises(ConfigurationError):
        verdict_from_orbits(slave_orbit, aux_orbit, transient_steps=len(slave_orbit))
    with pytest.raises(ConfigurationError):
        verdict_from_orbits(slave_orbit, aux_orbit, transient_steps=-1)


def test_divergence_makes_verdict_undetermined():
    pair = CoupledPair(rossler(), duffing(), 1e9, drive_source=0, drive_target=0)
    verdict = auxiliary_check(pair, (1.0, 1.0, 1.0), (3.0, 4.0), (5.0, 6.0),
                              IntegrationConfig(0.03, 1000), transient_steps=0)
    assert verdict.undetermined
    assert not verdict.synchronized
    assert verdict.diverged_at is not None


def test_explicit_epsilon_overrides_relative_tolerance(k0_run):
    _, slave_orbit, aux_orbit = k0_run
    verdict = verdict_from_orbits(slave_orbit, aux_orbit, epsilon=1e9)
    assert verdict.synchronized  # metric is far below an absurdly large epsilon
    assert verdict.epsilon == 1e9
