import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from coinlab.agents import (BoltzmannLearners, LearnerParams, boltzmann_probabilities,
                            select_night, select_nights, temperature, update)
from coinlab.exceptions import DomainError

values = st.lists(st.floats(-50, 50, allow_nan=False), min_size=1, max_size=9)


def test_equal_estimates_give_uniform_probabilities():
    np.testing.assert_allclose(boltzmann_probabilities(np.zeros(7), 1.0), np.full(7, 1 / 7))


def test_boltzmann_probability_of_best_night():
    p = boltzmann_probabilities([1, 0, 0, 0, 0, 0, 0], 1.0)
    assert p[0] == pytest.approx(math.e / (math.e + 6), rel=1e-14)


def test_sampling_frequency_matches_probability():
    rng = np.random.default_rng(0)
    v = np.tile([1.0, 0, 0, 0, 0, 0, 0], (200_000, 1))
    picks = select_nights(v, 1.0, rng)
    p0 = math.e / (math.e + 6)
    freq = np.mean(picks == 0)
    assert abs(freq - p0) < 4 * math.sqrt(p0 * (1 - p0) / 200_000)


def test_low_temperature_picks_argmax():
    rng = np.random.default_rng(1)
    v = np.array([0.0, 0.3, 0.1, 0.2])
    picks = [select_night(v, 0.001, rng) for _ in range(200)]
    assert set(picks) == {1}


@given(values, st.floats(-100, 100, allow_nan=False), st.floats(0.05, 10))
def test_probabilities_sum_to_one_and_shift_invariant(v, c, T):
    p = boltzmann_probabilities(v, T)
    assert p.sum() == pytest.approx(1.0)
    np.testing.assert_allclose(boltzmann_probabilities(np.array(v) + c, T), p, atol=1e-9)


def test_rejects_bad_inputs():
    with pytest.raises(DomainError):
        boltzmann_probabilities([np.inf, 0], 1.0)
    with pytest.raises(DomainError):
        boltzmann_probabilities([0, 0], 0.0)
    with pytest.raises(DomainError):
        update([0, 0], 0, np.nan, 0.1)


def test_update_examples():
    assert update([0.3, 0.7], 1, 5.0, 1.0)[1] == 5.0
    assert update([0.0, 0.0], 0, 1.0, 0.1)[0] == pytest.approx(0.1)
    np.testing.assert_array_equal(update([0.2, 0.4], 0, 0.2, 0.5), [0.2, 0.4])
    assert update([0.0, 9.0], 0, 1.0, 0.5)[1] == 9.0


@given(st.floats(-100, 100), st.floats(-100, 100), st.floats(0.01, 1.0))
def test_update_contracts_toward_reward(v, r, lr):
    new = update([v], 0, r, lr)[0]
    assert abs(new - r) == pytest.approx((1 - lr) * abs(v - r), abs=1e-9)


def test_temperature_schedule():
    p = LearnerParams(learning_rate=0.1, temp_initial=math.e * 0.01,
                      temp_decay_time=500.0, temp_floor=0.001)
    assert temperature(0, p) == p.temp_initial
    assert temperature(500, p) == pytest.approx(0.01)
    assert temperature(10 ** 7, p) == p.temp_floor


def test_learner_params_validation():
    with pytest.raises(DomainError):
        LearnerParams(learning_rate=0)
    with pytest.raises(DomainError):
        LearnerParams(temp_initial=0.1, temp_floor=1.0)


def test_population_is_reproducible():
    def trajectory(seed):
        L = BoltzmannLearners().initialize(20, 7)
        rng = np.random.default_rng(seed)
        out = []
        for week in range(50):
            picks = L.sample(week, rng)
            L.partial_fit(picks, np.sin(picks + week))
            out.append(picks)
        return np.array(out), L.values_

    a, va = trajectory(3)
    b, vb = trajectory(3)
    np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(va, vb)


def test_partial_fit_touches_only_picked_night():
    L = BoltzmannLearners(learning_rate=0.5).initialize(2, 3)
    L.partial_fit(np.array([2, 0]), np.array([1.0, -1.0]))
    np.testing.assert_array_equal(L.values_, [[0, 0, 0.5], [-0.5, 0, 0]])


def test_reset_restarts_clock_and_estimates():
    L = BoltzmannLearners(temp_initial=1.0, temp_decay_time=10, temp_floor=0.01)
    L.initialize(3, 2)
    L.values_[:] = 4.0
    L.reset([1], week=100)
    np.testing.assert_array_equal(L.values_[1], [0, 0])
    T = L.temperature(100)
    assert T[1] == 1.0 and T[0] == 0.01


def test_sklearn_estimator_protocol():
    L = BoltzmannLearners(learning_rate=0.3)
    assert L.get_params()["learning_rate"] == 0.3
    assert clone(L).set_params(temp_floor=0.5).temp_floor == 0.5
    with pytest.raises(NotFittedError):
        L.sample(0, 0)
