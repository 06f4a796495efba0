"""Independent Boltzmann value learners (the microlearners).

Each agent keeps one reward estimate per night, samples a night from a
Boltzmann distribution over those estimates, and nudges the estimate of the
night it picked toward the reward it received.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .exceptions import DomainError
from .validation import check_random_state


@dataclass(frozen=True)
class LearnerParams:
    learning_rate: float = 0.1
    temp_initial: float = 5.0
    temp_decay_time: float = 500.0
    temp_floor: float = 0.01

    def __post_init__(self):
        if not 0 < self.learning_rate <= 1:
            raise DomainError(f"learning_rate must lie in (0, 1], got {self.learning_rate}")
        if self.temp_initial <= 0 or self.temp_floor <= 0 or self.temp_decay_time <= 0:
            raise DomainError("temperatures and decay time must be positive")
        if self.temp_floor > self.temp_initial:
            raise DomainError("temp_floor must not exceed temp_initial")


def temperature(week, params: LearnerParams) -> float:
    """Exponentially decaying temperature, floored at ``params.temp_floor``."""
    return max(params.temp_floor,
               params.temp_initial * math.exp(-week / params.temp_decay_time))


def boltzmann_probabilities(values, temp):
    """Row-wise softmax of ``values / temp`` (max-shifted).

    ``temp`` is a scalar or one temperature per row.
    """
    temp = np.asarray(temp, dtype=float)
    if not np.all(temp > 0):
        raise DomainError(f"temperature must be positive, got {temp}")
    if temp.ndim:
        temp = temp[..., None]
    v = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(v)):
        raise DomainError("value estimates must be finite")
    z = np.exp((v - v.max(axis=-1, keepdims=True)) / temp)
    return z / z.sum(axis=-1, keepdims=True)


def select_nights(values, temp, rng):
    """Sample one night per row of ``values`` by inverse-CDF lookup.

    One uniform draw per row keeps the random stream independent of the
    values, so a run is reproducible draw-for-draw.
    """
    p = boltzmann_probabilities(values, temp)
    cdf = np.cumsum(p, axis=-1)
    u = rng.random(p.shape[:-1])[..., None] * cdf[..., -1:]
    nights = (cdf <= u).sum(axis=-1)
    return np.minimum(nights, p.shape[-1] - 1)


def select_night(values, temp, random_state=None) -> int:
    rng = check_random_state(random_state)
    return int(select_nights(np.asarray(values, dtype=float)[None, :], temp, rng)[0])


def update(values, night, reward, lr):
    """Return a copy of ``values`` with ``values[night]`` moved ``lr`` of the way to ``reward``."""
    if not math.isfinite(reward):
        raise DomainError(f"reward must be finite, got {reward}")
    if not 0 < lr <= 1:
        raise DomainError(f"learning rate must lie in (0, 1], got {lr}")
    v = np.array(values, dtype=float)
    if not 0 <= night < v.shape[0]:
        raise DomainError(f"night {night} outside [0, {v.shape[0]})")
    v[night] += lr * (reward - v[night])
    return v


class BoltzmannLearners(BaseEstimator):
    """A population of independent Boltzmann value learners.

    Parameters
    ----------
    learning_rate : float
        Step toward each received reward.
    temp_initial, temp_decay_time, temp_floor : float
        Temperature schedule ``max(floor, initial * exp(-week / decay_time))``.
    init_value : float
        Starting estimate for every night.

    Attributes
    ----------
    values_ : ndarray of shape (n_agents, n_nights)
    start_week_ : ndarray of shape (n_agents,)
        Week each agent's temperature clock started; moved by :meth:`reset`.
    """

    def __init__(self, learning_rate=0.1, temp_initial=5.0, temp_decay_time=500.0,
                 temp_floor=0.01, init_value=0.0):
        self.learning_rate = learning_rate
        self.temp_initial = temp_initial
        self.temp_decay_time = temp_decay_time
        self.temp_floor = temp_floor
        self.init_value = init_value

    def learner_params(self):
        return LearnerParams(self.learning_rate, self.temp_initial,
                             self.temp_decay_time, self.temp_floor)

    def initialize(self, n_agents, n_nights):
        self.learner_params()  # validates
        self.values_ = np.full((n_agents, n_nights), float(self.init_value))
        self.start_week_ = np.zeros(n_agents, dtype=np.int64)
        return self

    def reset(self, agents, week):
        """Forget the estimates of ``agents`` and restart their temperature at ``week``."""
        self._check_initialized()
        agents = np.asarray(agents, dtype=np.int64)
        self.values_[agents] = float(self.init_value)
        self.start_week_[agents] = week
        return self

    def _check_initialized(self):
        if not hasattr(self, "values_"):
            raise NotFittedError("call initialize(n_agents, n_nights) first")

    def temperature(self, week):
        """Per-agent temperatures at ``week``."""
        self._check_initialized()
        p = self.learner_params()
        age = np.maximum(week - self.start_week_, 0)
        return np.maximum(p.temp_floor, p.temp_initial * np.exp(-age / p.temp_decay_time))

    def sample(self, week, random_state=None):
        """Nights picked by every agent for ``week``."""
        self._check_initialized()
        return select_nights(self.values_, self.temperature(week),
                             check_random_state(random_state))

    def partial_fit(self, picks, rewards):
        """Move each agent's estimate for its picked night toward its reward."""
        self._check_initialized()
        rewards = np.asarray(rewards, dtype=float)
        if not np.all(np.isfinite(rewards)):
            raise DomainError("rewards must be finite")
        rows = np.arange(self.values_.shape[0])
        v = self.values_[rows, picks]
        self.values_[rows, picks] = v + self.learning_rate * (rewards - v)
        return self
