"""The seven-night bar problem.

Each week every agent attends one night. Night ``k`` with attendance ``x``
contributes ``alpha_k * x * exp(-x / c)`` to the world reward, which peaks at
``x = c``. Agents can be paid one of three personal rewards:

* ``UD`` (uniform division): the night's reward split evenly among attendees.
* ``G`` (global): the world reward itself (a team game).
* ``WL`` (Wonderful Life): world reward minus the world reward with the agent
  clamped out, i.e. the agent's marginal contribution to its own night.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..core import WeekState, clamp
from ..exceptions import DomainError

ALPHA_PRESETS = ("uniform", "single_night")
REWARDS = ("UD", "G", "WL")


def alpha_preset(name, n_nights=7):
    """Night weights: ``uniform`` is all ones, ``single_night`` puts weight
    ``n_nights`` on night 3 (0-based) and zero elsewhere."""
    if name == "uniform":
        return np.ones(n_nights)
    if name == "single_night":
        alpha = np.zeros(n_nights)
        alpha[min(3, n_nights - 1)] = float(n_nights)
        return alpha
    raise DomainError(f"unknown alpha preset {name!r}; expected one of {ALPHA_PRESETS}")


@dataclass(frozen=True)
class BarConfig:
    n_agents: int = 168
    n_nights: int = 7
    capacity: float = 6.0
    alpha: tuple = field(default=None)

    def __post_init__(self):
        alpha = self.alpha
        if alpha is None:
            alpha = alpha_preset("uniform", self.n_nights)
        elif isinstance(alpha, str):
            alpha = alpha_preset(alpha, self.n_nights)
        alpha = tuple(float(a) for a in alpha)
        if self.n_agents < 1 or self.n_nights < 1:
            raise DomainError("need at least one agent and one night")
        if self.capacity <= 0:
            raise DomainError(f"capacity must be positive, got {self.capacity}")
        if len(alpha) != self.n_nights:
            raise DomainError(f"alpha has {len(alpha)} entries for {self.n_nights} nights")
        if any(a < 0 or not math.isfinite(a) for a in alpha):
            raise DomainError("alpha entries must be finite and non-negative")
        object.__setattr__(self, "alpha", alpha)

    @property
    def alpha_array(self):
        return np.asarray(self.alpha)


def attendance(state: WeekState, n_nights) -> np.ndarray:
    """Attendance per night, ignoring clamped agents."""
    live = state.choices[~state.clamped]
    if np.any(live >= n_nights):
        raise DomainError(f"a choice is outside [0, {n_nights})")
    return np.bincount(live, minlength=n_nights)


def gamma(y, alpha_k, c):
    """Night reward ``alpha_k * y * exp(-y / c)`` (vectorised over ``y``)."""
    if c <= 0:
        raise DomainError(f"capacity must be positive, got {c}")
    return alpha_k * y * np.exp(-np.asarray(y, dtype=float) / c)


def world_reward_from_attendance(x, cfg: BarConfig) -> float:
    # fsum makes the result independent of night order
    return math.fsum(gamma(np.asarray(x, dtype=float), cfg.alpha_array, cfg.capacity).tolist())


def world_reward(state: WeekState, cfg: BarConfig) -> float:
    return world_reward_from_attendance(attendance(state, cfg.n_nights), cfg)


def world_reward_embedding(E, cfg: BarConfig) -> float:
    """World reward of a real-valued ``(agents, nights)`` embedding.

    Attendance is the column sum, so this is the natural smooth extension of
    :func:`world_reward` off the unary vertices.
    """
    x = np.asarray(E, dtype=float).sum(axis=0)
    return float(np.sum(gamma(x, cfg.alpha_array, cfg.capacity)))


def _own_night(node, state):
    if state.clamped[node]:
        raise DomainError(f"node {node} is clamped and attends no night")
    return int(state.choices[node])


def reward_ud(node, state: WeekState, cfg: BarConfig) -> float:
    d = _own_night(node, state)
    x = attendance(state, cfg.n_nights)[d]
    return float(cfg.alpha[d] * math.exp(-x / cfg.capacity))


def reward_g(node, state: WeekState, cfg: BarConfig) -> float:
    return world_reward(state, cfg)


def reward_wl(node, state: WeekState, cfg: BarConfig) -> float:
    """Marginal reward ``gamma_d(x_d) - gamma_d(x_d - 1)`` of ``node``'s night.

    Equals ``world_reward(state) - world_reward(clamp(state, {node}))``; see
    :func:`reward_wl_clamped` for that route.
    """
    d = _own_night(node, state)
    x = attendance(state, cfg.n_nights)[d]
    a, c = cfg.alpha[d], cfg.capacity
    return float(gamma(x, a, c) - gamma(x - 1, a, c))


def reward_wl_clamped(node, state: WeekState, cfg: BarConfig) -> float:
    _own_night(node, state)
    return world_reward(state, cfg) - world_reward(clamp(state, {node}), cfg)


PERSONAL_REWARDS = {"UD": reward_ud, "G": reward_g, "WL": reward_wl}


def personal_rewards(picks, cfg: BarConfig, kind):
    """Rewards of every agent for one week of un-clamped ``picks``.

    Vectorised equivalent of calling :func:`reward_ud`, :func:`reward_g` or
    :func:`reward_wl` on each agent. Returns ``(rewards, world_reward)``.
    """
    picks = np.asarray(picks)
    x = np.bincount(picks, minlength=cfg.n_nights)
    world = world_reward_from_attendance(x, cfg)
    alpha = cfg.alpha_array[picks]
    xd = x[picks].astype(float)
    if kind == "UD":
        rewards = alpha * np.exp(-xd / cfg.capacity)
    elif kind == "G":
        rewards = np.full(picks.shape, world)
    elif kind == "WL":
        rewards = gamma(xd, alpha, cfg.capacity) - gamma(xd - 1, alpha, cfg.capacity)
    else:
        raise DomainError(f"unknown bar reward {kind!r}; expected one of {REWARDS}")
    return rewards, world


def optimal_profile(cfg: BarConfig):
    """Attendance profile maximising the world reward with every agent attending.

    Exact dynamic programme over nights; returns ``(profile, value)``.
    """
    N, K = cfg.n_agents, cfg.n_nights
    y = np.arange(N + 1, dtype=float)
    best = np.full(N + 1, -np.inf)
    best[0] = 0.0
    choice = np.zeros((K, N + 1), dtype=np.int64)
    for k in range(K):
        g = gamma(y, cfg.alpha[k], cfg.capacity)
        new = np.full(N + 1, -np.inf)
        for total in range(N + 1):
            cand = best[total::-1][: total + 1] + g[: total + 1]
            j = int(np.argmax(cand))
            new[total] = cand[j]
            choice[k, total] = j
        best = new
    profile = np.zeros(K, dtype=np.int64)
    remaining = N
    for k in reversed(range(K)):
        profile[k] = choice[k, remaining]
        remaining -= profile[k]
    return profile, world_reward_from_attendance(profile, cfg)


def optimum(cfg: BarConfig) -> float:
    return optimal_profile(cfg)[1]
