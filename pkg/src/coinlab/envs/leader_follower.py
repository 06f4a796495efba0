"""Leader-follower variant of the bar problem.

Agents come in triples laid out as ``[leader, follower1, follower2]``: agent
``3*i`` leads agents ``3*i + 1`` and ``3*i + 2``. The dynamics force both
followers to attend their leader's night whatever they picked. The world
reward is ``sum_i R[l_i, f1_i, f2_i]`` over a single shared ``K x K x K``
tensor, which is defined for every index triple, including triples the
dynamics can never produce but clamping can. A clamped agent indexes ``R``
with 0.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import WeekState, clamp
from ..exceptions import DomainError
from ..validation import check_random_state

TENSOR_KINDS = ("worst_case", "random")
GSET_INITS = ("correct", "none_followers", "random")


@dataclass(frozen=True)
class LFConfig:
    n_leaders: int = 56
    n_nights: int = 7
    tensor_kind: str = "worst_case"
    penalty: float = 2.0
    followers_per_leader: int = 2

    def __post_init__(self):
        if self.n_leaders < 1:
            raise DomainError("need at least one leader")
        if self.n_nights < 2:
            raise DomainError("need at least two nights")
        if self.followers_per_leader != 2:
            raise DomainError("each leader has exactly two followers")
        if self.tensor_kind not in TENSOR_KINDS:
            raise DomainError(f"unknown tensor kind {self.tensor_kind!r}")

    @property
    def n_agents(self):
        return 3 * self.n_leaders


def leader_of(agent):
    return 3 * (agent // 3)


def is_leader(agent):
    return agent % 3 == 0


def followers_of(leader):
    if not is_leader(leader):
        raise DomainError(f"agent {leader} is not a leader")
    return (leader + 1, leader + 2)


def apply_dynamics(picks, cfg: LFConfig = None):
    """Overwrite every follower's night with its leader's pick.

    Accepts a :class:`WeekState` or an integer array (also ``(runs, agents)``
    batches); returns the same kind.
    """
    if isinstance(picks, WeekState):
        return WeekState(apply_dynamics(picks.choices, cfg), picks.clamped)
    picks = np.asarray(picks)
    if picks.shape[-1] % 3:
        raise DomainError("agent count must be a multiple of 3")
    if cfg is not None and picks.shape[-1] != cfg.n_agents:
        raise DomainError(f"expected {cfg.n_agents} agents, got {picks.shape[-1]}")
    return np.repeat(picks[..., 0::3], 3, axis=-1)


def _triples(state: WeekState):
    idx = np.where(state.clamped, 0, state.choices)
    return idx[0::3], idx[1::3], idx[2::3]


def world_reward_lf(attended: WeekState, R, cfg: LFConfig = None) -> float:
    """Sum over leaders of ``R[l, f1, f2]``; clamped agents index with 0."""
    R = np.asarray(R)
    l, f1, f2 = _triples(attended)
    return float(np.sum(R[l, f1, f2]))


def reward_wl_lf(agent, attended: WeekState, gsets, R, cfg: LFConfig = None) -> float:
    """Guessed-effect-set Wonderful Life reward of ``agent``.

    ``gsets[agent]`` is the agent's guessed effect set. Clamping is
    counterfactual: dynamics are not re-applied to the clamped state.
    """
    members = gsets[agent]
    return world_reward_lf(attended, R) - world_reward_lf(clamp(attended, set(members)), R)


def wl_rewards(attended, membership, R):
    """Vectorised WL rewards of all agents.

    ``attended`` is an un-clamped ``(agents,)`` night array and
    ``membership`` an ``(agents, agents)`` boolean matrix whose row ``a`` marks
    agent ``a``'s guessed effect set. Returns ``(rewards, world_reward)``.
    """
    attended = np.asarray(attended)
    l, f1, f2 = attended[0::3], attended[1::3], attended[2::3]
    contrib = R[l, f1, f2]
    world = float(contrib.sum())
    cl = np.where(membership[:, 0::3], 0, l)
    cf1 = np.where(membership[:, 1::3], 0, f1)
    cf2 = np.where(membership[:, 2::3], 0, f2)
    return (contrib - R[cl, cf1, cf2]).sum(axis=1), world


def worst_case_tensor(n_nights, penalty=2.0):
    """Reward tensor that punishes leaders whose guessed sets miss their followers.

    ``R[l, l, l] = l / (K - 1)``, ``R[0, m, m] = m * penalty`` for ``m >= 1``,
    zero elsewhere. With no followers in its set a leader's WL reward for
    night ``l`` is ``l / (K - 1) - l * penalty``, best at night 0 (the world
    minimum); with both followers it is ``l / (K - 1)``, best at ``K - 1``.
    """
    K = int(n_nights)
    if K < 2:
        raise DomainError("need at least two nights")
    if not penalty > 1:
        raise DomainError(f"penalty must exceed 1, got {penalty}")
    R = np.zeros((K, K, K))
    m = np.arange(K)
    R[m, m, m] = m / (K - 1)
    R[0, m[1:], m[1:]] = m[1:] * penalty
    return R


def random_tensor(n_nights, random_state=None):
    """Tensor of i.i.d. uniform [0, 1) entries."""
    if n_nights < 2:
        raise DomainError("need at least two nights")
    rng = check_random_state(random_state)
    return rng.uniform(0.0, 1.0, size=(n_nights,) * 3)


def make_tensor(cfg: LFConfig, random_state=None):
    if cfg.tensor_kind == "worst_case":
        return worst_case_tensor(cfg.n_nights, cfg.penalty)
    return random_tensor(cfg.n_nights, random_state)


def initial_effect_sets(cfg: LFConfig, kind, random_state=None):
    """Starting guessed effect sets, one tuple per agent.

    Followers always start with the singleton ``{self}``. Leaders get
    ``correct`` (self and both followers), ``none_followers`` (self only) or
    ``random`` (self plus two other agents drawn without replacement).
    """
    if kind not in GSET_INITS:
        raise DomainError(f"unknown effect-set initialisation {kind!r}")
    rng = check_random_state(random_state)
    n = cfg.n_agents
    sets = []
    for a in range(n):
        if not is_leader(a) or kind == "none_followers":
            sets.append((a,))
        elif kind == "correct":
            sets.append((a, *followers_of(a)))
        else:
            others = np.delete(np.arange(n), a)
            sets.append((a, *sorted(int(j) for j in rng.choice(others, 2, replace=False))))
    return sets


def membership_matrix(gsets, n_agents):
    M = np.zeros((n_agents, n_agents), dtype=bool)
    for a, members in enumerate(gsets):
        M[a, list(members)] = True
    return M


def optimum(R, cfg: LFConfig) -> float:
    """Best world reward the dynamics can realise: every leader on the best diagonal night."""
    R = np.asarray(R)
    m = np.arange(R.shape[0])
    return float(cfg.n_leaders * R[m, m, m].max())


def minimum(R, cfg: LFConfig) -> float:
    R = np.asarray(R)
    m = np.arange(R.shape[0])
    return float(cfg.n_leaders * R[m, m, m].min())
