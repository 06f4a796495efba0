"""Single-week diagnostics: intelligence, factoredness and learnability.

Utilities are plain callables. A world utility maps a :class:`WeekState` to a
float; a personal utility maps ``(state, node)`` to a float. All
counterfactuals change only the nodes under study and happen within one
week. For the leader-follower environment the evaluators built by
:func:`leader_follower_utilities` re-apply the dynamics to every
counterfactual pick profile.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import WeekState, clamp, embed
from .envs import bar, leader_follower as lf
from .exceptions import DomainError
from .validation import check_random_state

INF = math.inf


@dataclass(frozen=True)
class CounterfactualMeasure:
    """Which counterfactual actions a node is compared against.

    ``exhaustive`` enumerates every action once; ``uniform`` draws
    ``sample_count`` actions uniformly at random from ``seed``.
    """

    kind: str = "exhaustive"
    sample_count: int = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("exhaustive", "uniform"):
            raise DomainError(f"unknown measure kind {self.kind!r}")
        if self.kind == "uniform" and not (self.sample_count and self.sample_count > 0):
            raise DomainError("a uniform measure needs a positive sample_count")

    def rng(self):
        return check_random_state(self.seed)

    def actions(self, n_actions, rng=None, exclude=None):
        pool = np.arange(n_actions)
        if exclude is not None:
            pool = pool[pool != exclude]
        if pool.size == 0:
            raise DomainError("the measure has empty support")
        if self.kind == "exhaustive":
            return pool
        rng = self.rng() if rng is None else rng
        return rng.choice(pool, size=self.sample_count)


EXHAUSTIVE = CounterfactualMeasure()


def _check_live(state, node):
    if not 0 <= node < state.n_nodes:
        raise DomainError(f"node {node} outside [0, {state.n_nodes})")
    if state.clamped.any():
        raise DomainError("diagnostics are defined on un-clamped states")


def intelligence(u, state: WeekState, node, n_actions, measure=EXHAUSTIVE) -> float:
    """Fraction of counterfactual actions that would not have raised ``u``.

    The node's actual action is part of the support and ties count as "not
    better", so the result lies in ``[1/M, 1]``.
    """
    _check_live(state, node)
    actions = measure.actions(n_actions)
    actual = u(state)
    wins = [actual >= u(state.replace(node, a)) for a in actions]
    return float(np.mean(wins))


def factoredness_degree(world, personal, states, n_actions, measure=EXHAUSTIVE,
                        nodes=None) -> float:
    """Fraction of single-node counterfactuals where personal and world changes agree in sign.

    For every sampled state, node and alternative action ``a`` (the actual
    action is excluded) compares ``sgn(g(s) - g(s_a))`` with
    ``sgn(G(s) - G(s_a))``, where ``sgn(0) = 0``.
    """
    rng = measure.rng()
    agree = total = 0
    for s in states:
        node_list = range(s.n_nodes) if nodes is None else nodes
        G0 = world(s)
        for node in node_list:
            _check_live(s, node)
            g0 = personal(s, node)
            for a in measure.actions(n_actions, rng, exclude=int(s.choices[node])):
                s_a = s.replace(node, a)
                dg = np.sign(g0 - personal(s_a, node))
                dG = np.sign(G0 - world(s_a))
                agree += int(dg == dG)
                total += 1
    if total == 0:
        raise DomainError("factoredness needs at least one counterfactual")
    return agree / total


def _others_profiles(state, node, n_actions, measure, rng):
    others = np.delete(np.arange(state.n_nodes), node)
    if measure.kind == "exhaustive":
        if n_actions ** others.size > 10 ** 6:
            raise DomainError("complement too large to enumerate; use a uniform measure")
        for combo in itertools.product(range(n_actions), repeat=others.size):
            yield others, np.array(combo)
    else:
        for _ in range(measure.sample_count):
            yield others, rng.integers(0, n_actions, size=others.size)


def learnability(u, state: WeekState, node, n_actions, measure=EXHAUSTIVE) -> float:
    """Signal-to-noise ratio of ``u`` for ``node``.

    Mean ``|u(s') - u(s)|`` when only ``node`` is resampled, divided by the
    same mean when only the other nodes are resampled. A zero denominator
    returns ``inf``.
    """
    _check_live(state, node)
    if state.n_nodes < 2:
        raise DomainError("learnability needs at least two nodes")
    rng = measure.rng()
    base = u(state)
    signal = np.mean([abs(u(state.replace(node, a)) - base)
                      for a in measure.actions(n_actions, rng)])
    noise = []
    for others, picks in _others_profiles(state, node, n_actions, measure, rng):
        choices = state.choices.copy()
        choices[others] = picks
        noise.append(abs(u(WeekState(choices)) - base))
    noise = float(np.mean(noise))
    if noise == 0:
        return INF
    return float(signal / noise)


def gradient(u, E, h=1e-4):
    """Central finite-difference gradient of ``u`` at the real matrix ``E``."""
    E = np.array(E, dtype=float)
    grad = np.empty_like(E)
    for idx in np.ndindex(E.shape):
        orig = E[idx]
        E[idx] = orig + h
        up = u(E)
        E[idx] = orig - h
        down = u(E)
        E[idx] = orig
        grad[idx] = (up - down) / (2 * h)
    return grad


def differential_learnability(u, state, node, n_actions=None, h=1e-4) -> float:
    """Gradient-norm ratio of ``u`` for ``node`` versus all other nodes.

    ``u`` takes a real ``(nodes, nights)`` embedding. ``state`` is either a
    :class:`WeekState` (embedded as unary vectors) or such a matrix.
    """
    if not h > 0:
        raise DomainError(f"step must be positive, got {h}")
    E = embed(state, n_actions) if isinstance(state, WeekState) else np.asarray(state, float)
    if not 0 <= node < E.shape[0]:
        raise DomainError(f"node {node} outside [0, {E.shape[0]})")
    grad = gradient(u, E, h)
    own = np.linalg.norm(grad[node])
    rest = np.linalg.norm(np.delete(grad, node, axis=0))
    if rest == 0:
        return INF
    return float(own / rest)


def bar_closed_form_ratio(n_agents, capacity) -> float:
    """WL-to-G differential learnability ratio at uniform attendance, all weights 1.

    ``|sqrt(7) (N - 7c) / ((N - 7c)(1 - e^(1/c)) + 7 e^(1/c))|``
    """
    N, c = n_agents, capacity
    if N < 2 or c <= 0:
        raise DomainError("need N >= 2 and c > 0")
    if not N > 7 * c:
        raise DomainError(f"closed form needs N > 7c, got N={N}, c={c}")
    e = math.exp(1.0 / c)
    denom = (N - 7 * c) * (1 - e) + 7 * e
    if denom == 0:
        raise DomainError("closed-form denominator vanishes")
    return abs(math.sqrt(7) * (N - 7 * c) / denom)


# ---------------------------------------------------------------- evaluators

def bar_utilities(cfg: bar.BarConfig, kind="WL"):
    """``(world, personal)`` evaluators for the bar problem."""
    world = lambda s: bar.world_reward(s, cfg)
    if kind == "WL":
        personal = lambda s, node: bar.world_reward(s, cfg) - bar.world_reward(clamp(s, {node}), cfg)
    elif kind == "G":
        personal = lambda s, node: bar.reward_g(node, s, cfg)
    elif kind == "UD":
        personal = lambda s, node: bar.reward_ud(node, s, cfg)
    else:
        raise DomainError(f"unknown bar reward {kind!r}")
    return world, personal


def bar_embedded_utilities(cfg: bar.BarConfig, node):
    """``(G, WL)`` as functions of a real embedding, for differential learnability."""
    def world(E):
        return bar.world_reward_embedding(E, cfg)

    def wl(E):
        C = np.array(E, dtype=float)
        C[node] = 0.0
        return bar.world_reward_embedding(E, cfg) - bar.world_reward_embedding(C, cfg)

    return world, wl


def leader_follower_utilities(cfg: lf.LFConfig, R, gsets=None, kind="WL"):
    """``(world, personal)`` evaluators over *pick* profiles.

    Both apply the follower dynamics before scoring, so a counterfactual pick
    by a leader drags its followers along.
    """
    world = lambda s: lf.world_reward_lf(lf.apply_dynamics(s, cfg), R)
    if kind == "G":
        return world, lambda s, node: world(s)
    if kind != "WL":
        raise DomainError(f"unknown leader-follower reward {kind!r}")
    if gsets is None:
        gsets = lf.initial_effect_sets(cfg, "correct")
    personal = lambda s, node: lf.reward_wl_lf(node, lf.apply_dynamics(s, cfg), gsets, R)
    return world, personal


def enumerate_states(n_nodes, n_nights):
    """Every un-clamped joint state of ``n_nodes`` nodes."""
    for combo in itertools.product(range(n_nights), repeat=n_nodes):
        yield WeekState(np.array(combo))


def enumerate_leader_profiles(cfg: lf.LFConfig):
    """Every leader-pick profile, followers echoing their leader."""
    for combo in itertools.product(range(cfg.n_nights), repeat=cfg.n_leaders):
        yield WeekState(np.repeat(np.array(combo), 3))
