"""Worldlines, clamping and Wonderful Life utilities.

A worldline is stored as two ``(weeks, nodes)`` arrays: the night index each
node holds and a boolean mask of clamped entries. Clamped entries stand for
the all-zero ("null night") unary vector. Every object here is immutable;
operations return new objects.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .exceptions import DomainError


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class WeekState:
    """The joint state of all nodes in one week.

    ``choices[i]`` is the night held by node ``i``. For a clamped node the
    stored choice is kept for bookkeeping but carries no meaning; its unary
    embedding is all zeros.
    """

    choices: np.ndarray
    clamped: np.ndarray = None

    def __post_init__(self):
        choices = _frozen(self.choices, np.int64)
        if choices.ndim != 1:
            raise DomainError("choices must be one-dimensional")
        if np.any(choices < 0):
            raise DomainError("night indices must be non-negative")
        clamped = np.zeros(choices.shape, bool) if self.clamped is None else self.clamped
        clamped = _frozen(clamped, bool)
        if clamped.shape != choices.shape:
            raise DomainError("clamped mask must have one entry per node")
        object.__setattr__(self, "choices", choices)
        object.__setattr__(self, "clamped", clamped)

    @property
    def n_nodes(self):
        return self.choices.shape[0]

    def replace(self, node, night):
        """Return a copy with ``node`` holding ``night`` (and un-clamped)."""
        choices = self.choices.copy()
        clamped = self.clamped.copy()
        choices[node] = night
        clamped[node] = False
        return WeekState(choices, clamped)

    def __eq__(self, other):
        if not isinstance(other, WeekState):
            return NotImplemented
        return (np.array_equal(self.choices, other.choices)
                and np.array_equal(self.clamped, other.clamped))

    def __hash__(self):
        return hash((self.choices.tobytes(), self.clamped.tobytes()))

    def __repr__(self):
        return f"WeekState(choices={self.choices.tolist()}, clamped={self.clamped.tolist()})"


@dataclass(frozen=True, eq=False)
class Worldline:
    """Time-indexed node states: ``choices[t, i]`` and ``clamped[t, i]``."""

    choices: np.ndarray
    clamped: np.ndarray = None

    def __post_init__(self):
        choices = _frozen(self.choices, np.int64)
        if choices.ndim != 2:
            raise DomainError("a worldline is a (weeks, nodes) array")
        clamped = np.zeros(choices.shape, bool) if self.clamped is None else self.clamped
        clamped = _frozen(clamped, bool)
        if clamped.shape != choices.shape:
            raise DomainError("clamped mask must match the choices array")
        object.__setattr__(self, "choices", choices)
        object.__setattr__(self, "clamped", clamped)

    @classmethod
    def from_weeks(cls, weeks: Iterable[WeekState]) -> "Worldline":
        weeks = list(weeks)
        if not weeks:
            raise DomainError("a worldline needs at least one week")
        sizes = {w.n_nodes for w in weeks}
        if len(sizes) != 1:
            raise DomainError(f"weeks disagree on the number of nodes: {sorted(sizes)}")
        return cls(np.stack([w.choices for w in weeks]),
                   np.stack([w.clamped for w in weeks]))

    @property
    def n_weeks(self):
        return self.choices.shape[0]

    @property
    def n_nodes(self):
        return self.choices.shape[1]

    def week(self, t) -> WeekState:
        return WeekState(self.choices[t], self.clamped[t])

    def __iter__(self):
        return (self.week(t) for t in range(self.n_weeks))

    def __len__(self):
        return self.n_weeks

    def __getitem__(self, item):
        if isinstance(item, slice):
            return Worldline(self.choices[item], self.clamped[item])
        return self.week(item)

    def concat(self, other: "Worldline") -> "Worldline":
        return Worldline(np.concatenate([self.choices, other.choices]),
                         np.concatenate([self.clamped, other.clamped]))

    def __eq__(self, other):
        if not isinstance(other, Worldline):
            return NotImplemented
        return (np.array_equal(self.choices, other.choices)
                and np.array_equal(self.clamped, other.clamped))

    def __hash__(self):
        return hash((self.choices.shape, self.choices.tobytes(), self.clamped.tobytes()))


ClampSet = frozenset  # of (node, week) pairs


def clamp_set(nodes, week=0) -> ClampSet:
    """Clamp set holding ``nodes`` at a single ``week``."""
    return frozenset((int(n), int(week)) for n in nodes)


def clamp(w, sigma):
    """Overwrite the components in ``sigma`` with the null night.

    Accepts a :class:`Worldline` (``sigma`` holds ``(node, week)`` pairs) or a
    :class:`WeekState` (``sigma`` holds ``(node, 0)`` pairs or bare node
    indices). No dynamics are re-run: unlisted components keep their values.
    """
    if isinstance(w, WeekState):
        line = clamp(Worldline(w.choices[None, :], w.clamped[None, :]),
                     {m if isinstance(m, tuple) else (m, 0) for m in sigma})
        return line.week(0)
    if not sigma:
        return w
    mask = w.clamped.copy()
    for member in sigma:
        node, week = member
        if not (0 <= node < w.n_nodes and 0 <= week < w.n_weeks):
            raise IndexError(
                f"clamp member (node={node}, week={week}) outside worldline "
                f"of {w.n_nodes} nodes x {w.n_weeks} weeks")
        mask[week, node] = True
    return Worldline(w.choices, mask)


class WorldUtility:
    """A week-additive world utility ``G(w) = sum_t R(w[t])``.

    ``per_week_reward`` maps a :class:`WeekState` to a float.
    """

    def __init__(self, per_week_reward: Callable[[WeekState], float]):
        self.per_week_reward = per_week_reward

    def __call__(self, w) -> float:
        if isinstance(w, WeekState):
            return float(self.per_week_reward(w))
        return math.fsum(self.per_week_reward(s) for s in w)

    def shifted(self, constant: float) -> "WorldUtility":
        """Per-week reward plus a constant."""
        return WorldUtility(lambda s: self.per_week_reward(s) + constant)


def wlu(G, sigma, w) -> float:
    """Wonderful Life utility ``G(w) - G(clamp(w, sigma))``."""
    return G(w) - G(clamp(w, sigma))


def night_to_unary(night, n_nights) -> np.ndarray:
    """Unary (one-hot) vector of length ``n_nights`` for ``night``."""
    night = int(night)
    if not 0 <= night < n_nights:
        raise DomainError(f"night {night} outside [0, {n_nights})")
    v = np.zeros(n_nights)
    v[night] = 1.0
    return v


def unary_to_night(vector):
    """Inverse of :func:`night_to_unary`; ``None`` for the all-zero vector."""
    v = np.asarray(vector, dtype=float)
    total = v.sum()
    if not (np.all((v == 0) | (v == 1)) and total in (0, 1)):
        raise DomainError(f"{v.tolist()} is not a unary vector")
    if total == 0:
        return None
    return int(np.argmax(v))


def embed(state: WeekState, n_nights) -> np.ndarray:
    """``(nodes, n_nights)`` matrix of unary vectors; clamped rows are zero."""
    if np.any(state.choices[~state.clamped] >= n_nights):
        raise DomainError(f"a choice is outside [0, {n_nights})")
    E = np.zeros((state.n_nodes, n_nights))
    live = np.flatnonzero(~state.clamped)
    E[live, state.choices[live]] = 1.0
    return E
