"""Correlation-based correction of guessed effect sets.

Each agent's guessed effect set is replaced by itself plus the two agents
whose attended-night series are most correlated with its own.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .exceptions import DomainError
from .validation import check_history


def estimate_correlations(history):
    """Pearson correlations between the columns of a ``(weeks, agents)`` history.

    A zero-variance column correlates 0 with every other column. The diagonal
    is 1.
    """
    h = check_history(history)
    centered = h - h.mean(axis=0)
    scale = np.sqrt((centered ** 2).sum(axis=0))
    live = scale > 0
    z = np.zeros_like(centered)
    z[:, live] = centered[:, live] / scale[live]
    corr = np.clip(z.T @ z, -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    return corr


def reassign_effect_sets(corr, set_size=2):
    """``{agent} + top-set_size correlates`` per agent; ties go to the lower index."""
    corr = np.asarray(corr, dtype=float)
    n = corr.shape[0]
    if corr.ndim != 2 or corr.shape[1] != n:
        raise DomainError("correlation matrix must be square")
    if n < set_size + 1:
        raise DomainError(f"need at least {set_size + 1} agents")
    idx = np.arange(n)
    sets = []
    for a in range(n):
        others = idx[idx != a]
        # lexsort: last key is primary
        order = np.lexsort((others, -corr[a, others]))
        sets.append((a, *sorted(int(j) for j in others[order[:set_size]])))
    return sets


class EffectSetMacrolearner(BaseEstimator):
    """Learns guessed effect sets from an attendance history.

    Parameters
    ----------
    set_size : int
        Number of peers added to each agent's own index.

    Attributes
    ----------
    correlation_ : ndarray of shape (n_agents, n_agents)
    effect_sets_ : list of tuple
        ``effect_sets_[a]`` starts with ``a`` followed by its peers.
    """

    def __init__(self, set_size=2):
        self.set_size = set_size

    def fit(self, X, y=None):
        """``X`` is a ``(weeks, agents)`` array of attended nights."""
        self.correlation_ = estimate_correlations(X)
        self.effect_sets_ = reassign_effect_sets(self.correlation_, self.set_size)
        self.n_features_in_ = self.correlation_.shape[0]
        return self

    def transform(self, X=None):
        """Boolean ``(agents, agents)`` membership matrix of the learned sets."""
        M = np.zeros((self.n_features_in_,) * 2, dtype=bool)
        for a, members in enumerate(self.effect_sets_):
            M[a, list(members)] = True
        return M
