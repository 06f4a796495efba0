"""Input validation helpers."""
from __future__ import annotations

import numbers

import numpy as np
from sklearn.utils.validation import check_array

from .exceptions import DomainError


def check_random_state(seed) -> np.random.Generator:
    """Turn ``seed`` into a :class:`numpy.random.Generator`.

    ``None`` gives fresh OS entropy; an int or :class:`~numpy.random.SeedSequence`
    seeds a new generator; a generator is passed through.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None or isinstance(seed, (numbers.Integral, np.random.SeedSequence)):
        return np.random.default_rng(seed)
    raise DomainError(f"{seed!r} cannot seed a numpy Generator")


def check_choices(choices, n_nights=None, n_nodes=None, name="choices"):
    """Validate a 1-d or 2-d array of night indices."""
    a = check_array(np.asarray(choices), ensure_2d=False, allow_nd=False,
                    dtype=np.int64, ensure_min_samples=0, ensure_all_finite=True)
    if np.any(a < 0):
        raise DomainError(f"{name} contains a negative night index")
    if n_nights is not None and np.any(a >= n_nights):
        raise DomainError(f"{name} contains a night index >= {n_nights}")
    if n_nodes is not None and a.shape[-1] != n_nodes:
        raise DomainError(f"{name} has {a.shape[-1]} nodes, expected {n_nodes}")
    return a


def check_history(history, min_weeks=2):
    """Validate a ``(weeks, agents)`` attendance history."""
    h = np.asarray(history, dtype=np.float64)
    if h.ndim != 2 or h.shape[0] < min_weeks:
        raise DomainError(f"need a (weeks, agents) history with at least {min_weeks} weeks")
    return check_array(h, ensure_min_samples=min_weeks)
