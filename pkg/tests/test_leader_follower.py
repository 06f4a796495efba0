import itertools

import numpy as np
import pytest

from coinlab.core import WeekState, clamp
from coinlab.envs import leader_follower as lf
from coinlab.envs.leader_follower import LFConfig
from coinlab.exceptions import DomainError


@pytest.fixture
def two_leader_pair():
    """Two leaders, K=2; leader 0 (i1) attends night 1, leader 3 (i2) night 0."""
    R = lf.worst_case_tensor(2, penalty=2.0)
    cfg = LFConfig(n_leaders=2, n_nights=2)
    attended = WeekState(np.array([1, 1, 1, 0, 0, 0]))
    return R, cfg, attended


def test_worst_case_tensor_k2_entries():
    R = lf.worst_case_tensor(2, 2.0)
    assert R[0, 0, 0] == 0 and R[1, 1, 1] == 1 and R[0, 1, 1] == 2
    assert np.count_nonzero(R) == 2


@pytest.mark.parametrize("B", [1.01, 1.5, 2.0, 10.0])
def test_wrong_set_reward_negative_for_any_penalty(B):
    R = lf.worst_case_tensor(2, B)
    cfg = LFConfig(n_leaders=2, n_nights=2)
    attended = WeekState(np.array([1, 1, 1, 0, 0, 0]))
    gsets = {0: (0, 4, 5)}
    assert lf.reward_wl_lf(0, attended, gsets, R, cfg) == pytest.approx(1 - B)
    assert 1 - B < 0


def test_worst_case_k7_argmax_by_enumeration():
    B, K = 2.0, 7
    wrong = [l / (K - 1) - l * B for l in range(K)]
    right = [l / (K - 1) for l in range(K)]
    assert int(np.argmax(wrong)) == 0
    assert int(np.argmax(right)) == 6


def test_worst_case_rejects_small_penalty():
    with pytest.raises(DomainError):
        lf.worst_case_tensor(2, 1.0)


def test_two_leader_worked_example(two_leader_pair):
    R, cfg, attended = two_leader_pair
    wrong = {0: (0, 4, 5)}
    correct = {0: (0, 1, 2)}
    assert lf.reward_wl_lf(0, attended, wrong, R, cfg) == -1.0
    assert lf.reward_wl_lf(0, attended, correct, R, cfg) == 1.0
    at_zero = WeekState(np.zeros(6, dtype=int))
    assert lf.reward_wl_lf(0, at_zero, correct, R, cfg) == 0.0
    assert lf.reward_wl_lf(0, at_zero, wrong, R, cfg) == 0.0


def test_world_reward_examples():
    R = lf.worst_case_tensor(2, 2.0)
    assert lf.world_reward_lf(WeekState(np.zeros(3, dtype=int)), R) == 0
    assert lf.world_reward_lf(WeekState(np.ones(3, dtype=int)), R) == 1
    # both followers of a night-1 leader clamped: R[1, 0, 0]
    s = clamp(WeekState(np.ones(3, dtype=int)), {1, 2})
    assert lf.world_reward_lf(s, R) == R[1, 0, 0]


def test_apply_dynamics():
    picks = np.array([4, 1, 2, 0, 5, 6])
    assert lf.apply_dynamics(picks).tolist() == [4, 4, 4, 0, 0, 0]
    once = lf.apply_dynamics(picks)
    np.testing.assert_array_equal(lf.apply_dynamics(once), once)
    s = lf.apply_dynamics(WeekState(picks))
    assert isinstance(s, WeekState) and s.choices.tolist() == [4, 4, 4, 0, 0, 0]
    batch = np.stack([picks, picks[::-1]])
    assert lf.apply_dynamics(batch).shape == (2, 6)


def test_world_reward_additive_over_leaders():
    rng = np.random.default_rng(1)
    R = lf.random_tensor(3, rng)
    s = WeekState(rng.integers(0, 3, 9))
    total = lf.world_reward_lf(s, R)
    for i in range(3):
        keep = [j for j in range(9) if j // 3 != i]
        part = lf.world_reward_lf(WeekState(s.choices[keep]), R)
        l, f1, f2 = s.choices[3 * i: 3 * i + 3]
        assert total - part == pytest.approx(R[l, f1, f2], abs=1e-12)


def test_random_tensor_determinism_and_support():
    a = lf.random_tensor(7, 123)
    b = lf.random_tensor(7, 123)
    c = lf.random_tensor(7, 124)
    np.testing.assert_array_equal(a, b)
    assert a.shape == (7, 7, 7)
    assert np.all((a >= 0) & (a <= 1))
    assert np.any(a != c)


def test_vectorised_wl_matches_scalar():
    rng = np.random.default_rng(7)
    cfg = LFConfig(n_leaders=5, n_nights=4)
    R = lf.random_tensor(4, rng)
    gsets = lf.initial_effect_sets(cfg, "random", rng)
    M = lf.membership_matrix(gsets, cfg.n_agents)
    for _ in range(20):
        attended = lf.apply_dynamics(rng.integers(0, 4, cfg.n_agents))
        rewards, world = lf.wl_rewards(attended, M, R)
        s = WeekState(attended)
        scalar = [lf.reward_wl_lf(a, s, gsets, R) for a in range(cfg.n_agents)]
        np.testing.assert_allclose(rewards, scalar, atol=1e-12)
        assert world == pytest.approx(lf.world_reward_lf(s, R))


def test_initial_effect_sets():
    cfg = LFConfig(n_leaders=4)
    correct = lf.initial_effect_sets(cfg, "correct")
    assert correct[0] == (0, 1, 2) and correct[3] == (3, 4, 5) and correct[1] == (1,)
    none = lf.initial_effect_sets(cfg, "none_followers")
    assert all(len(s) == 1 for s in none)
    rnd = lf.initial_effect_sets(cfg, "random", 0)
    for a in range(0, 12, 3):
        assert rnd[a][0] == a and len(set(rnd[a])) == 3
    assert rnd == lf.initial_effect_sets(cfg, "random", 0)


@pytest.mark.parametrize("K", [2, 3, 7])
def test_wrong_set_argmax_is_night_zero_for_every_context(K):
    """With no followers in its set, night 0 maximises a leader's WL whatever others do."""
    cfg = LFConfig(n_leaders=2, n_nights=K)
    R = lf.worst_case_tensor(K, 2.0)
    gsets = lf.initial_effect_sets(cfg, "none_followers")
    for other in range(K):
        values = []
        for l in range(K):
            s = WeekState(np.array([l, l, l, other, other, other]))
            values.append(lf.reward_wl_lf(0, s, gsets, R))
        assert int(np.argmax(values)) == 0


def test_optimum_and_minimum():
    cfg = LFConfig(n_leaders=56)
    R = lf.worst_case_tensor(7, 2.0)
    assert lf.optimum(R, cfg) == pytest.approx(56.0)
    assert lf.minimum(R, cfg) == 0.0


def test_config_validation():
    with pytest.raises(DomainError):
        LFConfig(tensor_kind="bogus")
    with pytest.raises(DomainError):
        LFConfig(followers_per_leader=3)
    with pytest.raises(DomainError):
        lf.initial_effect_sets(LFConfig(), "bogus")
