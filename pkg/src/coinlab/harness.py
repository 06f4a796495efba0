"""Seeded multi-run experiments, aggregation and CSV/JSON output."""
from __future__ import annotations

import dataclasses
import json
import logging
import math
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np
import yaml
from joblib import Parallel, delayed
from sklearn.base import BaseEstimator

from . import __version__
from .agents import BoltzmannLearners
from .envs import bar, leader_follower as lf
from .exceptions import ConfigurationError, DomainError
from .macrolearn import EffectSetMacrolearner

log = logging.getLogger(__name__)

ENVIRONMENTS = ("bar", "leader_follower")
CSV_HEADER = "week,mean_world_reward,std_world_reward,min_world_reward,max_world_reward"


@dataclass(frozen=True)
class ExperimentConfig:
    environment: str = "bar"
    reward: str = "WL"
    # bar
    n_agents: int = 168
    n_nights: int = 7
    capacity: float = 6.0
    alpha: object = "single_night"
    # leader-follower
    n_leaders: int = 56
    tensor_kind: str = "worst_case"
    penalty: float = 2.0
    effect_sets: str = "random"
    # schedule
    weeks: int = 2000
    runs: int = 20
    seed: int = 0
    macrolearning_week: Optional[int] = None
    relearn_on_macrolearning: bool = True
    convergence_threshold: float = 0.95
    # learner
    learning_rate: float = 0.1
    temp_initial: float = 1.0
    temp_decay_time: float = 100.0
    temp_floor: float = 0.001

    def __post_init__(self):
        if isinstance(self.alpha, (list, tuple)):
            object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))
        self.validate()

    def validate(self):
        def bad(name, why):
            raise ConfigurationError(f"{name}: {why}", field=name)

        if self.environment not in ENVIRONMENTS:
            bad("environment", f"expected one of {ENVIRONMENTS}, got {self.environment!r}")
        if self.reward not in bar.REWARDS:
            bad("reward", f"expected one of {bar.REWARDS}, got {self.reward!r}")
        if self.environment == "leader_follower" and self.reward == "UD":
            bad("reward", "UD is only defined for the bar environment")
        for name in ("n_agents", "n_nights", "n_leaders", "runs"):
            if not _is_int(getattr(self, name)) or getattr(self, name) < 1:
                bad(name, "must be a positive integer")
        if not _is_int(self.weeks) or self.weeks < 0:
            bad("weeks", "must be a non-negative integer")
        if not _is_int(self.seed) or not 0 <= self.seed < 2 ** 64:
            bad("seed", "must be an unsigned 64-bit integer")
        if self.macrolearning_week is not None:
            if not _is_int(self.macrolearning_week) or self.macrolearning_week < 1:
                bad("macrolearning_week", "must be a positive integer")
            if self.environment != "leader_follower":
                bad("macrolearning_week", "macrolearning needs the leader_follower environment")
        if self.tensor_kind not in lf.TENSOR_KINDS:
            bad("tensor_kind", f"expected one of {lf.TENSOR_KINDS}")
        if self.effect_sets not in lf.GSET_INITS:
            bad("effect_sets", f"expected one of {lf.GSET_INITS}")
        if not 0 < self.convergence_threshold <= 1:
            bad("convergence_threshold", "must lie in (0, 1]")
        if not self.capacity > 0:
            bad("capacity", "must be positive")
        try:
            self.bar_config()
        except DomainError as exc:
            bad("alpha", str(exc))
        if self.tensor_kind == "worst_case" and not self.penalty > 1:
            bad("penalty", "must exceed 1 for the worst-case tensor")
        try:
            self.learners().learner_params()
        except DomainError as exc:
            bad("learning_rate" if "learning_rate" in str(exc) else "temp_floor", str(exc))

    def bar_config(self):
        return bar.BarConfig(self.n_agents, self.n_nights, self.capacity, self.alpha)

    def lf_config(self):
        return lf.LFConfig(self.n_leaders, self.n_nights, self.tensor_kind, self.penalty)

    def learners(self):
        return BoltzmannLearners(self.learning_rate, self.temp_initial,
                                 self.temp_decay_time, self.temp_floor)

    @property
    def n_population(self):
        return self.n_agents if self.environment == "bar" else 3 * self.n_leaders

    def to_dict(self):
        d = dataclasses.asdict(self)
        if isinstance(d["alpha"], tuple):
            d["alpha"] = list(d["alpha"])
        return d

    @classmethod
    def from_mapping(cls, mapping):
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(mapping) - known)
        if unknown:
            raise ConfigurationError(f"unknown configuration key(s): {', '.join(unknown)}",
                                     field=unknown[0])
        return cls(**mapping)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


def _is_int(x):
    return isinstance(x, (int, np.integer)) and not isinstance(x, bool)


def load_config(path):
    """Read a flat YAML (or JSON) key-value file."""
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh) or {}
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc.strerror}", field="config")
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"cannot parse config {path}: {exc}", field="config")
    if not isinstance(data, dict):
        raise ConfigurationError(f"config {path} must be a key-value mapping", field="config")
    return data


@dataclass
class RunResult:
    world_reward: np.ndarray
    optimum: float
    final_attendance: Optional[np.ndarray] = None
    final_effect_sets: Optional[list] = None


def run_rng(seed, run_index):
    """Generator for one run; adding runs never changes existing ones."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(run_index,)))


def run_simulation(cfg: ExperimentConfig, run_index) -> RunResult:
    """Execute one seeded run of ``cfg``.

    Each week every agent picks a night, dynamics fix the attended nights,
    rewards are paid, and each agent updates the estimate of the night it
    picked. Macrolearning, when configured, fires after the update of week
    ``macrolearning_week``.
    """
    rng = run_rng(cfg.seed, run_index)
    learners = cfg.learners().initialize(cfg.n_population, cfg.n_nights)
    series = np.empty(cfg.weeks)
    if cfg.environment == "bar":
        bcfg = cfg.bar_config()
        picks = None
        for week in range(cfg.weeks):
            picks = learners.sample(week, rng)
            rewards, series[week] = bar.personal_rewards(picks, bcfg, cfg.reward)
            if cfg.reward == "G":
                assert np.all(rewards == rewards[0]), "team game pays everyone the same"
            learners.partial_fit(picks, rewards)
        attendance = (np.bincount(picks, minlength=cfg.n_nights) if picks is not None
                      else np.zeros(cfg.n_nights, dtype=np.int64))
        return RunResult(series, bar.optimum(bcfg), final_attendance=attendance)

    lcfg = cfg.lf_config()
    R = lf.make_tensor(lcfg, rng)
    gsets = lf.initial_effect_sets(lcfg, cfg.effect_sets, rng)
    membership = lf.membership_matrix(gsets, lcfg.n_agents)
    history = np.empty((cfg.weeks, lcfg.n_agents), dtype=np.int64)
    for week in range(cfg.weeks):
        picks = learners.sample(week, rng)
        attended = lf.apply_dynamics(picks)
        history[week] = attended
        if cfg.reward == "WL":
            rewards, series[week] = lf.wl_rewards(attended, membership, R)
        else:
            series[week] = float(R[attended[0::3], attended[1::3], attended[2::3]].sum())
            rewards = np.full(lcfg.n_agents, series[week])
        learners.partial_fit(picks, rewards)
        if cfg.macrolearning_week is not None and week == cfg.macrolearning_week:
            macro = EffectSetMacrolearner().fit(history[: week + 1])
            new_membership = macro.transform()
            if cfg.relearn_on_macrolearning:
                changed = np.flatnonzero((new_membership != membership).any(axis=1))
                learners.reset(changed, week + 1)
            gsets, membership = macro.effect_sets_, new_membership
    return RunResult(series, lf.optimum(R, lcfg), final_effect_sets=[tuple(s) for s in gsets])


@dataclass
class AggregateStats:
    mean: np.ndarray
    std: np.ndarray
    min: np.ndarray
    max: np.ndarray
    optimum: float
    threshold_fraction: float
    convergence_week: Optional[int] = None
    n_runs: int = 1

    @property
    def weeks(self):
        return self.mean.shape[0]


def convergence_week(mean, target):
    """First week from which ``mean >= target`` holds to the end, else ``None``."""
    ok = np.asarray(mean) >= target
    if ok.size == 0 or not ok[-1]:
        return None
    failing = np.flatnonzero(~ok)
    return int(failing[-1] + 1) if failing.size else 0


def aggregate(results, optimum=None, threshold_fraction=0.95) -> AggregateStats:
    """Per-week mean, std, min and max of world reward across runs.

    ``optimum`` defaults to the mean of the runs' own optima.
    """
    results = list(results)
    if not results:
        raise DomainError("aggregate needs at least one run")
    lengths = {len(r.world_reward) for r in results}
    if len(lengths) != 1:
        raise DomainError(f"runs have different lengths: {sorted(lengths)}")
    S = np.stack([r.world_reward for r in results])
    if optimum is None:
        optimum = float(np.mean([r.optimum for r in results]))
    # exactly rounded sums make the statistics independent of run order
    n = S.shape[0]
    mean = np.array([math.fsum(col) for col in S.T]) / n
    std = np.sqrt(np.array([math.fsum(col) for col in ((S - mean) ** 2).T]) / n)
    return AggregateStats(
        mean=mean, std=std, min=S.min(axis=0), max=S.max(axis=0),
        optimum=optimum, threshold_fraction=threshold_fraction,
        convergence_week=convergence_week(mean, threshold_fraction * optimum),
        n_runs=len(results))


def _fmt(v):
    return np.format_float_positional(float(v), precision=15, unique=False,
                                      fractional=False, trim="k")


def format_csv(stats: AggregateStats) -> str:
    lines = [CSV_HEADER]
    for w in range(stats.weeks):
        lines.append(",".join([str(w), _fmt(stats.mean[w]), _fmt(stats.std[w]),
                               _fmt(stats.min[w]), _fmt(stats.max[w])]))
    return "\n".join(lines) + "\n"


def summary(stats: AggregateStats, cfg: ExperimentConfig, results=None) -> dict:
    out = {
        "version": __version__,
        "config": cfg.to_dict(),
        "seed": cfg.seed,
        "runs": stats.n_runs,
        "optimum": stats.optimum,
        "convergence_threshold": stats.threshold_fraction,
        "convergence_week": stats.convergence_week,
        "final_week": None,
    }
    if stats.weeks:
        out["final_week"] = {
            "week": stats.weeks - 1,
            "mean_world_reward": float(stats.mean[-1]),
            "std_world_reward": float(stats.std[-1]),
            "min_world_reward": float(stats.min[-1]),
            "max_world_reward": float(stats.max[-1]),
            "mean_fraction_of_optimum": float(stats.mean[-1] / stats.optimum) if stats.optimum else None,
        }
    if results is not None:
        if cfg.environment == "bar":
            out["final_attendance"] = [r.final_attendance.tolist() for r in results]
        else:
            out["final_effect_sets"] = [
                {str(a): list(r.final_effect_sets[a]) for a in range(0, len(r.final_effect_sets), 3)}
                for r in results]
    return out


def emit_outputs(stats: AggregateStats, cfg: ExperimentConfig, path, results=None):
    """Write ``world_reward.csv`` and ``summary.json`` into directory ``path``."""
    csv_path = os.path.join(path, "world_reward.csv")
    json_path = os.path.join(path, "summary.json")
    try:
        os.makedirs(path, exist_ok=True)
        with open(csv_path, "w", newline="") as fh:
            fh.write(format_csv(stats))
        with open(json_path, "w") as fh:
            json.dump(summary(stats, cfg, results), fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write outputs to {path}: {exc.strerror}") from exc
    return csv_path, json_path


def run_many(cfg: ExperimentConfig, run_indices=None, n_jobs=1):
    indices = range(cfg.runs) if run_indices is None else run_indices
    if n_jobs == 1:
        return [run_simulation(cfg, i) for i in indices]
    return Parallel(n_jobs=n_jobs)(delayed(run_simulation)(cfg, i) for i in indices)


class CoinExperiment(BaseEstimator):
    """Runs ``config.runs`` seeded simulations and aggregates them.

    Parameters
    ----------
    config : ExperimentConfig
    n_jobs : int
        Worker processes; results do not depend on it.

    Attributes
    ----------
    results_ : list of RunResult
    stats_ : AggregateStats
    """

    def __init__(self, config=None, n_jobs=1):
        self.config = config
        self.n_jobs = n_jobs

    def _config(self):
        return ExperimentConfig() if self.config is None else self.config

    def fit(self, X=None, y=None):
        cfg = self._config()
        log.info("running %d %s/%s runs of %d weeks", cfg.runs, cfg.environment,
                 cfg.reward, cfg.weeks)
        self.results_ = run_many(cfg, n_jobs=self.n_jobs)
        self.stats_ = aggregate(self.results_, threshold_fraction=cfg.convergence_threshold)
        return self

    def write(self, path):
        return emit_outputs(self.stats_, self._config(), path, self.results_)
