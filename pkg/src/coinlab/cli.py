"""Command-line entry point: ``coinlab simulate`` and ``coinlab diagnose``.

Exit codes: 0 success, 2 configuration error, 1 runtime error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
import typing

import numpy as np

from . import __version__, diagnostics as dg
from .envs import bar, leader_follower as lf
from .exceptions import ConfigurationError, DomainError
from .harness import CoinExperiment, ExperimentConfig, load_config

log = logging.getLogger("coinlab")

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigurationError(message)


def _bool(text):
    if text.lower() in ("1", "true", "yes", "on"):
        return True
    if text.lower() in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


def _alpha(text):
    if text in bar.ALPHA_PRESETS:
        return text
    try:
        return [float(a) for a in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"alpha must be a preset {bar.ALPHA_PRESETS} or comma-separated numbers")


def _optional_int(text):
    return None if text.lower() in ("none", "off") else int(text)


_FIELD_TYPES = {int: int, float: float, str: str, bool: _bool}


def _add_config_flags(p):
    hints = typing.get_type_hints(ExperimentConfig)
    for f in dataclasses.fields(ExperimentConfig):
        flag = "--" + f.name.replace("_", "-")
        names = [flag, "--experiment"] if f.name == "environment" else [flag]
        if f.name == "alpha":
            kind = _alpha
        elif f.name == "macrolearning_week":
            kind = _optional_int
        else:
            kind = _FIELD_TYPES[hints[f.name]]
        p.add_argument(*names, dest=f.name, type=kind, default=argparse.SUPPRESS,
                       help=f"(default {f.default!r})")


def build_parser():
    parser = _Parser(prog="coinlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"coinlab {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="run seeded multi-run experiments")
    sim.add_argument("--config", help="flat YAML/JSON key-value file; flags override it")
    sim.add_argument("--out", default="coinlab-out", help="output directory")
    sim.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    _add_config_flags(sim)

    diag = sub.add_parser("diagnose", help="exhaustive diagnostics on a small instance")
    diag.add_argument("--experiment", choices=("bar", "leader_follower"), default="bar")
    diag.add_argument("--reward", choices=("UD", "G", "WL"), default="WL")
    diag.add_argument("--n-agents", type=int, default=4)
    diag.add_argument("--n-nights", type=int, default=3)
    diag.add_argument("--capacity", type=float, default=1.5)
    diag.add_argument("--alpha", type=_alpha, default="uniform")
    diag.add_argument("--n-leaders", type=int, default=2)
    diag.add_argument("--tensor-kind", choices=lf.TENSOR_KINDS, default="worst_case")
    diag.add_argument("--penalty", type=float, default=2.0)
    diag.add_argument("--effect-sets", choices=lf.GSET_INITS, default="correct")
    diag.add_argument("--seed", type=int, default=0)
    diag.add_argument("--max-states", type=int, default=20000,
                      help="refuse instances with more joint states than this")
    return parser


def _simulate(args):
    settings = load_config(args.config) if args.config else {}
    overrides = {f.name: getattr(args, f.name) for f in dataclasses.fields(ExperimentConfig)
                 if hasattr(args, f.name)}
    settings.update(overrides)
    cfg = ExperimentConfig.from_mapping(settings)
    exp = CoinExperiment(cfg, n_jobs=args.jobs).fit()
    csv_path, json_path = exp.write(args.out)
    st = exp.stats_
    final = st.mean[-1] if st.weeks else float("nan")
    print(f"wrote {csv_path} and {json_path}")
    print(f"final mean world reward {final:.6g} (optimum {st.optimum:.6g}); "
          f"convergence week {st.convergence_week}")


def _diagnose(args):
    if args.experiment == "bar":
        try:
            cfg = bar.BarConfig(args.n_agents, args.n_nights, args.capacity, args.alpha)
        except DomainError as exc:
            raise ConfigurationError(str(exc))
        n_nodes = cfg.n_agents
        world, personal = dg.bar_utilities(cfg, args.reward)
        state_iter = lambda: dg.enumerate_states(n_nodes, cfg.n_nights)
        n_states = cfg.n_nights ** n_nodes
    else:
        if args.reward == "UD":
            raise ConfigurationError("UD is only defined for the bar environment")
        try:
            cfg = lf.LFConfig(args.n_leaders, args.n_nights,
                              args.tensor_kind, args.penalty)
            R = lf.make_tensor(cfg, args.seed)
            gsets = lf.initial_effect_sets(cfg, args.effect_sets, args.seed)
        except DomainError as exc:
            raise ConfigurationError(str(exc))
        n_nodes = cfg.n_agents
        world, personal = dg.leader_follower_utilities(cfg, R, gsets, args.reward)
        state_iter = lambda: dg.enumerate_leader_profiles(cfg)
        n_states = cfg.n_nights ** cfg.n_leaders
    if n_states > args.max_states:
        raise ConfigurationError(f"{n_states} joint states exceed --max-states={args.max_states}")

    K = cfg.n_nights
    factored = dg.factoredness_degree(world, personal, state_iter(), K)
    same = total = 0
    for s in state_iter():
        for node in range(n_nodes):
            e_g = dg.intelligence(lambda t: personal(t, node), s, node, K)
            e_G = dg.intelligence(world, s, node, K)
            same += e_g == e_G
            total += 1
    rng = np.random.default_rng(args.seed)
    probe = list(state_iter())[rng.integers(n_states)]
    out = {
        "experiment": args.experiment,
        "reward": args.reward,
        "n_nodes": n_nodes,
        "n_nights": K,
        "joint_states": n_states,
        "factoredness_degree": factored,
        "intelligence_agreement": same / total,
        "probe_state": probe.choices.tolist(),
        "learnability_personal_node0": dg.learnability(lambda t: personal(t, 0), probe, 0, K),
        "learnability_world_node0": dg.learnability(world, probe, 0, K),
    }
    if args.experiment == "bar" and cfg.n_agents > 7 * cfg.capacity:
        out["bar_closed_form_ratio"] = dg.bar_closed_form_ratio(cfg.n_agents, cfg.capacity)
    out = {k: ("inf" if isinstance(v, float) and np.isinf(v) else v) for k, v in out.items()}
    print(json.dumps(out, indent=2, sort_keys=True))


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except ConfigurationError as exc:
        print(f"coinlab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "simulate":
            _simulate(args)
        else:
            _diagnose(args)
    except ConfigurationError as exc:
        print(f"coinlab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        log.debug("runtime failure", exc_info=True)
        print(f"coinlab: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
