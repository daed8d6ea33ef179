"""Command-line entry point: ``boolnet <subcommand> [options]``.

On failure the process exits nonzero and prints one JSON object on stderr,
``{"error": <type>, "message": <text>}``.
"""

import argparse
import json
import sys
from dataclasses import replace

from boolnet import config as cfgmod
from boolnet import experiments, kernels
from boolnet.network import ContractError


def _add_common(p):
    p.add_argument("--config", help="flat key = value experiment config file")
    p.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    p.add_argument("--runs", type=int, help="number of seeded runs")
    p.add_argument("--out", help="output directory")
    p.add_argument("--n-neurons", help="network size(s), comma separated")
    p.add_argument("--tasks", help="task list, e.g. AND:2,OR:2")
    p.add_argument("--t-max", help="dynamics step cap, or 'auto'")
    p.add_argument("--epochs", help="search budget per run, or 'auto'")
    p.add_argument("--init-policy", choices=("fixed", "random"))
    p.add_argument("--backend", choices=("numba", "numpy"), help="dynamics kernel backend")


def build_parser():
    parser = argparse.ArgumentParser(prog="boolnet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "dynamics": "rasters of a random network before and after annealing",
        "randomwalk": "unconditional-acceptance walks, E=0 visits per network size",
        "anneal": "Metropolis annealing sessions and their mean error curve",
        "sweep": "annealing difficulty across task counts or network sizes",
        "igt": "two-deck gambling task sessions and their modal choices",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        _add_common(p)
        if name == "sweep":
            p.add_argument("--sweep-axis", choices=("n", "N"))
            p.add_argument("--sweep-values", help="comma-separated axis values")
        if name == "igt":
            p.add_argument("--trials", type=int)
            p.add_argument("--proposals-per-trial", type=int)
            p.add_argument("--decks", help="directory with B.csv and D.csv, or 'default'")
    r = sub.add_parser("render", help="regenerate the SVG views of an output directory")
    r.add_argument("directory")
    return parser


_CONVERTED = ("n_neurons", "tasks", "t_max", "epochs", "sweep_values")


def config_from_args(args):
    base = cfgmod.load(args.config) if args.config else cfgmod.ExperimentConfig(kind=args.command)
    if base.kind != args.command:
        base = replace(base, kind=args.command)
    overrides = {}
    for key in ("seed", "runs", "out", "init_policy", "sweep_axis", "trials",
                "proposals_per_trial", "decks") + _CONVERTED:
        value = getattr(args, key, None)
        if value is None:
            continue
        overrides[key] = cfgmod.convert(key, value) if key in _CONVERTED else value
    if "seed" in overrides and not 0 <= overrides["seed"] < 2 ** 64:
        raise cfgmod.ConfigError("seed must be an unsigned 64-bit integer")
    return replace(base, **overrides)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "render":
            for name in experiments.render_all(args.directory):
                print(name)
            return 0
        if args.backend:
            kernels.use_backend(args.backend)
        cfg = config_from_args(args)
        record = experiments.COMMANDS[cfg.kind](cfg)
        print(json.dumps({"out": cfg.out, "stats": record.stats}, sort_keys=True))
        return 0
    except (ContractError, OSError, KeyError, ValueError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
