"""Experiment configuration: a flat ``key = value`` text format.

Lines starting with ``#`` and blank lines are ignored.  Unknown keys are an
error.  List values are comma separated.  ``to_text`` writes every key in a
fixed order, so ``parse(cfg.to_text()) == cfg`` for any valid config.

Seeds
-----
Run ``k`` of an experiment with master seed ``m`` uses seed
``derive_seed(m, k)``: the first 8 bytes, read little-endian, of the
BLAKE2b digest (digest size 8) of the ASCII string ``"m:k"``.  Sub-streams
within a run hash further parts the same way, e.g.
``derive_seed(run_seed, "network")``.
"""

import hashlib
from dataclasses import dataclass, fields, replace

from boolnet.network import ContractError
from boolnet.optimize import AnnealerConfig

KINDS = ("dynamics", "randomwalk", "anneal", "sweep", "igt")


class ConfigError(ContractError):
    pass


def derive_seed(*parts):
    text = ":".join(str(p) for p in parts)
    return int.from_bytes(hashlib.blake2b(text.encode("ascii"), digest_size=8).digest(), "little")


def parse_tasks(text):
    """``"AND:2,OR:2"`` -> ``[("AND", 2), ("OR", 2)]``; arity defaults to 2."""
    specs = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        name, _, arity = item.partition(":")
        try:
            specs.append((name.strip().upper(), int(arity) if arity else 2))
        except ValueError as exc:
            raise ConfigError(f"bad task spec {item!r}; expected NAME[:ARITY]") from exc
    if not specs:
        raise ConfigError("tasks must name at least one function")
    return tuple(specs)


def _int_list(text):
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(f"expected a comma-separated list of integers, got {text!r}") from exc


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str = "anneal"
    n_neurons: tuple = None       # None: (5, 10) for randomwalk, 5 for igt, else 10
    tasks: tuple = (("AND", 2),)
    t_max: int = None             # None: min(2**(N - N_I), 4096)
    epochs: int = None            # None: 2000 for randomwalk, 50000 otherwise
    runs: int = 30
    seed: int = 0
    out: str = "out"
    init_policy: str = "fixed"
    t0: float = 5.0
    cooling_ratio: float = 0.6
    ap_window: int = 10
    ap_low: float = 0.3
    ap_high: float = 0.7
    stop_stable_epochs: int = 10
    sweep_axis: str = "n"
    sweep_values: tuple = (1, 2, 3)
    trials: int = 60
    proposals_per_trial: int = 50
    decks: str = "default"
    input_mode: str = "previous_choice"
    wanted_mode: str = "payoff"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.n_neurons is not None and (
                not self.n_neurons or any(n < 2 for n in self.n_neurons)):
            raise ConfigError("n_neurons must list sizes >= 2")
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.epochs is not None and self.epochs < 1:
            raise ConfigError("epochs must be >= 1")
        if self.t_max is not None and self.t_max < 1:
            raise ConfigError("t_max must be >= 1")
        if self.sweep_axis not in ("n", "N"):
            raise ConfigError("sweep_axis must be 'n' (task count) or 'N' (network size)")
        if self.kind == "sweep" and not self.sweep_values:
            raise ConfigError("sweep_values must not be empty")
        if self.init_policy not in ("fixed", "random"):
            raise ConfigError("init_policy must be 'fixed' or 'random'")
        self.annealer_config()

    @property
    def sizes(self):
        if self.n_neurons is not None:
            return self.n_neurons
        return {"randomwalk": (5, 10), "igt": (5,)}.get(self.kind, (10,))

    @property
    def max_epochs(self):
        if self.epochs is not None:
            return self.epochs
        return 2000 if self.kind == "randomwalk" else 50_000

    def annealer_config(self):
        return AnnealerConfig(self.t0, self.cooling_ratio, self.ap_window,
                              (self.ap_low, self.ap_high), self.stop_stable_epochs,
                              self.max_epochs)

    def run_seed(self, run):
        return derive_seed(self.seed, run)

    def to_text(self):
        lines = []
        for f in fields(self):
            lines.append(f"{f.name} = {_format(f.name, getattr(self, f.name))}")
        return "\n".join(lines) + "\n"

    def with_overrides(self, **kw):
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def _format(name, value):
    if value is None:
        return "auto"
    if name == "tasks":
        return ",".join(f"{f}:{a}" for f, a in value)
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


_CONVERTERS = {
    "n_neurons": _int_list,
    "sweep_values": _int_list,
    "tasks": parse_tasks,
}


def convert(name, text):
    types = {f.name: f.type for f in fields(ExperimentConfig)}
    if name not in types:
        raise ConfigError(f"unknown config key {name!r}")
    text = text.strip()
    if text == "auto" and name in ("t_max", "epochs", "n_neurons"):
        return None
    if name in _CONVERTERS:
        return _CONVERTERS[name](text)
    kind = types[name]
    if name in ("t_max", "epochs"):
        kind = int
    try:
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
    except ValueError as exc:
        raise ConfigError(f"{name}: cannot parse {text!r} as {kind}") from exc
    return text


def parse(text):
    values = {}
    for k, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {k}: expected 'key = value', got {raw!r}")
        key = key.strip()
        if key in values:
            raise ConfigError(f"line {k}: duplicate key {key!r}")
        values[key] = convert(key, value)
    return ExperimentConfig(**values)


def load(path):
    with open(path) as fh:
        return parse(fh.read())
