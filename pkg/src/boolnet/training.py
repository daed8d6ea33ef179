"""Boolean-function learning tasks and the epoch error functional.

A task set assigns each Boolean function its own block of clamped input
neurons (lowest indices, in task order) and one output neuron (highest
indices, in task order).  One epoch presents every pattern of every task:
the task's inputs are clamped to the pattern, inputs belonging to other tasks
are clamped to -1, and the remaining neurons start from the initialization
policy.  The network then runs to its attractor and its output neuron is
compared with the wanted value over the whole orbit.

The error of an epoch is::

    E = sum_mu mean_orbit (S_out - xi_out)**2 / (4 P) + tau_w / 10

or ``10 * N_O`` when any pattern fails to recur within ``t_max``.  Here
``tau_w`` is the worst *response transient*: the number of steps, counted
from the first update, before the trajectory enters its orbit.  The state at
t = 0 is the presentation state (inputs clamped, hidden neurons initialized)
and is not itself a response, so a network that settles on a fixed point at
t = 1 has response transient 0.
"""

import csv
import itertools
from dataclasses import dataclass

import numpy as np

from boolnet import kernels
from boolnet.network import ContractError, default_t_max

FAILURE_PENALTY = 10.0

BUILTIN_FUNCTIONS = {
    "AND": all,
    "OR": any,
    "XOR": lambda bits: sum(bits) % 2 == 1,
    "NAND": lambda bits: not all(bits),
    "NOR": lambda bits: not any(bits),
    "XNOR": lambda bits: sum(bits) % 2 == 0,
}


def bipolar(flag):
    return 1 if flag else -1


def input_patterns(arity):
    """All bipolar input patterns of the given arity, -1 before +1 per position."""
    return np.array(list(itertools.product((-1, 1), repeat=arity)), dtype=np.int8).reshape(-1, arity)


@dataclass(frozen=True)
class BooleanTask:
    name: str
    input_neurons: tuple
    output_neuron: int
    inputs: np.ndarray   # (P, arity) of -1/+1
    wanted: np.ndarray   # (P,) of -1/+1

    @property
    def arity(self):
        return len(self.input_neurons)

    @property
    def n_patterns(self):
        return self.inputs.shape[0]


@dataclass(frozen=True)
class TrainingSet:
    """Flat pattern arrays consumed by the evaluation kernel.

    ``clamp_values`` holds, for every pattern, the values of the clamped
    neurons (entries at unclamped positions are ignored).
    """

    n_neurons: int
    clamped: np.ndarray       # (N,) bool
    clamp_values: np.ndarray  # (P, N) int8
    output_index: np.ndarray  # (P,) int64
    wanted: np.ndarray        # (P,) int8
    n_outputs: int
    pattern_weights: np.ndarray = None

    @property
    def n_patterns(self):
        return self.wanted.shape[0]

    def initial_states(self, init_policy="fixed", seed=0):
        """Presentation states for all patterns under ``init_policy``.

        ``fixed`` starts every unclamped neuron at -1; ``random`` draws them
        uniformly, from a stream seeded by ``(seed, pattern index)``.
        """
        init = np.full((self.n_patterns, self.n_neurons), -1, dtype=np.int8)
        if init_policy == "random":
            for p in range(self.n_patterns):
                rng = np.random.default_rng([seed, p])
                init[p] = np.where(rng.random(self.n_neurons) < 0.5, -1, 1)
        elif init_policy != "fixed":
            raise ContractError(f"unknown init policy {init_policy!r}")
        init[:, self.clamped] = self.clamp_values[:, self.clamped]
        return init


@dataclass(frozen=True)
class TaskSet:
    n_neurons: int
    tasks: tuple

    @property
    def input_neurons(self):
        return tuple(i for t in self.tasks for i in t.input_neurons)

    @property
    def output_neurons(self):
        return tuple(t.output_neuron for t in self.tasks)

    @property
    def n_inputs(self):
        return sum(t.arity for t in self.tasks)

    @property
    def n_outputs(self):
        return len(self.tasks)

    @property
    def n_patterns(self):
        return sum(t.n_patterns for t in self.tasks)

    def training_set(self):
        n = self.n_neurons
        clamped = np.zeros(n, dtype=bool)
        clamped[list(self.input_neurons)] = True
        rows, outs, wanted = [], [], []
        for task in self.tasks:
            for pat, want in zip(task.inputs, task.wanted):
                row = np.full(n, -1, dtype=np.int8)
                row[list(task.input_neurons)] = pat
                rows.append(row)
                outs.append(task.output_neuron)
                wanted.append(want)
        return TrainingSet(n, clamped, np.array(rows, dtype=np.int8).reshape(-1, n),
                           np.array(outs, dtype=np.int64), np.array(wanted, dtype=np.int8),
                           self.n_outputs)


def _table_from_rows(rows, arity):
    inputs = np.array([r[0] for r in rows], dtype=np.int8).reshape(-1, arity)
    wanted = np.array([r[1] for r in rows], dtype=np.int8)
    if not np.isin(inputs, (-1, 1)).all() or not np.isin(wanted, (-1, 1)).all():
        raise ContractError("truth table entries must be -1 or +1")
    keys = {tuple(r) for r in inputs.tolist()}
    if len(keys) != len(rows):
        raise ContractError("truth table has duplicate input patterns")
    if len(rows) != 2 ** arity:
        raise ContractError(
            f"truth table must list all {2 ** arity} patterns, got {len(rows)}")
    order = np.lexsort(inputs.T[::-1])
    return inputs[order], wanted[order]


def truth_table(function, arity, rng=None):
    """``(inputs, wanted)`` for a named function, ``"RANDOM"``, or explicit rows.

    Explicit tables are a sequence of ``(input_pattern, output)`` pairs or a
    mapping from input pattern to output, bipolar encoded.
    """
    if arity < 1:
        raise ContractError(f"arity must be >= 1, got {arity}")
    if isinstance(function, str):
        name = function.upper()
        inputs = input_patterns(arity)
        if name == "RANDOM":
            rng = np.random.default_rng(rng)
            return inputs, np.where(rng.random(len(inputs)) < 0.5, -1, 1).astype(np.int8)
        if name not in BUILTIN_FUNCTIONS:
            raise ContractError(f"unknown Boolean function {function!r}")
        f = BUILTIN_FUNCTIONS[name]
        wanted = np.array([bipolar(f([v > 0 for v in pat])) for pat in inputs], dtype=np.int8)
        return inputs, wanted
    rows = list(function.items()) if isinstance(function, dict) else list(function)
    return _table_from_rows(rows, arity)


def make_task_set(specs, n_neurons, rng_seed=None):
    """Lay out tasks on a network of ``n_neurons``.

    ``specs`` is a sequence of ``(function, arity)``; ``function`` is a
    built-in name (AND, OR, XOR, NAND, NOR, XNOR), ``"RANDOM"`` (drawn from
    ``rng_seed``) or an explicit truth table.
    """
    specs = list(specs)
    if not specs:
        raise ContractError("at least one task is required")
    need = sum(arity for _, arity in specs) + len(specs)
    if need > n_neurons:
        raise ContractError(
            f"tasks need {need} distinct input/output neurons but the network has {n_neurons}")
    rng = np.random.default_rng(rng_seed)
    tasks, next_input = [], 0
    out0 = n_neurons - len(specs)
    for k, (function, arity) in enumerate(specs):
        inputs, wanted = truth_table(function, arity, rng)
        name = function.upper() if isinstance(function, str) else "TABLE"
        tasks.append(BooleanTask(name, tuple(range(next_input, next_input + arity)),
                                 out0 + k, inputs, wanted))
        next_input += arity
    return TaskSet(n_neurons, tuple(tasks))


_TRUE = {"1", "+1", "+", "t", "true"}
_FALSE = {"-1", "0", "-", "f", "false"}


def _parse_bit(token):
    t = token.strip().lower()
    if t in _TRUE:
        return 1
    if t in _FALSE:
        return -1
    raise ValueError(token)


def read_truth_table_csv(path):
    """Read a truth table: one row per pattern, input bits then the wanted output.

    Bits may be written ``-1/+1``, ``0/1``, ``-/+`` or ``false/true``.  A first
    row that does not parse as bits is treated as a header.
    Returns ``(rows, arity)`` suitable as a ``make_task_set`` spec.
    """
    with open(path, newline="") as fh:
        raw = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    rows = []
    for k, r in enumerate(raw):
        try:
            bits = [_parse_bit(c) for c in r]
        except ValueError:
            if k == 0:
                continue
            raise ContractError(f"{path}: row {k + 1} is not a row of bits: {r}")
        if len(bits) < 2:
            raise ContractError(f"{path}: row {k + 1} needs input bits and an output")
        rows.append((tuple(bits[:-1]), bits[-1]))
    if not rows:
        raise ContractError(f"{path}: no patterns found")
    arity = len(rows[0][0])
    if any(len(r[0]) != arity for r in rows):
        raise ContractError(f"{path}: rows have differing numbers of input bits")
    return rows, arity


@dataclass(frozen=True)
class PatternOutcome:
    transient: int      # response transient, -1 when not converged
    orbit_len: int
    converged: bool
    hamming: float      # this pattern's share of the Hamming term


@dataclass(frozen=True)
class ErrorReport:
    E: float
    per_pattern: tuple
    tau_worst: int
    l_worst: int
    failed: bool
    hamming_term: float


def response_transient(raw_transient):
    """Transient counted from t = 1 instead of the presentation state."""
    return np.maximum(raw_transient - 1, 0)


def energy_from_arrays(tau_raw, length, status, mismatch, n_outputs, weights=None):
    if np.any(status == 0):
        return FAILURE_PENALTY * n_outputs
    if weights is not None:
        mismatch = weights * mismatch
    hamming = float(mismatch.sum()) / (4 * mismatch.shape[0])
    return hamming + int(response_transient(tau_raw).max()) / 10


class Evaluator:
    """Evaluate networks against a fixed training set.

    Presentation states and ``t_max`` are computed once, so repeated calls in
    an optimization loop only pay for the dynamics.
    """

    def __init__(self, training_set, t_max=None, init_policy="fixed", init_seed=0):
        if isinstance(training_set, TaskSet):
            training_set = training_set.training_set()
        if training_set.n_patterns == 0:
            raise ContractError("training set has no patterns")
        self.training_set = training_set
        if t_max is None:
            t_max = default_t_max(training_set.n_neurons, int(training_set.clamped.sum()))
        if int(t_max) < 1:
            raise ContractError(f"t_max must be >= 1, got {t_max}")
        self.t_max = int(t_max)
        self.init = training_set.initial_states(init_policy, init_seed)

    def _run(self, net, stop_on_failure):
        if net.n_neurons != self.training_set.n_neurons:
            raise ContractError(
                f"network has {net.n_neurons} neurons, training set expects "
                f"{self.training_set.n_neurons}")
        ts = self.training_set
        return kernels.evaluate_patterns(net.weights, net.thresholds, net.connectivity,
                                         self.init, ts.clamped, ts.output_index, ts.wanted,
                                         self.t_max, stop_on_failure)

    def energy(self, net):
        ts = self.training_set
        return energy_from_arrays(*self._run(net, True), ts.n_outputs, ts.pattern_weights)

    def score(self, net):
        """``(E, fixed_points)``: ``fixed_points`` is True when every pattern
        converged to an orbit of length 1."""
        ts = self.training_set
        tau_raw, length, status, mismatch = self._run(net, True)
        E = energy_from_arrays(tau_raw, length, status, mismatch, ts.n_outputs,
                               ts.pattern_weights)
        return E, bool(np.all(length == 1))

    def report(self, net, stop_on_failure=True):
        """Full per-pattern report.

        With ``stop_on_failure`` the report ends at the first pattern that
        fails to converge.
        """
        ts = self.training_set
        tau_raw, length, status, mismatch = self._run(net, stop_on_failure)
        n_pat = ts.n_patterns
        E = energy_from_arrays(tau_raw, length, status, mismatch, ts.n_outputs,
                               ts.pattern_weights)
        if ts.pattern_weights is not None:
            mismatch = ts.pattern_weights * mismatch
        failed = bool(np.any(status == 0))
        outcomes = []
        for p in range(n_pat):
            if status[p] < 0:
                break
            ok = bool(status[p] == 1)
            outcomes.append(PatternOutcome(
                int(response_transient(tau_raw[p])) if ok else -1,
                int(length[p]), ok, float(mismatch[p]) / (4 * n_pat)))
        good = [o for o in outcomes if o.converged]
        return ErrorReport(
            E=float(E), per_pattern=tuple(outcomes),
            tau_worst=max((o.transient for o in good), default=-1),
            l_worst=max((o.orbit_len for o in good), default=-1),
            failed=failed,
            hamming_term=float(mismatch.sum()) / (4 * n_pat),
        )


def evaluate(net, ts, t_max=None, init_policy="fixed", init_seed=0):
    """Error report of ``net`` over one epoch of ``ts``."""
    return Evaluator(ts, t_max, init_policy, init_seed).report(net)
