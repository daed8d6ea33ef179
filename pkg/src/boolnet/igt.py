"""Simplified two-deck Iowa Gambling Task.

The agent is a 5-neuron network with one clamped input neuron and one output
neuron.  The first choice is random.  Before every later trial the network is
re-annealed, warm, on the whole history so far: each past trial becomes one
training example whose input encodes the previous choice and whose wanted
output is the choice actually made if its payoff was nonnegative, or the
other deck if it lost money.  The output neuron's settled value is the next
choice.

Decks are encoded B' = -1, D' = +1.
"""

import csv
import io
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from boolnet.network import ContractError, StateVector, random_network, run_to_attractor
from boolnet.optimize import Annealer, AnnealerConfig
from boolnet.training import Evaluator, TrainingSet

DECK_LENGTH = 60
B, D = -1, 1
LABELS = {B: "B'", D: "D'"}
CODES = {"B'": B, "D'": D, "B": B, "D": D}

# (min, max, mean) per deck
DECK_STATS = {"B'": (-2330, 170, -62.5), "D'": (-310, 95, -31.25)}

INPUT_MODES = ("previous_choice", "constant", "last_payoff_sign")
WANTED_MODES = ("payoff", "sign")


class DeckError(ContractError):
    pass


class DeckExhausted(Exception):
    """The chosen deck has no cards left; the session ends."""


def encode(label):
    return CODES[label]


def decode(value):
    return LABELS[B if value < 0 else D]


@dataclass
class Deck:
    label: str
    payoffs: tuple
    cursor: int = 0

    def __post_init__(self):
        self.payoffs = tuple(int(v) for v in self.payoffs)
        if len(self.payoffs) != DECK_LENGTH:
            raise DeckError(f"deck {self.label} must hold {DECK_LENGTH} cards, "
                            f"got {len(self.payoffs)}")

    @property
    def remaining(self):
        return len(self.payoffs) - self.cursor

    def draw(self):
        if self.cursor >= len(self.payoffs):
            raise DeckExhausted(self.label)
        value = self.payoffs[self.cursor]
        self.cursor += 1
        return value

    def stats(self):
        v = self.payoffs
        return min(v), max(v), sum(v) / len(v)

    def check_stats(self, expected):
        lo, hi, mean = expected
        got_lo, got_hi, got_mean = self.stats()
        if (got_lo, got_hi) != (lo, hi) or abs(got_mean - mean) > 1e-9 * abs(mean):
            raise DeckError(f"deck {self.label}: min/max/mean {self.stats()} "
                            f"differ from required {expected}")

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("position", "value"))
        w.writerows((k + 1, v) for k, v in enumerate(self.payoffs))
        return buf.getvalue()


def read_deck_csv(label, text, source="<text>"):
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [c.strip() for c in rows[0]] != ["position", "value"]:
        raise DeckError(f"{source}: header must be 'position,value'")
    values = []
    for k, row in enumerate(rows[1:], start=1):
        if not row:
            continue
        try:
            pos, value = (int(c) for c in row)
        except ValueError as exc:
            raise DeckError(f"{source}: row {k + 1} is not two integers: {row}") from exc
        if pos != len(values) + 1:
            raise DeckError(f"{source}: positions must run 1..{DECK_LENGTH} in order")
        values.append(value)
    return Deck(label, values)


def load_decks(path=None, check_stats=True):
    """Return ``(B', D')``.

    ``path`` is a directory holding ``B.csv`` and ``D.csv``; ``None`` loads the
    shipped defaults.  Each file has a ``position,value`` header and 60 rows.
    """
    decks = []
    for label, fname in (("B'", "B.csv"), ("D'", "D.csv")):
        if path is None:
            text = resources.files("boolnet.data").joinpath(f"deck_{fname}").read_text()
            source = f"default deck {label}"
        else:
            p = Path(path) / fname
            try:
                text = p.read_text()
            except OSError as exc:
                raise DeckError(f"cannot read {p}: {exc}") from exc
            source = str(p)
        deck = read_deck_csv(label, text, source)
        if check_stats:
            deck.check_stats(DECK_STATS[label])
        decks.append(deck)
    return tuple(decks)


@dataclass(frozen=True)
class Trial:
    trial: int
    choice: int
    payoff: int
    budget: int
    E_after: float = float("nan")
    accept_rate: float = float("nan")
    temperature: float = float("nan")
    uphill_accept_rate: float = float("nan")


@dataclass(frozen=True)
class IgtConfig:
    trials: int = 60
    proposals_per_trial: int = 50
    n_neurons: int = 5
    input_neuron: int = 0
    output_neuron: int = 4
    input_mode: str = "previous_choice"
    wanted_mode: str = "payoff"
    t_max: int = None
    annealer: AnnealerConfig = field(default_factory=AnnealerConfig)

    def __post_init__(self):
        if self.input_mode not in INPUT_MODES:
            raise ContractError(f"input_mode must be one of {INPUT_MODES}")
        if self.wanted_mode not in WANTED_MODES:
            raise ContractError(f"wanted_mode must be one of {WANTED_MODES}")
        if self.input_neuron == self.output_neuron:
            raise ContractError("input and output neurons must differ")
        if self.trials < 1 or self.proposals_per_trial < 0:
            raise ContractError("trials must be >= 1 and proposals_per_trial >= 0")


def wanted_output(choice, payoff):
    """Reinforce a nonnegative payoff, otherwise prefer the other deck."""
    return choice if payoff >= 0 else -choice


def _input_value(mode, prev_choice, prev_payoff):
    if mode == "previous_choice":
        return prev_choice
    if mode == "constant":
        return D
    return D if prev_payoff is None or prev_payoff >= 0 else B


def history_to_taskset(history, first_choice, n_neurons=5, input_neuron=0,
                       output_neuron=4, input_mode="previous_choice", wanted_mode="payoff"):
    """One training example per trial in ``history``.

    Example ``k`` clamps the input neuron to the value derived from trial
    ``k - 1`` (the first trial uses ``first_choice`` as its predecessor) and
    wants the output given by ``wanted_output`` for trial ``k``.

    With ``wanted_mode="payoff"`` each example's squared error is weighted by
    ``|payoff|``.  Up to a term that does not depend on the network, this is
    the squared error against the signed payoff itself, so large losses weigh
    more than small wins.  ``"sign"`` gives every example unit weight.
    """
    if not history:
        raise ContractError("history is empty")
    clamped = np.zeros(n_neurons, dtype=bool)
    clamped[input_neuron] = True
    rows = np.full((len(history), n_neurons), -1, dtype=np.int8)
    wanted = np.empty(len(history), dtype=np.int8)
    weights = np.empty(len(history), dtype=np.float64)
    prev_choice, prev_payoff = first_choice, None
    for k, h in enumerate(history):
        rows[k, input_neuron] = _input_value(input_mode, prev_choice, prev_payoff)
        wanted[k] = wanted_output(h.choice, h.payoff)
        weights[k] = abs(h.payoff)
        prev_choice, prev_payoff = h.choice, h.payoff
    if wanted_mode == "sign":
        weights = None
    elif wanted_mode != "payoff":
        raise ContractError(f"wanted_mode must be one of {WANTED_MODES}")
    return TrainingSet(n_neurons, clamped, rows,
                       np.full(len(history), output_neuron, dtype=np.int64), wanted, 1,
                       weights)


class IgtSession:
    """A single simulated subject working through the two decks."""

    def __init__(self, config=None, decks=None, seed=None):
        self.config = config or IgtConfig()
        decks = decks if decks is not None else load_decks()
        self.decks = {B: replace(decks[0], cursor=0), D: replace(decks[1], cursor=0)}
        net_ss, ann_ss, choice_ss = np.random.SeedSequence(seed).spawn(3)
        self.network = random_network(self.config.n_neurons, net_ss)
        self._ann_seed = ann_ss
        self._choice_rng = np.random.default_rng(choice_ss)
        self.annealer = None
        self.history = []
        self.budget = 0

    @property
    def first_choice(self):
        return self.history[0].choice if self.history else None

    @property
    def temperature(self):
        return self.annealer.temperature if self.annealer else self.config.annealer.t0

    def readout(self):
        """Clamp the input for the upcoming trial and read the settled output."""
        cfg = self.config
        last = self.history[-1]
        s = np.full(cfg.n_neurons, -1, dtype=np.int8)
        s[cfg.input_neuron] = _input_value(cfg.input_mode, last.choice, last.payoff)
        mask = np.zeros(cfg.n_neurons, dtype=bool)
        mask[cfg.input_neuron] = True
        res = run_to_attractor(self.network, StateVector(s, mask), cfg.t_max)
        # unconverged: fall back to the last computed state
        state = res.orbit_states[0].states if res.converged else res.trajectory[-1]
        return B if state[cfg.output_neuron] < 0 else D

    def run_trial(self):
        cfg = self.config
        e_after = accept_rate = uphill_rate = float("nan")
        if not self.history:
            choice = B if self._choice_rng.random() < 0.5 else D
        else:
            ts = history_to_taskset(self.history, self.first_choice, cfg.n_neurons,
                                    cfg.input_neuron, cfg.output_neuron, cfg.input_mode,
                                    cfg.wanted_mode)
            ev = Evaluator(ts, cfg.t_max)
            if self.annealer is None:
                self.annealer = Annealer(self.network, ev, cfg.annealer, self._ann_seed)
            else:
                self.annealer.retarget(ev)
            ann = self.annealer
            accepted, up0, upa0 = 0, ann.uphill_proposed, ann.uphill_accepted
            for _ in range(cfg.proposals_per_trial):
                accepted += ann.epoch()[2]
            self.network = ann.net
            e_after = float(ann.E)
            if cfg.proposals_per_trial:
                accept_rate = accepted / cfg.proposals_per_trial
            if ann.uphill_proposed > up0:
                uphill_rate = (ann.uphill_accepted - upa0) / (ann.uphill_proposed - up0)
            choice = self.readout()
        payoff = self.decks[choice].draw()
        self.budget += payoff
        trial = Trial(len(self.history) + 1, choice, payoff, self.budget,
                      e_after, accept_rate, float(self.temperature), uphill_rate)
        self.history.append(trial)
        return trial


SESSION_COLUMNS = ("trial", "choice", "payoff", "budget", "E_after", "accept_rate", "temperature")


def _fmt(x):
    return "" if x != x else repr(float(x))


@dataclass(frozen=True)
class SessionRecord:
    seed: object
    trials: tuple

    @property
    def choices(self):
        return [t.choice for t in self.trials]

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SESSION_COLUMNS)
        for t in self.trials:
            w.writerow((t.trial, LABELS[t.choice], t.payoff, t.budget,
                        _fmt(t.E_after), _fmt(t.accept_rate), _fmt(t.temperature)))
        return buf.getvalue()


def run_session(config=None, seed=None, decks=None):
    """Play ``config.trials`` trials, stopping early if a deck runs out."""
    session = IgtSession(config, decks, seed)
    for _ in range(session.config.trials):
        try:
            session.run_trial()
        except DeckExhausted:
            break
    return SessionRecord(seed, tuple(session.history))


@dataclass(frozen=True)
class Aggregate:
    mode: tuple          # per trial: "B'", "D'" or "tie"
    frac_b: np.ndarray
    frac_d: np.ndarray
    mean_budget: np.ndarray

    def transition_trial(self):
        """First trial of the final all-D' run of modal choices, or None."""
        last_other = max((k for k, m in enumerate(self.mode) if m != "D'"), default=-1)
        if last_other == len(self.mode) - 1:
            return None
        return last_other + 2

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("trial", "mode_choice", "frac_B", "frac_D", "mean_budget"))
        for k, m in enumerate(self.mode):
            w.writerow((k + 1, m, repr(float(self.frac_b[k])), repr(float(self.frac_d[k])),
                        repr(float(self.mean_budget[k]))))
        return buf.getvalue()


def aggregate(records):
    """Per-trial modal choice, choice fractions and mean budget across runs."""
    records = list(records)
    if not records:
        raise ContractError("aggregate needs at least one session record")
    lengths = {len(r.trials) for r in records}
    if len(lengths) != 1:
        raise ContractError(f"session records have differing trial counts: {sorted(lengths)}")
    choices = np.array([r.choices for r in records])
    budgets = np.array([[t.budget for t in r.trials] for r in records], dtype=np.int64)
    n_b = (choices == B).sum(axis=0)
    n_d = (choices == D).sum(axis=0)
    mode = tuple("B'" if b > d else "D'" if d > b else "tie" for b, d in zip(n_b, n_d))
    runs = len(records)
    return Aggregate(mode, n_b / runs, n_d / runs, budgets.sum(axis=0) / runs)
