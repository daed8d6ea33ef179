"""Search over network parameters: random walk and Metropolis annealing.

Both strategies share one move: pick a single perturbable coordinate
uniformly at random and resample it.  A weight is redrawn uniformly from the
two values of {-1, 0, +1} it does not currently hold; a threshold is redrawn
uniformly from [0, 1].  Only rows and thresholds of unclamped neurons are
perturbable, since clamped neurons never apply their update rule.

Coordinates are identified by an integer: weight ``(i, j)`` is ``i * N + j``
and threshold ``i`` is ``N * N + i``.
"""

import csv
import io
import math
import sys
from dataclasses import dataclass

import numpy as np

from boolnet.network import ContractError
from boolnet.training import Evaluator


def coordinate_label(coord, n_neurons):
    if coord < 0:
        return ""
    if coord >= n_neurons * n_neurons:
        return f"b[{coord - n_neurons * n_neurons}]"
    return f"w[{coord // n_neurons},{coord % n_neurons}]"


class PerturbationKernel:
    """Single-coordinate moves over the weights and thresholds of free neurons."""

    def __init__(self, n_neurons, frozen_neurons=(), rng=None):
        self.n_neurons = n_neurons
        frozen = set(int(i) for i in frozen_neurons)
        self.rows = np.array([i for i in range(n_neurons) if i not in frozen], dtype=np.int64)
        self.rng = np.random.default_rng(rng)
        self.n_weight_coords = len(self.rows) * (n_neurons - 1)
        self.n_coords = self.n_weight_coords + len(self.rows)

    def propose(self, net):
        """Return ``(new_net, coordinate_id)``; ``net`` is left untouched."""
        if self.n_coords == 0:
            raise ContractError("no perturbable coordinates: every neuron is clamped")
        if net.n_neurons != self.n_neurons:
            raise ContractError("network size does not match the perturbation kernel")
        n = self.n_neurons
        k = int(self.rng.integers(self.n_coords))
        if k < self.n_weight_coords:
            i = int(self.rows[k // (n - 1)])
            j = k % (n - 1)
            j += j >= i
            current = int(net.weights[i, j])
            others = [v for v in (-1, 0, 1) if v != current]
            value = others[int(self.rng.integers(2))]
            return net.with_weight(i, j, value), i * n + j
        i = int(self.rows[k - self.n_weight_coords])
        return net.with_threshold(i, float(self.rng.random())), n * n + i


def propose(kernel, net):
    return kernel.propose(net)


def metropolis_accept(delta_e, temperature, rng):
    """Accept surely when the error drops, else with probability exp(-dE/T)."""
    if not temperature > 0:
        raise ContractError(f"temperature must be positive, got {temperature}")
    if delta_e < 0:
        return True
    return bool(rng.random() < math.exp(-delta_e / temperature))


@dataclass(frozen=True)
class AnnealerConfig:
    t0: float = 5.0
    cooling_ratio: float = 0.6
    ap_window: int = 10
    ap_band: tuple = (0.3, 0.7)
    stop_stable_epochs: int = 10
    max_epochs: int = 50_000
    require_fixed_points: bool = True

    def __post_init__(self):
        lo, hi = self.ap_band
        if not self.t0 > 0:
            raise ContractError("t0 must be positive")
        if not 0 < self.cooling_ratio < 1:
            raise ContractError("cooling_ratio must lie in (0, 1)")
        if self.ap_window < 1:
            raise ContractError("ap_window must be >= 1")
        if not 0 <= lo <= hi <= 1:
            raise ContractError("ap_band must be an interval inside [0, 1]")
        if self.stop_stable_epochs < 1 or self.max_epochs < 1:
            raise ContractError("stop_stable_epochs and max_epochs must be >= 1")


@dataclass
class SearchTrace:
    """Per-epoch record of a search.

    ``temperature`` is NaN for the random walk; ``coordinate`` holds the id
    of the perturbed coordinate (see module docstring).
    """

    n_neurons: int
    initial_energy: float
    energy: np.ndarray
    temperature: np.ndarray
    accepted: np.ndarray
    coordinate: np.ndarray
    final_network: object
    solved: bool

    def __len__(self):
        return len(self.energy)

    @property
    def zero_hits(self):
        return int(np.count_nonzero(self.energy == 0.0))

    @property
    def first_zero_epoch(self):
        """1-based epoch of the first E = 0, or None."""
        hits = np.flatnonzero(self.energy == 0.0)
        return int(hits[0]) + 1 if hits.size else None

    def rows(self):
        for k in range(len(self)):
            t = self.temperature[k]
            yield (k + 1, repr(float(self.energy[k])), "" if np.isnan(t) else repr(float(t)),
                   int(self.accepted[k]), coordinate_label(int(self.coordinate[k]), self.n_neurons))

    def to_csv(self, path=None):
        """Write ``epoch,E,T,accepted,coordinate`` rows; return the text if no path."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("epoch", "E", "T", "accepted", "coordinate"))
        w.writerows(self.rows())
        text = buf.getvalue()
        if path is None:
            return text
        with open(path, "w", newline="") as fh:
            fh.write(text)
        return None


def _frozen(evaluator):
    return np.flatnonzero(evaluator.training_set.clamped)


def random_walk(net0, ts, steps, seed=None, t_max=None, init_policy="fixed"):
    """Accept every proposal; record E after each and keep going past zeros."""
    if steps < 1:
        raise ContractError("steps must be >= 1")
    ev = ts if isinstance(ts, Evaluator) else Evaluator(ts, t_max, init_policy)
    kernel = PerturbationKernel(net0.n_neurons, _frozen(ev), seed)
    energy = np.empty(steps)
    coords = np.empty(steps, dtype=np.int64)
    net = net0
    e0 = ev.energy(net0)
    for k in range(steps):
        net, coords[k] = kernel.propose(net)
        energy[k] = ev.energy(net)
    return SearchTrace(net0.n_neurons, e0, energy, np.full(steps, np.nan),
                       np.ones(steps, dtype=bool), coords, net, bool(energy[-1] == 0.0))


class Annealer:
    """Metropolis search whose state (network, temperature, window) persists.

    Each ``epoch`` proposes one move and evaluates it over the full training
    set.  Every ``ap_window`` epochs the acceptance rate of that window is
    sampled, and the temperature is multiplied by ``cooling_ratio`` when the
    rate lies inside ``ap_band`` (endpoints included).  A cooling step that
    would leave the normal floating-point range is skipped, so T stays positive.

    ``zero_streak`` counts consecutive epochs ending at E = 0; with
    ``require_fixed_points`` an epoch only counts when every pattern also
    settles on a fixed point, since E does not see orbit length.
    """

    def __init__(self, net, evaluator, config=None, seed=None):
        self.config = config or AnnealerConfig()
        self.rng = np.random.default_rng(seed)
        self.kernel = PerturbationKernel(net.n_neurons, _frozen(evaluator), self.rng)
        self.net = net
        self.temperature = self.config.t0
        self.window_accepted = 0
        self.window_seen = 0
        self.zero_streak = 0
        self.epochs = 0
        self.uphill_proposed = 0
        self.uphill_accepted = 0
        self.retarget(evaluator)

    def retarget(self, evaluator):
        """Switch to a new training set and re-evaluate the current network."""
        self.evaluator = evaluator
        self.E, self.fixed_points = self._score(self.net)

    def _score(self, net):
        if self.config.require_fixed_points:
            return self.evaluator.score(net)
        return self.evaluator.energy(net), True

    def _sample_window(self, accepted):
        cfg = self.config
        self.window_seen += 1
        self.window_accepted += accepted
        if self.window_seen == cfg.ap_window:
            ap = self.window_accepted / cfg.ap_window
            lo, hi = cfg.ap_band
            cooler = self.temperature * cfg.cooling_ratio
            if lo <= ap <= hi and cooler >= sys.float_info.min:
                self.temperature = cooler
            self.window_seen = self.window_accepted = 0

    def epoch(self):
        """One proposal; returns ``(E, T, accepted, coordinate)``."""
        candidate, coord = self.kernel.propose(self.net)
        e_new, fixed = self._score(candidate)
        t = self.temperature
        delta = e_new - self.E
        accepted = metropolis_accept(delta, t, self.rng)
        if delta > 0:
            self.uphill_proposed += 1
            self.uphill_accepted += accepted
        if accepted:
            self.net, self.E, self.fixed_points = candidate, e_new, fixed
        self._sample_window(accepted)
        self.epochs += 1
        settled = self.E == 0.0 and self.fixed_points
        self.zero_streak = self.zero_streak + 1 if settled else 0
        return self.E, t, accepted, coord


def anneal(net0, ts, config=None, seed=None, t_max=None, init_policy="fixed"):
    """Anneal until E = 0 has held for ``stop_stable_epochs`` epochs or the budget ends."""
    config = config or AnnealerConfig()
    ev = ts if isinstance(ts, Evaluator) else Evaluator(ts, t_max, init_policy)
    ann = Annealer(net0, ev, config, seed)
    e0 = ann.E
    cap = config.max_epochs
    energy = np.empty(cap)
    temps = np.empty(cap)
    acc = np.empty(cap, dtype=bool)
    coords = np.empty(cap, dtype=np.int64)
    solved = False
    k = 0
    while k < cap:
        energy[k], temps[k], acc[k], coords[k] = ann.epoch()
        k += 1
        if ann.zero_streak >= config.stop_stable_epochs:
            solved = True
            break
    return SearchTrace(net0.n_neurons, e0, energy[:k].copy(), temps[:k].copy(),
                       acc[:k].copy(), coords[:k].copy(), ann.net, solved)
