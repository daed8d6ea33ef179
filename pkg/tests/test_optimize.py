import math
import sys
from types import SimpleNamespace

import numpy as np
import pytest

from boolnet.network import ContractError, random_network
from boolnet.optimize import (
    Annealer,
    AnnealerConfig,
    PerturbationKernel,
    anneal,
    coordinate_label,
    metropolis_accept,
    propose,
    random_walk,
)
from boolnet.training import Evaluator, evaluate, make_task_set


class ScriptedEvaluator:
    """Stands in for ``Evaluator``: each call returns the next scripted energy."""

    def __init__(self, n_neurons, accept_flags, start=1000.0):
        self.training_set = SimpleNamespace(clamped=np.zeros(n_neurons, dtype=bool))
        values, cur = [start], start
        for flag in accept_flags:
            if flag:
                cur -= 1.0
                values.append(cur)
            else:
                values.append(cur + 1e9)
        self.values = iter(values)

    def energy(self, net):
        return next(self.values)

    def score(self, net):
        return next(self.values), True


def window(n_accept, size=10):
    return [True] * n_accept + [False] * (size - n_accept)


def test_cooling_follows_scripted_acceptance():
    rates = [9, 5, 3, 7, 2, 8, 10, 0, 4]
    flags = [f for r in rates for f in window(r)]
    ann = Annealer(random_network(4, 0), ScriptedEvaluator(4, flags), AnnealerConfig(), 1)
    temps, accepted = [], []
    for _ in flags:
        _, t, acc, _ = ann.epoch()
        temps.append(t)
        accepted.append(acc)
    assert accepted == flags
    expected, t = [], 5.0
    for r in rates:
        expected += [t] * 10
        if 3 <= r <= 7:
            t *= 0.6
    assert temps == expected
    assert ann.temperature == t
    ratios = [b / a for a, b in zip(temps, temps[1:]) if b != a]
    # the last in-band window closes on the final epoch, so only three drops show
    assert ratios == [0.6] * 3


def test_metropolis_examples():
    rng = np.random.default_rng(0)
    assert metropolis_accept(-0.2, 1e-6, rng)
    assert metropolis_accept(-0.2, 100.0, rng)
    assert all(metropolis_accept(0.0, 0.01, rng) for _ in range(1000))
    with pytest.raises(ContractError):
        metropolis_accept(1.0, 0.0, rng)


def test_metropolis_rate_matches_boltzmann_factor():
    rng = np.random.default_rng(1)
    rate = np.mean([metropolis_accept(1.0, 5.0, rng) for _ in range(10_000)])
    assert abs(rate - math.exp(-0.2)) <= 0.02


def test_metropolis_rate_decreases_with_delta():
    rng = np.random.default_rng(2)
    n = 10_000
    a = np.mean([metropolis_accept(0.5, 5.0, rng) for _ in range(n)])
    b = np.mean([metropolis_accept(2.0, 5.0, rng) for _ in range(n)])
    sigma = math.sqrt(a * (1 - a) / n + b * (1 - b) / n)
    assert a - b > 5 * sigma


def test_metropolis_cold_limit():
    rng = np.random.default_rng(3)
    assert not any(metropolis_accept(0.1, 1e-9, rng) for _ in range(10_000))


def test_annealer_config_validation():
    for bad in (dict(t0=0), dict(cooling_ratio=1.0), dict(ap_window=0),
                dict(ap_band=(0.8, 0.2)), dict(max_epochs=0)):
        with pytest.raises(ContractError):
            AnnealerConfig(**bad)


def test_proposals_touch_one_free_coordinate():
    n = 6
    kernel = PerturbationKernel(n, frozen_neurons=(0, 1), rng=4)
    net = random_network(n, 4)
    before = (net.weights.copy(), net.thresholds.copy())
    for _ in range(10_000):
        new, coord = propose(kernel, net)
        dw = np.argwhere(new.weights != net.weights)
        db = np.flatnonzero(new.thresholds != net.thresholds)
        assert len(dw) + len(db) <= 1
        if coord < n * n:
            i, j = divmod(coord, n)
            assert i != j and i >= 2
            assert len(dw) == 1 and tuple(dw[0]) == (i, j)
        else:
            assert coord - n * n >= 2
            assert 0.0 <= new.thresholds[coord - n * n] <= 1.0
    assert np.array_equal(net.weights, before[0]) and np.array_equal(net.thresholds, before[1])


def test_weight_move_resamples_other_values():
    net = random_network(3, 0).with_weight(2, 0, 1)
    kernel = PerturbationKernel(3, frozen_neurons=(0, 1), rng=5)
    counts = {-1: 0, 0: 0, 1: 0}
    for _ in range(4000):
        new, coord = kernel.propose(net)
        if coord == 2 * 3 + 0:
            counts[int(new.weights[2, 0])] += 1
    total = counts[-1] + counts[0]
    assert counts[1] == 0 and total > 0
    assert abs(counts[-1] / total - 0.5) < 0.05


def test_all_clamped_has_no_moves():
    kernel = PerturbationKernel(3, frozen_neurons=(0, 1, 2), rng=0)
    with pytest.raises(ContractError):
        kernel.propose(random_network(3, 0))


def test_coordinate_labels():
    assert coordinate_label(7, 3) == "w[2,1]"
    assert coordinate_label(10, 3) == "b[1]"
    assert coordinate_label(-1, 3) == ""


def test_random_walk_contract():
    ts = make_task_set([("AND", 2)], 5)
    tr = random_walk(random_network(5, 0), ts, 500, seed=1)
    assert len(tr) == 500
    assert tr.accepted.all()
    assert np.isnan(tr.temperature).all()
    lines = tr.to_csv().splitlines()
    assert lines[0] == "epoch,E,T,accepted,coordinate"
    assert len(lines) == 501
    assert lines[1].split(",")[2] == ""
    with pytest.raises(ContractError):
        random_walk(random_network(5, 0), ts, 0)


def test_random_walk_continues_past_zero():
    ts = make_task_set([("AND", 2)], 5)
    tr = random_walk(random_network(5, 2), ts, 2000, seed=2)
    hits = np.flatnonzero(tr.energy == 0.0)
    assert len(tr) == 2000
    assert hits.size > 0 and hits[0] < len(tr) - 1


def test_annealer_energy_tracks_current_network():
    ts = make_task_set([("OR", 2)], 6)
    ev = Evaluator(ts)
    ann = Annealer(random_network(6, 3), ev, AnnealerConfig(), 3)
    for _ in range(300):
        before = ann.net
        _, _, accepted, _ = ann.epoch()
        if not accepted:
            assert ann.net is before
        assert ann.E == evaluate(ann.net, ts).E


def test_anneal_is_deterministic_and_solved_traces_end_at_zero():
    ts = make_task_set([("AND", 2)], 5)
    cfg = AnnealerConfig(max_epochs=5000)
    a = anneal(random_network(5, 8), ts, cfg, seed=9)
    b = anneal(random_network(5, 8), ts, cfg, seed=9)
    assert a.to_csv() == b.to_csv()
    assert a.solved
    assert np.all(a.energy[-cfg.stop_stable_epochs:] == 0.0)
    rep = evaluate(a.final_network, ts)
    assert rep.E == 0.0 and rep.l_worst == 1


def test_temperature_trace_is_geometric():
    ts = make_task_set([("XOR", 2)], 5)
    cfg = AnnealerConfig(max_epochs=3000, t0=1.0)
    tr = anneal(random_network(5, 0), ts, cfg, seed=0)
    t = tr.temperature
    assert np.all(np.diff(t) <= 0)
    drops = np.flatnonzero(np.diff(t) < 0)
    assert drops.size > 0
    assert np.array_equal(t[drops + 1], t[drops] * 0.6)


def test_temperature_never_reaches_zero():
    flags = window(5) * 2000
    ann = Annealer(random_network(3, 0), ScriptedEvaluator(3, flags), AnnealerConfig(), 0)
    for _ in flags:
        ann.epoch()
    assert ann.temperature >= sys.float_info.min


@pytest.mark.slow
def test_small_walks_usually_find_zero():
    ts = make_task_set([("AND", 2)], 5)
    ev = Evaluator(ts)
    found = sum(random_walk(random_network(5, 100 + s), ev, 2000, seed=s).zero_hits > 0
                for s in range(30))
    assert found > 15
