import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boolnet.network import (
    ContractError,
    Network,
    StateVector,
    default_t_max,
    random_network,
    run_to_attractor,
    state_from_string,
    state_to_string,
    step,
)
from oracles import oracle_trajectory


def swap_pair():
    return Network(np.array([[0, 1], [1, 0]]), np.zeros(2))


def sv(*values, clamped=None):
    return StateVector(np.array(values, dtype=np.int8), clamped)


def test_step_swap_pair(backend):
    assert step(swap_pair(), sv(1, -1)) == sv(-1, 1)


def test_step_zero_weights_fire(backend):
    net = Network(np.zeros((4, 4), dtype=int), np.zeros(4))
    assert step(net, sv(-1, 1, -1, -1)) == sv(1, 1, 1, 1)


def test_step_clamped_neuron_holds(backend):
    net = Network(np.array([[0, 1, 1], [1, 0, 1], [1, 1, 0]]), np.zeros(3))
    mask = np.array([True, False, False])
    out = step(net, sv(-1, 1, 1, clamped=mask))
    assert out.states[0] == -1


def test_step_dimension_mismatch():
    with pytest.raises(ContractError):
        step(swap_pair(), sv(1, 1, 1))


def test_swap_pair_orbit(backend):
    res = run_to_attractor(swap_pair(), sv(1, -1), t_max=8)
    assert (res.transient, res.orbit_len, res.converged) == (0, 2, True)
    assert res.orbit_states == (sv(1, -1), sv(-1, 1))
    assert res.steps_used == 2


def test_zero_network_fixed_point(backend):
    net = Network(np.zeros((2, 2), dtype=int), np.zeros(2))
    res = run_to_attractor(net, sv(-1, -1), t_max=8)
    assert (res.transient, res.orbit_len) == (1, 1)
    assert res.orbit_states == (sv(1, 1),)


def test_t_max_too_short_is_not_converged(backend):
    res = run_to_attractor(swap_pair(), sv(1, -1), t_max=1)
    assert not res.converged
    assert res.orbit_states == ()


def test_t_max_must_be_positive():
    with pytest.raises(ContractError):
        run_to_attractor(swap_pair(), sv(1, -1), t_max=0)


def test_network_invariants_enforced():
    with pytest.raises(ContractError):
        Network(np.array([[1, 0], [0, 0]]), np.zeros(2))
    with pytest.raises(ContractError):
        Network(np.array([[0, 2], [0, 0]]), np.zeros(2))
    with pytest.raises(ContractError):
        Network(np.zeros((2, 2), dtype=int), np.array([0.5, 1.5]))
    with pytest.raises(ContractError):
        Network(np.zeros((63, 63), dtype=int), np.zeros(63))


def test_network_is_immutable():
    net = random_network(4, 0)
    with pytest.raises(ValueError):
        net.weights[0, 1] = 1


def test_connectivity_tracks_weights():
    net = random_network(6, 3)
    moved = net.with_weight(2, 3, 0).with_weight(2, 4, 1)
    assert np.array_equal(moved.connectivity, np.abs(moved.weights).sum(axis=1))


def test_random_network_contract():
    with pytest.raises(ContractError):
        random_network(1, 0)
    a, b = random_network(7, 11), random_network(7, 11)
    assert a == b
    assert np.all(np.diag(a.weights) == 0)
    assert np.all((a.thresholds >= 0) & (a.thresholds <= 1))


def test_random_network_weight_frequencies():
    n = 10
    counts = np.zeros(3)
    for seed in range(10_000 // (n * (n - 1)) + 1):
        w = random_network(n, seed).weights
        off = w[~np.eye(n, dtype=bool)]
        counts += [np.sum(off == v) for v in (-1, 0, 1)]
    assert np.all(np.abs(counts / counts.sum() - 1 / 3) < 0.02)


def test_network_text_round_trip():
    net = random_network(9, 5)
    assert Network.from_text(net.to_text()) == net
    with pytest.raises(ContractError):
        Network.from_text("n_neurons 2\nweights\n0 1\n")


def test_state_string_round_trip():
    s = state_from_string("+--+-")
    assert state_to_string(s) == "+--+-"
    assert str(StateVector(s)) == "+--+-"


def test_default_t_max():
    assert default_t_max(10, 2) == 256
    assert default_t_max(20, 2) == 4096


def test_backends_agree_on_trajectories():
    from boolnet import kernels
    rng = np.random.default_rng(7)
    for seed in range(50):
        net = random_network(int(rng.integers(2, 14)), seed)
        s0 = np.where(rng.random(net.n_neurons) < 0.5, -1, 1).astype(np.int8)
        mask = rng.random(net.n_neurons) < 0.2
        results = []
        for name in kernels.available_backends():
            prev = kernels.use_backend(name)
            try:
                res = run_to_attractor(net, StateVector(s0, mask))
            finally:
                kernels.use_backend(prev)
            results.append((res.transient, res.orbit_len, res.trajectory.tobytes()))
        assert all(r == results[0] for r in results)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(2, 9), seed=st.integers(0, 2**32 - 1), n_clamped=st.integers(0, 3))
def test_attractor_properties(n, seed, n_clamped):
    net = random_network(n, seed)
    rng = np.random.default_rng(seed)
    mask = np.zeros(n, dtype=bool)
    mask[: min(n_clamped, n - 1)] = True
    s0 = StateVector(np.where(rng.random(n) < 0.5, -1, 1).astype(np.int8), mask)
    res = run_to_attractor(net, s0)
    # the default bound always suffices
    assert res.converged
    traj = res.trajectory
    assert set(np.unique(traj)) <= {-1, 1}
    assert np.all(traj[:, mask] == s0.states[mask])
    for k, state in enumerate(res.orbit_states):
        assert step(net, state) == res.orbit_states[(k + 1) % res.orbit_len]
    tau, length, _ = oracle_trajectory(net.weights, net.thresholds, s0.states, mask,
                                       2 ** (n - int(mask.sum())))
    assert (res.transient, res.orbit_len) == (tau, length)
    assert run_to_attractor(net, s0) == res
