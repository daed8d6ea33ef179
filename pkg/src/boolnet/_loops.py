"""Explicit-loop dynamics kernels.

Written in the subset of Python that numba compiles in nopython mode.  Compilation is
lazy, so importing this module costs nothing until a kernel is first called.

States are int8 arrays of +1/-1.  A state is bit-packed into an int64 with
bit ``i`` set when neuron ``i`` is +1, which limits networks to 62 neurons.
"""

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover
    def njit(*args, **kwargs):
        return lambda f: f

_GOLDEN = np.uint64(11400714819323198485)
_EMPTY = np.int64(-1)


@njit(cache=True)
def step_into(weights, thresholds, conn, state, clamped, out):
    n = state.shape[0]
    for i in range(n):
        if clamped[i]:
            out[i] = state[i]
            continue
        if conn[i] == 0:
            field = -thresholds[i]
        else:
            h = 0
            for j in range(n):
                h += weights[i, j] * state[j]
            field = h / conn[i] - thresholds[i]
        out[i] = 1 if field >= 0.0 else -1


@njit(cache=True)
def pack(state):
    code = np.int64(0)
    for i in range(state.shape[0]):
        if state[i] > 0:
            code |= np.int64(1) << np.int64(i)
    return code


@njit(cache=True)
def table_bits(t_max):
    # open-addressing table at most half full
    bits = 1
    while (1 << bits) < 2 * (t_max + 1):
        bits += 1
    return bits


@njit(cache=True)
def lookup_or_insert(keys, vals, stamps, gen, bits, code, t):
    """Return the time index stored for ``code``, inserting ``t`` if absent (-1)."""
    mask = (1 << bits) - 1
    slot = np.int64((np.uint64(code) * _GOLDEN) >> np.uint64(64 - bits))
    while True:
        if stamps[slot] != gen:
            stamps[slot] = gen
            keys[slot] = code
            vals[slot] = t
            return _EMPTY
        if keys[slot] == code:
            return vals[slot]
        slot = (slot + 1) & mask


@njit(cache=True)
def trajectory(weights, thresholds, conn, s0, clamped, t_max):
    """Iterate from ``s0`` until the first recurrence or ``t_max`` steps.

    Returns ``(states, tau, length, converged)`` where ``states`` holds
    s_0 .. s_t for the last computed step ``t``.
    """
    n = s0.shape[0]
    bits = table_bits(t_max)
    size = 1 << bits
    keys = np.empty(size, dtype=np.int64)
    vals = np.empty(size, dtype=np.int64)
    stamps = np.zeros(size, dtype=np.int64)
    states = np.empty((t_max + 1, n), dtype=np.int8)
    states[0, :] = s0
    lookup_or_insert(keys, vals, stamps, 1, bits, pack(s0), 0)
    for t in range(1, t_max + 1):
        step_into(weights, thresholds, conn, states[t - 1], clamped, states[t])
        first = lookup_or_insert(keys, vals, stamps, 1, bits, pack(states[t]), t)
        if first >= 0:
            return states[: t + 1].copy(), first, t - first, True
    return states, -1, -1, False


@njit(cache=True)
def evaluate_patterns(weights, thresholds, conn, init, clamped, out_idx,
                      wanted, t_max, stop_on_failure):
    """Run every pattern to its attractor and score its output neuron.

    ``status`` is 1 (converged), 0 (no recurrence within ``t_max``) or -1
    (skipped after an earlier failure).  ``mismatch`` is the squared output
    error averaged over the orbit, in [0, 4].
    """
    n_pat, n = init.shape
    tau = np.full(n_pat, -1, dtype=np.int64)
    length = np.full(n_pat, -1, dtype=np.int64)
    status = np.full(n_pat, -1, dtype=np.int8)
    mismatch = np.zeros(n_pat, dtype=np.float64)

    bits = table_bits(t_max)
    size = 1 << bits
    keys = np.empty(size, dtype=np.int64)
    vals = np.empty(size, dtype=np.int64)
    stamps = np.zeros(size, dtype=np.int64)
    codes = np.empty(t_max + 1, dtype=np.int64)
    cur = np.empty(n, dtype=np.int8)
    nxt = np.empty(n, dtype=np.int8)

    for p in range(n_pat):
        gen = p + 1
        cur[:] = init[p]
        codes[0] = pack(cur)
        lookup_or_insert(keys, vals, stamps, gen, bits, codes[0], 0)
        status[p] = 0
        for t in range(1, t_max + 1):
            step_into(weights, thresholds, conn, cur, clamped, nxt)
            code = pack(nxt)
            codes[t] = code
            first = lookup_or_insert(keys, vals, stamps, gen, bits, code, t)
            if first >= 0:
                tau[p] = first
                length[p] = t - first
                status[p] = 1
                break
            tmp = cur
            cur = nxt
            nxt = tmp
        if status[p] == 0:
            if stop_on_failure:
                break
            continue
        o = out_idx[p]
        acc = 0.0
        for k in range(tau[p], tau[p] + length[p]):
            bit = (codes[k] >> np.int64(o)) & np.int64(1)
            s_out = 1 if bit == 1 else -1
            d = s_out - wanted[p]
            acc += d * d
        mismatch[p] = acc / length[p]
    return tau, length, status, mismatch
