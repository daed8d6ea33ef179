"""Pure-numpy dynamics kernels; same signatures and results as ``_loops``."""

import numpy as np


def step_into(weights, thresholds, conn, state, clamped, out):
    h = weights.astype(np.int64) @ state.astype(np.int64)
    field = np.where(conn > 0, h / np.maximum(conn, 1), 0.0) - thresholds
    new = np.where(field >= 0.0, 1, -1).astype(np.int8)
    out[:] = np.where(clamped, state, new)


def trajectory(weights, thresholds, conn, s0, clamped, t_max):
    states = [np.asarray(s0, dtype=np.int8).copy()]
    seen = {states[0].tobytes(): 0}
    for t in range(1, t_max + 1):
        nxt = np.empty_like(states[-1])
        step_into(weights, thresholds, conn, states[-1], clamped, nxt)
        states.append(nxt)
        first = seen.setdefault(nxt.tobytes(), t)
        if first != t:
            return np.array(states), first, t - first, True
    return np.array(states), -1, -1, False


def evaluate_patterns(weights, thresholds, conn, init, clamped, out_idx,
                      wanted, t_max, stop_on_failure):
    n_pat = init.shape[0]
    tau = np.full(n_pat, -1, dtype=np.int64)
    length = np.full(n_pat, -1, dtype=np.int64)
    status = np.full(n_pat, -1, dtype=np.int8)
    mismatch = np.zeros(n_pat, dtype=np.float64)
    for p in range(n_pat):
        states, t0, ln, ok = trajectory(weights, thresholds, conn, init[p], clamped, t_max)
        status[p] = 1 if ok else 0
        if not ok:
            if stop_on_failure:
                break
            continue
        tau[p], length[p] = t0, ln
        orbit_out = states[t0:t0 + ln, out_idx[p]].astype(np.float64)
        mismatch[p] = np.mean((orbit_out - wanted[p]) ** 2)
    return tau, length, status, mismatch
