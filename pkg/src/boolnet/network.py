"""Boolean threshold networks and their synchronous dynamics.

A network of ``N`` bipolar neurons carries a weight matrix with entries in
{-1, 0, +1} (zero diagonal) and a threshold per neuron in [0, 1].  Neuron
``i`` fires ``+1`` when its normalized afferent field
``sum_j w_ij s_j / c_i - b_i`` is nonnegative and ``-1`` otherwise, where
``c_i = sum_j |w_ij|``.  A neuron with no afferents (``c_i = 0``) sees a zero
field and fires ``sgn(-b_i)``.
"""

from dataclasses import dataclass, field

import numpy as np

from boolnet import kernels

MAX_NEURONS = 62
T_MAX_CAP = 4096


class ContractError(ValueError):
    """Raised when arguments violate an operation's preconditions."""


@dataclass(frozen=True, eq=False)
class Network:
    """Weights in {-1, 0, +1} with zero diagonal, thresholds in [0, 1]."""

    weights: np.ndarray
    thresholds: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.int8)
        b = np.array(self.thresholds, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ContractError(f"weights must be square, got shape {w.shape}")
        n = w.shape[0]
        if not 1 <= n <= MAX_NEURONS:
            raise ContractError(f"network size must be in [1, {MAX_NEURONS}], got {n}")
        if b.shape != (n,):
            raise ContractError(f"thresholds must have shape ({n},), got {b.shape}")
        if not np.isin(w, (-1, 0, 1)).all():
            raise ContractError("weights must lie in {-1, 0, +1}")
        if np.any(np.diag(w) != 0):
            raise ContractError("self-connections are not allowed")
        if not np.all((b >= 0.0) & (b <= 1.0)):
            raise ContractError("thresholds must lie in [0, 1]")
        w.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "thresholds", b)

    @property
    def n_neurons(self):
        return self.weights.shape[0]

    @property
    def connectivity(self):
        return np.abs(self.weights).sum(axis=1, dtype=np.int64)

    @classmethod
    def _trusted(cls, w, b):
        # skips validation; callers guarantee the invariants
        w.setflags(write=False)
        b.setflags(write=False)
        net = object.__new__(cls)
        object.__setattr__(net, "weights", w)
        object.__setattr__(net, "thresholds", b)
        return net

    def with_weight(self, i, j, value):
        """Copy with one off-diagonal weight replaced."""
        if i == j or value not in (-1, 0, 1):
            raise ContractError(f"invalid weight move ({i}, {j}) -> {value}")
        w = self.weights.copy()
        w[i, j] = value
        return Network._trusted(w, self.thresholds)

    def with_threshold(self, i, value):
        """Copy with one threshold replaced."""
        if not 0.0 <= value <= 1.0:
            raise ContractError(f"threshold {value} outside [0, 1]")
        b = self.thresholds.copy()
        b[i] = value
        return Network._trusted(self.weights, b)

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return (np.array_equal(self.weights, other.weights)
                and np.array_equal(self.thresholds, other.thresholds))

    def __hash__(self):
        return hash((self.weights.tobytes(), self.thresholds.tobytes()))

    def to_text(self):
        """Serialize to the plain-text network format (see ``from_text``)."""
        lines = [f"n_neurons {self.n_neurons}", "weights"]
        lines += [" ".join(str(int(v)) for v in row) for row in self.weights]
        lines.append("thresholds")
        lines += [repr(float(v)) for v in self.thresholds]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        """Parse the plain-text network format.

        The format is line oriented::

            n_neurons N
            weights
            <N lines of N integers in {-1,0,1}, row i = afferents of neuron i>
            thresholds
            <N lines, one float each, shortest round-trip repr>

        Blank lines and lines starting with ``#`` are ignored.
        """
        lines = [ln.strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln and not ln.startswith("#")]
        try:
            key, value = lines[0].split()
            if key != "n_neurons":
                raise ValueError
            n = int(value)
            if lines[1] != "weights" or lines[2 + n] != "thresholds":
                raise ValueError
            w = [[int(tok) for tok in ln.split()] for ln in lines[2:2 + n]]
            b = [float(ln) for ln in lines[3 + n:3 + 2 * n]]
            if len(lines) != 3 + 2 * n or any(len(row) != n for row in w):
                raise ValueError
        except (ValueError, IndexError) as exc:
            raise ContractError("malformed network text") from exc
        return cls(np.array(w), np.array(b))


@dataclass(frozen=True, eq=False)
class StateVector:
    """Bipolar activations plus the mask of clamped (input) neurons."""

    states: np.ndarray
    clamped_mask: np.ndarray = None

    def __post_init__(self):
        s = np.array(self.states, dtype=np.int8)
        if s.ndim != 1 or not np.isin(s, (-1, 1)).all():
            raise ContractError("states must be a 1-D vector of -1/+1")
        if self.clamped_mask is None:
            m = np.zeros(s.shape, dtype=bool)
        else:
            m = np.array(self.clamped_mask, dtype=bool)
        if m.shape != s.shape:
            raise ContractError("clamped_mask must match the state length")
        s.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "states", s)
        object.__setattr__(self, "clamped_mask", m)

    def __len__(self):
        return self.states.shape[0]

    def __eq__(self, other):
        if not isinstance(other, StateVector):
            return NotImplemented
        return (np.array_equal(self.states, other.states)
                and np.array_equal(self.clamped_mask, other.clamped_mask))

    def __hash__(self):
        return hash((self.states.tobytes(), self.clamped_mask.tobytes()))

    def __str__(self):
        return state_to_string(self.states)

    @classmethod
    def from_string(cls, text, clamped_mask=None):
        return cls(state_from_string(text), clamped_mask)


def state_to_string(states):
    """'+'/'-' per neuron, neuron 0 leftmost."""
    return "".join("+" if v > 0 else "-" for v in states)


def state_from_string(text):
    if not text or set(text) - {"+", "-"}:
        raise ContractError(f"state string must contain only '+' and '-': {text!r}")
    return np.array([1 if ch == "+" else -1 for ch in text], dtype=np.int8)


@dataclass(frozen=True)
class AttractorResult:
    """Outcome of iterating the dynamics to a periodic orbit.

    ``transient`` is 0-based: 0 means the initial state is on the orbit.
    When ``converged`` is False the orbit fields are empty and ``transient``
    and ``orbit_len`` are -1.
    """

    transient: int
    orbit_len: int
    orbit_states: tuple
    converged: bool
    steps_used: int
    trajectory: np.ndarray = field(repr=False, compare=False, default=None)


def _check_pair(net, s):
    if len(s) != net.n_neurons:
        raise ContractError(
            f"state has {len(s)} entries but the network has {net.n_neurons} neurons")


def step(net, s):
    """Apply one synchronous update; clamped entries are copied unchanged."""
    _check_pair(net, s)
    out = np.empty(len(s), dtype=np.int8)
    kernels.step_into(net.weights, net.thresholds, net.connectivity,
                      s.states, s.clamped_mask, out)
    return StateVector(out, s.clamped_mask)


def default_t_max(n_neurons, n_clamped):
    """``min(2**(N - N_I), 4096)``: enough to guarantee a recurrence up to the cap."""
    free = n_neurons - n_clamped
    return min(2 ** free, T_MAX_CAP)


def run_to_attractor(net, s0, t_max=None):
    """Iterate from ``s0`` until the first state recurrence.

    The detector maps every visited (bit-packed) state to its time index, so
    ``transient`` and ``orbit_len`` are exact and minimal.  Failing to recur
    within ``t_max`` steps is a normal outcome (``converged=False``).
    """
    _check_pair(net, s0)
    if t_max is None:
        t_max = default_t_max(net.n_neurons, int(s0.clamped_mask.sum()))
    if int(t_max) < 1:
        raise ContractError(f"t_max must be >= 1, got {t_max}")
    states, tau, length, ok = kernels.trajectory(
        net.weights, net.thresholds, net.connectivity, s0.states,
        s0.clamped_mask, int(t_max))
    states.setflags(write=False)
    if not ok:
        return AttractorResult(-1, -1, (), False, int(t_max), states)
    orbit = tuple(StateVector(states[k], s0.clamped_mask) for k in range(tau, tau + length))
    return AttractorResult(int(tau), int(length), orbit, True, int(tau + length), states)


def random_network(n, rng_seed=None):
    """Off-diagonal weights uniform on {-1, 0, +1}, thresholds uniform on [0, 1]."""
    if n < 2:
        raise ContractError(f"a network needs at least 2 neurons, got {n}")
    if n > MAX_NEURONS:
        raise ContractError(f"at most {MAX_NEURONS} neurons are supported, got {n}")
    rng = np.random.default_rng(rng_seed)
    w = rng.integers(-1, 2, size=(n, n), dtype=np.int8)
    np.fill_diagonal(w, 0)
    b = rng.random(n)
    return Network(w, b)
