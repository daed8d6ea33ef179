"""Backend selection for the dynamics kernels.

Two interchangeable backends exist:

``numba``
    the explicit loops of ``boolnet._loops``, compiled with ``numba.njit``;
``numpy``
    the vectorized implementations in ``boolnet._vectorized``.

The backend is chosen at import time from the ``BOOLNET_BACKEND`` environment
variable (``numba`` or ``numpy``).  When unset, numba is used if it imports,
otherwise numpy.  ``use_backend`` switches at runtime; the test suite uses it
to check that both backends agree bit for bit.
"""

import os

from boolnet import _loops, _vectorized

try:
    import numba  # noqa: F401
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

_BACKENDS = {"numba": _loops, "numpy": _vectorized}
_active = _vectorized
_active_name = "numpy"


def available_backends():
    return ("numba", "numpy") if HAVE_NUMBA else ("numpy",)


def use_backend(name):
    """Select the active backend and return the name of the previous one."""
    global _active, _active_name
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; expected 'numba' or 'numpy'")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    previous = _active_name
    _active, _active_name = _BACKENDS[name], name
    return previous


def backend_name():
    return _active_name


def step_into(weights, thresholds, conn, state, clamped, out):
    _active.step_into(weights, thresholds, conn, state, clamped, out)


def trajectory(weights, thresholds, conn, s0, clamped, t_max):
    return _active.trajectory(weights, thresholds, conn, s0, clamped, t_max)


def evaluate_patterns(weights, thresholds, conn, init, clamped, out_idx,
                      wanted, t_max, stop_on_failure):
    return _active.evaluate_patterns(weights, thresholds, conn, init, clamped,
                                     out_idx, wanted, t_max, stop_on_failure)


use_backend(os.environ.get("BOOLNET_BACKEND", "").strip().lower()
            or ("numba" if HAVE_NUMBA else "numpy"))
