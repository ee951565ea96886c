"""Gate-application kernels with a numba fast path and a pure-numpy fallback.

The dense statevector update is the hot inner loop of every simulation in this
package.  Two interchangeable implementations are provided:

* ``numba`` -- bit-twiddling loops compiled with ``@njit(cache=True)``;
* ``numpy`` -- vectorized reshape/fancy-index updates, no compilation.

The active backend is chosen once at import time from the environment variable
``LORENTZ_ENCODE_BACKEND`` (``"numba"`` or ``"numpy"``).  When the variable is
unset, numba is used if it imports, otherwise numpy.  Requesting numba
explicitly on a machine without it is an error rather than a silent downgrade.

``LORENTZ_ENCODE_THREADS`` caps numba's thread pool; the kernels themselves are
single-threaded at the register sizes this package targets, the cap exists so
batch drivers can keep the process well-behaved on shared machines.

Both backends are importable side by side (``apply_1q_numpy`` / ``apply_1q_numba``)
so the benchmark in ``benchmarks/bench_kernels.py`` and the equivalence tests can
compare them directly.
"""

from __future__ import annotations

import os

import numpy as np

_ENV_BACKEND = "LORENTZ_ENCODE_BACKEND"
_ENV_THREADS = "LORENTZ_ENCODE_THREADS"


# ---------------------------------------------------------------------------
# numpy fallback path
# ---------------------------------------------------------------------------

def apply_1q_numpy(amps: np.ndarray, target: int, u: np.ndarray) -> np.ndarray:
    """Apply a 2x2 unitary on qubit ``target`` (little-endian bit of the index)."""
    n = amps.size
    lo = 1 << target
    a = amps.reshape(n // (2 * lo), 2, lo)
    out = np.empty_like(a)
    out[:, 0, :] = u[0, 0] * a[:, 0, :] + u[0, 1] * a[:, 1, :]
    out[:, 1, :] = u[1, 0] * a[:, 0, :] + u[1, 1] * a[:, 1, :]
    return out.reshape(n)


def apply_ctrl_numpy(
    amps: np.ndarray, target: int, ctrl_mask: int, ctrl_val: int, u: np.ndarray
) -> np.ndarray:
    """Apply ``u`` on ``target`` only where ``index & ctrl_mask == ctrl_val``."""
    n = amps.size
    tbit = 1 << target
    j = np.arange(n, dtype=np.int64)
    sel0 = ((j & ctrl_mask) == ctrl_val) & ((j & tbit) == 0)
    j0 = j[sel0]
    j1 = j0 | tbit
    out = amps.copy()
    a0 = amps[j0]
    a1 = amps[j1]
    out[j0] = u[0, 0] * a0 + u[0, 1] * a1
    out[j1] = u[1, 0] * a0 + u[1, 1] * a1
    return out


# ---------------------------------------------------------------------------
# numba path
# ---------------------------------------------------------------------------

try:  # pragma: no cover - trivially exercised by import
    import numba
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    njit = None
    HAS_NUMBA = False

if HAS_NUMBA:

    @njit(cache=True)
    def _k1q(amps, out, target, u00, u01, u10, u11):  # pragma: no cover - compiled
        n = amps.size
        tbit = 1 << target
        low = tbit - 1
        for i in range(n // 2):
            j0 = ((i >> target) << (target + 1)) | (i & low)
            j1 = j0 | tbit
            a0 = amps[j0]
            a1 = amps[j1]
            out[j0] = u00 * a0 + u01 * a1
            out[j1] = u10 * a0 + u11 * a1

    @njit(cache=True)
    def _kctrl(amps, out, target, ctrl_mask, ctrl_val, u00, u01, u10, u11):  # pragma: no cover
        n = amps.size
        tbit = 1 << target
        low = tbit - 1
        for i in range(n // 2):
            j0 = ((i >> target) << (target + 1)) | (i & low)
            if (j0 & ctrl_mask) == ctrl_val:
                j1 = j0 | tbit
                a0 = amps[j0]
                a1 = amps[j1]
                out[j0] = u00 * a0 + u01 * a1
                out[j1] = u10 * a0 + u11 * a1

    def apply_1q_numba(amps: np.ndarray, target: int, u: np.ndarray) -> np.ndarray:
        out = np.empty_like(amps)
        _k1q(amps, out, target, u[0, 0], u[0, 1], u[1, 0], u[1, 1])
        return out

    def apply_ctrl_numba(
        amps: np.ndarray, target: int, ctrl_mask: int, ctrl_val: int, u: np.ndarray
    ) -> np.ndarray:
        out = amps.copy()
        _kctrl(amps, out, target, ctrl_mask, ctrl_val, u[0, 0], u[0, 1], u[1, 0], u[1, 1])
        return out

else:
    apply_1q_numba = None
    apply_ctrl_numba = None


def _resolve_backend() -> str:
    requested = os.environ.get(_ENV_BACKEND, "").strip().lower()
    if requested == "numpy":
        return "numpy"
    if requested == "numba":
        if not HAS_NUMBA:
            raise ImportError(
                f"{_ENV_BACKEND}=numba requested but numba is not installed"
            )
        return "numba"
    if requested:
        raise ValueError(f"unknown {_ENV_BACKEND}={requested!r}; use 'numba' or 'numpy'")
    return "numba" if HAS_NUMBA else "numpy"


BACKEND = _resolve_backend()

if BACKEND == "numba":
    apply_1q = apply_1q_numba
    apply_ctrl = apply_ctrl_numba
    if _ENV_THREADS in os.environ:
        numba.set_num_threads(max(1, int(os.environ[_ENV_THREADS])))
else:
    apply_1q = apply_1q_numpy
    apply_ctrl = apply_ctrl_numpy
