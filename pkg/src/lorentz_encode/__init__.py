"""Qubit encoding for mixtures of discrete Lorentzian functions.

Subpackages:

* :mod:`lorentz_encode.statevector` -- dense little-endian simulator.
* :mod:`lorentz_encode.locfuncs` -- closed-form Slater/Lorentzian tables, overlaps, normalization.
* :mod:`lorentz_encode.circuits` -- encoder circuits, compiled multi-controlled blocks, metrics.
* :mod:`lorentz_encode.qara` -- amplitude reduction + amplification planning and error model.
* :mod:`lorentz_encode.fitter` -- classical mixture fit for a sampled target.
* :mod:`lorentz_encode.cli` -- file-based command-line pipelines.
"""

from ._kernels import BACKEND
from .locfuncs import LCSpec, LorentzianSpec, lc_target_state, lf_state, normalize_lc, sf_state
from .qara import QaraPlan, plan_exact, plan_for_lc
from .statevector import QuantumState, fidelity, zero_state

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "LCSpec",
    "LorentzianSpec",
    "QaraPlan",
    "QuantumState",
    "__version__",
    "fidelity",
    "lc_target_state",
    "lf_state",
    "normalize_lc",
    "plan_exact",
    "plan_for_lc",
    "sf_state",
    "zero_state",
]
