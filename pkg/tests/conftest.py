"""Shared independent oracles for the test suite.

These helpers deliberately avoid the package's kernel/simulation code paths
where they serve as cross-checks: the DFT matrix is built element by element,
and dense controlled gates are assembled by direct index bookkeeping.
"""

import numpy as np
import pytest

from lorentz_encode import circuits as cc
from lorentz_encode import statevector as sv


def dft_matrix(n: int) -> np.ndarray:
    """Dense DFT with the +i kernel and 1/sqrt(N) normalization."""
    j = np.arange(n)
    return np.exp(2j * np.pi * np.outer(j, j) / n) / np.sqrt(n)


def controlled_dense(n_qubits: int, controls, target: int, u) -> np.ndarray:
    """Dense matrix of a (multi-)controlled single-qubit gate, built by index logic."""
    u = np.asarray(u, dtype=complex)
    dim = 1 << n_qubits
    mat = np.zeros((dim, dim), dtype=complex)
    tbit = 1 << target
    for col in range(dim):
        match = all(((col >> q) & 1) == pol for q, pol in controls)
        if not match:
            mat[col, col] = 1.0
            continue
        b = (col >> target) & 1
        mat[col & ~tbit, col] += u[0, b]
        mat[col | tbit, col] += u[1, b]
    return mat


def circuit_unitary(circ: cc.Circuit) -> np.ndarray:
    """Unitary of a circuit, column by column through the simulator."""
    dim = 1 << circ.n_qubits
    cols = []
    for j in range(dim):
        e = np.zeros(dim, dtype=complex)
        e[j] = 1.0
        cols.append(cc.simulate(circ, sv.from_amplitudes(e)).amplitudes)
    return np.array(cols).T


def phase_aligned_dev(a: np.ndarray, b: np.ndarray) -> float:
    """Max elementwise deviation after removing one global phase."""
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(a[idx]) < 1e-14:
        return float(np.max(np.abs(a - b)))
    return float(np.max(np.abs(a * (b[idx] / a[idx]) - b)))


def random_state(rng: np.random.Generator, n_qubits: int) -> sv.QuantumState:
    amps = rng.normal(size=1 << n_qubits) + 1j * rng.normal(size=1 << n_qubits)
    return sv.QuantumState(n_qubits, amps / np.linalg.norm(amps))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
