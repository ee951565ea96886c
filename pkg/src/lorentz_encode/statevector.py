"""Minimal dense statevector simulator.

Basis convention is little-endian throughout the package: qubit 0 is the least
significant bit of the basis-state index, so ``|j>`` on ``n`` qubits has
``j = sum_m 2**m * j_m`` with ``j_m`` the bit carried by qubit ``m``.

States are immutable from the caller's point of view: every operation returns
a fresh :class:`QuantumState` and the amplitude buffers are marked read-only,
which also makes it safe to run independent simulations on separate threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels

MAX_QUBITS = 24  # dense 2^24 complex vector is the desk-scale cap

_NORM_TOL = 1e-12
_UNITARY_TOL = 1e-10
_IMPOSSIBLE_TOL = 1e-14


class ImpossibleOutcomeError(ValueError):
    """Raised when a projective outcome has (numerically) zero probability."""


@dataclass(frozen=True)
class QuantumState:
    """Normalized amplitude vector over ``2**n_qubits`` little-endian basis states."""

    n_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {self.n_qubits}")
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (1 << self.n_qubits,):
            raise ValueError(
                f"amplitude vector has length {amps.size}, expected {1 << self.n_qubits}"
            )
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > _NORM_TOL:
            raise ValueError(f"state is not normalized: |psi|^2 = {norm2!r}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class MeasurementOutcome:
    """Probability of an ancilla pattern and the renormalized conditional state."""

    probability: float
    post_state: QuantumState


def zero_state(n_qubits: int) -> QuantumState:
    """|0...0> on ``n_qubits`` qubits."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return QuantumState(n_qubits, amps)


def from_amplitudes(amps: Sequence[complex]) -> QuantumState:
    """Wrap an already-normalized amplitude vector (length must be a power of two)."""
    amps = np.asarray(amps, dtype=np.complex128)
    n = int(amps.size).bit_length() - 1
    if 1 << n != amps.size:
        raise ValueError(f"length {amps.size} is not a power of two")
    return QuantumState(n, amps.copy())


def _check_unitary_2x2(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (2, 2):
        raise ValueError(f"gate matrix must be 2x2, got shape {u.shape}")
    dev = np.max(np.abs(u.conj().T @ u - np.eye(2)))
    if dev > _UNITARY_TOL:
        raise ValueError(f"gate matrix is not unitary (max deviation {dev:.3e})")
    return u


def apply_1q(state: QuantumState, target: int, u: np.ndarray) -> QuantumState:
    """Apply a single-qubit unitary to the target wire."""
    if not 0 <= target < state.n_qubits:
        raise ValueError(f"target {target} out of range for {state.n_qubits} qubits")
    u = _check_unitary_2x2(u)
    out = _kernels.apply_1q(state.amplitudes, target, u)
    return QuantumState(state.n_qubits, out)


def apply_controlled(
    state: QuantumState,
    controls: Sequence[tuple[int, int]],
    target: int,
    u: np.ndarray,
) -> QuantumState:
    """Apply ``u`` on ``target`` where every control bit matches its polarity.

    ``controls`` is a sequence of ``(qubit, polarity)`` with polarity 0 meaning
    anti-control (acts when the qubit is |0>).
    """
    if not 0 <= target < state.n_qubits:
        raise ValueError(f"target {target} out of range for {state.n_qubits} qubits")
    seen = {target}
    ctrl_mask = 0
    ctrl_val = 0
    for q, pol in controls:
        if not 0 <= q < state.n_qubits:
            raise ValueError(f"control {q} out of range for {state.n_qubits} qubits")
        if q in seen:
            raise ValueError(f"overlapping control/target index {q}")
        if pol not in (0, 1):
            raise ValueError(f"polarity must be 0 or 1, got {pol!r}")
        seen.add(q)
        ctrl_mask |= 1 << q
        ctrl_val |= pol << q
    u = _check_unitary_2x2(u)
    if ctrl_mask == 0:
        out = _kernels.apply_1q(state.amplitudes, target, u)
    else:
        out = _kernels.apply_ctrl(state.amplitudes, target, ctrl_mask, ctrl_val, u)
    return QuantumState(state.n_qubits, out)


def apply_qft(state: QuantumState, qubits: range, inverse: bool = False) -> QuantumState:
    """Fourier transform on a contiguous sub-register.

    Forward convention is ``F|j> = N^{-1/2} sum_k exp(+i 2 pi j k / N) |k>`` on
    the sub-register value (the sign is fixed package-wide); ``inverse`` applies
    the adjoint.  With the little-endian layout the sub-register value of a
    basis index is ``(index >> qubits.start) & (2**len(qubits) - 1)``.
    """
    lo, hi = qubits.start, qubits.stop
    if qubits.step != 1:
        raise ValueError("qubit range must be contiguous (step 1)")
    if not (0 <= lo < hi <= state.n_qubits):
        raise ValueError(f"qubit range {qubits} outside register of {state.n_qubits}")
    m = hi - lo
    shaped = state.amplitudes.reshape(1 << (state.n_qubits - hi), 1 << m, 1 << lo)
    if inverse:
        out = np.fft.fft(shaped, axis=1, norm="ortho")
    else:
        out = np.fft.ifft(shaped, axis=1, norm="ortho")
    return QuantumState(state.n_qubits, np.ascontiguousarray(out.reshape(state.dim)))


def project_ancilla(
    state: QuantumState, ancilla_qubits: Sequence[int], pattern: Sequence[int]
) -> MeasurementOutcome:
    """Project the listed qubits onto a bit pattern.

    Returns the outcome probability and the renormalized conditional state on
    the full register (the projected qubits collapsed to the pattern).  An
    outcome with probability below 1e-14 raises :class:`ImpossibleOutcomeError`.
    """
    if len(pattern) != len(ancilla_qubits):
        raise ValueError("pattern length must equal the number of projected qubits")
    mask = 0
    val = 0
    for q, b in zip(ancilla_qubits, pattern):
        if not 0 <= q < state.n_qubits:
            raise ValueError(f"qubit {q} out of range")
        if b not in (0, 1):
            raise ValueError(f"pattern bits must be 0 or 1, got {b!r}")
        mask |= 1 << q
        val |= b << q
    j = np.arange(state.dim, dtype=np.int64)
    sel = (j & mask) == val
    prob = float(np.sum(np.abs(state.amplitudes[sel]) ** 2))
    if prob < _IMPOSSIBLE_TOL:
        raise ImpossibleOutcomeError(
            f"impossible outcome: pattern {list(pattern)} on qubits "
            f"{list(ancilla_qubits)} has probability {prob:.3e}"
        )
    post = np.where(sel, state.amplitudes, 0.0) / np.sqrt(prob)
    return MeasurementOutcome(prob, QuantumState(state.n_qubits, post))


def fidelity(a: QuantumState, b: QuantumState) -> float:
    """Squared overlap ``|<a|b>|^2`` (invariant under global phases)."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"size mismatch: {a.n_qubits} vs {b.n_qubits} qubits")
    f = abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2
    return float(min(1.0, f))
