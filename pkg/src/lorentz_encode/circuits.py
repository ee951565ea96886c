"""Circuit builders for Lorentzian-mixture encoding.

This module owns every gate-level construction in the package: single-layer
phase shifts, Fourier-conjugated translations, the Slater/Lorentzian state
generators, the fan-out and phase-gradient compilations of multiply-controlled
operations, the ancilla-selected mixture encoder and its amplitude-reduction /
amplification / deterministic variants, the complex-coefficient and product
(multi-axis) extensions, and depth/gate-count metrics.

Circuits are ordered gate lists over a fixed register layout: data qubits
first (``dim`` contiguous axes of ``n_q`` qubits each), then the selection
ancillae, then an optional reduction ancilla on top.  Gate order in the list is
execution order.  Builders are pure; simulating distinct circuits in parallel
threads is safe.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from . import statevector as sv
from .locfuncs import LCSpec, lc_norm_squared
from .qara import QaraPlan

_EYE2 = np.eye(2, dtype=np.complex128)
_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

_AXIS_TOL = 1e-12


def ry(angle: float) -> np.ndarray:
    """y rotation; ``ry(2*t)|0> = cos(t)|0> + sin(t)|1>``."""
    c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def zphase(phi: float) -> np.ndarray:
    """Phase shift ``diag(1, e^{i phi})``."""
    return np.array([[1.0, 0.0], [0.0, cmath.exp(1j * phi)]], dtype=np.complex128)


@dataclass(frozen=True)
class Gate:
    """One circuit element.

    ``kind`` is ``"1q"`` (single-qubit unitary), ``"c1q"`` (multi-controlled
    single-qubit unitary; ``controls`` are ``(qubit, polarity)`` pairs with
    polarity 0 meaning anti-control), ``"qft"`` (Fourier block on the
    contiguous span ``[span[0], span[1])``), or ``"barrier"`` (layer marker).
    """

    kind: str
    label: str = ""
    target: Optional[int] = None
    controls: tuple[tuple[int, int], ...] = ()
    matrix: Optional[np.ndarray] = None
    span: Optional[tuple[int, int]] = None
    inverse: bool = False

    def __post_init__(self):
        if self.kind in ("1q", "c1q"):
            m = np.asarray(self.matrix, dtype=np.complex128)
            if m.shape != (2, 2):
                raise ValueError("gate payload must be a 2x2 matrix")
            dev = np.max(np.abs(m.conj().T @ m - _EYE2))
            if dev > 1e-10:
                raise ValueError(f"gate payload is not unitary (deviation {dev:.3e})")
            m.flags.writeable = False
            object.__setattr__(self, "matrix", m)

    def qubits(self) -> tuple[int, ...]:
        if self.kind == "qft":
            return tuple(range(self.span[0], self.span[1]))
        if self.kind == "barrier":
            return ()
        return (self.target,) + tuple(q for q, _ in self.controls)

    def inverted(self) -> "Gate":
        if self.kind == "qft":
            return Gate("qft", self.label, span=self.span, inverse=not self.inverse)
        if self.kind == "barrier":
            return self
        return Gate(
            self.kind,
            self.label,
            target=self.target,
            controls=self.controls,
            matrix=np.ascontiguousarray(self.matrix.conj().T),
        )


class Circuit:
    """Ordered gate list plus register layout and named sub-blocks."""

    def __init__(
        self,
        n_qubits: int,
        data_qubits: Optional[Sequence[int]] = None,
        lcu_ancillae: Sequence[int] = (),
        ar_ancilla: Optional[int] = None,
        dim: int = 1,
    ):
        if n_qubits < 0:
            raise ValueError("n_qubits must be non-negative")
        self.n_qubits = n_qubits
        self.data_qubits = tuple(range(n_qubits)) if data_qubits is None else tuple(data_qubits)
        self.lcu_ancillae = tuple(lcu_ancillae)
        self.ar_ancilla = ar_ancilla
        self.dim = dim
        self.gates: list[Gate] = []
        self.blocks: list[tuple[str, int, int]] = []
        self._block_stack: list[tuple[str, int]] = []

    # -- construction -------------------------------------------------------

    def add(self, gate: Gate) -> None:
        for q in gate.qubits():
            if not 0 <= q < self.n_qubits:
                raise ValueError(f"gate touches qubit {q} outside register of {self.n_qubits}")
        qs = gate.qubits()
        if len(set(qs)) != len(qs):
            raise ValueError(f"gate has overlapping qubit indices: {qs}")
        self.gates.append(gate)

    def add_1q(self, target: int, u: np.ndarray, label: str = "") -> None:
        self.add(Gate("1q", label, target=target, matrix=u))

    def add_c1q(
        self, controls: Iterable[tuple[int, int]], target: int, u: np.ndarray, label: str = ""
    ) -> None:
        controls = tuple(controls)
        if controls:
            self.add(Gate("c1q", label, target=target, controls=controls, matrix=u))
        else:
            self.add_1q(target, u, label)

    def add_qft(self, lo: int, hi: int, inverse: bool = False, label: str = "qft") -> None:
        self.add(Gate("qft", label, span=(lo, hi), inverse=inverse))

    def begin_block(self, name: str) -> None:
        self._block_stack.append((name, len(self.gates)))

    def end_block(self) -> None:
        name, start = self._block_stack.pop()
        self.blocks.append((name, start, len(self.gates)))

    def extend(self, other: "Circuit") -> None:
        """Append another circuit's gates (registers must line up by index)."""
        if other.n_qubits > self.n_qubits:
            raise ValueError("cannot extend with a wider circuit")
        offset = len(self.gates)
        self.gates.extend(other.gates)
        self.blocks.extend((n, s + offset, e + offset) for n, s, e in other.blocks)

    # -- derived circuits ----------------------------------------------------

    def inverse(self) -> "Circuit":
        inv = Circuit(self.n_qubits, self.data_qubits, self.lcu_ancillae, self.ar_ancilla, self.dim)
        inv.gates = [g.inverted() for g in reversed(self.gates)]
        n = len(self.gates)
        inv.blocks = [(name + "_inv", n - e, n - s) for name, s, e in reversed(self.blocks)]
        return inv

    def __len__(self) -> int:
        return len(self.gates)

    @property
    def ancilla_qubits(self) -> tuple[int, ...]:
        anc = self.lcu_ancillae
        if self.ar_ancilla is not None:
            anc = anc + (self.ar_ancilla,)
        return anc


def simulate(circuit: Circuit, state: Optional[sv.QuantumState] = None) -> sv.QuantumState:
    """Run a circuit on ``state`` (|0...0> by default)."""
    if state is None:
        state = sv.zero_state(circuit.n_qubits)
    elif state.n_qubits != circuit.n_qubits:
        raise ValueError("state width does not match circuit")
    for g in circuit.gates:
        if g.kind == "1q":
            state = sv.apply_1q(state, g.target, g.matrix)
        elif g.kind == "c1q":
            state = sv.apply_controlled(state, g.controls, g.target, g.matrix)
        elif g.kind == "qft":
            state = sv.apply_qft(state, range(g.span[0], g.span[1]), inverse=g.inverse)
        elif g.kind == "barrier":
            continue
        else:
            raise ValueError(f"unknown gate kind {g.kind!r}")
    return state


def run_encoding(circuit: Circuit) -> tuple[float, sv.QuantumState]:
    """Simulate from |0>, post-select all ancillae on 0, return (probability, data state)."""
    full = simulate(circuit)
    anc = circuit.ancilla_qubits
    if not anc:
        return 1.0, full
    outcome = sv.project_ancilla(full, anc, [0] * len(anc))
    n_data = len(circuit.data_qubits)
    data_amps = outcome.post_state.amplitudes[: 1 << n_data].copy()
    return outcome.probability, sv.QuantumState(n_data, data_amps)


# ---------------------------------------------------------------------------
# elementary builders
# ---------------------------------------------------------------------------

def _shift_phase(k: int, m: int, n_q: int) -> float:
    # exact integer reduction keeps the angle well-conditioned for any k
    n = 1 << n_q
    return -2.0 * math.pi * ((k * (1 << m)) % n) / n


def _append_u_shift(circ: Circuit, k: int, qubits: Sequence[int], label: str = "shift") -> None:
    n_q = len(qubits)
    for m, q in enumerate(qubits):
        phi = _shift_phase(k, m, n_q)
        if phi != 0.0:
            circ.add_1q(q, zphase(phi), f"{label}_z{m}")


def u_shift(k: int, n_q: int) -> Circuit:
    """Diagonal phase layer acting as ``|j> -> exp(-i 2 pi k j / N) |j>``; depth 1."""
    circ = Circuit(n_q)
    _append_u_shift(circ, k, range(n_q))
    return circ


def translation(k: int, n_q: int) -> Circuit:
    """Modular adder ``|j> -> |(j + k) mod N>`` via Fourier conjugation of the phase layer."""
    circ = Circuit(n_q)
    circ.add_qft(0, n_q, inverse=True)
    _append_u_shift(circ, k, range(n_q))
    circ.add_qft(0, n_q, inverse=False)
    return circ


def slater_angles(a: float, n_q: int) -> list[float]:
    """Rotation half-angles for the Slater generator, qubit by qubit."""
    if not a > 0:
        raise ValueError(f"decay rate must be positive, got {a}")
    thetas = [math.atan(math.exp(-a * (1 << m))) for m in range(n_q - 1)]
    thetas.append(math.atan(math.exp(-a)))
    return thetas


def _append_fanout_x(
    circ: Circuit,
    controls: Sequence[tuple[int, int]],
    targets: Sequence[int],
    label: str = "fanout",
) -> None:
    targets = list(targets)
    m_t = len(targets)
    if m_t == 0:
        raise ValueError("fan-out needs at least one target")
    levels = max(0, math.ceil(math.log2(m_t))) if m_t > 1 else 0
    layers = []
    for k in range(1, levels + 1):
        half = 1 << (k - 1)
        layers.append([(targets[i], targets[i + half]) for i in range(min(half, m_t - half))])
    for layer in reversed(layers):
        for src, dst in layer:
            circ.add_c1q([(src, 1)], dst, _X, f"{label}_cx")
    circ.add_c1q(list(controls), targets[0], _X, f"{label}_core")
    for layer in layers:
        for src, dst in layer:
            circ.add_c1q([(src, 1)], dst, _X, f"{label}_cx")


def fanout_x(
    controls: Sequence[int] | Sequence[tuple[int, int]],
    targets: Sequence[int],
    n_qubits: Optional[int] = None,
) -> Circuit:
    """``C^{m_c} X`` on every target, compiled as a CNOT tree around one core gate.

    ``controls`` may be bare indices (polarity 1) or ``(qubit, polarity)``
    pairs.  Compiled depth is ``O(max(m_c, log m_t))``.
    """
    ctrl = [(c, 1) if isinstance(c, (int, np.integer)) else (int(c[0]), int(c[1])) for c in controls]
    cq = [q for q, _ in ctrl]
    if set(cq) & set(targets):
        raise ValueError("control and target sets overlap")
    if n_qubits is None:
        n_qubits = max(list(targets) + cq, default=-1) + 1
    circ = Circuit(n_qubits)
    _append_fanout_x(circ, ctrl, targets)
    return circ


def u_slater(a: float, n_q: int) -> Circuit:
    """Generator of the Slater state at the origin: one rotation layer + a fan-out flip."""
    circ = Circuit(n_q)
    _append_slater_rotations(circ, a, tuple(range(n_q)))
    _append_slater_cnots(circ, tuple(range(n_q)))
    return circ


def _append_slater_rotations(circ: Circuit, a: float, data: Sequence[int], label: str = "slater_ry") -> None:
    for m, theta in enumerate(slater_angles(a, len(data))):
        circ.add_1q(data[m], ry(2.0 * theta), f"{label}{m}")


def _append_slater_cnots(circ: Circuit, data: Sequence[int]) -> None:
    if len(data) >= 2:
        _append_fanout_x(circ, [(data[-1], 1)], list(data[:-1]), label="slater")


def u_lorentzian(a: float, n_q: int, qft_dagger: bool = False) -> Circuit:
    """Generator of the Lorentzian state at the origin: Slater generator then Fourier.

    Either Fourier direction is valid here; the adjoint produces the mirrored
    (index-reversed) table, which coincides with the Lorentzian by symmetry.
    """
    circ = u_slater(a, n_q)
    circ.add_qft(0, n_q, inverse=qft_dagger, label="final_qft")
    return circ


# ---------------------------------------------------------------------------
# multiply controlled multiple single-qubit unitaries
# ---------------------------------------------------------------------------

def decompose_1q(u: np.ndarray) -> tuple[float, float, np.ndarray]:
    """Split a 2x2 unitary into (global phase alpha, rotation angle, rotation axis)."""
    u = np.asarray(u, dtype=np.complex128)
    det = u[0, 0] * u[1, 1] - u[0, 1] * u[1, 0]
    alpha = 0.5 * cmath.phase(det)
    su = u * cmath.exp(-1j * alpha)
    c = min(1.0, max(-1.0, float((su[0, 0] + su[1, 1]).real) / 2.0))
    vec = np.array(
        [
            -(su[0, 1] + su[1, 0]).imag / 2.0,
            (su[1, 0] - su[0, 1]).real / 2.0,
            -(su[0, 0] - su[1, 1]).imag / 2.0,
        ]
    )
    s = float(np.linalg.norm(vec))
    theta = 2.0 * math.atan2(s, c)
    axis = vec / s if s > _AXIS_TOL else np.array([0.0, 0.0, 1.0])
    return alpha, theta, axis


def _axis_conjugator(axis: np.ndarray) -> np.ndarray:
    """Unitary V with axis-rotation = V Z(theta) V^dag; identity for the +z axis."""
    nx, ny, nz = axis
    sxy = math.hypot(nx, ny)
    if sxy <= _AXIS_TOL:
        return _EYE2 if nz > 0 else _X
    vartheta = math.acos(min(1.0, max(-1.0, nz)))
    phi = math.atan2(ny, nx)
    cv, svv = math.cos(vartheta / 2.0), math.sin(vartheta / 2.0)
    eip = cmath.exp(1j * phi)
    return np.array([[cv, svv], [eip * svv, -eip * cv]], dtype=np.complex128)


def _append_mcm1(
    circ: Circuit,
    controls: Sequence[tuple[int, int]],
    per_target: Sequence[tuple[int, np.ndarray]],
    label: str = "mcm1",
) -> None:
    controls = list(controls)
    tq = [t for t, _ in per_target]
    if len(set(tq)) != len(tq) or set(tq) & {q for q, _ in controls}:
        raise ValueError("mcm1 targets must be distinct and disjoint from controls")

    if not controls:
        for t, u in per_target:
            if not np.allclose(u, _EYE2, atol=1e-15):
                circ.add_1q(t, u, f"{label}_u")
        return

    alpha_total = 0.0
    active: list[tuple[int, np.ndarray, float]] = []  # (target, V, theta)
    for t, u in per_target:
        alpha, theta, axis = decompose_1q(u)
        alpha_total += alpha
        if abs(math.sin(theta / 2.0)) > _AXIS_TOL:
            active.append((t, _axis_conjugator(axis), theta))
        elif math.cos(theta / 2.0) < 0.0:
            # u = e^{i alpha} (-I): the determinant hides the sign, carry it as
            # an extra half-turn of controlled phase
            alpha_total += math.pi

    if active:
        for t, v, _ in active:
            if not np.allclose(v, _EYE2, atol=1e-15):
                circ.add_1q(t, v.conj().T, f"{label}_vdg")
        _append_fanout_x(circ, controls, [t for t, _, _ in active], label=label)
        for t, _, theta in active:
            circ.add_1q(t, zphase(-theta / 2.0), f"{label}_zhalf_dg")
        _append_fanout_x(circ, controls, [t for t, _, _ in active], label=label)
        for t, _, theta in active:
            circ.add_1q(t, zphase(theta / 2.0), f"{label}_zhalf")
        for t, v, _ in active:
            if not np.allclose(v, _EYE2, atol=1e-15):
                circ.add_1q(t, v, f"{label}_v")

    # residual phase on the control pattern, carried by a controlled phase
    # gate living entirely on the control qubits
    alpha_total = math.remainder(alpha_total, math.tau)
    if abs(alpha_total) > 1e-15:
        (tq_, tp), rest = controls[-1], controls[:-1]
        m = zphase(alpha_total) if tp == 1 else np.diag(
            [cmath.exp(1j * alpha_total), 1.0]
        ).astype(np.complex128)
        circ.add_c1q(rest, tq_, m, f"{label}_phase")


def mcm1(
    controls: Sequence[tuple[int, int]],
    per_target_unitaries: Sequence[tuple[int, np.ndarray]],
    n_qubits: Optional[int] = None,
) -> Circuit:
    """Simultaneous single-qubit unitaries, all controlled by one ancilla pattern.

    Compiled with the axis-diagonalization + phase-gradient construction: each
    unitary is conjugated to a phase shift, the shared controls act only
    through two fan-out blocks and one controlled phase, giving depth
    ``O(max(n_controls, log n_targets))``.
    """
    if n_qubits is None:
        qs = [t for t, _ in per_target_unitaries] + [q for q, _ in controls]
        n_qubits = max(qs, default=-1) + 1
    circ = Circuit(n_qubits)
    _append_mcm1(circ, controls, per_target_unitaries)
    return circ


# ---------------------------------------------------------------------------
# ancilla preparation for the mixture weights
# ---------------------------------------------------------------------------

def _prep_gate_list(weights: Sequence[float]) -> list[tuple[int, tuple[int, ...], float]]:
    """Rotation tree for amplitudes sqrt(w_l / sum w): (level, prefix bits, half-angle)."""
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0):
        raise ValueError("weights must be non-negative")
    if not np.any(w > 0):
        raise ValueError("all-zero weights")
    n_a = max(1, math.ceil(math.log2(w.size))) if w.size > 1 else 0
    padded = np.zeros(1 << n_a)
    padded[: w.size] = w
    gates = []

    def descend(level: int, prefix: tuple[int, ...], block: np.ndarray):
        if level == n_a:
            return
        total = block.sum()
        if total <= 0.0:
            return
        half = block.size // 2
        w0 = block[:half].sum()
        theta = math.acos(min(1.0, max(0.0, math.sqrt(w0 / total))))
        gates.append((level, prefix, theta))
        descend(level + 1, prefix + (0,), block[:half])
        descend(level + 1, prefix + (1,), block[half:])

    descend(0, (), padded)
    return gates


def _append_prep(circ: Circuit, anc: Sequence[int], weights: Sequence[float], invert: bool = False) -> None:
    n_a = len(anc)
    gates = _prep_gate_list(weights)
    if invert:
        gates = gates[::-1]
    for level, prefix, theta in gates:
        if theta == 0.0:
            continue
        target = anc[n_a - 1 - level]
        controls = [(anc[n_a - 1 - i], prefix[i]) for i in range(level)]
        angle = -2.0 * theta if invert else 2.0 * theta
        circ.add_c1q(controls, target, ry(angle), "prep_ry")


def lcu_prepare_ancillae(coeffs: Sequence[float]) -> Circuit:
    """Map |0..0> to ``sum_l sqrt(|d_l| / lambda) |l>`` with a multiplexed rotation tree.

    ``lambda = sum_l |d_l|``; the ancilla count is ``ceil(log2(n_loc))`` after
    padding to a power of two with zero-weight branches that are never
    selected.
    """
    w = [abs(float(c)) for c in coeffs]
    n_a = max(1, math.ceil(math.log2(len(w)))) if len(w) > 1 else 0
    circ = Circuit(n_a, data_qubits=(), lcu_ancillae=tuple(range(n_a)))
    _append_prep(circ, range(n_a), w)
    return circ


# ---------------------------------------------------------------------------
# the mixture encoder and its variants
# ---------------------------------------------------------------------------

def _require_normalized(lc: LCSpec) -> None:
    norm2 = lc_norm_squared(lc)
    if abs(norm2 - 1.0) > 1e-10:
        raise ValueError(f"LC must be normalized (|psi|^2 = {norm2!r})")


def _build_encoder(
    lc: LCSpec,
    weights: Sequence[float],
    phases: Sequence[float],
    theta_ar: Optional[float],
    with_final_qft: bool,
    hoist_cnots: bool,
    qft_dagger: bool,
) -> Circuit:
    """Shared construction for all probabilistic encoder variants.

    ``weights``/``phases`` carry one entry per prepared branch; branch ``l``
    below ``lc.n_loc`` selects term ``l`` with coefficient phase ``phases[l]``
    folded into its controlled block, higher branches carry zero weight.
    """
    n_q, dim = lc.n_q, lc.dim
    n_data = n_q * dim
    n_a = max(1, math.ceil(math.log2(len(weights)))) if len(weights) > 1 else 0
    anc = tuple(range(n_data, n_data + n_a))
    ar = n_data + n_a if theta_ar is not None else None
    n_total = n_data + n_a + (1 if ar is not None else 0)

    circ = Circuit(
        n_total,
        data_qubits=tuple(range(n_data)),
        lcu_ancillae=anc,
        ar_ancilla=ar,
        dim=dim,
    )
    axes_qubits = [tuple(range(mu * n_q, (mu + 1) * n_q)) for mu in range(dim)]

    circ.begin_block("prep")
    if n_a:
        _append_prep(circ, anc, weights)
    if ar is not None:
        circ.add_1q(ar, ry(2.0 * theta_ar), "ar_ry")
    circ.end_block()

    def pattern(l: int) -> list[tuple[int, int]]:
        return [(anc[i], (l >> i) & 1) for i in range(n_a)]

    circ.begin_block("select_slater")
    for l in range(lc.n_loc):
        if weights[l] == 0.0:
            continue
        targets = []
        for mu, axis in enumerate(axes_qubits):
            thetas = slater_angles(lc.terms[l][mu].a, n_q)
            targets.extend((axis[m], ry(2.0 * thetas[m])) for m in range(n_q))
        _append_mcm1(circ, pattern(l), targets, label=f"sel_ry_{l}")
        if not hoist_cnots:
            for axis in axes_qubits:
                if n_q >= 2:
                    _append_fanout_x(
                        circ, pattern(l) + [(axis[-1], 1)], list(axis[:-1]), label=f"sel_cx_{l}"
                    )
    circ.end_block()

    if hoist_cnots:
        circ.begin_block("shared_cnots")
        for axis in axes_qubits:
            if n_q >= 2:
                _append_slater_cnots(circ, axis)
        circ.end_block()

    circ.begin_block("select_shift")
    for l in range(lc.n_loc):
        if weights[l] == 0.0:
            continue
        targets = []
        for mu, axis in enumerate(axes_qubits):
            k = lc.terms[l][mu].k_c
            if qft_dagger:
                k = -k
            for m in range(n_q):
                phi = _shift_phase(k, m, n_q)
                u = zphase(phi)
                if mu == 0 and m == 0 and phases[l] != 0.0:
                    u = cmath.exp(1j * phases[l]) * u
                if not np.allclose(u, _EYE2, atol=1e-15):
                    targets.append((axis[m], u))
        if targets:
            _append_mcm1(circ, pattern(l), targets, label=f"sel_shift_{l}")
    circ.end_block()

    circ.begin_block("unprep")
    if n_a:
        _append_prep(circ, anc, weights, invert=True)
    circ.end_block()

    if with_final_qft:
        circ.begin_block("final_qft")
        for axis in axes_qubits:
            circ.add_qft(axis[0], axis[-1] + 1, inverse=qft_dagger, label="final_qft")
        circ.end_block()
    return circ


def c_lc_lorentzian(
    lc: LCSpec,
    with_final_qft: bool = True,
    hoist_cnots: bool = True,
    qft_dagger: bool = False,
) -> Circuit:
    """Probabilistic encoder for a real-coefficient 1D Lorentzian mixture.

    Post-selecting all ancillae on 0 leaves the data register in the mixture
    state with probability ``1 / (sum_l |d_l|)^2``.  Coefficient signs are
    folded into the selected blocks as phases; the shared bit-flip block of the
    Slater generators is applied once, uncontrolled, and a single uncontrolled
    Fourier block closes the circuit.
    """
    _require_normalized(lc)
    if lc.dim != 1:
        raise ValueError("c_lc_lorentzian is the 1D encoder; use c_lc_product for dim > 1")
    if lc.is_complex:
        raise ValueError("complex coefficients require c_lc_complex")
    weights = [abs(c.real) for c in lc.coeffs]
    phases = [0.0 if c.real >= 0 else math.pi for c in lc.coeffs]
    return _build_encoder(lc, weights, phases, None, with_final_qft, hoist_cnots, qft_dagger)


def c_lc_ar(
    lc: LCSpec,
    theta_ar: float,
    with_final_qft: bool = True,
    qft_dagger: bool = False,
) -> Circuit:
    """Encoder with one extra rotated ancilla that scales success by ``cos^2(theta_ar)``."""
    _require_normalized(lc)
    if not 0.0 <= theta_ar < math.pi / 2:
        raise ValueError(f"theta_ar must lie in [0, pi/2), got {theta_ar}")
    if lc.is_complex:
        weights, phases = _complex_branches(lc)
    else:
        weights = [abs(c.real) for c in lc.coeffs]
        phases = [0.0 if c.real >= 0 else math.pi for c in lc.coeffs]
    return _build_encoder(lc, weights, phases, theta_ar, with_final_qft, True, qft_dagger)


def _append_zero_reflection(circ: Circuit, qubits: Sequence[int]) -> None:
    """Sign flip on the all-zero pattern of ``qubits``: X^{otimes} . C^{n-1}Z . X^{otimes}."""
    qubits = list(qubits)
    for q in qubits:
        circ.add_1q(q, _X, "s0_x")
    circ.add_c1q([(q, 1) for q in qubits[:-1]], qubits[-1], _Z, "s0_cz")
    for q in qubits:
        circ.add_1q(q, _X, "s0_x")


def zero_reflection(qubits: Sequence[int], n_qubits: Optional[int] = None) -> Circuit:
    """Standalone reflection that negates exactly the all-zero pattern of ``qubits``."""
    qubits = list(qubits)
    if n_qubits is None:
        n_qubits = max(qubits) + 1
    circ = Circuit(n_qubits)
    _append_zero_reflection(circ, qubits)
    return circ


def amplification_q(
    lc: LCSpec, theta_ar: float, qft_dagger: bool = False
) -> Circuit:
    """One amplification step ``Q = - U R0 U^dag S0`` for the reduced encoder.

    ``U`` is the reduced encoder without its trailing Fourier block.  ``S0``
    (applied first) flips the sign of the good states, i.e. of everything with
    all ``n_A + 1`` ancillae at zero.  The sandwiched reflection ``U R0 U^dag``
    must reflect about the prepared state itself, so ``R0`` flips the single
    all-zero state of the whole register: an ancilla-only flip in that position
    would be a reflection about a ``2^{n_q}``-dimensional subspace and would
    drag the state out of the good/bad plane whenever the encoded combination
    is not proportional to a unitary (any mixture with two or more terms).
    """
    u = c_lc_ar(lc, theta_ar, with_final_qft=False, qft_dagger=qft_dagger)
    anc = u.ancilla_qubits
    q = Circuit(u.n_qubits, u.data_qubits, u.lcu_ancillae, u.ar_ancilla, u.dim)
    q.begin_block("s0_good")
    _append_zero_reflection(q, anc)
    q.end_block()
    q.begin_block("u_dagger")
    q.extend(u.inverse())
    q.end_block()
    q.begin_block("r0_full")
    _append_zero_reflection(q, range(u.n_qubits))
    q.end_block()
    q.begin_block("u")
    q.extend(u)
    q.end_block()
    q.add_1q(0, -_EYE2, "global_phase_pi")
    return q


def c_lc_deterministic(lc: LCSpec, plan: QaraPlan, qft_dagger: bool = False) -> Circuit:
    """Deterministic encoder: reduced circuit, ``m_opt`` amplification steps, one Fourier block."""
    _require_normalized(lc)
    w_lc = 1.0 / lc.lam**2
    if abs(plan.w - w_lc) > 1e-9:
        raise ValueError(
            f"plan is inconsistent with this LC: plan.w={plan.w!r}, 1/lambda^2={w_lc!r}"
        )
    if plan.lam is not None and abs(plan.lam - lc.lam) > 1e-9 * max(1.0, lc.lam):
        raise ValueError(f"plan.lam={plan.lam!r} does not match the LC's {lc.lam!r}")
    circ = c_lc_ar(lc, plan.theta_ar_opt, with_final_qft=False, qft_dagger=qft_dagger)
    if plan.m_opt > 0:
        q = amplification_q(lc, plan.theta_ar_opt, qft_dagger=qft_dagger)
        for i in range(plan.m_opt):
            circ.begin_block(f"q_{i}")
            circ.extend(q)
            circ.end_block()
    circ.begin_block("final_qft")
    n_q = lc.n_q
    for mu in range(lc.dim):
        circ.add_qft(mu * n_q, (mu + 1) * n_q, inverse=qft_dagger, label="final_qft")
    circ.end_block()
    return circ


def _complex_branches(lc: LCSpec) -> tuple[list[float], list[float]]:
    """Complex coefficients as a doubled real-weight branch list.

    The real-basis halves of the doubled expansion carry ``|d_l|`` with phase
    ``arg(d_l)``; the imaginary-part halves vanish for the real Lorentzian
    basis and survive only as zero-weight branches.
    """
    weights = [abs(c) for c in lc.coeffs] + [0.0] * lc.n_loc
    phases = [cmath.phase(c) for c in lc.coeffs] + [0.0] * lc.n_loc
    return weights, phases


def c_lc_complex(
    lc: LCSpec,
    with_final_qft: bool = True,
    qft_dagger: bool = False,
) -> Circuit:
    """Probabilistic encoder accepting complex coefficients.

    The mixture is rewritten over twice as many real-weight branches (hence
    one extra ancilla); each surviving branch folds its coefficient's phase
    into the selected block.  Success probability stays ``1 / (sum |d_l|)^2``.
    """
    _require_normalized(lc)
    if lc.dim != 1:
        raise ValueError("c_lc_complex is the 1D encoder; use c_lc_product for dim > 1")
    weights, phases = _complex_branches(lc)
    return _build_encoder(lc, weights, phases, None, with_final_qft, True, qft_dagger)


def c_lc_product(
    lc: LCSpec,
    with_final_qft: bool = True,
    qft_dagger: bool = False,
) -> Circuit:
    """Probabilistic encoder for 2D/3D product-basis mixtures.

    One ``n_q``-qubit register per axis; the selected blocks act on all axes at
    once and each axis gets its own shared bit-flip block and trailing Fourier
    block.  The ancilla count, and therefore the success probability, is the
    same as in one dimension.
    """
    _require_normalized(lc)
    if lc.dim not in (2, 3):
        raise ValueError(f"product encoder expects dim in {{2, 3}}, got {lc.dim}")
    if (lc.dim * lc.n_q + math.ceil(math.log2(max(2, lc.n_loc)))) > sv.MAX_QUBITS:
        raise ValueError("register would exceed the simulator cap")
    if lc.is_complex:
        weights, phases = _complex_branches(lc)
    else:
        weights = [abs(c.real) for c in lc.coeffs]
        phases = [0.0 if c.real >= 0 else math.pi for c in lc.coeffs]
    return _build_encoder(lc, weights, phases, None, with_final_qft, True, qft_dagger)


# ---------------------------------------------------------------------------
# metrics and serialization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CircuitMetrics:
    """Layered depth and gate tallies.

    Depth uses greedy left-alignment: a gate starts at the earliest layer where
    all its qubits are free.  Single-qubit gates and CNOTs occupy one layer; a
    gate with ``m >= 2`` controls occupies ``m`` layers (a linear-depth
    decomposition bound with unit constant); a Fourier block on ``m`` qubits
    occupies ``m`` layers (linear-depth construction).
    """

    depth: int
    n_1q: int
    n_cx: int
    n_mcu: int
    n_qft: int

    @property
    def n_gates(self) -> int:
        return self.n_1q + self.n_cx + self.n_mcu + self.n_qft


def _gate_cost(g: Gate) -> int:
    if g.kind == "1q":
        return 1
    if g.kind == "c1q":
        return max(1, len(g.controls))
    if g.kind == "qft":
        return g.span[1] - g.span[0]
    return 0


def metrics(circ: Circuit) -> CircuitMetrics:
    """Depth and gate counts of a built circuit."""
    avail = [0] * max(1, circ.n_qubits)
    depth = 0
    n_1q = n_cx = n_mcu = n_qft = 0
    for g in circ.gates:
        if g.kind == "barrier":
            sync = max(avail)
            avail = [sync] * len(avail)
            continue
        qs = g.qubits()
        start = max(avail[q] for q in qs)
        end = start + _gate_cost(g)
        for q in qs:
            avail[q] = end
        depth = max(depth, end)
        if g.kind == "1q":
            n_1q += 1
        elif g.kind == "qft":
            n_qft += 1
        elif len(g.controls) == 1 and np.array_equal(g.matrix, _X):
            n_cx += 1
        else:
            n_mcu += 1
    return CircuitMetrics(depth, n_1q, n_cx, n_mcu, n_qft)


def _fmt_c(z: complex) -> str:
    return f"{z.real:.17g},{z.imag:.17g}"


def circuit_to_text(circ: Circuit) -> str:
    """Line-based serialization: one gate per line, matrix entries as re,im pairs."""
    lines = [
        f"# n_qubits={circ.n_qubits} data={','.join(map(str, circ.data_qubits))}"
        f" anc={','.join(map(str, circ.lcu_ancillae))}"
        f" ar={'' if circ.ar_ancilla is None else circ.ar_ancilla} dim={circ.dim}"
    ]
    for g in circ.gates:
        if g.kind == "qft":
            lines.append(f"{g.label or 'qft'} qft span={g.span[0]}:{g.span[1]} inv={int(g.inverse)}")
        elif g.kind == "barrier":
            lines.append(f"{g.label or 'barrier'} barrier")
        else:
            ctrl = ",".join(f"{q}:{p}" for q, p in g.controls) or "-"
            m = ";".join(_fmt_c(z) for z in np.asarray(g.matrix).reshape(4))
            lines.append(f"{g.label or g.kind} {g.kind} t={g.target} c={ctrl} m={m}")
    return "\n".join(lines) + "\n"


def circuit_from_text(text: str) -> Circuit:
    """Parse the output of :func:`circuit_to_text`."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    header = lines[0]
    if not header.startswith("#"):
        raise ValueError("missing circuit header line")
    fields = dict(tok.split("=", 1) for tok in header[1:].split())
    n_qubits = int(fields["n_qubits"])

    def ints(s: str) -> tuple[int, ...]:
        return tuple(int(x) for x in s.split(",") if x != "")

    circ = Circuit(
        n_qubits,
        data_qubits=ints(fields.get("data", "")),
        lcu_ancillae=ints(fields.get("anc", "")),
        ar_ancilla=int(fields["ar"]) if fields.get("ar") else None,
        dim=int(fields.get("dim", "1")),
    )
    for ln in lines[1:]:
        parts = ln.split()
        label, kind = parts[0], parts[1]
        kv = dict(p.split("=", 1) for p in parts[2:])
        if kind == "qft":
            lo, hi = kv["span"].split(":")
            circ.add_qft(int(lo), int(hi), inverse=bool(int(kv["inv"])), label=label)
        elif kind == "barrier":
            circ.add(Gate("barrier", label))
        else:
            ctrl = ()
            if kv["c"] != "-":
                ctrl = tuple(
                    (int(q), int(p)) for q, p in (c.split(":") for c in kv["c"].split(","))
                )
            entries = [complex(*map(float, z.split(","))) for z in kv["m"].split(";")]
            m = np.array(entries, dtype=np.complex128).reshape(2, 2)
            if kind == "1q":
                circ.add_1q(int(kv["t"]), m, label)
            else:
                circ.add_c1q(ctrl, int(kv["t"]), m, label)
    return circ
