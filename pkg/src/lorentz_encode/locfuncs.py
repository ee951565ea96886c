"""Closed-form discrete Slater and Lorentzian functions, states, and overlaps.

Every circuit in :mod:`lorentz_encode.circuits` is ultimately checked against
the tables produced here, so this module stays strictly analytic: plain
double-precision ``exp``/``cosh``/``sinh`` evaluation, no series truncation,
no simulation.  Integer coordinates and centers are reduced with mathematical
mod (result in ``[0, N)``).

Both function families are periodic with period ``N = 2**n_q`` and peak at the
origin.  The Slater family decays exponentially away from the peak; its
Fourier transform is the Lorentzian family with the same decay rate, which is
what makes Lorentzians cheap to prepare on qubits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .statevector import MAX_QUBITS, QuantumState


@dataclass(frozen=True)
class LorentzianSpec:
    """One discrete Lorentzian: decay rate ``a`` centered at integer ``k_c``."""

    a: float
    k_c: int
    n_q: int

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"decay rate must be positive, got {self.a}")
        if not 1 <= self.n_q <= MAX_QUBITS:
            raise ValueError(f"n_q must be in [1, {MAX_QUBITS}], got {self.n_q}")
        n = 1 << self.n_q
        if not 0 <= self.k_c < n:
            raise ValueError(f"center {self.k_c} outside [0, {n - 1}]")

    @property
    def n_points(self) -> int:
        return 1 << self.n_q


@dataclass(frozen=True)
class LCSpec:
    """A linear combination of (products of) Lorentzians on an ``n_q``-qubit grid per axis.

    ``terms[l]`` is a length-``dim`` tuple holding one :class:`LorentzianSpec`
    per axis; one dimension is simply ``dim == 1``.  ``coeffs`` may be complex
    (the complex-coefficient encoder handles the phases).
    """

    n_q: int
    terms: tuple[tuple[LorentzianSpec, ...], ...]
    coeffs: tuple[complex, ...]
    dim: int = 1

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if len(self.terms) < 1:
            raise ValueError("an LC needs at least one term")
        if len(self.coeffs) != len(self.terms):
            raise ValueError(
                f"{len(self.coeffs)} coefficients for {len(self.terms)} terms"
            )
        for axes in self.terms:
            if len(axes) != self.dim:
                raise ValueError(f"term has {len(axes)} axes, expected {self.dim}")
            for spec in axes:
                if spec.n_q != self.n_q:
                    raise ValueError("per-axis register size must match the LC's n_q")
        object.__setattr__(self, "terms", tuple(tuple(t) for t in self.terms))
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))

    @classmethod
    def one_d(cls, n_q: int, params: Iterable[tuple[float, int]], coeffs: Sequence[complex]) -> "LCSpec":
        """Build a 1D LC from ``(a, k_c)`` pairs."""
        terms = tuple((LorentzianSpec(a, k_c, n_q),) for a, k_c in params)
        return cls(n_q=n_q, terms=terms, coeffs=tuple(coeffs), dim=1)

    @property
    def n_loc(self) -> int:
        return len(self.terms)

    @property
    def is_complex(self) -> bool:
        return any(abs(c.imag) > 0 for c in self.coeffs)

    @property
    def lam(self) -> float:
        """L1 weight ``sum_l |d_l|`` that sets the LCU success probability ``1/lam**2``."""
        return float(sum(abs(c) for c in self.coeffs))

    def coeff_array(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=np.complex128)


def slater_norm_const(n_q: int, a: float) -> float:
    """Constant that makes the discrete Slater table square-sum to one."""
    if not a > 0:
        raise ValueError(f"decay rate must be positive, got {a}")
    n = 1 << n_q
    e2 = math.exp(-2.0 * a)
    return math.sqrt((1.0 - e2) / ((1.0 + e2) * (1.0 - math.exp(-n * a))))


def slater_value(n_q: int, a: float, j: int) -> float:
    """Discrete Slater function at integer coordinate ``j`` (periodic in ``N``)."""
    n = 1 << n_q
    jt = j % n
    cs = slater_norm_const(n_q, a)
    return cs * math.exp(-a * min(jt, n - jt))


def slater_vector(n_q: int, a: float) -> np.ndarray:
    """Full length-``N`` Slater table centered at the origin."""
    n = 1 << n_q
    j = np.arange(n)
    return slater_norm_const(n_q, a) * np.exp(-a * np.minimum(j, n - j))


def lorentzian_value(n_q: int, a: float, j: int) -> float:
    """Discrete Lorentzian function at integer coordinate ``j`` (periodic in ``N``)."""
    n = 1 << n_q
    cs = slater_norm_const(n_q, a)
    sign = -1.0 if j % 2 else 1.0
    num = (1.0 - math.exp(-2.0 * a)) * (1.0 - sign * math.exp(-a * n / 2.0))
    den = 1.0 - 2.0 * math.exp(-a) * math.cos(2.0 * math.pi * j / n) + math.exp(-2.0 * a)
    return cs / math.sqrt(n) * num / den


def lorentzian_vector(n_q: int, a: float) -> np.ndarray:
    """Full length-``N`` Lorentzian table centered at the origin."""
    n = 1 << n_q
    j = np.arange(n)
    cs = slater_norm_const(n_q, a)
    signs = np.where(j % 2 == 0, 1.0, -1.0)
    num = (1.0 - math.exp(-2.0 * a)) * (1.0 - signs * math.exp(-a * n / 2.0))
    den = 1.0 - 2.0 * math.exp(-a) * np.cos(2.0 * np.pi * j / n) + math.exp(-2.0 * a)
    return cs / math.sqrt(n) * num / den


def lorentz_width(n_q: int, a: float) -> float:
    """Half-width of the Lorentzian peak near the origin, ``(N/pi) sinh(a/2)``.

    Monotone in ``a``; defined by continuity as 0 at ``a = 0``.
    """
    if a < 0:
        raise ValueError(f"decay rate must be non-negative, got {a}")
    return (1 << n_q) / math.pi * math.sinh(a / 2.0)


def sf_state(spec: LorentzianSpec) -> QuantumState:
    """Normalized Slater state centered at ``spec.k_c``."""
    vec = np.roll(slater_vector(spec.n_q, spec.a), spec.k_c)
    return QuantumState(spec.n_q, vec.astype(np.complex128))


def lf_state(spec: LorentzianSpec) -> QuantumState:
    """Normalized Lorentzian state centered at ``spec.k_c``."""
    vec = np.roll(lorentzian_vector(spec.n_q, spec.a), spec.k_c)
    return QuantumState(spec.n_q, vec.astype(np.complex128))


def lf_overlap(a: float, a_prime: float, k_c: int, n_q: int) -> float:
    """Inner product of two Lorentzian states whose centers differ by ``k_c``.

    Closed form; symmetric in the rates and in ``k_c <-> -k_c``, equal to 1 at
    coinciding parameters.
    """
    if not (a > 0 and a_prime > 0):
        raise ValueError("decay rates must be positive")
    n = 1 << n_q
    s = a + a_prime
    sign = -1.0 if k_c % 2 else 1.0
    num = (1.0 - sign * math.exp(-s * n / 2.0)) * math.sinh(s)
    den = math.cosh(s) - math.cos(2.0 * math.pi * k_c / n)
    return slater_norm_const(n_q, a) * slater_norm_const(n_q, a_prime) * num / den


def term_overlap(t1: tuple[LorentzianSpec, ...], t2: tuple[LorentzianSpec, ...]) -> float:
    """Overlap of two product-basis terms: product of the per-axis overlaps."""
    v = 1.0
    for s1, s2 in zip(t1, t2):
        v *= lf_overlap(s1.a, s2.a, s1.k_c - s2.k_c, s1.n_q)
    return v


def overlap_matrix(lc: LCSpec) -> np.ndarray:
    """Gram matrix of the LC's basis terms (real symmetric, unit diagonal)."""
    n = lc.n_loc
    s = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            s[i, j] = s[j, i] = term_overlap(lc.terms[i], lc.terms[j])
    return s


def lc_norm_squared(lc: LCSpec) -> float:
    """``<psi_lc|psi_lc>`` from the coefficient quadratic form, O(n_loc^2) work."""
    d = lc.coeff_array()
    return float(np.real(np.conj(d) @ overlap_matrix(lc) @ d))


def normalize_lc(lc: LCSpec) -> LCSpec:
    """Rescale the coefficients so the LC state has unit norm."""
    norm2 = lc_norm_squared(lc)
    if norm2 <= 1e-14:
        raise ValueError(f"LC is numerically degenerate: |psi|^2 = {norm2:.3e}")
    scale = 1.0 / math.sqrt(norm2)
    return replace(lc, coeffs=tuple(c * scale for c in lc.coeffs))


def _term_vector(axes: tuple[LorentzianSpec, ...]) -> np.ndarray:
    # Axis 0 sits on the low qubits; C-order flattening wants it last.
    vec = np.roll(lorentzian_vector(axes[0].n_q, axes[0].a), axes[0].k_c)
    for spec in axes[1:]:
        nxt = np.roll(lorentzian_vector(spec.n_q, spec.a), spec.k_c)
        vec = np.multiply.outer(nxt, vec)
    return vec.reshape(-1)


def lc_target_state(lc: LCSpec) -> QuantumState:
    """Reference amplitudes ``sum_l d_l |L; a_l, k_cl>`` as a dense state.

    The LC must already be normalized (see :func:`normalize_lc`); the assembled
    vector is divided by its own norm only to absorb float drift at the 1e-10
    tolerance allowed for the coefficients.
    """
    norm2 = lc_norm_squared(lc)
    if abs(norm2 - 1.0) > 1e-10:
        raise ValueError(
            f"LC is not normalized (|psi|^2 = {norm2!r}); call normalize_lc first"
        )
    total = np.zeros((1 << lc.n_q) ** lc.dim, dtype=np.complex128)
    for d, axes in zip(lc.coeffs, lc.terms):
        if d != 0:
            total += d * _term_vector(axes)
    total /= np.linalg.norm(total)
    return QuantumState(lc.n_q * lc.dim, total)
