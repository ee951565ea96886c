"""Classical search for the Lorentzian mixture that best matches a sampled target.

The squared overlap is quadratic in the expansion coefficients, so for fixed
decay rates and centers the optimum is a rank-one generalized eigenproblem
solved in closed form (the dense generalized eigensolver stays available as a
cross-check).  Decay rates are then improved by coordinate-wise golden-section
search, and integer centers move through a Metropolis chain, mirroring the
layered structure of the objective.

Randomness comes from one ``numpy.random.default_rng`` stream seeded from the
config.  Draw order per Metropolis iteration: mixture index, center move,
acceptance variate (the acceptance draw is skipped on the very first
iteration, which is always accepted).  Runs are bit-reproducible per seed.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from .locfuncs import lf_overlap, lorentzian_vector

logger = logging.getLogger(__name__)

A_MIN = 1e-3
A_MAX = 8.0
GOLDEN_STEPS = 20
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class DegenerateBasisError(ValueError):
    """The overlap matrix of the trial terms is numerically singular."""


@dataclass(frozen=True)
class TargetFunction:
    """Real target samples on the ``2**n_q`` grid, normalized on ingestion."""

    n_q: int
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.shape != (1 << self.n_q,):
            raise ValueError(f"expected {1 << self.n_q} samples, got shape {s.shape}")
        norm = np.linalg.norm(s)
        if norm == 0:
            raise ValueError("target function is identically zero")
        s = s / norm
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)

    @property
    def n_points(self) -> int:
        return 1 << self.n_q


@dataclass(frozen=True)
class FitConfig:
    n_loc: int
    beta: float = 200.0
    n_metropolis: int = 400
    n_rate_iters: int = 3
    seed: int = 1
    k_c_init: Optional[Sequence[int]] = None
    a_init: Optional[Sequence[float]] = None

    def __post_init__(self):
        if self.n_loc < 1:
            raise ValueError("n_loc must be at least 1")
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if self.n_metropolis < 1 or self.n_rate_iters < 1:
            raise ValueError("iteration counts must be at least 1")
        if self.a_init is not None and any(a <= 0 for a in self.a_init):
            raise ValueError("initial decay rates must be positive")


@dataclass(frozen=True)
class FitResult:
    """Best parameters seen along the chain, plus the per-iteration trace."""

    d: np.ndarray
    a: np.ndarray
    k_c: np.ndarray
    F: float
    trace: tuple[tuple[float, bool], ...]
    seed: int
    selection: str = "best-so-far"


def g_vector(target: TargetFunction, a: Sequence[float], k_c: Sequence[int]) -> np.ndarray:
    """Projections of the target onto each displaced Lorentzian."""
    if len(a) != len(k_c):
        raise ValueError("decay rates and centers must have equal length")
    g = np.empty(len(a))
    for l, (al, kl) in enumerate(zip(a, k_c)):
        g[l] = float(target.samples @ np.roll(lorentzian_vector(target.n_q, al), int(kl)))
    return g


def build_matrices(
    target: TargetFunction, a: Sequence[float], k_c: Sequence[int]
) -> tuple[np.ndarray, np.ndarray]:
    """Objective matrix ``G = g g^T`` and basis Gram matrix ``S``."""
    g = g_vector(target, a, k_c)
    n = len(a)
    s = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            s[i, j] = s[j, i] = lf_overlap(a[i], a[j], int(k_c[i]) - int(k_c[j]), target.n_q)
    try:
        np.linalg.cholesky(s)
    except np.linalg.LinAlgError as exc:
        raise DegenerateBasisError(f"basis overlap matrix is singular: {exc}") from exc
    return np.outer(g, g), s


def _solve_rank1(g: np.ndarray, s: np.ndarray) -> tuple[np.ndarray, float]:
    try:
        cho = scipy.linalg.cho_factor(s)
    except scipy.linalg.LinAlgError as exc:
        raise DegenerateBasisError(f"basis overlap matrix is singular: {exc}") from exc
    x = scipy.linalg.cho_solve(cho, g)
    f = float(g @ x)
    if f < 1e-30:
        d = np.zeros_like(g)
        d[0] = 1.0
        return d, max(f, 0.0)
    return x / math.sqrt(f), f


def optimal_coeffs(G: np.ndarray, S: np.ndarray) -> tuple[np.ndarray, float]:
    """Best coefficients for fixed rates/centers: ``d`` with ``d^T S d = 1`` and the overlap ``F``.

    Exploits the rank-one structure of ``G``; equivalent to picking the top
    generalized eigenpair of ``(G, S)``.
    """
    diag = np.diag(G)
    j = int(np.argmax(diag))
    if diag[j] <= 0:
        g = np.zeros(G.shape[0])
    else:
        g = G[:, j] / math.sqrt(diag[j])
    return _solve_rank1(g, S)


def optimal_coeffs_eig(G: np.ndarray, S: np.ndarray) -> tuple[np.ndarray, float]:
    """Dense generalized eigensolver route; cross-check for :func:`optimal_coeffs`."""
    try:
        vals, vecs = scipy.linalg.eigh(G, S)
    except scipy.linalg.LinAlgError as exc:
        raise DegenerateBasisError(f"basis overlap matrix is singular: {exc}") from exc
    return vecs[:, -1], float(vals[-1])


def _objective(target: TargetFunction, a: np.ndarray, k_c: np.ndarray) -> tuple[np.ndarray, float]:
    g = g_vector(target, a, k_c)
    n = len(a)
    s = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            s[i, j] = s[j, i] = lf_overlap(a[i], a[j], int(k_c[i]) - int(k_c[j]), target.n_q)
    return _solve_rank1(g, s)


def golden_section_max(f, lo: float, hi: float, steps: int = GOLDEN_STEPS) -> tuple[float, float]:
    """Derivative-free maximization on ``[lo, hi]`` with a fixed shrink count."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(steps):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def optimize_decay_rates(
    target: TargetFunction,
    k_c: Sequence[int],
    a_init: Sequence[float],
    n_iters: int,
    a_min: float = A_MIN,
    a_max: float = A_MAX,
) -> tuple[np.ndarray, np.ndarray, float]:
    """Coordinate-wise rate refinement at fixed centers; the overlap never decreases."""
    k_c = np.asarray(k_c, dtype=int)
    a = np.asarray(a_init, dtype=float).copy()
    _, f_best = _objective(target, a, k_c)
    for _ in range(n_iters):
        for l in range(len(a)):

            def f_of_rate(x, l=l):
                trial = a.copy()
                trial[l] = x
                try:
                    return _objective(target, trial, k_c)[1]
                except DegenerateBasisError:
                    return -math.inf

            x, fx = golden_section_max(f_of_rate, a_min, a_max)
            if fx > f_best:
                if x <= a_min * (1 + 1e-9):
                    logger.warning("decay rate %d clamped at the bracket floor %g", l, a_min)
                a[l] = x
                f_best = fx
    d, f_final = _objective(target, a, k_c)
    return a, d, f_final


def default_centers(target: TargetFunction, n_loc: int) -> np.ndarray:
    """Greedy peak picking: strongest samples, each shadowing a neighborhood."""
    n = target.n_points
    radius = max(1, n // (2 * n_loc))
    mag = np.abs(target.samples).copy()
    picks = np.empty(n_loc, dtype=int)
    for i in range(n_loc):
        j = int(np.argmax(mag))
        picks[i] = j
        for p in range(j - radius, j + radius + 1):
            mag[p % n] = -1.0
    return picks


def fit(target: TargetFunction, config: FitConfig) -> FitResult:
    """Metropolis walk over integer centers with nested rate/coefficient optimization."""
    n = target.n_points
    n_loc = config.n_loc
    if config.k_c_init is not None:
        k_c = np.asarray(config.k_c_init, dtype=int) % n
        if k_c.size != n_loc:
            raise ValueError("k_c_init length must equal n_loc")
    else:
        k_c = default_centers(target, n_loc)
    if config.a_init is not None:
        a = np.asarray(config.a_init, dtype=float).copy()
        if a.size != n_loc:
            raise ValueError("a_init length must equal n_loc")
    else:
        a = np.ones(n_loc)

    rng = np.random.default_rng(config.seed)
    f_cur = -math.inf
    best: Optional[tuple[np.ndarray, np.ndarray, np.ndarray, float]] = None
    trace: list[tuple[float, bool]] = []

    for i in range(config.n_metropolis):
        l = int(rng.integers(0, n_loc))
        move = int(rng.integers(-1, 2))
        k_trial = k_c.copy()
        k_trial[l] = (k_trial[l] + move) % n
        try:
            a_trial, d_trial, f_trial = optimize_decay_rates(
                target, k_trial, a, config.n_rate_iters
            )
        except DegenerateBasisError:
            if i == 0:
                raise
            trace.append((-math.inf, False))
            continue

        if i == 0:
            accept = True
        else:
            u = rng.random()
            exponent = -config.beta * (f_cur - f_trial)
            accept = u < (1.0 if exponent >= 0 else math.exp(exponent))

        trace.append((f_trial, accept))
        if accept:
            k_c, a, f_cur = k_trial, a_trial, f_trial
        if best is None or f_trial > best[3]:
            best = (d_trial, a_trial, k_trial, f_trial)

    d_best, a_best, k_best, f_best = best
    return FitResult(
        d=d_best,
        a=a_best,
        k_c=k_best,
        F=f_best,
        trace=tuple(trace),
        seed=config.seed,
    )


# ---------------------------------------------------------------------------
# target ingestion and the bundled demo target
# ---------------------------------------------------------------------------

def two_gaussian_samples(n_q: int = 5) -> np.ndarray:
    """The demo target: a tall Gaussian at 16 plus a 0.4-weight one at 8 (unnormalized)."""
    j = np.arange(1 << n_q, dtype=float)
    return np.exp(-((j - 16.0) ** 2) / 9.0) + 0.4 * np.exp(-((j - 8.0) ** 2) / 4.0)


def load_target_csv(path: str | Path) -> TargetFunction:
    """Read ``index,value`` rows (header optional); indices must cover 0..N-1."""
    pairs = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        idx_s, val_s = [tok.strip() for tok in line.split(",")[:2]]
        try:
            pairs.append((int(idx_s), float(val_s)))
        except ValueError:
            continue  # header row
    if not pairs:
        raise ValueError(f"no data rows in {path}")
    n = len(pairs)
    n_q = n.bit_length() - 1
    if 1 << n_q != n:
        raise ValueError(f"{path}: {n} rows is not a power of two")
    samples = np.zeros(n)
    seen = set()
    for idx, val in pairs:
        if idx in seen or not 0 <= idx < n:
            raise ValueError(f"{path}: bad or duplicate index {idx}")
        seen.add(idx)
        samples[idx] = val
    return TargetFunction(n_q, samples)


def load_target_json(path: str | Path) -> TargetFunction:
    """Read a JSON array of sample values."""
    values = json.loads(Path(path).read_text())
    if not isinstance(values, list):
        raise ValueError(f"{path}: expected a JSON array of numbers")
    arr = np.asarray(values, dtype=float)
    n_q = int(arr.size).bit_length() - 1
    if 1 << n_q != arr.size:
        raise ValueError(f"{path}: {arr.size} values is not a power of two")
    return TargetFunction(n_q, arr)
