"""Planning and error analysis for amplitude reduction + amplification.

Amplification alone rotates the success weight ``w`` to
``sin^2((2m + 1) arcsin(sqrt(w)))``, which generically overshoots or
undershoots 1.  Reducing ``w`` first with one rotated ancilla to the nearest
exactly-amplifiable value ``sin^2(pi / (4 m + 2))`` makes the combination land
on 1 exactly; this module computes those parameters, both for the true weight
and for an erroneously estimated one, and evaluates the resulting failure
weights with exact trigonometry (no series expansion).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .locfuncs import LCSpec, lc_norm_squared


@dataclass(frozen=True)
class QaraPlan:
    """Reduction angle and iteration count that determinize a success weight ``w``."""

    w: float
    theta_w: float
    m_opt: int
    theta_ar_opt: float
    lam: Optional[float] = None

    def reduced_weight(self) -> float:
        return self.w * math.cos(self.theta_ar_opt) ** 2


@dataclass(frozen=True)
class ErroneousEstimate:
    """True weight plus a signed estimation error ``delta_w`` with ``|delta_w| < w``."""

    w_true: float
    delta_w: float

    def __post_init__(self):
        if not 0.0 < self.w_true <= 1.0:
            raise ValueError(f"w_true must lie in (0, 1], got {self.w_true}")
        if abs(self.delta_w) >= self.w_true:
            raise ValueError(
                f"|delta_w| = {abs(self.delta_w)} must be smaller than w = {self.w_true}"
            )
        if not 0.0 < self.w_true + self.delta_w <= 1.0:
            raise ValueError("estimated weight must stay in (0, 1]")

    @property
    def w_est(self) -> float:
        return self.w_true + self.delta_w


def amplified_weight(w: float, m: int) -> float:
    """Success weight after ``m`` amplification steps."""
    if not 0.0 < w <= 1.0:
        raise ValueError(f"w must lie in (0, 1], got {w}")
    if m < 0:
        raise ValueError(f"m must be non-negative, got {m}")
    return math.sin((2 * m + 1) * math.asin(math.sqrt(w))) ** 2


def plan_exact(w: float, lam: Optional[float] = None) -> QaraPlan:
    """Smallest iteration count and matching reduction angle for exact amplification.

    ``m_opt = ceil(pi / (4 theta_w) - 1/2)`` with ``theta_w = arcsin(sqrt(w))``;
    ``w = 1`` degenerates to no amplification and no reduction.  Ceiling ties
    are taken as written (an exactly reachable ``theta_w`` gets a zero
    reduction angle).
    """
    if not 0.0 < w <= 1.0:
        raise ValueError(f"w must lie in (0, 1], got {w}")
    theta_w = math.asin(math.sqrt(w))
    if w == 1.0:
        return QaraPlan(w=1.0, theta_w=theta_w, m_opt=0, theta_ar_opt=0.0, lam=lam)
    m_opt = math.ceil(math.pi / (4.0 * theta_w) - 0.5)
    ratio = math.sin(math.pi / (4 * m_opt + 2)) / math.sqrt(w)
    theta_ar = math.acos(min(1.0, ratio))
    return QaraPlan(w=w, theta_w=theta_w, m_opt=m_opt, theta_ar_opt=theta_ar, lam=lam)


def analytic_success_weight(lc: LCSpec) -> float:
    """Success weight of the probabilistic encoder, ``1 / (sum_l |d_l|)^2``.

    Known in closed form from the prepared coefficient amplitudes, so no
    amplitude estimation is ever needed to plan the deterministic circuit.
    """
    norm2 = lc_norm_squared(lc)
    if abs(norm2 - 1.0) > 1e-8:
        raise ValueError(f"LC must be normalized (|psi|^2 = {norm2!r})")
    # lam >= 1 holds exactly (triangle inequality on unit basis states); the
    # min absorbs float rounding of the normalized coefficients
    return min(1.0, 1.0 / lc.lam**2)


def plan_for_lc(lc: LCSpec) -> QaraPlan:
    """Exact determinization plan for an LC, with its weight taken analytically."""
    return plan_exact(analytic_success_weight(lc), lam=lc.lam)


def plan_erroneous(est: ErroneousEstimate) -> QaraPlan:
    """Plan computed from the estimated weight exactly as :func:`plan_exact` would."""
    return plan_exact(est.w_est)


def failure_weight_after_qara(est: ErroneousEstimate) -> float:
    """Failure weight when the reduce-then-amplify pipeline runs on wrong parameters.

    The reduction angle and the iteration count both come from the estimate;
    the physics applies them to the true weight.  Exact evaluation, no Taylor
    truncation.
    """
    plan = plan_erroneous(est)
    w_ar = est.w_true * math.cos(plan.theta_ar_opt) ** 2
    return 1.0 - amplified_weight(w_ar, plan.m_opt)


def epsilon_qara(delta_ratio: float) -> float:
    """Small-``w`` ceiling of the failure weight, ``sin^2(pi delta_ratio / 4)``."""
    if abs(delta_ratio) >= 1.0:
        raise ValueError(f"|delta_ratio| must be below 1, got {delta_ratio}")
    return math.sin(math.pi * delta_ratio / 4.0) ** 2


def qaa_only_failure(est: ErroneousEstimate) -> float:
    """Failure weight when the estimated iteration count runs without reduction."""
    plan = plan_erroneous(est)
    return 1.0 - amplified_weight(est.w_true, plan.m_opt)


@dataclass(frozen=True)
class SweepRow:
    w: float
    delta_ratio: float
    wf_qara: float
    wf_qaa: float
    eps_qara: float


def sweep_fig1c(delta_ratios: Iterable[float], w_grid: Sequence[float]) -> list[SweepRow]:
    """Failure-weight table over a ``(delta_w / w, w)`` grid, one row per point."""
    rows = []
    for r in delta_ratios:
        eps = epsilon_qara(r)
        for w in w_grid:
            est = ErroneousEstimate(w_true=w, delta_w=r * w)
            rows.append(
                SweepRow(
                    w=w,
                    delta_ratio=r,
                    wf_qara=failure_weight_after_qara(est),
                    wf_qaa=qaa_only_failure(est),
                    eps_qara=eps,
                )
            )
    return rows
