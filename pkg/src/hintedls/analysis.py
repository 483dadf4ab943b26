"""Regret metrics, theoretical bound calculators, and numerical oracles.

The bound calculators evaluate closed-form expressions in the problem
constants; they make no reference to realized data except through the
measured maximum hint residual.  The filtered power-series and residual
decomposition routines are brute-force recomputations used to verify the
structural identities the bounds rest on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .exceptions import DegenerateFitError, LengthMismatchError
from .systems import SystemSpec, Trajectory

RESIDUAL_BOUND_KINDS = ("luenberger_hint", "two_lag", "high_order_diff")


@dataclass
class RegretReport:
    """Per-step losses of learner and comparator with cumulative regret."""

    learner_losses: np.ndarray
    comparator_losses: np.ndarray
    cumulative_regret: np.ndarray
    delta_max_series: np.ndarray | None = None
    comparator_id: str = ""

    @property
    def final_regret(self) -> float:
        return float(self.cumulative_regret[-1])


def luenberger_regret(learner_predictions, comparator_predictions, outputs,
                      comparator_id: str = "") -> RegretReport:
    """Cumulative squared-loss gap between learner and comparator streams."""
    learner = np.atleast_2d(np.asarray(learner_predictions, dtype=float))
    comp = np.atleast_2d(np.asarray(comparator_predictions, dtype=float))
    y = np.atleast_2d(np.asarray(outputs, dtype=float))
    if not (learner.shape == comp.shape == y.shape):
        raise LengthMismatchError(
            f"shape mismatch: {learner.shape}, {comp.shape}, {y.shape}"
        )
    learner_losses = np.sum((learner - y) ** 2, axis=1)
    comparator_losses = np.sum((comp - y) ** 2, axis=1)
    return RegretReport(
        learner_losses=learner_losses,
        comparator_losses=comparator_losses,
        cumulative_regret=np.cumsum(learner_losses - comparator_losses),
        comparator_id=comparator_id,
    )


@dataclass
class BoundInputs:
    """Problem constants consumed by the closed-form bound calculators."""

    norm_C: float = 1.0
    p: int = 1
    n: int = 1
    r: int = 1
    kappa_A: float = 1.0
    kappa: float = 1.0
    gamma: float = 1.0
    kappa_tilde: float = 1.0
    gamma_tilde: float = 1.0
    C_w: float = 0.0
    C_v: float = 0.0
    C_y: float = 0.0
    lam: float = 1.0
    H: int = 1
    T: int = 1
    delta_max: float = 0.0


def truncation_constant(b: BoundInputs) -> float:
    """``C_trun = |C| kappa^2 C_y / gamma``."""
    return b.norm_C * b.kappa**2 * b.C_y / b.gamma


def prediction_error_constant(b: BoundInputs) -> float:
    """``C_pred = |C| kappa (C_w + kappa C_v) / gamma + C_v``."""
    return b.norm_C * b.kappa * (b.C_w + b.kappa * b.C_v) / b.gamma + b.C_v


def theorem2_bound(b: BoundInputs) -> float:
    """Residual-scaled regret bound against any certified comparator:

    ``lam |C|^2 kappa^4 p / gamma
      + delta_max^2 p H log(1 + C_y^2 (1+T)^(2r+1) / (lam p))
      + C_trun^2 + 2 C_pred C_trun``.
    """
    c_trun = truncation_constant(b)
    c_pred = prediction_error_constant(b)
    bias = b.lam * b.norm_C**2 * b.kappa**4 * b.p / b.gamma
    log_arg = 1.0 + b.C_y**2 * (1.0 + b.T) ** (2 * b.r + 1) / (b.lam * b.p)
    regression = b.delta_max**2 * b.p * b.H * math.log(log_arg)
    return bias + regression + c_trun**2 + 2.0 * c_pred * c_trun


def residual_bound(kind: str, b: BoundInputs) -> float:
    """Closed-form ceiling on the maximum hint residual.

    * ``luenberger_hint``: any stabilizing observer hint with certificate
      ``(kappa_tilde, gamma_tilde)``.
    * ``two_lag``: the universal two-lag filter on diagonalizable real
      spectra.
    * ``high_order_diff``: order-``r`` differencing on real-spectrum Jordan
      structure, with constants ``8^r`` and ``r (2 e^2)^r``.
    """
    if kind == "luenberger_hint":
        return (
            b.norm_C * b.kappa_tilde * (b.C_w + b.kappa_tilde * b.C_v) / b.gamma_tilde
            + b.C_v
        )
    if kind == "two_lag":
        return 2.0 * b.C_v + (1.0 + b.kappa_A + 2.0 * b.n * b.kappa_A) * b.norm_C * b.C_w
    if kind == "high_order_diff":
        h_r = 8.0**b.r
        k_r = b.r * (2.0 * math.e**2) ** b.r
        return 2.0**b.r * b.C_v + (h_r + k_r * b.n) * b.kappa_A * b.norm_C * b.C_w
    raise ValueError(f"kind must be one of {RESIDUAL_BOUND_KINDS}, got {kind!r}")


def filtered_power_sums(a, r: int, s_max: int) -> tuple[np.ndarray, float]:
    """Partial sums ``sum_{s<=k} |(A^2 - I)^r A^s|`` for k = 0..s_max.

    Returns the nondecreasing partial-sum sequence and the last increment
    (``|(A^2 - I)^r A^{s_max}|``) as a convergence diagnostic.  When the
    filter annihilates all marginal modes the increments decay geometrically.
    """
    a = linalg.as_matrix(a, "A")
    if s_max < 0:
        raise ValueError("s_max must be >= 0")
    filt = np.linalg.matrix_power(a @ a - np.eye(a.shape[0]), r)
    sums = np.zeros(s_max + 1)
    term = filt.copy()
    total = 0.0
    increment = 0.0
    for s in range(s_max + 1):
        increment = linalg.operator_norm(term)
        total += increment
        sums[s] = total
        term = term @ a
    return sums, increment


def residual_decomposition_check(system: SystemSpec, coeffs, trajectory: Trajectory) -> float:
    """Max entrywise gap between the direct filter residual and its
    noise-space decomposition, over all rounds.

    The direct residual at round t is ``sum_i c_i y_{t-i}``; the decomposition
    rebuilds it from stored disturbances as measurement term
    ``sum_i c_i v_{t-i}``, a short-memory window
    ``C sum_{s<m} (sum_{i<=s} c_i A^{s-i}) w_{t-1-s}``, and the filtered tail
    ``C sum_s q(A) A^s w_{t-m-1-s}``.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    m = coeffs.size - 1
    a, c = system.a, system.c
    horizon = trajectory.horizon
    y = trajectory.outputs

    # prefix coefficient matrices sum_{i<=s} c_i A^{s-i} for s < m
    powers = linalg.mat_power_seq(a, max(m - 1, 0))
    prefix = []
    for s in range(m):
        acc = np.zeros_like(a)
        for i in range(s + 1):
            acc += coeffs[i] * powers[s - i]
        prefix.append(acc)

    # q(A) A^s for s = 0..horizon; skip the tail entirely if q(A) vanishes
    q_a = sum(coeffs[i] * np.linalg.matrix_power(a, m - i) for i in range(m + 1))
    tail_mats: list[np.ndarray] = []
    if linalg.operator_norm(q_a) > 0.0:
        term = q_a
        for _ in range(horizon):
            tail_mats.append(term)
            term = term @ a

    worst = 0.0
    for t in range(1, horizon + 1):
        direct = np.zeros(system.p)
        for i in range(m + 1):
            idx = t - i
            if idx >= 1:
                direct += coeffs[i] * y[idx - 1]
        recon = np.zeros(system.p)
        for i in range(m + 1):
            recon += coeffs[i] * trajectory.v(t - i)
        for s in range(min(m, t)):
            recon += c @ (prefix[s] @ trajectory.w(t - 1 - s))
        if tail_mats:
            for s in range(t - m):
                recon += c @ (tail_mats[s] @ trajectory.w(t - m - 1 - s))
        worst = max(worst, float(np.max(np.abs(direct - recon))))
    return worst


@dataclass(frozen=True)
class LogFit:
    slope: float
    intercept: float
    r_squared: float


def log_fit(series, t_min: int = 1) -> LogFit:
    """Least squares of ``series[t]`` against ``log t`` over ``t >= t_min``.

    ``series[k]`` is the value at round ``t = k + 1``.  A constant series has
    zero residual and reports ``r_squared = 1`` by convention.
    """
    values = np.asarray(series, dtype=float).reshape(-1)
    if t_min < 1:
        raise ValueError("t_min must be >= 1")
    ts = np.arange(1, values.size + 1)
    mask = ts >= t_min
    if int(mask.sum()) < 10:
        raise DegenerateFitError("need at least 10 points at or above t_min")
    x = np.log(ts[mask].astype(float))
    v = values[mask]
    design = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(design, v, rcond=None)
    fitted = design @ coef
    ss_res = float(np.sum((v - fitted) ** 2))
    ss_tot = float(np.sum((v - v.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return LogFit(slope=float(coef[0]), intercept=float(coef[1]), r_squared=r2)


def linear_fit_r2(series, t_min: int = 1) -> float:
    """R-squared of a straight-line-in-t fit; used to flag linearly growing
    cumulative losses."""
    values = np.asarray(series, dtype=float).reshape(-1)
    ts = np.arange(1, values.size + 1)
    mask = ts >= t_min
    if int(mask.sum()) < 10:
        raise DegenerateFitError("need at least 10 points at or above t_min")
    x = ts[mask].astype(float)
    v = values[mask]
    design = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(design, v, rcond=None)
    fitted = design @ coef
    ss_res = float(np.sum((v - fitted) ** 2))
    ss_tot = float(np.sum((v - v.mean()) ** 2))
    return 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
