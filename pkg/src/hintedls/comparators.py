"""Benchmark predictors: Luenberger observers and fixed-gain filters.

The comparator class consists of observer gains ``L`` whose closed loop
``A_L = A - L C`` decays geometrically, quantified by a pair ``(kappa,
gamma)`` with ``|A_L^k| <= kappa (1 - gamma)^k``.  Certification checks the
spectral radius, the gain norm, and that empirical decay bound on a horizon
of about ``10 / gamma`` steps; the decay constant is exactly what the regret
and truncation bounds consume.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .exceptions import (
    DivergenceError,
    EmptyGridError,
    InvalidLevelError,
    NotObservableError,
)
from .predictor import build_feature
from .systems import NoiseModel, SystemSpec, Trajectory

_ROLLOUT_LIMIT = 1e12
_DEADBEAT_TOL = 1e-12


@dataclass(frozen=True)
class LuenbergerGain:
    """An observer gain with its (claimed) decay certificate."""

    L: np.ndarray  # (n, p)
    kappa: float
    gamma: float
    certified: bool
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "L", linalg.as_matrix(self.L, "L"))


def closed_loop(system: SystemSpec, gain) -> np.ndarray:
    gain = linalg.as_matrix(gain, "L")
    return system.a - gain @ system.c


def decay_horizon(gamma: float) -> int:
    return max(1, math.ceil(10.0 / gamma))


def certify_gain(system: SystemSpec, gain, kappa: float, gamma: float) -> LuenbergerGain:
    """Check the three-part decay certificate for ``gain`` against ``(kappa, gamma)``.

    Certified iff the closed-loop spectral radius is at most ``1 - gamma``
    (tolerance 1e-9), ``|L| <= kappa``, and
    ``|A_L^k| <= kappa (1 - gamma)^k`` holds empirically for
    ``k <= ceil(10 / gamma)`` with a 1e-6 relative allowance.
    """
    gain = linalg.as_matrix(gain, "L")
    if not 0.0 < gamma <= 1.0:
        raise ValueError("gamma must lie in (0, 1]")
    a_l = closed_loop(system, gain)
    ok = linalg.eigenvalues_small(a_l).max_abs <= 1.0 - gamma + 1e-9
    ok = ok and linalg.operator_norm(gain) <= kappa * (1.0 + 1e-12)
    if ok:
        decay = 1.0 - gamma
        power = np.eye(system.n)
        for k in range(1, decay_horizon(gamma) + 1):
            power = power @ a_l
            norm = linalg.operator_norm(power)
            if decay == 0.0:
                if norm > _DEADBEAT_TOL:
                    ok = False
                    break
            elif norm > kappa * decay**k * (1.0 + 1e-6):
                ok = False
                break
    return LuenbergerGain(L=gain, kappa=kappa, gamma=gamma, certified=bool(ok))


def empirical_decay_kappa(system: SystemSpec, gain, gamma: float) -> float:
    """Smallest ``kappa`` passing the empirical decay check (inf if none)."""
    gain = linalg.as_matrix(gain, "L")
    a_l = closed_loop(system, gain)
    decay = 1.0 - gamma
    worst = max(1.0, linalg.operator_norm(gain))
    power = np.eye(system.n)
    for k in range(1, decay_horizon(gamma) + 1):
        power = power @ a_l
        norm = linalg.operator_norm(power)
        if decay == 0.0:
            if norm > _DEADBEAT_TOL:
                return float("inf")
        else:
            worst = max(worst, norm / decay**k)
    return worst


def _observability_matrix(system: SystemSpec) -> np.ndarray:
    blocks = []
    power = np.eye(system.n)
    for _ in range(system.n):
        blocks.append(system.c @ power)
        power = power @ system.a
    return np.vstack(blocks)


def design_gain(system: SystemSpec, target_gamma: float, label: str = "") -> LuenbergerGain:
    """Place all closed-loop eigenvalues at ``1 - target_gamma`` (real axis).

    Ackermann's formula on the observability matrix; limited to single-output
    systems with ``n <= 4``, which covers every built-in system.  The returned
    certificate's ``kappa`` is the smallest value passing the empirical decay
    check at ``target_gamma``.
    """
    if not 0.0 < target_gamma <= 1.0:
        raise ValueError("target_gamma must lie in (0, 1]")
    if system.p != 1:
        raise NotObservableError("pole placement implemented for single-output systems")
    if system.n > 4:
        raise ValueError("pole placement limited to n <= 4")
    obs = _observability_matrix(system)
    svals = np.linalg.svd(obs, compute_uv=False)
    if svals[-1] <= 1e-9 * max(svals[0], 1.0):
        raise NotObservableError("observability matrix is rank-deficient")
    pole = 1.0 - target_gamma
    # phi(A) for phi(z) = (z - pole)^n
    phi = np.linalg.matrix_power(system.a - pole * np.eye(system.n), system.n)
    selector = np.zeros(system.n)
    selector[-1] = 1.0
    gain = (phi @ np.linalg.solve(obs, np.eye(system.n)) @ selector).reshape(system.n, 1)
    kappa = empirical_decay_kappa(system, gain, target_gamma)
    if not np.isfinite(kappa):
        return LuenbergerGain(L=gain, kappa=float("inf"), gamma=target_gamma,
                              certified=False, label=label)
    certified = certify_gain(system, gain, kappa * (1.0 + 1e-9), target_gamma)
    return LuenbergerGain(L=gain, kappa=certified.kappa, gamma=target_gamma,
                          certified=certified.certified, label=label)


def luenberger_rollout(system: SystemSpec, gain, outputs) -> np.ndarray:
    """Observer predictions ``C x_t`` along a fixed output sequence.

    The internal state is driven by the true outputs:
    ``x_{t+1} = A_L x_t + L y_t`` from ``x_0 = 0``, and the prediction for
    round ``t`` is emitted before ``y_t`` is consumed.
    """
    gain = linalg.as_matrix(gain, "L")
    y = np.atleast_2d(np.asarray(outputs, dtype=float))
    a_l = closed_loop(system, gain)
    preds = np.zeros_like(y)
    x = np.zeros(system.n)
    for t in range(y.shape[0]):
        preds[t] = system.c @ x
        x = a_l @ x + gain @ y[t]
        if np.max(np.abs(x)) > _ROLLOUT_LIMIT:
            raise DivergenceError(f"observer state exceeded {_ROLLOUT_LIMIT:g} at t={t + 1}")
    return preds


def luenberger_error_recursion(system: SystemSpec, gain, trajectory: Trajectory) -> np.ndarray:
    """Estimation errors ``e_t = x_t - xhat_t`` replayed from stored noises:
    ``e_{t+1} = A_L e_t + w_t - L v_t`` with ``v_0 = 0``."""
    gain = linalg.as_matrix(gain, "L")
    a_l = closed_loop(system, gain)
    errors = np.zeros((trajectory.horizon + 1, system.n))
    for t in range(trajectory.horizon):
        errors[t + 1] = a_l @ errors[t] + trajectory.w(t) - gain @ trajectory.v(t)
    return errors


def truncated_matrix(system: SystemSpec, gain, memory: int) -> np.ndarray:
    """Finite-memory comparator matrix ``[C L, C A_L L, ..., C A_L^{H-1} L]``."""
    gain = linalg.as_matrix(gain, "L")
    a_l = closed_loop(system, gain)
    powers = linalg.mat_power_seq(a_l, memory - 1)
    return np.hstack([system.c @ powers[k] @ gain for k in range(memory)])


def truncated_rollout(system: SystemSpec, gain, memory: int, outputs) -> np.ndarray:
    """Predictions of the truncated observer ``M_L z_t`` along a sequence.

    Exactly equals the full rollout for ``t <= memory`` (no tail discarded)."""
    y = np.atleast_2d(np.asarray(outputs, dtype=float))
    m_l = truncated_matrix(system, gain, memory)
    preds = np.zeros_like(y)
    for t in range(1, y.shape[0] + 1):
        z = build_feature(y[: t - 1], t, memory, system.p)
        preds[t - 1] = m_l @ z
    return preds


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned lattice over the entries of the gain matrix."""

    low: float = -2.0
    high: float = 2.0
    num: int = 41

    def axis(self) -> np.ndarray:
        return np.linspace(self.low, self.high, self.num)


@dataclass
class BestInHindsightResult:
    """Running best-in-hindsight comparator over a certified gain lattice."""

    gains: list[np.ndarray]  # certified candidates, lattice order
    lattice_indices: np.ndarray  # (Nc,) flat indices into the full lattice
    best_index: np.ndarray  # (T,) argmin into ``gains`` per prefix
    best_cumulative: np.ndarray  # (T,) min cumulative loss per prefix
    final_losses: np.ndarray  # (Nc,) cumulative loss at T per candidate
    kappa: float = 1.0
    gamma: float = 1.0

    @property
    def num_certified(self) -> int:
        return len(self.gains)

    def best_gain(self, t: int | None = None) -> np.ndarray:
        idx = self.best_index[-1 if t is None else t - 1]
        return self.gains[idx]

    def stepwise_comparator_losses(self) -> np.ndarray:
        """Increments of the running-best cumulative loss; these sum to the
        best-in-hindsight cumulative loss at every prefix."""
        return np.diff(self.best_cumulative, prepend=0.0)


def _batch_radius(a_l: np.ndarray) -> np.ndarray:
    """Spectral radii of a stack of square matrices, matching the scalar
    eigenvalue path (clamped closed form for n = 2)."""
    if a_l.shape[1] == 2:
        tr = a_l[:, 0, 0] + a_l[:, 1, 1]
        det = a_l[:, 0, 0] * a_l[:, 1, 1] - a_l[:, 0, 1] * a_l[:, 1, 0]
        disc = tr * tr / 4.0 - det
        scale = np.abs(a_l[:, 0, 0] * a_l[:, 1, 1]) + np.abs(a_l[:, 0, 1] * a_l[:, 1, 0]) \
            + tr * tr / 4.0
        disc = np.where(np.abs(disc) <= 16.0 * np.finfo(float).eps * scale, 0.0, disc)
        half = tr / 2.0
        real = disc >= 0.0
        root = np.sqrt(np.abs(disc))
        radius_real = np.maximum(np.abs(half + root), np.abs(half - root))
        radius_complex = np.sqrt(half * half + np.abs(disc))
        return np.where(real, radius_real, radius_complex)
    return np.max(np.abs(np.linalg.eigvals(a_l)), axis=1)


def _batch_certify(system: SystemSpec, candidates: np.ndarray, kappa: float,
                   gamma: float) -> np.ndarray:
    """Vectorized version of :func:`certify_gain` over (N, n, p) candidates."""
    a_l = system.a[None] - candidates @ system.c
    rho = _batch_radius(a_l)
    ok = rho <= 1.0 - gamma + 1e-9
    gain_norm = np.linalg.svd(candidates, compute_uv=False)[:, 0]
    ok &= gain_norm <= kappa * (1.0 + 1e-12)
    decay = 1.0 - gamma
    power = np.broadcast_to(np.eye(system.n), a_l.shape).copy()
    alive = ok.copy()
    for k in range(1, decay_horizon(gamma) + 1):
        if not alive.any():
            break
        power[alive] = power[alive] @ a_l[alive]
        norms = np.linalg.svd(power[alive], compute_uv=False)[:, 0]
        if decay == 0.0:
            bad = norms > _DEADBEAT_TOL
        else:
            bad = norms > kappa * decay**k * (1.0 + 1e-6)
        idx = np.flatnonzero(alive)
        ok[idx[bad]] = False
        alive[idx[bad]] = False
    return ok


def best_in_hindsight(system: SystemSpec, grid: GridSpec, outputs, kappa: float,
                      gamma: float) -> BestInHindsightResult:
    """Grid search for the running best Luenberger gain.

    Every lattice point that certifies against ``(kappa, gamma)`` is rolled
    out once over the whole output sequence; the result records, for each
    prefix length, the candidate with the smallest cumulative loss (ties go
    to the lowest lattice index).
    """
    y = np.atleast_2d(np.asarray(outputs, dtype=float))
    horizon = y.shape[0]
    axes = [grid.axis()] * (system.n * system.p)
    lattice = np.array(list(itertools.product(*axes)))
    candidates = lattice.reshape(-1, system.n, system.p)
    certified = _batch_certify(system, candidates, kappa, gamma)
    if not certified.any():
        raise EmptyGridError("no grid candidate passed certification")
    keep = np.flatnonzero(certified)
    gains = candidates[keep]
    a_l = system.a[None] - gains @ system.c
    x = np.zeros((gains.shape[0], system.n))
    cum = np.zeros(gains.shape[0])
    best_index = np.zeros(horizon, dtype=int)
    best_cumulative = np.zeros(horizon)
    for t in range(horizon):
        preds = x @ system.c.T  # (Nc, p)
        cum += np.sum((preds - y[t]) ** 2, axis=1)
        idx = int(np.argmin(cum))  # argmin keeps the lowest lattice index on ties
        best_index[t] = idx
        best_cumulative[t] = cum[idx]
        x = np.einsum("nij,nj->ni", a_l, x) + np.einsum("nip,p->ni", gains, y[t])
    return BestInHindsightResult(
        gains=[g for g in gains],
        lattice_indices=keep,
        best_index=best_index,
        best_cumulative=best_cumulative,
        final_losses=cum,
        kappa=kappa,
        gamma=gamma,
    )


def rms_covariance(model: NoiseModel) -> tuple[np.ndarray, np.ndarray]:
    """Stationary per-coordinate second moments of the disturbance model,
    as diagonal covariance matrices ``(Q, R)``.

    Bias contributes its square, a sinusoid half its squared amplitude, and a
    uniform component a third of its squared bound; Gaussian components
    contribute their variance directly.
    """
    if model.kind == "gaussian":
        q = np.eye(model.n) * model.uniform_w**2
        r = np.eye(model.p) * model.uniform_v**2
        return q, r
    q = np.diag(model.bias_w**2 + model.amp_w**2 / 2.0 + model.uniform_w**2 / 3.0)
    r = np.diag(model.bias_v**2 + model.amp_v**2 / 2.0 + model.uniform_v**2 / 3.0)
    return q, r


def _certified_from_dare(system: SystemSpec, gain: np.ndarray, label: str) -> LuenbergerGain:
    rho = linalg.eigenvalues_small(closed_loop(system, gain)).max_abs
    gamma = min(1.0, max(1e-6, 1.0 - rho))
    kappa = empirical_decay_kappa(system, gain, gamma)
    if not np.isfinite(kappa):
        return LuenbergerGain(L=gain, kappa=float("inf"), gamma=gamma,
                              certified=False, label=label)
    out = certify_gain(system, gain, kappa * (1.0 + 1e-9), gamma)
    return LuenbergerGain(L=gain, kappa=out.kappa, gamma=gamma,
                          certified=out.certified, label=label)


def kalman_gain(system: SystemSpec, q, r) -> LuenbergerGain:
    """Steady-state predictor gain for covariances ``(Q, R)``."""
    _, gain = linalg.solve_dare(system.a, system.c, q, r)
    return _certified_from_dare(system, gain, "kalman")


def hinf_gain(system: SystemSpec, q, r, level: float = 1.0) -> LuenbergerGain:
    """Worst-case-leaning fixed gain: the steady-state design with process
    covariance inflated to ``Q * (1 + level)``."""
    if level < 0:
        raise InvalidLevelError("level must be >= 0")
    q = linalg.as_matrix(q, "Q") * (1.0 + level)
    _, gain = linalg.solve_dare(system.a, system.c, q, r)
    return _certified_from_dare(system, gain, "hinf")
