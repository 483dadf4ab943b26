"""Hinted recursive least squares over stacked past outputs.

The learner keeps a predictor matrix ``M`` and the inverse regularized Gram
matrix ``P`` of the features seen so far.  Each round proceeds in two
phases, mirroring the prediction protocol in which the hint and feature are
available *before* the true output:

1. :func:`pols_step` folds the new feature into ``P`` (rank-one update),
   forms the transient hinted predictor
   ``M' = M + (hint - M z) K^T`` and returns its prediction ``M' z``.
2. :func:`pols_commit` applies the same gain to the revealed output,
   ``M <- M + (y - M z) K^T``, and advances the step counter.

The transient ``M'`` is recomputed from the committed ``M`` each round and
never retained.  With the self-consistent hint ``hint = M z`` the transient
equals the committed matrix and the scheme collapses to plain online ridge
regression; with a zero hint it is the Vovk-Azoury-Warmuth forecaster.

:func:`pols_closed_form` solves the underlying regularized normal equations
directly and is kept in the library as the verification oracle for the
recursion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg


@dataclass(frozen=True)
class PolsState:
    """Committed learner state after ``step`` observations."""

    M: np.ndarray  # (p, d) committed predictor matrix
    P: np.ndarray  # (d, d) inverse of lam*I + sum of feature outer products
    lam: float
    step: int

    @property
    def d(self) -> int:
        return self.P.shape[0]

    @property
    def p(self) -> int:
        return self.M.shape[0]


@dataclass(frozen=True)
class StagedStep:
    """Intermediate state between prediction and observation of round ``step``."""

    M_prev: np.ndarray
    P: np.ndarray  # already includes round ``step``'s feature
    K: np.ndarray
    z: np.ndarray
    hint: np.ndarray
    prediction: np.ndarray
    lam: float
    step: int


def fresh_state(output_dim: int, feature_dim: int, lam: float) -> PolsState:
    """Fresh state: ``M = 0`` and ``P = I / lam`` for arbitrary feature width.

    State is kept in extended precision: on marginally stable streams the
    feature Gram matrix reaches condition numbers around 1e10, where plain
    float64 recursion drifts visibly from the exact normal-equation solution.
    """
    if output_dim < 1 or feature_dim < 1:
        raise ValueError("output_dim and feature_dim must be >= 1")
    if lam <= 0:
        raise ValueError("lam must be positive")
    return PolsState(M=np.zeros((output_dim, feature_dim), dtype=np.longdouble),
                     P=np.eye(feature_dim, dtype=np.longdouble) / lam, lam=lam, step=0)


def init_state(output_dim: int, memory: int, lam: float) -> PolsState:
    """Fresh state for stacked-output features, ``d = output_dim * memory``."""
    if memory < 1:
        raise ValueError("memory must be >= 1")
    return fresh_state(output_dim, output_dim * memory, lam)


def build_feature(history: np.ndarray, t: int, memory: int, output_dim: int) -> np.ndarray:
    """Stack ``[y_{t-1}, ..., y_{t-memory}]`` into one feature vector.

    ``history`` holds rows ``y_1 .. y_k`` with ``k >= t - 1``; indices at or
    below zero contribute zero blocks.
    """
    hist = np.asarray(history, dtype=float)
    if hist.ndim == 1:
        hist = hist.reshape(-1, 1)
    if hist.size and hist.shape[1] != output_dim:
        raise ValueError("history width does not match output_dim")
    if t < 1:
        raise ValueError("t must be >= 1")
    if hist.shape[0] < t - 1:
        raise ValueError("history must contain y_1 .. y_{t-1}")
    z = np.zeros(output_dim * memory)
    for k in range(1, memory + 1):
        idx = t - k  # 1-based output index
        if idx >= 1:
            z[(k - 1) * output_dim : k * output_dim] = hist[idx - 1]
    return z


def pols_step(state: PolsState, z, hint) -> tuple[np.ndarray, StagedStep]:
    """Covariance update and hinted prediction for the next round."""
    z = linalg.as_vector(z, "z")
    hint = linalg.as_vector(hint, "hint")
    k, p_new = linalg.sherman_morrison(state.P, z)
    innovation = hint - state.M @ z
    m_pols = state.M + np.outer(innovation, k)
    prediction = m_pols @ z
    staged = StagedStep(
        M_prev=state.M, P=p_new, K=k, z=z, hint=hint,
        prediction=prediction, lam=state.lam, step=state.step + 1,
    )
    return prediction, staged


def pols_commit(staged: StagedStep, y) -> PolsState:
    """Fold the revealed output into the committed predictor."""
    y = linalg.as_vector(y, "y")
    innovation = y - staged.M_prev @ staged.z
    m_new = staged.M_prev + np.outer(innovation, staged.K)
    return PolsState(M=m_new, P=staged.P, lam=staged.lam, step=staged.step)


def transient_matrix(staged: StagedStep) -> np.ndarray:
    """The hinted predictor matrix used for round ``staged.step``'s prediction."""
    innovation = staged.hint - staged.M_prev @ staged.z
    return staged.M_prev + np.outer(innovation, staged.K)


def ols_step(state: PolsState, z) -> np.ndarray:
    """Prediction of plain online ridge regression: the committed ``M`` applied
    to ``z``.  Equivalent to a hinted step with the self-consistent hint."""
    z = linalg.as_vector(z, "z")
    return state.M @ z


def _gram(lam: float, features: np.ndarray, upto: int) -> np.ndarray:
    d = features.shape[1]
    g = lam * np.eye(d, dtype=np.longdouble)
    for s in range(upto):
        g += np.outer(features[s], features[s])
    return g


def pols_closed_form(lam: float, features, targets, hint) -> np.ndarray:
    """Direct normal-equation solution of the hinted ridge objective.

    ``features`` holds ``z_1 .. z_t`` row-wise, ``targets`` holds
    ``y_1 .. y_{t-1}`` and ``hint`` is the guess for ``y_t``.  Solves
    ``M (lam I + sum_{s<=t} z_s z_s^T) = sum_{s<t} y_s z_s^T + hint z_t^T``
    by Gaussian elimination in extended precision; the ridge term keeps the
    system nonsingular.
    """
    feats = np.atleast_2d(np.asarray(features, dtype=np.longdouble))
    targs = np.atleast_2d(np.asarray(targets, dtype=np.longdouble))
    hint = np.asarray(hint, dtype=np.longdouble).reshape(-1)
    t = feats.shape[0]
    if targs.shape[0] != t - 1:
        raise ValueError("targets must hold y_1 .. y_{t-1}")
    g = _gram(lam, feats, t)
    rhs = np.outer(hint, feats[t - 1])
    for s in range(t - 1):
        rhs += np.outer(targs[s], feats[s])
    return linalg.solve_gauss(g, rhs.T).T


def ols_matrix(lam: float, features, targets) -> np.ndarray:
    """Ridge-regression matrix ``B_{t-1} G_{t-1}^{-1}`` solved directly.

    ``features``/``targets`` hold ``z_1 .. z_{t-1}`` and ``y_1 .. y_{t-1}``
    row-wise; pass explicit ``(0, d)``/``(0, p)`` shapes for ``t = 1``.
    """
    feats = np.atleast_2d(np.asarray(features, dtype=np.longdouble))
    targs = np.atleast_2d(np.asarray(targets, dtype=np.longdouble))
    if targs.shape[0] != feats.shape[0]:
        raise ValueError("features and targets must have equal length")
    g = _gram(lam, feats, feats.shape[0])
    rhs = np.zeros((targs.shape[1], feats.shape[1]), dtype=np.longdouble)
    for s in range(feats.shape[0]):
        rhs += np.outer(targs[s], feats[s])
    return linalg.solve_gauss(g, rhs.T).T
