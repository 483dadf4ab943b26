"""Predictive hint constructions.

A hint provider produces a guess for the upcoming output from public
information only: the observation history, and for the model-based provider
the system matrices plus an observer gain.  Providers are per-stream state
machines; ``reset`` rewinds them to the start of a stream.

Polynomial providers realize hints of the form
``hint_t = -(c_1 y_{t-1} + ... + c_m y_{t-m})`` for a monic coefficient list
``(1, c_1, ..., c_m)``.  Choosing the coefficients so that ``q(A) = 0`` on
the marginal modes of the transition matrix keeps the residual
``y_t - hint_t`` bounded even when the trajectory itself grows:

* ``diff_coeffs(r)`` expands ``(z^2 - 1)^r``, killing real eigenvalues +-1
  with Jordan blocks up to size ``r`` (``r = 1`` is the two-lag filter
  ``hint_t = y_{t-2}``);
* ``cayley_hamilton_coeffs`` builds the monic polynomial with given roots,
  e.g. the characteristic polynomial when the spectrum is known;
* ``rotation_annihilator_coeffs`` expands ``(z^2 - 2 cos(theta) z + 1)^r``
  for complex unit-circle pairs ``e^{+-i theta}`` of known angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .predictor import PolsState
from .systems import SystemSpec


class HintProvider:
    """Base class; subclasses implement :meth:`hint`."""

    def reset(self) -> None:
        """Rewind per-stream state; default is stateless."""

    def hint(self, t: int, history: np.ndarray, state: PolsState | None = None,
             feature: np.ndarray | None = None) -> np.ndarray:
        raise NotImplementedError


class ZeroHint(HintProvider):
    """Always guesses zero; reduces the learner to the VAW forecaster."""

    def __init__(self, output_dim: int):
        self.output_dim = output_dim

    def hint(self, t, history, state=None, feature=None):
        return np.zeros(self.output_dim)


class SelfConsistentHint(HintProvider):
    """Uses the learner's own committed prediction as the hint.

    This collapses the hinted update to plain online ridge regression: the
    transient predictor equals the committed one, so the learner predicts
    ``M_{t-1} z_t``.
    """

    def hint(self, t, history, state=None, feature=None):
        if state is None or feature is None:
            raise ValueError("self-consistent hint needs the learner state and feature")
        return state.M @ feature


def polynomial_hint(coeffs, history: np.ndarray, t: int) -> np.ndarray:
    """``-(c_1 y_{t-1} + ... + c_m y_{t-m})`` with zero padding below index 1."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.size == 0 or coeffs[0] != 1.0:
        raise ValueError("coefficient list must be monic (c_0 = 1)")
    hist = np.asarray(history, dtype=float)
    if hist.ndim == 1:
        hist = hist.reshape(-1, 1)
    out = np.zeros(hist.shape[1] if hist.shape[1] else 1)
    for i in range(1, coeffs.size):
        idx = t - i
        if idx >= 1 and idx - 1 < hist.shape[0]:
            out -= coeffs[i] * hist[idx - 1]
    return out


class PolynomialHint(HintProvider):
    """Fixed linear combination of recent outputs."""

    def __init__(self, coeffs):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.size == 0 or coeffs[0] != 1.0:
            raise ValueError("coefficient list must be monic (c_0 = 1)")
        self.coeffs = coeffs

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    def hint(self, t, history, state=None, feature=None):
        return polynomial_hint(self.coeffs, history, t)


class LuenbergerHint(HintProvider):
    """Observer-based hint ``C x`` where ``x`` tracks the latent state.

    The internal state advances with the previous output at the start of each
    round: ``x <- (A - L C) x + L y_{t-1}`` (no-op on the first round), which
    is the same recursion as feeding each output in at the end of the prior
    round.  Requires a stabilizing gain.
    """

    def __init__(self, system: SystemSpec, gain):
        gain = linalg.as_matrix(gain, "gain")
        if gain.shape != (system.n, system.p):
            raise ValueError(f"gain must be {system.n}x{system.p}")
        closed_loop = system.a - gain @ system.c
        if linalg.eigenvalues_small(closed_loop).max_abs >= 1.0:
            raise ValueError("gain is not stabilizing")
        self.system = system
        self.gain = gain
        self.closed_loop = closed_loop
        self._x = np.zeros(system.n)

    def reset(self) -> None:
        self._x = np.zeros(self.system.n)

    def hint(self, t, history, state=None, feature=None):
        hist = np.asarray(history, dtype=float)
        if hist.ndim == 1:
            hist = hist.reshape(-1, 1)
        if t >= 2:
            y_prev = hist[t - 2]
            self._x = self.closed_loop @ self._x + self.gain @ y_prev
        return self.system.c @ self._x


def diff_coeffs(order: int) -> np.ndarray:
    """Coefficients of ``(z^2 - 1)^order``; exact binomial integers.

    Degree ``2*order`` with zeros at odd positions and l1 norm ``2^order``.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    coeffs = np.zeros(2 * order + 1)
    for k in range(order + 1):
        coeffs[2 * k] = (-1) ** k * math.comb(order, k)
    return coeffs


def cayley_hamilton_coeffs(roots) -> np.ndarray:
    """Monic polynomial with the given (real or conjugate-paired) roots.

    Complex roots must appear with their conjugates; conjugate pairs are
    expanded as real quadratic factors so the result stays real.  Integer
    roots expand in exact integer arithmetic.
    """
    roots = [complex(r) for r in np.atleast_1d(np.asarray(roots, dtype=complex))]
    real_roots = sorted(r.real for r in roots if abs(r.imag) <= 1e-12)
    complex_roots = sorted(
        (r for r in roots if r.imag > 1e-12), key=lambda r: (r.real, r.imag)
    )
    lower = sorted(
        (r for r in roots if r.imag < -1e-12), key=lambda r: (r.real, -r.imag)
    )
    if len(lower) != len(complex_roots) or any(
        abs(a - b.conjugate()) > 1e-9 for a, b in zip(complex_roots, lower)
    ):
        raise ValueError("complex roots must come in conjugate pairs")
    coeffs = np.array([1.0])
    for root in real_roots:
        coeffs = np.convolve(coeffs, np.array([1.0, -root]))
    for root in complex_roots:
        factor = np.array([1.0, -2.0 * root.real, abs(root) ** 2])
        coeffs = np.convolve(coeffs, factor)
    return coeffs


def rotation_annihilator_coeffs(theta: float, order: int = 1) -> np.ndarray:
    """Expansion of ``(z^2 - 2 cos(theta) z + 1)^order`` for unit-circle pairs
    ``e^{+-i theta}`` with ``theta`` in (0, pi)."""
    if not 0.0 < theta < math.pi:
        raise ValueError("theta must lie in (0, pi)")
    if order < 1:
        raise ValueError("order must be >= 1")
    base = np.array([1.0, -2.0 * math.cos(theta), 1.0])
    coeffs = np.array([1.0])
    for _ in range(order):
        coeffs = np.convolve(coeffs, base)
    return coeffs


def lag_coeffs(lag: int) -> np.ndarray:
    """Coefficients of ``z^lag - 1``, i.e. the hint ``y_{t-lag}``."""
    if lag < 1:
        raise ValueError("lag must be >= 1")
    coeffs = np.zeros(lag + 1)
    coeffs[0] = 1.0
    coeffs[-1] = -1.0
    return coeffs


@dataclass
class ResidualTrace:
    """Per-step hint residuals and their running maximum norm."""

    deltas: np.ndarray  # (T, p)
    delta_max: np.ndarray  # (T,), nondecreasing

    @classmethod
    def from_deltas(cls, deltas) -> "ResidualTrace":
        deltas = np.atleast_2d(np.asarray(deltas, dtype=float))
        norms = np.linalg.norm(deltas, axis=1)
        return cls(deltas=deltas, delta_max=np.maximum.accumulate(norms))

    @property
    def final_max(self) -> float:
        return float(self.delta_max[-1]) if self.delta_max.size else 0.0
