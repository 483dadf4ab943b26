"""Sequence-level forecasters over a prediction protocol guard.

These wrap the low-level recursion into estimator-style objects: constructor
arguments are hyperparameters, ``fit(Y)`` runs the online protocol over the
whole output sequence, and learned quantities land in trailing-underscore
attributes (``predictions_``, ``losses_``, ...).  ``get_params`` /
``set_params`` come from the scikit-learn base class so the forecasters
compose with standard tooling.

``SealedOutputs`` enforces the interaction order: each round's output can
only be obtained by surrendering a prediction for that round first, so no
code path inside the loop can peek at ``y_t`` before committing.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .exceptions import ProtocolViolationError
from .hints import HintProvider, ResidualTrace, ZeroHint
from .predictor import build_feature, init_state, pols_commit, pols_step
from .systems import SystemSpec
from . import comparators


class SealedOutputs:
    """Round-gated access to an output sequence.

    ``history()`` exposes only the rounds already revealed; ``reveal(pred)``
    registers the prediction for the current round and only then returns the
    true output.  Revealing twice without an intervening round, or asking for
    more rounds than exist, raises ``ProtocolViolationError``.
    """

    def __init__(self, outputs: np.ndarray):
        self._y = np.atleast_2d(np.asarray(outputs, dtype=float))
        self._revealed = 0

    @property
    def horizon(self) -> int:
        return self._y.shape[0]

    @property
    def output_dim(self) -> int:
        return self._y.shape[1]

    @property
    def current_round(self) -> int:
        """1-based index of the round awaiting a prediction."""
        return self._revealed + 1

    def history(self) -> np.ndarray:
        return self._y[: self._revealed]

    def reveal(self, prediction) -> np.ndarray:
        prediction = np.asarray(prediction, dtype=float)
        if prediction.shape != (self.output_dim,):
            raise ProtocolViolationError(
                f"prediction must have shape ({self.output_dim},) before observing"
            )
        if self._revealed >= self.horizon:
            raise ProtocolViolationError("no rounds left to reveal")
        y = self._y[self._revealed]
        self._revealed += 1
        return y


class HintedRidgeForecaster(BaseEstimator):
    """Online hinted ridge regression over the last ``memory`` outputs.

    Parameters
    ----------
    memory : number of stacked past outputs in the feature vector.
    lam : ridge regularization strength.
    hint : a :class:`~hintedls.hints.HintProvider`; ``None`` means the zero
        hint (plain VAW forecasting).
    record_trace : also record features and hints per round (needed by the
        closed-form verification oracle).
    """

    def __init__(self, memory: int = 15, lam: float = 1.0,
                 hint: HintProvider | None = None, record_trace: bool = False):
        self.memory = memory
        self.lam = lam
        self.hint = hint
        self.record_trace = record_trace

    def fit(self, Y):
        """Run the prediction protocol over ``Y`` (array of shape (T, p))."""
        sealed = SealedOutputs(Y)
        p = sealed.output_dim
        provider = self.hint if self.hint is not None else ZeroHint(p)
        provider.reset()
        state = init_state(p, self.memory, self.lam)
        horizon = sealed.horizon
        predictions = np.zeros((horizon, p))
        hints = np.zeros((horizon, p))
        deltas = np.zeros((horizon, p))
        losses = np.zeros(horizon)
        features = np.zeros((horizon, p * self.memory)) if self.record_trace else None
        for t in range(1, horizon + 1):
            history = sealed.history()
            z = build_feature(history, t, self.memory, p)
            hint_value = provider.hint(t, history, state=state, feature=z)
            prediction, staged = pols_step(state, z, hint_value)
            y_t = sealed.reveal(prediction)
            state = pols_commit(staged, y_t)
            predictions[t - 1] = prediction
            hints[t - 1] = hint_value
            deltas[t - 1] = y_t - hint_value
            losses[t - 1] = float(np.sum((prediction - y_t) ** 2))
            if features is not None:
                features[t - 1] = z
        self.state_ = state
        self.predictions_ = predictions
        self.hints_ = hints
        self.losses_ = losses
        self.residuals_ = ResidualTrace.from_deltas(deltas)
        self.features_ = features
        return self

    @property
    def delta_max_(self) -> float:
        return self.residuals_.final_max


class FixedGainForecaster(BaseEstimator):
    """A Luenberger observer with a fixed gain, run as the learner."""

    def __init__(self, system: SystemSpec, gain):
        self.system = system
        self.gain = gain

    def fit(self, Y):
        sealed = SealedOutputs(Y)
        gain = np.asarray(self.gain, dtype=float)
        a_l = comparators.closed_loop(self.system, gain)
        horizon = sealed.horizon
        predictions = np.zeros((horizon, sealed.output_dim))
        losses = np.zeros(horizon)
        x = np.zeros(self.system.n)
        for t in range(1, horizon + 1):
            prediction = self.system.c @ x
            y_t = sealed.reveal(prediction)
            x = a_l @ x + gain @ y_t
            predictions[t - 1] = prediction
            losses[t - 1] = float(np.sum((prediction - y_t) ** 2))
        self.predictions_ = predictions
        self.losses_ = losses
        return self
