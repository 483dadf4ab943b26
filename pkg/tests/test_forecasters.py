import numpy as np
import pytest
from sklearn.base import clone

from hintedls import predictor
from hintedls.comparators import luenberger_rollout
from hintedls.exceptions import ProtocolViolationError
from hintedls.forecasters import FixedGainForecaster, HintedRidgeForecaster, SealedOutputs
from hintedls.hints import PolynomialHint, ZeroHint, diff_coeffs
from hintedls.systems import get_system


def test_sealed_outputs_gates_history():
    sealed = SealedOutputs(np.arange(6.0).reshape(-1, 1))
    assert sealed.history().shape == (0, 1)
    y = sealed.reveal(np.zeros(1))
    np.testing.assert_array_equal(y, [0.0])
    assert sealed.history().shape == (1, 1)
    np.testing.assert_array_equal(sealed.history()[0], [0.0])


def test_sealed_outputs_requires_well_formed_prediction():
    sealed = SealedOutputs(np.ones((3, 2)))
    with pytest.raises(ProtocolViolationError):
        sealed.reveal(np.zeros(1))  # wrong width


def test_sealed_outputs_exhausts():
    sealed = SealedOutputs(np.ones((2, 1)))
    sealed.reveal(np.zeros(1))
    sealed.reveal(np.zeros(1))
    with pytest.raises(ProtocolViolationError):
        sealed.reveal(np.zeros(1))


def test_hinted_forecaster_matches_manual_recursion():
    rng = np.random.default_rng(0)
    outputs = rng.uniform(-1, 1, (30, 1))
    forecaster = HintedRidgeForecaster(memory=4, lam=2.0,
                                       hint=PolynomialHint(diff_coeffs(1)))
    forecaster.fit(outputs)
    state = predictor.fresh_state(1, 4, 2.0)
    provider = PolynomialHint(diff_coeffs(1))
    for t in range(1, 31):
        hist = outputs[: t - 1]
        z = predictor.build_feature(hist, t, 4, 1)
        hint = provider.hint(t, hist)
        pred, staged = predictor.pols_step(state, z, hint)
        state = predictor.pols_commit(staged, outputs[t - 1])
        assert forecaster.predictions_[t - 1, 0] == pytest.approx(float(pred[0]))
        assert forecaster.hints_[t - 1, 0] == pytest.approx(float(hint[0]))
    assert forecaster.losses_.shape == (30,)
    assert forecaster.delta_max_ == pytest.approx(
        float(np.max(np.abs(outputs - forecaster.hints_))))


def test_hinted_forecaster_defaults_to_zero_hint():
    outputs = np.ones((10, 1))
    forecaster = HintedRidgeForecaster(memory=2, lam=1.0).fit(outputs)
    np.testing.assert_array_equal(forecaster.hints_, np.zeros((10, 1)))


def test_hinted_forecaster_records_features_on_request():
    outputs = np.arange(8.0).reshape(-1, 1)
    forecaster = HintedRidgeForecaster(memory=3, lam=1.0, record_trace=True).fit(outputs)
    np.testing.assert_allclose(forecaster.features_[4], [3.0, 2.0, 1.0])
    assert HintedRidgeForecaster(memory=3, lam=1.0).fit(outputs).features_ is None


def test_hinted_forecaster_sklearn_params():
    forecaster = HintedRidgeForecaster(memory=7, lam=0.5, hint=ZeroHint(1))
    params = forecaster.get_params()
    assert params["memory"] == 7 and params["lam"] == 0.5
    cloned = clone(forecaster)
    assert cloned.get_params()["memory"] == 7


def test_fixed_gain_forecaster_matches_rollout():
    system = get_system("symmetric_swap")
    rng = np.random.default_rng(1)
    outputs = rng.uniform(-1, 1, (25, 1))
    gain = np.array([[0.4], [0.3]])
    forecaster = FixedGainForecaster(system, gain).fit(outputs)
    np.testing.assert_allclose(forecaster.predictions_,
                               luenberger_rollout(system, gain, outputs), atol=1e-14)
    np.testing.assert_allclose(
        forecaster.losses_,
        np.sum((forecaster.predictions_ - outputs) ** 2, axis=1), atol=1e-14)
