"""Online least-squares prediction of marginally stable linear systems.

The learner is an unconstrained online ridge regression over stacked past
outputs whose update folds in a predictive hint before each observation, so
its regret against the best stabilizing observer in hindsight scales with
the hint residual instead of the (possibly polynomially growing) signal.
"""

from .analysis import (
    BoundInputs,
    RegretReport,
    filtered_power_sums,
    log_fit,
    luenberger_regret,
    residual_bound,
    residual_decomposition_check,
    theorem2_bound,
)
from .comparators import (
    GridSpec,
    LuenbergerGain,
    best_in_hindsight,
    certify_gain,
    design_gain,
    hinf_gain,
    kalman_gain,
    luenberger_rollout,
    truncated_matrix,
    truncated_rollout,
)
from .experiments import (
    ExperimentConfig,
    config_from_dict,
    load_config,
    preset,
    preset_names,
    run_experiment,
    write_outputs,
)
from .forecasters import FixedGainForecaster, HintedRidgeForecaster, SealedOutputs
from .hints import (
    LuenbergerHint,
    PolynomialHint,
    ResidualTrace,
    SelfConsistentHint,
    ZeroHint,
    cayley_hamilton_coeffs,
    diff_coeffs,
    lag_coeffs,
    polynomial_hint,
    rotation_annihilator_coeffs,
)
from .linalg import (
    EigenSet,
    eigenvalues_small,
    mat_power_seq,
    operator_norm,
    sherman_morrison,
    solve_dare,
)
from .predictor import (
    PolsState,
    build_feature,
    fresh_state,
    init_state,
    ols_matrix,
    pols_closed_form,
    pols_commit,
    pols_step,
)
from .systems import (
    NoiseModel,
    SystemSpec,
    Trajectory,
    get_system,
    growth_envelope,
    sample_noise,
    simulate,
    system_names,
)

__version__ = "0.1.0"
