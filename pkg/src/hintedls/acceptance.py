"""Acceptance battery: one callable check per release criterion.

Each criterion returns a :class:`CriterionResult` with its measured values
so the CLI ``verify`` command and the test suite share a single
implementation.  Tolerances are fixed here, not configurable.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import analysis, comparators, hints, linalg, predictor
from .experiments import preset, run_experiment, trial_seed, write_outputs
from .forecasters import HintedRidgeForecaster
from .systems import get_system, simulate


@dataclass
class CriterionResult:
    cid: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.cid:2d} ({self.name}): {self.detail} " \
               f"[{self.seconds:.1f}s]"


_cache: dict = {}


def _exp1_pieces():
    """Simulated exp1 stream, designed aggressive observer hint, fitted
    learner, and the grid comparator; shared across several criteria."""
    if "exp1" in _cache:
        return _cache["exp1"]
    config = preset("exp1")
    system = config.resolved_system()
    noise = config.noise.with_seed(trial_seed(config.seed, 0))
    trajectory = simulate(system, noise, config.horizon)
    designed = comparators.design_gain(system, 0.8, label="hint")
    provider = hints.LuenbergerHint(system, designed.L)
    learner = HintedRidgeForecaster(memory=config.memory, lam=config.lam,
                                    hint=provider).fit(trajectory.outputs)
    grid_spec = comparators.GridSpec(low=config.comparator["low"],
                                     high=config.comparator["high"],
                                     num=config.comparator["num"])
    grid = comparators.best_in_hindsight(
        system, grid_spec, trajectory.outputs,
        kappa=config.comparator["kappa"], gamma=config.comparator["gamma"],
    )
    _cache["exp1"] = {
        "config": config, "system": system, "noise": noise,
        "trajectory": trajectory, "designed": designed, "learner": learner,
        "grid": grid,
    }
    return _cache["exp1"]


def _random_stream(rng, dim, output_dim, horizon):
    feats = rng.uniform(-1.0, 1.0, (horizon, dim))
    targs = rng.uniform(-1.0, 1.0, (horizon, output_dim))
    return feats, targs


def criterion_1() -> CriterionResult:
    """Self-consistent hints reproduce plain ridge-regression iterates."""
    worst = 0.0
    for i in range(100):
        rng = np.random.default_rng(1000 + i)
        d = int(rng.integers(1, 7))
        p = int(rng.integers(1, 3))
        feats, targs = _random_stream(rng, d, p, 200)
        state = predictor.fresh_state(p, d, 1.0)
        # bounded data keeps the Gram matrix well conditioned, so the direct
        # float64 solve is exact to ~1e-13 here
        gram = np.eye(d)
        rhs = np.zeros((d, p))
        for t in range(1, 201):
            z = feats[t - 1]
            hint = state.M @ z  # self-consistent
            _, staged = predictor.pols_step(state, z, hint)
            oracle_prev = np.linalg.solve(gram, rhs).T  # B_{t-1} G_{t-1}^-1
            worst = max(worst, float(np.max(np.abs(
                predictor.transient_matrix(staged) - oracle_prev))))
            state = predictor.pols_commit(staged, targs[t - 1])
            gram += np.outer(z, z)
            rhs += np.outer(z, targs[t - 1])
            worst = max(worst, float(np.max(np.abs(
                state.M - np.linalg.solve(gram, rhs).T))))
    return CriterionResult(1, "ols-recovery", worst <= 1e-8,
                           f"max entrywise error {worst:.3e} (tol 1e-8)")


def criterion_2() -> CriterionResult:
    """Recursion matches the direct normal-equation solution on exp1."""
    pieces = _exp1_pieces()
    config = pieces["config"]
    outputs = pieces["trajectory"].outputs
    system = pieces["system"]
    provider = hints.LuenbergerHint(system, pieces["designed"].L)
    provider.reset()
    p, memory, lam = system.p, config.memory, config.lam
    d = p * memory
    state = predictor.fresh_state(p, d, lam)
    gram = lam * np.eye(d, dtype=np.longdouble)
    b = np.zeros((p, d), dtype=np.longdouble)
    worst = 0.0
    for t in range(1, config.horizon + 1):
        history = outputs[: t - 1]
        z = predictor.build_feature(history, t, memory, p)
        hint = provider.hint(t, history, state=state, feature=z)
        _, staged = predictor.pols_step(state, z, hint)
        gram += np.outer(z, z)
        closed = linalg.solve_gauss(gram, (b + np.outer(hint, z)).T).T
        diff = float(np.sqrt(np.sum((predictor.transient_matrix(staged) - closed) ** 2)))
        worst = max(worst, diff)
        y_t = outputs[t - 1]
        state = predictor.pols_commit(staged, y_t)
        b += np.outer(y_t, z)
    return CriterionResult(2, "recursion-vs-closed-form", worst <= 1e-7,
                           f"max Frobenius error {worst:.3e} (tol 1e-7)")


def criterion_3() -> CriterionResult:
    """Residual-scaled regret inequality and the log-det potential chain."""
    worst_slack = np.inf
    potential_ok = True
    detail = ""
    for i in range(100):
        rng = np.random.default_rng(3000 + i)
        d = int(rng.integers(1, 7))
        p = int(rng.integers(1, 3))
        horizon = 100
        lam = float(rng.choice([0.1, 1.0, 5.0]))
        feats, targs = _random_stream(rng, d, p, horizon)
        hint_vals = rng.uniform(-1.0, 1.0, (horizon, p))
        comparator = rng.uniform(-1.0, 1.0, (p, d))
        state = predictor.fresh_state(p, d, lam)
        gram = lam * np.eye(d)
        learner_loss = comp_loss = 0.0
        quad_sum = 0.0
        for t in range(horizon):
            z, y, hint = feats[t], targs[t], hint_vals[t]
            pred, staged = predictor.pols_step(state, z, hint)
            state = predictor.pols_commit(staged, y)
            gram += np.outer(z, z)
            quad_sum += float(z @ np.linalg.solve(gram, z))
            learner_loss += float(np.sum((pred - y) ** 2))
            comp_loss += float(np.sum((comparator @ z - y) ** 2))
        regret = learner_loss - comp_loss
        delta_sq = float(np.max(np.sum((targs - hint_vals) ** 2, axis=1)))
        log_term = d * np.log(1.0 + float(np.sum(feats**2)) / (lam * d))
        rhs = lam * float(np.sum(comparator**2)) + delta_sq * log_term
        worst_slack = min(worst_slack, rhs - regret)
        sign, logdet = np.linalg.slogdet(gram)
        chain = logdet - d * np.log(lam)
        if not (quad_sum <= chain + 1e-8 and chain <= log_term + 1e-8):
            potential_ok = False
            detail = f"potential chain broken on instance {i}"
    ok = worst_slack >= -1e-6 and potential_ok
    if not detail:
        detail = f"min regret slack {worst_slack:.3e} (needs >= -1e-6), potential chain ok"
    return CriterionResult(3, "regret-inequality", ok, detail)


def _random_diagonalizable(rng, orthogonal: bool):
    n = int(rng.integers(2, 7))
    eigs = np.where(rng.random(n) < 0.25,
                    rng.choice([-1.0, 1.0], n),
                    rng.uniform(-0.9, 0.9, n))
    if orthogonal:
        basis, _ = np.linalg.qr(rng.standard_normal((n, n)))
    else:
        basis = np.eye(n) + 0.3 * rng.standard_normal((n, n))
    inv = np.linalg.inv(basis)
    a = basis @ np.diag(eigs) @ inv
    kappa = linalg.operator_norm(basis) * linalg.operator_norm(inv)
    return a, n, kappa


def criterion_4() -> CriterionResult:
    """Filtered power series stays below 2 n kappa with a converged tail."""
    cases = []
    swap = get_system("symmetric_swap")
    cases.append((swap.a, swap.n, swap.kappa_a))
    for i in range(20):
        rng = np.random.default_rng(4000 + i)
        cases.append(_random_diagonalizable(rng, orthogonal=(i % 2 == 0)))
    worst_margin = np.inf
    worst_tail = 0.0
    for a, n, kappa in cases:
        sums, last = analysis.filtered_power_sums(a, 1, 500)
        bound = 2.0 * n * kappa
        worst_margin = min(worst_margin, bound - sums[-1])
        worst_tail = max(worst_tail, last)
    ok = worst_margin >= 0.0 and worst_tail < 1e-10
    return CriterionResult(
        4, "filtered-power-sum", ok,
        f"min bound margin {worst_margin:.3e}, max tail increment {worst_tail:.3e}",
    )


def criterion_5() -> CriterionResult:
    """Unit-magnitude Jordan blocks are annihilated exactly by (J^2-I)^r."""
    worst = 0.0
    for r in (1, 2, 3):
        for lam in (-1.0, 1.0):
            block = lam * np.eye(r) + np.diag(np.ones(r - 1), 1)
            filt = np.linalg.matrix_power(block @ block - np.eye(r), r)
            worst = max(worst, linalg.operator_norm(filt))
    return CriterionResult(5, "marginal-annihilation", worst <= 1e-12,
                           f"max filtered norm {worst:.3e} (tol 1e-12)")


def criterion_6() -> CriterionResult:
    """exp1: regret grows like log t and the hint residual obeys its bound."""
    pieces = _exp1_pieces()
    learner, grid = pieces["learner"], pieces["grid"]
    cum_regret = np.cumsum(learner.losses_) - grid.best_cumulative
    fit = analysis.log_fit(cum_regret, t_min=100)
    designed = pieces["designed"]
    c_w, c_v = pieces["noise"].effective_bounds()
    bound = analysis.residual_bound("luenberger_hint", analysis.BoundInputs(
        norm_C=pieces["system"].norm_c, C_w=c_w, C_v=c_v,
        kappa_tilde=designed.kappa, gamma_tilde=designed.gamma,
    ))
    delta_max = learner.delta_max_
    ok = fit.r_squared >= 0.95 and delta_max <= bound
    return CriterionResult(
        6, "exp1-log-regret", ok,
        f"log-fit R2 {fit.r_squared:.4f} (needs >= 0.95), "
        f"delta_max {delta_max:.4g} vs bound {bound:.4g}",
    )


def criterion_7() -> CriterionResult:
    """Two-lag residual bound on the symmetric system, 20 disturbance seeds."""
    config = preset("exp2")
    system = config.resolved_system()
    c_w, c_v = config.noise.effective_bounds()
    bound = analysis.residual_bound("two_lag", analysis.BoundInputs(
        norm_C=system.norm_c, n=system.n, kappa_A=system.kappa_a,
        C_w=c_w, C_v=c_v,
    ))
    coeffs = hints.diff_coeffs(1)
    worst = 0.0
    for i in range(20):
        noise = config.noise.with_seed(trial_seed(7000, i))
        outputs = simulate(system, noise, 2000).outputs
        deltas = np.zeros_like(outputs)
        for t in range(1, outputs.shape[0] + 1):
            value = coeffs[0] * outputs[t - 1]
            for j in range(1, coeffs.size):
                if t - j >= 1:
                    value = value + coeffs[j] * outputs[t - j - 1]
            deltas[t - 1] = value
        worst = max(worst, float(np.max(np.linalg.norm(deltas, axis=1))))
    ok = worst <= bound
    return CriterionResult(7, "two-lag-residual-bound", ok,
                           f"max delta_max {worst:.4g} vs bound {bound:.4g}")


def criterion_8() -> CriterionResult:
    """Residual decomposition identity on both filter/system pairings."""
    swap_config = preset("exp2")
    swap = swap_config.resolved_system()
    swap_traj = simulate(swap, swap_config.noise.with_seed(trial_seed(8000, 0)), 500)
    gap_a = analysis.residual_decomposition_check(swap, hints.diff_coeffs(1), swap_traj)

    jordan_config = preset("expA2")
    jordan = jordan_config.resolved_system()
    jordan_traj = simulate(jordan, jordan_config.noise.with_seed(trial_seed(8000, 1)), 500)
    gap_b = analysis.residual_decomposition_check(jordan, hints.diff_coeffs(3), jordan_traj)

    worst = max(gap_a, gap_b)
    return CriterionResult(8, "residual-decomposition", worst <= 1e-8,
                           f"max decomposition gap {worst:.3e} (tol 1e-8)")


def criterion_9() -> CriterionResult:
    """Truncation and prediction-error bounds for certified comparators."""
    pieces = _exp1_pieces()
    system, grid = pieces["system"], pieces["grid"]
    config = pieces["config"]
    outputs = pieces["trajectory"].outputs
    kappa, gamma = grid.kappa, grid.gamma
    c_w, c_v = pieces["noise"].effective_bounds()
    from .systems import growth_envelope

    _, c_y = growth_envelope(system, pieces["noise"])
    b = analysis.BoundInputs(norm_C=system.norm_c, kappa=kappa, gamma=gamma,
                             C_w=c_w, C_v=c_v, C_y=c_y, r=system.jordan_r)
    c_pred = analysis.prediction_error_constant(b)
    base = analysis.truncation_constant(b)
    ts = np.arange(1, outputs.shape[0] + 1)
    trunc_bound = base * (1.0 + ts) ** system.jordan_r * (1.0 - gamma) ** config.memory
    worst_trunc = -np.inf
    worst_pred = 0.0
    for gain in grid.gains[:10]:
        full = comparators.luenberger_rollout(system, gain, outputs)
        trunc = comparators.truncated_rollout(system, gain, config.memory, outputs)
        gap = np.linalg.norm(full - trunc, axis=1)
        worst_trunc = max(worst_trunc, float(np.max(gap - trunc_bound)))
        pred_err = np.linalg.norm(full - outputs, axis=1)
        worst_pred = max(worst_pred, float(np.max(pred_err)))
    ok = worst_trunc <= 0.0 and worst_pred <= c_pred
    return CriterionResult(
        9, "truncation-and-prediction-bounds", ok,
        f"max truncation excess {worst_trunc:.3e} (needs <= 0), "
        f"max prediction error {worst_pred:.4g} vs C_pred {c_pred:.4g}",
    )


def criterion_10() -> CriterionResult:
    """exp2: hinted learner beats fixed-gain filters, whose loss is linear."""
    result = _cached_exp2()
    cum = {label: np.cumsum(v.trials[0].columns["learner_loss"])
           for label, v in result.variants.items()}
    pols = cum["pols_two_lag"][-1]
    fixed = min(cum["kalman_filter"][-1], cum["hinf_filter"][-1])
    r2_kalman = analysis.linear_fit_r2(cum["kalman_filter"], t_min=10)
    r2_hinf = analysis.linear_fit_r2(cum["hinf_filter"], t_min=10)
    ok = pols <= 0.5 * fixed and r2_kalman >= 0.95 and r2_hinf >= 0.95
    return CriterionResult(
        10, "exp2-fixed-gain-comparison", ok,
        f"hinted/fixed loss ratio {pols / fixed:.3f} (needs <= 0.5), "
        f"linear R2 kalman {r2_kalman:.4f}, hinf {r2_hinf:.4f}",
    )


def _cached_exp2():
    if "exp2" not in _cache:
        _cache["exp2"] = run_experiment(preset("exp2"), name="exp2")
    return _cache["exp2"]


def criterion_11() -> CriterionResult:
    """Rotation system: lag hints fail while the oracle filter stays bounded."""
    if "expA3" not in _cache:
        _cache["expA3"] = run_experiment(preset("expA3"), name="expA3")
    result = _cache["expA3"]
    two_lag = result.variants["two_lag"].trials[0].columns["delta_max"]
    oracle = result.variants["oracle_poly"].trials[0].columns["delta_max"]
    horizon = two_lag.size
    half, three_q = horizon // 2 - 1, (3 * horizon) // 4 - 1
    lag_ratio = two_lag[-1] / two_lag[half]
    oracle_ratio = oracle[-1] / oracle[half]
    oracle_tail = (oracle[-1] - oracle[three_q]) / oracle[three_q]
    ok = lag_ratio >= 1.5 and oracle_ratio <= 2.0 and oracle_tail <= 0.05
    return CriterionResult(
        11, "rotation-negative-control", ok,
        f"two-lag growth ratio {lag_ratio:.2f} (needs >= 1.5), oracle ratio "
        f"{oracle_ratio:.2f} (needs <= 2), oracle tail increase {oracle_tail:.3%}",
    )


def criterion_12() -> CriterionResult:
    """Regret is insensitive to lambda in [0.01, 1] and degrades at 10."""
    if "exp3_lambda" not in _cache:
        _cache["exp3_lambda"] = run_experiment(preset("exp3_lambda"), name="exp3_lambda")
    result = _cache["exp3_lambda"]
    finals = {label: v.trials[0].summary["final_regret"]
              for label, v in result.variants.items()}
    small = [finals["lam0p01"], finals["lam0p1"], finals["lam1p0"]]
    spread = max(small) / min(small) if min(small) > 0 else np.inf
    ok = spread <= 1.25 and finals["lam10p0"] > finals["lam1p0"]
    return CriterionResult(
        12, "lambda-sensitivity", ok,
        f"regret spread over lambda<=1: {spread:.3f} (needs <= 1.25); "
        f"lam=10 regret {finals['lam10p0']:.4g} vs lam=1 {finals['lam1p0']:.4g}",
    )


def criterion_13() -> CriterionResult:
    """Re-running a preset with the same seed emits byte-identical CSV."""
    import tempfile
    from pathlib import Path

    with tempfile.TemporaryDirectory() as tmp:
        dirs = [Path(tmp) / "run1", Path(tmp) / "run2"]
        for d in dirs:
            write_outputs(run_experiment(preset("exp2"), name="exp2"), d)
        mismatched = []
        for path in sorted(dirs[0].glob("*.csv")):
            other = dirs[1] / path.name
            if not other.exists() or path.read_bytes() != other.read_bytes():
                mismatched.append(path.name)
    ok = not mismatched
    detail = "all CSV files byte-identical" if ok else f"mismatch: {mismatched}"
    return CriterionResult(13, "determinism", ok, detail)


ALL_CRITERIA = [
    criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
    criterion_6, criterion_7, criterion_8, criterion_9, criterion_10,
    criterion_11, criterion_12, criterion_13,
]


def run_criterion(func) -> CriterionResult:
    start = time.perf_counter()
    result = func()
    result.seconds = time.perf_counter() - start
    return result


def run_all() -> list[CriterionResult]:
    return [run_criterion(func) for func in ALL_CRITERIA]
