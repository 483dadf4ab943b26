"""Linear system definitions, disturbance models, and trajectory simulation.

A system is the pair ``x_{t+1} = A x_t + w_t``, ``y_t = C x_t + v_t`` started
from ``x_0 = 0``.  Transition matrices may sit on the unit circle, so each
:class:`SystemSpec` carries analytic structure metadata (largest block size
``jordan_r`` and eigenbasis conditioning ``kappa_A``) that is validated
against the empirical power growth of ``A`` at registration instead of being
computed by an (ill-conditioned) numerical Jordan decomposition.

Disturbances follow a bias + sinusoid + bounded-uniform model, or an i.i.d.
Gaussian model for the stochastic benchmarks.  Draws are produced by a
counter-based generator keyed on ``(seed, t, stream)`` so any time step can
be replayed independently of the others.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import linalg
from .exceptions import NotApplicableError, TrajectoryOverflowError

SPECTRUM_TAGS = ("real_diagonalizable", "real_jordan", "complex_marginal", "stable")
NOISE_KINDS = ("nonstochastic", "gaussian")

_STATE_LIMIT = 1e12
_POWER_CHECK_HORIZON = 200


@dataclass(frozen=True)
class SystemSpec:
    """An observed linear system with analytic growth metadata."""

    a: np.ndarray  # (n, n) transition matrix
    c: np.ndarray  # (p, n) observation matrix
    jordan_r: int  # largest Jordan block size
    kappa_a: float  # conditioning of the (analytic) eigenbasis
    spectrum_tag: str = "real_diagonalizable"
    name: str = ""

    def __post_init__(self):
        a = linalg.as_matrix(self.a, "A")
        c = linalg.as_matrix(self.c, "C")
        if a.shape[0] != a.shape[1]:
            raise ValueError("A must be square")
        if c.shape[1] != a.shape[0]:
            raise ValueError("C must have as many columns as A")
        if self.jordan_r < 1 or self.jordan_r > a.shape[0]:
            raise ValueError("jordan_r must lie in [1, n]")
        if self.kappa_a < 1.0:
            raise ValueError("kappa_a must be >= 1")
        if self.spectrum_tag not in SPECTRUM_TAGS:
            raise ValueError(f"unknown spectrum_tag {self.spectrum_tag!r}")
        if linalg.eigenvalues_small(a).max_abs > 1.0 + 1e-9:
            raise ValueError("spectral radius exceeds 1: system is unstable")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "c", c)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def p(self) -> int:
        return self.c.shape[0]

    @property
    def norm_c(self) -> float:
        return linalg.operator_norm(self.c)

    def validate_power_growth(self, horizon: int = _POWER_CHECK_HORIZON) -> None:
        """Check ``|A^k| <= kappa_a (1+k)^(jordan_r - 1)`` up to ``horizon``."""
        powers = linalg.mat_power_seq(self.a, horizon)
        for k, mat in enumerate(powers):
            bound = self.kappa_a * (1.0 + k) ** (self.jordan_r - 1)
            norm = linalg.operator_norm(mat)
            if norm > bound * (1.0 + 1e-9):
                raise ValueError(
                    f"declared (jordan_r={self.jordan_r}, kappa_a={self.kappa_a}) "
                    f"violated at k={k}: |A^k|={norm:.6g} > {bound:.6g}"
                )


@dataclass(frozen=True)
class NoiseModel:
    """Bias + sinusoid + bounded-random disturbance generator.

    With ``kind='nonstochastic'`` the per-coordinate draw is
    ``bias + amp * sin(freq * t) + Unif[-u, u]``; with ``kind='gaussian'``
    the draw is ``N(0, u^2)`` per coordinate (bias/amp/freq ignored by the
    sampler but kept for bookkeeping).  ``u`` is ``uniform_w``/``uniform_v``.
    """

    bias_w: np.ndarray
    amp_w: np.ndarray
    freq_w: float
    uniform_w: float
    bias_v: np.ndarray
    amp_v: np.ndarray
    freq_v: float
    uniform_v: float
    kind: str = "nonstochastic"
    seed: int = 0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.uniform_w < 0 or self.uniform_v < 0:
            raise ValueError("uniform bounds must be nonnegative")
        object.__setattr__(self, "bias_w", linalg.as_vector(self.bias_w, "bias_w"))
        object.__setattr__(self, "amp_w", linalg.as_vector(self.amp_w, "amp_w"))
        object.__setattr__(self, "bias_v", linalg.as_vector(self.bias_v, "bias_v"))
        object.__setattr__(self, "amp_v", linalg.as_vector(self.amp_v, "amp_v"))
        if self.bias_w.shape != self.amp_w.shape:
            raise ValueError("bias_w and amp_w must have the same length")
        if self.bias_v.shape != self.amp_v.shape:
            raise ValueError("bias_v and amp_v must have the same length")

    @property
    def n(self) -> int:
        return self.bias_w.size

    @property
    def p(self) -> int:
        return self.bias_v.size

    def effective_bounds(self) -> tuple[float, float]:
        """Per-step norm bounds ``(C_w, C_v)`` of the nonstochastic model."""
        if self.kind != "nonstochastic":
            raise NotApplicableError("norm bounds hold only for nonstochastic noise")
        c_w = (
            float(np.linalg.norm(self.bias_w))
            + float(np.linalg.norm(self.amp_w))
            + self.uniform_w * np.sqrt(self.n)
        )
        c_v = (
            float(np.linalg.norm(self.bias_v))
            + float(np.linalg.norm(self.amp_v))
            + self.uniform_v * np.sqrt(self.p)
        )
        return c_w, c_v

    def with_seed(self, seed: int) -> "NoiseModel":
        return replace(self, seed=int(seed))


def zero_noise(n: int, p: int, kind: str = "nonstochastic", seed: int = 0) -> NoiseModel:
    return NoiseModel(
        bias_w=np.zeros(n), amp_w=np.zeros(n), freq_w=0.0, uniform_w=0.0,
        bias_v=np.zeros(p), amp_v=np.zeros(p), freq_v=0.0, uniform_v=0.0,
        kind=kind, seed=seed,
    )


def _stream_rng(seed: int, t: int, stream: int) -> np.random.Generator:
    # Counter-based keying: the draw at (seed, t, stream) never depends on
    # draws at other indices, so trajectories replay exactly.
    return np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, t, stream])


def sample_noise(model: NoiseModel, t: int) -> tuple[np.ndarray, np.ndarray]:
    """Disturbance pair ``(w_t, v_t)`` for time index ``t >= 0``."""
    if t < 0:
        raise ValueError("t must be >= 0")
    rng_w = _stream_rng(model.seed, t, 0)
    rng_v = _stream_rng(model.seed, t, 1)
    if model.kind == "gaussian":
        w = rng_w.normal(0.0, model.uniform_w, model.n) if model.uniform_w else np.zeros(model.n)
        v = rng_v.normal(0.0, model.uniform_v, model.p) if model.uniform_v else np.zeros(model.p)
        return w, v
    w = model.bias_w + model.amp_w * np.sin(model.freq_w * t)
    v = model.bias_v + model.amp_v * np.sin(model.freq_v * t)
    if model.uniform_w:
        w = w + rng_w.uniform(-model.uniform_w, model.uniform_w, model.n)
    if model.uniform_v:
        v = v + rng_v.uniform(-model.uniform_v, model.uniform_v, model.p)
    return w, v


@dataclass(frozen=True)
class Trajectory:
    """A rolled-out trajectory with its disturbances stored for replay.

    ``states[k]`` is ``x_k`` for k = 0..T, ``outputs[k]`` is ``y_{k+1}``,
    ``process_noise[k]`` is ``w_k`` for k = 0..T-1 and ``measurement_noise[k]``
    is ``v_{k+1}``.
    """

    states: np.ndarray  # (T+1, n)
    outputs: np.ndarray  # (T, p)
    process_noise: np.ndarray  # (T, n)
    measurement_noise: np.ndarray  # (T, p)

    @property
    def horizon(self) -> int:
        return self.outputs.shape[0]

    def w(self, k: int) -> np.ndarray:
        """``w_k`` with the convention ``w_k = 0`` for k < 0."""
        if k < 0:
            return np.zeros(self.states.shape[1])
        return self.process_noise[k]

    def v(self, k: int) -> np.ndarray:
        """``v_k`` with the convention ``v_k = 0`` for k <= 0."""
        if k <= 0:
            return np.zeros(self.outputs.shape[1])
        return self.measurement_noise[k - 1]


def simulate(system: SystemSpec, model: NoiseModel, horizon: int) -> Trajectory:
    """Roll the system forward ``horizon`` steps from ``x_0 = 0``.

    ``x_{t+1}`` consumes the process disturbance sampled at index ``t``, and
    ``y_t`` the measurement disturbance sampled at index ``t``.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if model.n != system.n or model.p != system.p:
        raise ValueError("noise model dimensions do not match the system")
    n, p = system.n, system.p
    states = np.zeros((horizon + 1, n))
    outputs = np.zeros((horizon, p))
    ws = np.zeros((horizon, n))
    vs = np.zeros((horizon, p))
    draws = [sample_noise(model, k) for k in range(horizon + 1)]
    x = np.zeros(n)
    for t in range(1, horizon + 1):
        x = system.a @ x + draws[t - 1][0]
        if np.max(np.abs(x)) > _STATE_LIMIT:
            raise TrajectoryOverflowError(
                f"state magnitude exceeded {_STATE_LIMIT:g} at t={t}"
            )
        states[t] = x
        outputs[t - 1] = system.c @ x + draws[t][1]
        ws[t - 1] = draws[t - 1][0]
        vs[t - 1] = draws[t][1]
    return Trajectory(states, outputs, ws, vs)


def growth_envelope(system: SystemSpec, model: NoiseModel) -> tuple[float, float]:
    """Constants ``(C_x, C_y)`` with ``|x_t| <= C_x (1+t)^r`` and
    ``|y_t| <= C_y (1+t)^r`` pathwise under the nonstochastic model."""
    c_w, c_v = model.effective_bounds()
    c_x = system.kappa_a * c_w
    c_y = system.norm_c * c_x + c_v
    return c_x, c_y


def rotation_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def _double_integrator() -> SystemSpec:
    return SystemSpec(
        a=np.array([[1.0, 1.0], [0.0, 1.0]]),
        c=np.array([[1.0, 0.0]]),
        jordan_r=2,
        kappa_a=1.0,
        spectrum_tag="real_jordan",
        name="double_integrator",
    )


def _symmetric_swap() -> SystemSpec:
    return SystemSpec(
        a=np.array([[0.0, 1.0], [1.0, 0.0]]),
        c=np.array([[1.0, 0.5]]),
        jordan_r=1,
        kappa_a=1.0,
        spectrum_tag="real_diagonalizable",
        name="symmetric_swap",
    )


def _jordan3() -> SystemSpec:
    return SystemSpec(
        a=np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0], [0.0, 0.0, 1.0]]),
        c=np.array([[1.0, 0.0, 0.0]]),
        jordan_r=3,
        kappa_a=1.0,
        spectrum_tag="real_jordan",
        name="jordan3",
    )


ROTATION_THETA = 0.7


def _rotation_jordan() -> SystemSpec:
    r = rotation_matrix(ROTATION_THETA)
    a = np.zeros((4, 4))
    a[:2, :2] = r
    a[2:, 2:] = r
    a[:2, 2:] = np.eye(2)
    return SystemSpec(
        a=a,
        c=np.array([[1.0, 0.3, 0.0, 0.0]]),
        jordan_r=2,
        kappa_a=1.0,
        spectrum_tag="complex_marginal",
        name="rotation_jordan",
    )


def _scalar_stable() -> SystemSpec:
    return SystemSpec(
        a=np.array([[0.5]]),
        c=np.array([[1.0]]),
        jordan_r=1,
        kappa_a=1.0,
        spectrum_tag="stable",
        name="scalar_stable",
    )


_REGISTRY = {
    "double_integrator": _double_integrator,
    "symmetric_swap": _symmetric_swap,
    "jordan3": _jordan3,
    "rotation_jordan": _rotation_jordan,
    "scalar_stable": _scalar_stable,
}

_cache: dict[str, SystemSpec] = {}


def system_names() -> list[str]:
    return sorted(_REGISTRY)


def get_system(name: str) -> SystemSpec:
    """Built-in test system by name; metadata validated on first access."""
    if name not in _REGISTRY:
        raise KeyError(f"unknown system {name!r}; available: {system_names()}")
    if name not in _cache:
        spec = _REGISTRY[name]()
        spec.validate_power_growth()
        _cache[name] = spec
    return _cache[name]
