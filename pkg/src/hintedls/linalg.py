"""Small dense real-matrix kernels shared by the rest of the package.

Everything here operates on plain float64 numpy arrays.  All target systems
are tiny (n <= 8), so the implementations favour predictability over
throughput: deterministic power iteration for operator norms, closed forms
for 2x2 eigenvalues with exact block-triangular deflation above that, and a
fixed-point iteration for the discrete algebraic Riccati equation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import NonConvergenceError

_NORM_TOL = 1e-12
_NORM_MAX_ITER = 500
_DARE_TOL = 1e-12
_DARE_MAX_ITER = 100_000


def _as_float(m) -> np.ndarray:
    # Extended precision flows through untouched; everything else becomes
    # float64.  The learner state uses longdouble accumulators (see
    # predictor), all other call sites work in float64.
    a = np.asarray(m)
    if a.dtype != np.longdouble:
        a = np.asarray(a, dtype=float)
    return a


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Validate and return ``m`` as a finite 2-D float array."""
    a = _as_float(m)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {a.shape}")
    if a.size and not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def as_vector(v, name: str = "vector") -> np.ndarray:
    """Validate and return ``v`` as a finite 1-D float array."""
    a = _as_float(v).reshape(-1)
    if a.size and not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def solve_gauss(a, b) -> np.ndarray:
    """Solve ``a @ x = b`` by Gaussian elimination with partial pivoting.

    Unlike ``np.linalg.solve`` this works for longdouble operands, which the
    regression oracles use.  ``b`` may be a vector or a matrix of columns.
    """
    a = as_matrix(a, "a").copy()
    b = np.asarray(b)
    vector = b.ndim == 1
    x = (b.reshape(-1, 1) if vector else b).astype(a.dtype, copy=True)
    n = a.shape[0]
    if a.shape[1] != n or x.shape[0] != n:
        raise ValueError("incompatible shapes for linear solve")
    for k in range(n):
        pivot = k + int(np.argmax(np.abs(a[k:, k])))
        if a[pivot, k] == 0.0:
            raise np.linalg.LinAlgError("singular matrix in solve_gauss")
        if pivot != k:
            a[[k, pivot]] = a[[pivot, k]]
            x[[k, pivot]] = x[[pivot, k]]
        factor = a[k + 1 :, k] / a[k, k]
        a[k + 1 :, k + 1 :] -= np.outer(factor, a[k, k + 1 :])
        x[k + 1 :] -= np.outer(factor, x[k])
    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - a[k, k + 1 :] @ x[k + 1 :]) / a[k, k]
    return x[:, 0] if vector else x


@dataclass(frozen=True)
class EigenSet:
    """Eigenvalues of a small real matrix together with the spectral radius."""

    values: np.ndarray  # complex, length n
    max_abs: float

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))


def operator_norm(m) -> float:
    """Largest singular value of ``m``.

    Power iteration on ``m.T @ m`` from a fixed pseudo-random start vector,
    stopped when the estimate's relative change drops below 1e-12 or after
    500 sweeps.  The estimate never exceeds the true norm.
    """
    a = as_matrix(m, "m")
    if a.size == 0 or not np.any(a):
        return 0.0
    gram = a.T @ a
    rng = np.random.default_rng(0x5EED)
    v = rng.standard_normal(gram.shape[0])
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(_NORM_MAX_ITER):
        w = gram @ v
        lam = np.linalg.norm(w)
        if lam == 0.0:
            return 0.0
        v = w / lam
        new_est = float(np.sqrt(lam))
        if abs(new_est - est) <= _NORM_TOL * max(new_est, 1e-300):
            return new_est
        est = new_est
    return est


def _eig_2x2(a: np.ndarray) -> np.ndarray:
    tr = a[0, 0] + a[1, 1]
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    disc = tr * tr / 4.0 - det
    # A discriminant within rounding error of zero is a double root; without
    # the clamp it would split by ~sqrt(eps) and inflate the spectral radius.
    scale = abs(a[0, 0] * a[1, 1]) + abs(a[0, 1] * a[1, 0]) + tr * tr / 4.0
    if abs(disc) <= 16.0 * np.finfo(float).eps * scale:
        disc = 0.0
    if disc >= 0.0:
        root = np.sqrt(disc)
        return np.array([tr / 2.0 + root, tr / 2.0 - root], dtype=complex)
    root = np.sqrt(-disc)
    return np.array([complex(tr / 2.0, root), complex(tr / 2.0, -root)])


def _eigvals_recursive(a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    if n == 1:
        return np.array([a[0, 0]], dtype=complex)
    if n == 2:
        return _eig_2x2(a)
    # Exact zero off-diagonal blocks let us deflate without any rounding;
    # the built-in test systems are all (block-)triangular.
    for k in range(1, n):
        if not a[k:, :k].any():
            return np.concatenate(
                [_eigvals_recursive(a[:k, :k]), _eigvals_recursive(a[k:, k:])]
            )
        if not a[:k, k:].any():
            return np.concatenate(
                [_eigvals_recursive(a[:k, :k]), _eigvals_recursive(a[k:, k:])]
            )
    try:
        return np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NonConvergenceError(f"eigenvalue iteration failed: {exc}") from exc


def eigenvalues_small(m) -> EigenSet:
    """All eigenvalues of a square matrix of dimension <= 8.

    Dimensions 1 and 2 use the characteristic polynomial in closed form;
    larger matrices are deflated along exact zero blocks where possible and
    otherwise handed to LAPACK's Hessenberg-QR iteration.
    """
    a = as_matrix(m, "m")
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got {a.shape}")
    if a.shape[0] > 8:
        raise ValueError(f"eigenvalues_small supports dimension <= 8, got {a.shape[0]}")
    values = _eigvals_recursive(a)
    return EigenSet(values=values, max_abs=float(np.max(np.abs(values))))


def spectral_radius(m) -> float:
    return eigenvalues_small(m).max_abs


def sherman_morrison(p, z) -> tuple[np.ndarray, np.ndarray]:
    """Rank-one inverse update ``(P^-1 + z z^T)^-1`` in gain/covariance form.

    Returns ``K = P z / (1 + z^T P z)`` and ``P_new = P - K z^T P``.  The
    updated matrix is re-symmetrised to stop drift over long recursions.
    """
    p = as_matrix(p, "P")
    z = as_vector(z, "z")
    pz = p @ z
    denom = 1.0 + float(z @ pz)
    k = pz / denom
    p_new = p - np.outer(k, z @ p)
    p_new = 0.5 * (p_new + p_new.T)
    return k, p_new


def mat_power_seq(a, k_max: int) -> list[np.ndarray]:
    """``[A^0, A^1, ..., A^k_max]`` by repeated multiplication."""
    a = as_matrix(a, "A")
    if a.shape[0] != a.shape[1]:
        raise ValueError("A must be square")
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    powers = [np.eye(a.shape[0])]
    for _ in range(k_max):
        powers.append(powers[-1] @ a)
    return powers


def solve_dare(a, c, q, r) -> tuple[np.ndarray, np.ndarray]:
    """Steady-state predictor Riccati equation for ``(A, C)`` with noise
    covariances ``(Q, R)``.

    Fixed-point iteration ``P <- A P A^T - A P C^T (C P C^T + R)^-1 C P A^T + Q``
    from ``P_0 = Q`` until the Frobenius update drops below 1e-12.  Returns the
    solution ``P`` and the predictor gain ``L = A P C^T (C P C^T + R)^-1``.

    Raises NonConvergenceError when the iteration cap is hit, which can happen
    for marginally stable ``A`` with degenerate ``Q``.
    """
    a = as_matrix(a, "A")
    c = as_matrix(c, "C")
    q = as_matrix(q, "Q")
    r = as_matrix(r, "R")
    p = q.copy()
    for _ in range(_DARE_MAX_ITER):
        apct = a @ p @ c.T
        s = c @ p @ c.T + r
        p_next = a @ p @ a.T - apct @ np.linalg.solve(s, apct.T) + q
        p_next = 0.5 * (p_next + p_next.T)
        if np.linalg.norm(p_next - p, "fro") < _DARE_TOL:
            p = p_next
            break
        p = p_next
    else:
        raise NonConvergenceError("DARE fixed-point iteration did not converge")
    s = c @ p @ c.T + r
    gain = np.linalg.solve(s.T, (a @ p @ c.T).T).T
    return p, gain


def dare_residual(a, c, q, r, p) -> float:
    """Frobenius norm of the fixed-point defect of ``P``; diagnostic only."""
    a, c, q, r, p = (as_matrix(x) for x in (a, c, q, r, p))
    apct = a @ p @ c.T
    s = c @ p @ c.T + r
    rhs = a @ p @ a.T - apct @ np.linalg.solve(s, apct.T) + q
    return float(np.linalg.norm(p - rhs, "fro"))
