import numpy as np
import pytest

from hintedls import linalg
from hintedls.exceptions import NonConvergenceError


def test_operator_norm_identity():
    assert linalg.operator_norm(np.eye(2)) == pytest.approx(1.0, abs=1e-12)


def test_operator_norm_diagonal():
    assert linalg.operator_norm(np.diag([3.0, -4.0])) == pytest.approx(4.0, abs=1e-9)


def test_operator_norm_permutation():
    assert linalg.operator_norm([[0.0, 1.0], [1.0, 0.0]]) == pytest.approx(1.0, abs=1e-12)


def test_operator_norm_zero_and_rectangular():
    assert linalg.operator_norm(np.zeros((3, 2))) == 0.0
    assert linalg.operator_norm([[1.0, 0.0]]) == pytest.approx(1.0, abs=1e-12)


def test_operator_norm_never_exceeds_svd():
    rng = np.random.default_rng(7)
    for _ in range(25):
        n, m = rng.integers(1, 9, size=2)
        a = rng.uniform(-1, 1, (n, m))
        exact = np.linalg.svd(a, compute_uv=False)[0]
        est = linalg.operator_norm(a)
        assert est <= exact + 1e-12
        assert est == pytest.approx(exact, rel=1e-9, abs=1e-11)


def test_operator_norm_submultiplicative():
    rng = np.random.default_rng(11)
    for _ in range(40):
        n = int(rng.integers(1, 9))
        k = int(rng.integers(1, 9))
        m = int(rng.integers(1, 9))
        a = rng.uniform(-1, 1, (n, k))
        b = rng.uniform(-1, 1, (k, m))
        assert linalg.operator_norm(a @ b) <= (
            linalg.operator_norm(a) * linalg.operator_norm(b) + 1e-10
        )


def test_eigenvalues_triangular():
    es = linalg.eigenvalues_small([[1.0, 1.0], [0.0, 1.0]])
    np.testing.assert_allclose(sorted(es.values.real), [1.0, 1.0], atol=1e-12)
    assert es.max_abs == pytest.approx(1.0, abs=1e-12)


def test_eigenvalues_swap():
    es = linalg.eigenvalues_small([[0.0, 1.0], [1.0, 0.0]])
    np.testing.assert_allclose(sorted(es.values.real), [-1.0, 1.0], atol=1e-12)
    assert es.max_abs == pytest.approx(1.0, abs=1e-12)


def test_eigenvalues_rotation():
    th = 0.7
    rot = [[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]]
    es = linalg.eigenvalues_small(rot)
    got = sorted(es.values, key=lambda z: z.imag)
    assert got[1].real == pytest.approx(0.764842, abs=1e-6)
    assert got[1].imag == pytest.approx(0.644218, abs=1e-6)
    assert es.max_abs == pytest.approx(1.0, abs=1e-12)


def test_eigenvalues_conjugate_pairs_and_moments():
    rng = np.random.default_rng(3)
    for _ in range(25):
        n = int(rng.integers(1, 9))
        a = rng.uniform(-1, 1, (n, n))
        es = linalg.eigenvalues_small(a)
        # conjugate pairing
        vals = sorted(es.values, key=lambda z: (round(z.real, 9), z.imag))
        paired = sorted(np.conj(vals), key=lambda z: (round(z.real, 9), z.imag))
        np.testing.assert_allclose(vals, paired, atol=1e-9)
        # product ~ det, sum ~ trace
        det = np.linalg.det(a)
        assert np.prod(es.values) == pytest.approx(det, rel=1e-7, abs=1e-9)
        assert np.sum(es.values).real == pytest.approx(np.trace(a), abs=1e-8)
        assert np.sum(es.values).imag == pytest.approx(0.0, abs=1e-8)


def test_eigenvalues_block_triangular_exact():
    th = 0.7
    rot = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    a = np.zeros((4, 4))
    a[:2, :2] = rot
    a[2:, 2:] = rot
    a[:2, 2:] = np.eye(2)
    es = linalg.eigenvalues_small(a)
    np.testing.assert_allclose(np.abs(es.values), np.ones(4), atol=1e-12)


def test_eigenvalues_dimension_guard():
    with pytest.raises(ValueError):
        linalg.eigenvalues_small(np.eye(9))


def test_sherman_morrison_scalar():
    k, p_new = linalg.sherman_morrison(np.array([[1.0]]), np.array([1.0]))
    np.testing.assert_allclose(k, [0.5])
    np.testing.assert_allclose(p_new, [[0.5]])


def test_sherman_morrison_zero_vector():
    p = np.array([[2.0, 0.5], [0.5, 1.0]])
    k, p_new = linalg.sherman_morrison(p, np.zeros(2))
    np.testing.assert_allclose(k, np.zeros(2))
    np.testing.assert_allclose(p_new, p)


def test_sherman_morrison_unit_vector():
    k, p_new = linalg.sherman_morrison(np.eye(2), np.array([1.0, 0.0]))
    np.testing.assert_allclose(k, [0.5, 0.0])
    np.testing.assert_allclose(p_new, np.diag([0.5, 1.0]))


def test_sherman_morrison_matches_direct_inverse():
    rng = np.random.default_rng(5)
    for _ in range(30):
        d = int(rng.integers(1, 7))
        root = rng.uniform(-1, 1, (d, d))
        p = root @ root.T + 0.5 * np.eye(d)
        z = rng.uniform(-1, 1, d)
        _, p_new = linalg.sherman_morrison(p, z)
        direct = np.linalg.solve(np.linalg.inv(p) + np.outer(z, z), np.eye(d))
        np.testing.assert_allclose(p_new, direct, atol=1e-9)
        np.testing.assert_allclose(p_new, p_new.T)


def test_mat_power_seq():
    eye_powers = linalg.mat_power_seq(np.eye(2), 3)
    assert len(eye_powers) == 4
    for mat in eye_powers:
        np.testing.assert_allclose(mat, np.eye(2))
    jordan = linalg.mat_power_seq([[1.0, 1.0], [0.0, 1.0]], 5)
    np.testing.assert_allclose(jordan[5], [[1.0, 5.0], [0.0, 1.0]])
    swap = linalg.mat_power_seq([[0.0, 1.0], [1.0, 0.0]], 2)
    np.testing.assert_allclose(swap[2], np.eye(2))


def test_solve_dare_scalar_quadratic():
    p, gain = linalg.solve_dare([[0.5]], [[1.0]], [[1.0]], [[1.0]])
    # scalar fixed point solves p^2 - 0.25 p - 1 = 0
    root = (0.25 + np.sqrt(0.0625 + 4.0)) / 2.0
    assert p[0, 0] == pytest.approx(root, abs=1e-10)
    assert p[0, 0] == pytest.approx(1.132782, abs=1e-6)
    assert gain[0, 0] == pytest.approx(0.265565, abs=1e-6)


def test_solve_dare_zero_process_noise():
    p, gain = linalg.solve_dare([[0.5]], [[1.0]], [[0.0]], [[1.0]])
    assert p[0, 0] == pytest.approx(0.0, abs=1e-12)
    assert gain[0, 0] == pytest.approx(0.0, abs=1e-12)


def test_solve_dare_no_dynamics():
    p, gain = linalg.solve_dare([[0.0]], [[1.0]], [[2.0]], [[1.0]])
    assert p[0, 0] == pytest.approx(2.0, abs=1e-10)
    assert gain[0, 0] == pytest.approx(0.0, abs=1e-12)


def test_solve_dare_residual():
    rng = np.random.default_rng(9)
    a = np.array([[0.9, 0.2], [0.0, 0.7]])
    c = np.array([[1.0, 0.0]])
    q = np.diag(rng.uniform(0.1, 1.0, 2))
    r = np.array([[0.5]])
    p, _ = linalg.solve_dare(a, c, q, r)
    assert linalg.dare_residual(a, c, q, r, p) <= 1e-9


def test_solve_dare_nonconvergence():
    # marginal unobservable mode with positive injection never settles
    with pytest.raises(NonConvergenceError):
        linalg.solve_dare([[1.0]], [[0.0]], [[1.0]], [[1.0]])


def test_solve_gauss_matches_lapack():
    rng = np.random.default_rng(13)
    for _ in range(20):
        n = int(rng.integers(1, 8))
        a = rng.uniform(-1, 1, (n, n)) + n * np.eye(n)
        b = rng.uniform(-1, 1, (n, 2))
        np.testing.assert_allclose(
            linalg.solve_gauss(a, b), np.linalg.solve(a, b), atol=1e-10
        )


def test_solve_gauss_longdouble():
    a = np.array([[2.0, 1.0], [1.0, 3.0]], dtype=np.longdouble)
    b = np.array([1.0, 0.0], dtype=np.longdouble)
    x = linalg.solve_gauss(a, b)
    assert x.dtype == np.longdouble
    np.testing.assert_allclose((a @ x).astype(float), b.astype(float), atol=1e-15)


def test_as_matrix_rejects_nan():
    with pytest.raises(ValueError):
        linalg.as_matrix([[np.nan, 0.0], [0.0, 1.0]])
