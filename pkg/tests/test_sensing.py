import warnings

import numpy as np
import pytest

from tvlevelset.sensing import (
    SensingOperator,
    estimate_lipschitz,
    generate_gaussian_operator,
    load_measurements,
    load_operator,
    measure,
    proxy_observations,
    save_measurements,
    save_operator,
)


def test_gaussian_entry_statistics():
    k, p = 100, 400
    a = generate_gaussian_operator(k, p, seed=7).matrix
    assert abs(a.mean()) < 0.005
    assert 0.8 / k <= a.var() <= 1.2 / k


def test_gaussian_is_deterministic():
    a = generate_gaussian_operator(30, 50, seed=3).matrix
    b = generate_gaussian_operator(30, 50, seed=3).matrix
    assert a.tobytes() == b.tobytes()
    assert not np.array_equal(a, generate_gaussian_operator(30, 50, seed=4).matrix)


def test_expected_column_norm_is_one():
    # average squared column norm over many independent draws
    norms = [
        np.sum(generate_gaussian_operator(20, 10, seed=s).matrix ** 2, axis=0).mean()
        for s in range(200)
    ]
    assert abs(np.mean(norms) - 1.0) < 0.1


@pytest.mark.parametrize("k, p", [(0, 5), (5, 0), (-1, 3)])
def test_gaussian_rejects_bad_dims(k, p):
    with pytest.raises(ValueError):
        generate_gaussian_operator(k, p, seed=0)


def test_measure_noise_free(rng):
    op = generate_gaussian_operator(6, 9, seed=1)
    assert np.all(measure(op, np.zeros(9), 0.0, seed=0).y == 0)
    x = rng.normal(size=9)
    np.testing.assert_array_equal(measure(op, x, 0.0, seed=5).y, op.matrix @ x)
    ident = SensingOperator.identity(9)
    np.testing.assert_array_equal(measure(ident, x, 0.0, seed=0).y, x)


def test_measure_noise_statistics():
    op = SensingOperator(np.zeros((5000, 2)))
    y = measure(op, np.zeros(2), 10.0, seed=11).y
    assert abs(y.mean()) < 0.5
    assert abs(y.std() - 10.0) < 0.3
    np.testing.assert_array_equal(y, measure(op, np.zeros(2), 10.0, seed=11).y)


def test_measure_errors():
    op = generate_gaussian_operator(3, 4, seed=0)
    with pytest.raises(ValueError):
        measure(op, np.zeros(5), 0.0, seed=0)
    with pytest.raises(ValueError):
        measure(op, np.zeros(4), -1.0, seed=0)


def test_measure_is_linear_when_noise_free(rng):
    op = generate_gaussian_operator(8, 12, seed=2)
    x1, x2 = rng.normal(size=(2, 12))
    a, b = 1.7, -0.3
    lhs = measure(op, a * x1 + b * x2, 0, 0).y
    rhs = a * measure(op, x1, 0, 0).y + b * measure(op, x2, 0, 0).y
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12)


def test_proxy_identity_recovers_signal(rng):
    x = rng.normal(size=16)
    op = SensingOperator.identity(16)
    np.testing.assert_array_equal(proxy_observations(op, measure(op, x, 0, 0)), x)


def test_proxy_partial_isometry_projects():
    # rows e_1, e_3 of the 4x4 identity: A^T A is the projector onto those coordinates
    a = np.eye(4)[[0, 2]]
    x = np.array([5.0, -1.0, 2.0, 7.0])
    op = SensingOperator(a)
    z = proxy_observations(op, measure(op, x, 0, 0))
    expected = np.diag([1.0, 0.0, 1.0, 0.0]) @ x
    np.testing.assert_array_equal(z, expected)


def test_proxy_associativity(rng):
    for s in range(10):
        op = generate_gaussian_operator(5, 7, seed=s)
        x = rng.normal(size=7)
        z = proxy_observations(op, measure(op, x, 0, 0))
        ref = (op.matrix.T @ op.matrix) @ x
        np.testing.assert_allclose(z, ref, rtol=1e-10)


def test_lipschitz_diagonal():
    op = SensingOperator(np.diag([3.0, 1.0]))
    assert estimate_lipschitz(op) == pytest.approx(9.0, rel=1e-4)
    assert op.lipschitz == pytest.approx(9.0, rel=1e-4)
    assert op.lipschitz_converged


def test_lipschitz_scalar_operator():
    op = SensingOperator(2.5 * np.eye(6))
    assert estimate_lipschitz(op) == pytest.approx(6.25, rel=1e-6)


def test_lipschitz_matches_dense_eigensolver(rng):
    a = rng.normal(size=(5, 5))
    ref = np.linalg.eigvalsh(a.T @ a)[-1]
    assert estimate_lipschitz(SensingOperator(a)) == pytest.approx(ref, rel=1e-4)


def test_lipschitz_bounds_rayleigh_quotients(rng):
    op = generate_gaussian_operator(30, 60, seed=9)
    tol = 1e-6
    lam = estimate_lipschitz(op, tol=tol)
    for v in rng.normal(size=(100, 60)):
        av = op.apply(v)
        assert av @ av <= lam * (v @ v) * (1 + tol)


def test_lipschitz_zero_operator():
    assert estimate_lipschitz(SensingOperator(np.zeros((3, 4)))) == 0.0


def test_lipschitz_nonconvergence_warns():
    # nearly degenerate top eigenvalues converge slowly
    op = SensingOperator(np.diag([1.0, 0.9999999]))
    with pytest.warns(RuntimeWarning):
        lam = estimate_lipschitz(op, tol=1e-15, max_iters=3)
    assert not op.lipschitz_converged
    assert 0.99 < lam <= 1.0


def test_lipschitz_argument_checks():
    op = SensingOperator(np.eye(2))
    with pytest.raises(ValueError):
        estimate_lipschitz(op, tol=0)
    with pytest.raises(ValueError):
        estimate_lipschitz(op, max_iters=0)


def test_operator_binary_round_trip(tmp_path):
    op = generate_gaussian_operator(4, 6, seed=42)
    path = tmp_path / "a.bin"
    save_operator(op, path)
    raw = path.read_bytes()
    assert raw[:8] == b"TVLSA001"
    assert int.from_bytes(raw[8:16], "little") == 4
    assert int.from_bytes(raw[16:24], "little") == 6
    assert int.from_bytes(raw[24:32], "little") == 42
    assert len(raw) == 32 + 8 * 24
    back = load_operator(path)
    assert back.matrix.tobytes() == op.matrix.tobytes()
    assert back.seed == 42


def test_operator_load_rejects_corruption(tmp_path):
    op = generate_gaussian_operator(2, 3, seed=1)
    path = tmp_path / "a.bin"
    save_operator(op, path)
    path.write_bytes(path.read_bytes()[:-1])
    with pytest.raises(ValueError):
        load_operator(path)
    path.write_bytes(b"XXXXXXXX" + b"\0" * 40)
    with pytest.raises(ValueError):
        load_operator(path)


def test_measurement_round_trip(tmp_path):
    op = generate_gaussian_operator(5, 8, seed=1)
    meas = measure(op, np.arange(8.0), 2.0, seed=17)
    save_measurements(meas, tmp_path / "y.bin")
    back = load_measurements(tmp_path / "y.bin")
    np.testing.assert_array_equal(back.y, meas.y)
    assert (back.sigma, back.seed) == (2.0, 17)


def test_no_warning_on_normal_use():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        estimate_lipschitz(generate_gaussian_operator(10, 20, seed=0))
