import numpy as np
import pytest

from partialtrace.errors import InvalidInputError, NotClassAError
from partialtrace.operators import (
    HamiltonianSpec,
    WeightVector,
    degenerate_ellipticity_check,
    ellipticity_constants,
    evaluate,
    isaacs_minmax,
    monotonicity_margin,
    pucci_weights,
    sphere_samples,
)
from partialtrace.spectral import random_orthogonal


def sym(rng, n):
    A = rng.uniform(-1, 1, (n, n))
    return 0.5 * (A + A.T)


def test_weight_vector_fields():
    a = WeightVector.of(2, 0, 0, 8)
    assert a.dim == 4
    assert a.a_star == 2.0
    assert a.one_norm == 10.0
    assert a.class_A
    assert not WeightVector.of(0, 1, 1).class_A
    assert not WeightVector.of(1, 1, 0).class_A


@pytest.mark.parametrize("bad", [(), (1.0, -0.1), (1.0, np.inf)])
def test_weight_vector_rejects(bad):
    with pytest.raises(InvalidInputError):
        WeightVector(bad)


def test_evaluate_examples():
    rng = np.random.default_rng(0)
    X = sym(rng, 4)
    assert evaluate((1, 1, 1, 1), X) == pytest.approx(np.trace(X), abs=1e-9)
    assert evaluate((1, 0, 1), np.diag([-1.0, 0.0, 2.0])) == pytest.approx(1.0, abs=1e-12)
    Q = random_orthogonal(2, rng)
    assert evaluate((1, 2), Q @ np.diag([-2.0, 4.0]) @ Q.T) == pytest.approx(6.0, abs=1e-10)
    with pytest.raises(InvalidInputError):
        evaluate((1, 1), np.eye(3))


def test_laplacian_equals_trace():
    rng = np.random.default_rng(1)
    for _ in range(500):
        n = int(rng.integers(1, 7))
        X = sym(rng, n)
        assert abs(evaluate(np.ones(n), X) - np.trace(X)) <= 1e-9


def test_positive_homogeneity():
    rng = np.random.default_rng(2)
    for _ in range(200):
        n = int(rng.integers(1, 6))
        a = rng.uniform(0, 2, n)
        X = sym(rng, n)
        t = rng.uniform(0, 10)
        assert abs(evaluate(a, t * X) - t * evaluate(a, X)) <= 1e-9 * (1 + t)


def test_pucci_weights():
    assert pucci_weights("minus", 3, 3).weights == (1.0, 1.0, 1.0)
    D = np.diag([-1.0, 0.0, 2.0])
    assert evaluate(pucci_weights("minus", 1, 3), D) == pytest.approx(-1.0)
    assert evaluate(pucci_weights("plus", 2, 3), D) == pytest.approx(2.0)
    with pytest.raises(InvalidInputError):
        pucci_weights("minus", 0, 3)
    with pytest.raises(InvalidInputError):
        pucci_weights("minus", 4, 3)
    with pytest.raises(InvalidInputError):
        pucci_weights("middle", 1, 3)


def test_sphere_samples_are_unit():
    for N in (2, 3, 5):
        U = sphere_samples(N, 1000, seed=3)
        assert U.shape == (1000, N)
        assert np.allclose(np.linalg.norm(U, axis=1), 1.0)


def test_isaacs_examples():
    assert isaacs_minmax(np.eye(3), 10) == pytest.approx(2.0, abs=1e-12)
    D = np.diag([-1.0, 0.0, 2.0])
    assert abs(isaacs_minmax(D, 100_000, seed=0) - 1.0) <= 0.05
    Q = random_orthogonal(3, np.random.default_rng(4))
    assert abs(isaacs_minmax(D, 100_000) - isaacs_minmax(Q @ D @ Q.T, 100_000)) <= 0.05
    with pytest.raises(InvalidInputError):
        isaacs_minmax(D, 2)


def test_isaacs_error_shrinks_with_samples():
    rng = np.random.default_rng(5)
    mats = [sym(rng, 3) for _ in range(20)]
    errors = []
    for s in (100, 1000, 10_000, 100_000):
        errs = [isaacs_minmax(X, s, seed=6) - evaluate((1, 0, 1), X) for X in mats]
        # sampled min is >= lambda_1 and sampled max <= lambda_N; the sum can err either way
        errors.append(np.median(np.abs(errs)))
    assert all(b <= a for a, b in zip(errors, errors[1:]))
    assert errors[-1] <= 0.05


def test_ellipticity_constants():
    assert ellipticity_constants((1, 1, 1)) == pytest.approx((1 / 3, 3))
    assert ellipticity_constants((1, 0, 1)) == pytest.approx((1 / 3, 2))
    assert ellipticity_constants((2, 0, 0, 8)) == pytest.approx((0.5, 10))
    with pytest.raises(NotClassAError):
        ellipticity_constants((0, 1, 1))


def test_monotonicity_examples():
    assert monotonicity_margin((1, 1), np.zeros((2, 2)), np.eye(2)) == pytest.approx(2.0)
    X = sym(np.random.default_rng(7), 3)
    assert monotonicity_margin((1, 0, 1), X, X) == 0.0
    rep = degenerate_ellipticity_check((1, 0, 1), 1000, seed=0)
    assert rep.passed and rep.violations == 0 and rep.worst_margin >= -1e-8


def test_monotonicity_any_nonnegative_weights():
    rng = np.random.default_rng(8)
    for _ in range(20):
        n = int(rng.integers(1, 6))
        a = rng.uniform(0, 3, n) * (rng.random(n) < 0.7)
        assert degenerate_ellipticity_check(a, 50, seed=int(rng.integers(1 << 30))).passed


def test_hamiltonian_zero():
    H = HamiltonianSpec.zero()
    assert H.is_zero and H.c_h == 0.0
    assert np.array_equal(H(np.ones((4, 2))), np.zeros(4))


@pytest.mark.parametrize("tau", [0.0, 1.0, 2.0])
def test_power_law_growth_bound(tau):
    rng = np.random.default_rng(int(tau * 10) + 9)
    for _ in range(20):
        A, B = rng.uniform(-1, 1, 2)
        H = HamiltonianSpec.power_law(A, B, tau)
        p = rng.normal(size=(500, 2)) * rng.choice([1e-3, 1, 100], (500, 1))
        q = rng.normal(size=(500, 2)) * rng.choice([1e-3, 1, 100], (500, 1))
        lhs = np.abs(H(p + q) - H(p))
        nq = np.linalg.norm(q, axis=1)
        rhs = H.c_h * (1 + np.linalg.norm(p, axis=1) + nq) * nq
        assert np.all(lhs <= rhs * (1 + 1e-12) + 1e-12)


def test_power_law_values_and_rejections():
    H = HamiltonianSpec.power_law(1.0, 2.0, 1.0)
    assert H(np.array([3.0, 4.0])) == pytest.approx(25 + 10)
    assert H.c_h == pytest.approx(2 + 2 + 2)
    with pytest.raises(InvalidInputError):
        HamiltonianSpec.power_law(1.0, 1.0, 0.5)
    with pytest.raises(InvalidInputError):
        HamiltonianSpec.power_law(1.0, 1.0, 2.5)
    # B = 0 makes any tau harmless
    assert HamiltonianSpec.power_law(1.0, 0.0, 0.5).c_h == 2.0


def test_custom_hamiltonian():
    H = HamiltonianSpec.custom(lambda p: p[..., 0], c_h=1.0)
    assert H(np.array([[2.0, 5.0]])).tolist() == [2.0]
    with pytest.raises(InvalidInputError):
        HamiltonianSpec.custom(lambda p: p, c_h=-1.0)
