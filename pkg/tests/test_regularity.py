import numpy as np
import pytest

from partialtrace import barrier as bar
from partialtrace import regularity as reg
from partialtrace.errors import InvalidInputError, NotClassAError
from partialtrace.operators import WeightVector


def data(a=(1, 1), c_h=0.0, u_sup=1.0, f_sup=1.0, delta=1.0):
    return reg.ProblemData(WeightVector(a), c_h, u_sup, f_sup, delta)


def test_beta_examples():
    assert reg.beta(1, 1) == 0.5
    for a in (1e-6, 0.3, 7.0, 1e6):
        assert reg.beta(a, a) == 0.5
    assert reg.beta(4, 1) == pytest.approx(4 / 9, abs=1e-12)
    for bad in ((0, 1), (1, 0), (-1, 1), (np.inf, 1)):
        with pytest.raises(InvalidInputError):
            reg.beta(*bad)


def test_beta_scale_invariance():
    rng = np.random.default_rng(0)
    for _ in range(100):
        a1, aN = rng.uniform(0.01, 10, 2)
        for t in (0.1, 1.0, 10.0):
            assert abs(reg.beta(t * a1, t * aN) - reg.beta(a1, aN)) <= 1e-12


def test_beta_at_most_half():
    vals = np.linspace(0.01, 5, 100)
    for a1 in vals:
        for aN in vals:
            b = reg.beta(a1, aN)
            assert 0 < b <= 0.5
            if a1 != aN:
                assert b < 0.5


def test_beta_decreases_to_zero():
    seq = [reg.beta(1, aN) for aN in (1, 0.1, 0.01, 0.001)]
    assert all(b < a for a, b in zip(seq, seq[1:]))
    assert reg.beta(1, 1e-12) < 1e-5


def test_problem_data_validation():
    with pytest.raises(NotClassAError):
        reg.ProblemData(WeightVector((1, 1, 0)), 0, 1, 1, 1)
    with pytest.raises(InvalidInputError):
        data(u_sup=-1)
    with pytest.raises(InvalidInputError):
        data(delta=0)


def test_constants_examples():
    k = reg.theorem_constants(data())
    assert (k.L, k.D, k.B) == (2.0, 2.0, 0.0)
    assert k.C == pytest.approx(3.0, abs=1e-14)
    k0 = reg.theorem_constants(data(a=(1, 4), u_sup=0, f_sup=2))
    assert (k0.L, k0.D, k0.B) == (0, 0, 0)
    assert k0.C == pytest.approx(2 * 3 / 9)
    k2 = reg.theorem_constants(data(a=(1, 0, 3), c_h=0.5, u_sup=2.0, delta=0.5))
    k1 = reg.theorem_constants(data(a=(1, 0, 3), c_h=0.5, u_sup=1.0, delta=0.5))
    assert k2.D == 2 * k1.D and k2.L == 2 * k1.L


def test_constants_with_hamiltonian():
    # hand arithmetic: a=(1,1), C_H=1, u=1, f=0, delta=1 gives L=2, S=4,
    # C = 2 (2 (2 + 1 (1 + 4)) + 1) / 4 = 7.5, B = 2*2*1*1/4 = 1
    k = reg.theorem_constants(data(c_h=1.0, f_sup=0.0))
    assert k.C == pytest.approx(7.5) and k.B == pytest.approx(1.0)


def test_constants_signs_random():
    rng = np.random.default_rng(1)
    for _ in range(10_000):
        n = int(rng.integers(2, 5))
        a = rng.uniform(0, 3, n)
        a[0], a[-1] = rng.uniform(0.01, 3, 2)
        k = reg.theorem_constants(reg.ProblemData(
            WeightVector(a), rng.uniform(0, 5), rng.uniform(0, 5), rng.uniform(0, 5), rng.uniform(0.01, 3)))
        assert k.L >= 0 and k.D >= 0 and k.B >= 0 and k.C > 0


def test_barrier_params_for():
    p = reg.barrier_params_for(data())
    assert p.A == 0.5 and p.B == 0.0 and p.D == 2.0
    assert reg.barrier_params_for(data(a=(4, 1))).A == pytest.approx(5 / 9)


def test_comparison_ode_residual():
    d = data()
    b = bar.build(reg.barrier_params_for(d))
    r = np.geomspace(1e-4, 1, 100)
    assert np.abs(reg.comparison_ode_residual(d, b, r)).max() <= 1e-7
    d = data(a=(1, 0, 2), c_h=0.7, u_sup=0.5, f_sup=3.0, delta=0.8)
    b = bar.build(reg.barrier_params_for(d))
    res = reg.comparison_ode_residual(d, b, np.geomspace(1e-4, 0.8, 100))
    assert np.abs(res).max() <= 1e-7


def test_theta_examples():
    e = np.array([1.0, 0.0, 0.0])
    theta, pred = reg.build_theta(2.0, -1.0, 1.0, 0.1, e)
    assert np.allclose(pred, [-0.8, 2.8, 2.8])
    assert np.allclose(np.linalg.eigvalsh(theta), [-0.8, 2.8, 2.8], atol=1e-12)
    theta0, pred0 = reg.build_theta(2.0, -1.0, 1.0, 0.0, e)
    assert np.array_equal(theta0, np.diag([-1.0, 2.0, 2.0]))
    assert pred0.tolist() == [-1.0, 2.0, 2.0]
    with pytest.raises(InvalidInputError):
        reg.build_theta(1.0, -1.0, 0.0, 0.0, e)
    with pytest.raises(InvalidInputError):
        reg.build_theta(1.0, -1.0, 1.0, -0.1, e)
    with pytest.raises(InvalidInputError):
        reg.build_theta(1.0, -1.0, 1.0, 0.1, [1.0, 1.0])


def test_ordering_threshold():
    assert reg.theta_ordering_threshold(2.0, -1.0, 1.0) == np.inf
    # |phi''| = 3 > phi'/r = 1: gap 4 - 16 eps closes at 1/4
    t = reg.theta_ordering_threshold(1.0, -3.0, 1.0)
    assert t == pytest.approx(0.25)
    m1, m2 = reg._theta_values(1.0, -3.0, 1.0, t)
    assert m1 == pytest.approx(m2)
    assert reg.theta_ordering_threshold(1.0, 2.0, 1.0) == 0.0


def test_theta_spectrum_random():
    rng = np.random.default_rng(2)
    skipped = 0
    for _ in range(2000):
        f1, f2, r = rng.uniform(0.01, 5), -rng.uniform(0.01, 5), rng.uniform(0.05, 1)
        thr = reg.theta_ordering_threshold(f1, f2, r)
        eps = rng.uniform(0, min(thr, 1.0))
        if eps >= thr:
            skipped += 1
            continue
        N = int(rng.integers(2, 6))
        e = rng.normal(size=N)
        e /= np.linalg.norm(e)
        theta, pred = reg.build_theta(f1, f2, r, eps, e)
        assert np.abs(np.linalg.eigvalsh(theta) - pred).max() <= 1e-10 * (1 + np.abs(pred).max())
    assert skipped == 0


def test_admissible_pairs_are_admissible():
    rng = np.random.default_rng(3)
    theta, _ = reg.build_theta(2.0, -1.0, 1.0, 0.1, [1.0, 0.0, 0.0])
    for _ in range(200):
        X, Y = reg.admissible_pair(theta, rng)
        gap = np.block([[theta - X, -theta], [-theta, theta + Y]])
        assert np.linalg.eigvalsh(gap).min() >= -1e-9 * (1 + np.abs(gap).max())


def test_doubling_inequalities():
    e = np.array([0.0, 1.0, 0.0])
    theta, _ = reg.build_theta(2.0, -1.0, 1.0, 0.1, e)
    rep = reg.verify_doubling_inequalities(theta, 1.0, 1.0, e, 500, seed=0)
    assert rep.passed and rep.admissible == 500 and rep.violations == (0, 0, 0)
    rep = reg.verify_doubling_inequalities(theta, 0.3, 2.0, e, 200, seed=1)
    assert rep.passed
    with pytest.raises(NotClassAError):
        reg.verify_doubling_inequalities(theta, 0.0, 1.0, e, 5)


def test_first_inequality_bound_from_prediction():
    e = np.array([1.0, 0.0, 0.0])
    theta, _ = reg.build_theta(2.0, -1.0, 1.0, 0.1, e)
    rng = np.random.default_rng(4)
    for _ in range(100):
        X, Y = reg.admissible_pair(theta, rng)
        lhs = np.linalg.eigvalsh(X)[0] - np.linalg.eigvalsh(Y)[-1]
        assert lhs <= 4 * (-0.8) + 1e-9


def test_sign_flipped_pair_is_not_admissible():
    # X = Theta, Y = -Theta leaves the gap [[0, -Theta], [-Theta, 0]], indefinite for Theta != 0
    e = np.array([1.0, 0.0, 0.0])
    theta, _ = reg.build_theta(2.0, -1.0, 1.0, 0.1, e)
    res = reg.check_pair(theta, theta, -theta, 1.0, 1.0, e)
    assert not res["admissible"]
    assert res["block_gap_min"] == pytest.approx(-2.8)
    # and the first consequence indeed fails for it
    assert not res["holds"][0]


def test_zero_pair_admissible_for_psd_gap():
    e = np.array([1.0, 0.0])
    theta = np.eye(2)
    res = reg.check_pair(theta, np.zeros((2, 2)), np.zeros((2, 2)), 1.0, 1.0, e)
    assert res["admissible"] and all(res["holds"])


def test_contradiction_eps():
    assert reg.contradiction_eps(2.0, -1.0, 1.0, 1.0, 1.0) == pytest.approx(1 / (4 + 8))
    assert reg.contradiction_eps(0.0, 0.0, 1.0, 1.0, 1.0) == np.inf


def test_proofcheck():
    out = reg.proofcheck(data(a=(1, 0, 2)), trials=200, seed=0)
    assert out["barrier"]["properties_passed"]
    assert out["comparison_ode_max_relative_residual"] <= 1e-12
    assert out["theta"]["spectrum_error"] <= 1e-10
    assert out["doubling"]["passed"] and out["doubling"]["admissible"] == 200
    assert out["beta"] == pytest.approx(reg.beta(1, 2))
    assert out["holder_constant_surrogate"] > 0
