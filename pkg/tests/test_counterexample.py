import numpy as np
import pytest

from partialtrace import counterexample as cex
from partialtrace.errors import DomainError, InvalidInputError


def test_values():
    assert cex.f_value(0.0) == 0.0
    assert cex.f_value(np.exp(-2.0)) == 0.25
    assert cex.f_value(-np.exp(-2.0)) == 0.25
    t = np.linspace(-0.99, 0.99, 101)
    assert np.array_equal(cex.f_value(t), cex.f_value(-t))
    for bad in (1.0, -1.0, 2.0):
        with pytest.raises(DomainError):
            cex.f_value(bad)


def test_continuity_and_monotonicity():
    t = np.geomspace(1e-300, 0.999, 2000)
    f = cex.f_value(t)
    assert np.all(np.diff(f) > 0)
    assert f[0] < 2e-3


def test_second_derivative_value():
    # log(1/e) = -1, so f'' = -1 / (e^-2 * 27)
    assert cex.f_second(np.exp(-1.0)) == pytest.approx(-np.exp(2) / 27, rel=1e-14)
    assert cex.f_second(np.exp(-1.0)) == pytest.approx(-0.273669, abs=1e-6)
    with pytest.raises(DomainError):
        cex.f_second(0.0)
    with pytest.raises(DomainError):
        cex.f_prime(np.array([0.1, 0.0]))


def test_derivatives_against_differences():
    t = np.geomspace(1e-6, 0.9, 50)
    h = 1e-4 * t
    fd2 = (cex.f_value(t + h) - 2 * cex.f_value(t) + cex.f_value(t - h)) / h**2
    assert np.all(np.abs(fd2 - cex.f_second(t)) <= 1e-4 * np.abs(cex.f_second(t)))
    fd1 = (cex.f_value(t + h) - cex.f_value(t - h)) / (2 * h)
    assert np.allclose(fd1, cex.f_prime(t), rtol=1e-7)


def test_concavity():
    rep = cex.concavity_check(1000)
    assert rep.passed and rep.violations == 0 and rep.samples == 2000
    assert cex.f_second(0.5) < 0 and cex.f_second(1 - 1e-6) < 0
    t = np.geomspace(1e-8, 0.99, 100)
    assert np.abs(cex.f_second(t) - cex.f_second(-t)).max() <= 1e-12 * np.abs(cex.f_second(t)).max()
    with pytest.raises(InvalidInputError):
        cex.concavity_check(0)


def test_blowup_table():
    table = cex.holder_blowup([1.0], 6)
    R = table.ratios(1.0)
    assert len(R) == 6 and np.all(np.diff(R) > 0)
    assert table.onset(1.0) == 1
    for k, r in enumerate(R, start=1):
        assert r == pytest.approx(cex.f_value(10.0**-k) / 10.0**-k, rel=1e-12)


def test_blowup_eventually_increasing_for_small_alpha():
    table = cex.holder_blowup([0.1], 40)
    onset = table.onset(0.1)
    assert onset is not None and onset > 1
    assert table.ratios(0.1)[-1] > 10


def test_blowup_zero_exponent_limit():
    # with alpha -> 0 the ratio is f(t_k) itself, which goes to 0
    vals = [cex.f_value(10.0**-k) for k in range(1, 13)]
    assert np.all(np.diff(vals) < 0)


def test_blowup_validation_and_csv():
    with pytest.raises(InvalidInputError):
        cex.holder_blowup([0.0], 5)
    with pytest.raises(InvalidInputError):
        cex.holder_blowup([1.5], 5)
    with pytest.raises(InvalidInputError):
        cex.holder_blowup([0.5], 1)
    lines = cex.holder_blowup([0.5], 3).to_csv().splitlines()
    assert lines[0] == "alpha,k,t,ratio" and len(lines) == 4
    assert lines[1].startswith("0.5,1,0.1,")


def test_candidate_examples():
    N = 3
    M = np.diag([0.0, -2.0, -2.0])
    out = cex.check_candidate(np.zeros(N), M)
    assert out["touches_below"]
    assert out["lambda_n_minus_1"] == pytest.approx(-2.0)
    out = cex.check_candidate(np.zeros(N), np.zeros((N, N)))
    assert out["touches_below"] and out["lambda_n_minus_1"] == 0.0
    # a bowl opening upwards in x' cannot stay below u
    assert not cex.check_candidate(np.zeros(N), np.diag([0.0, 1.0, 0.0]))["touches_below"]


def test_supersolution_spotcheck_seeds():
    for seed in range(10):
        rep = cex.supersolution_spotcheck(100, seed=seed, N=3 + seed % 2)
        assert rep.accepted > 0 and rep.violations == 0 and rep.passed
        assert rep.max_lambda <= 1e-6 and rep.max_restricted <= 1e-6


def test_spotcheck_validation():
    with pytest.raises(InvalidInputError):
        cex.supersolution_spotcheck(10, N=2)
    with pytest.raises(InvalidInputError):
        cex.supersolution_spotcheck(0)


def test_subsolution_search_finds_nothing():
    assert cex.subsolution_search(300, seed=0) == 0
    assert cex.subsolution_search(100, seed=1, N=4) == 0


def test_off_plane_value():
    out = cex.viscosity_residual_away_from_plane((0, 1, 1, 0), points=[[0.3, 0.1, -0.2, 0.0]])
    assert out["max_abs_value"] == 0.0 and out["passed"]
    assert cex.viscosity_residual_away_from_plane((0, 5, 0))["max_abs_value"] <= 1e-9
    with pytest.raises(InvalidInputError):
        cex.viscosity_residual_away_from_plane((1, 1, 0))
    with pytest.raises(InvalidInputError):
        cex.viscosity_residual_away_from_plane((0, 1, 0), points=[[0.0, 0.1, 0.1]])
