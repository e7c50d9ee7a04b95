"""Explicit Hölder exponent, proof constants and the doubling-variable matrices.

For weights with ``a_1, a_N > 0`` the exponent is

    beta = 1 - (a_1 + a_N) / (sqrt(a_1) + sqrt(a_N))^2,

and the barrier used in the comparison argument has ``A = 1 - beta`` with
``B, C, D`` and the localization constant ``L`` computed from the data by
:func:`theorem_constants`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import barrier as _barrier
from .errors import InvalidInputError, NotClassAError
from .operators import WeightVector, _as_weights
from .spectral import as_symmetric, eigenvalues

__all__ = [
    "ProblemData",
    "TheoremConstants",
    "beta",
    "theorem_constants",
    "barrier_params_for",
    "comparison_ode_residual",
    "build_theta",
    "theta_ordering_threshold",
    "DoublingReport",
    "check_pair",
    "admissible_pair",
    "verify_doubling_inequalities",
    "contradiction_eps",
    "proofcheck",
]


def beta(a1: float, aN: float) -> float:
    """Hölder exponent ``1 - (a1 + aN) / (sqrt(a1) + sqrt(aN))^2``.

    Evaluated as ``2 sqrt(a1) sqrt(aN) / (sqrt(a1) + sqrt(aN))^2``, which is the
    same number but returns exactly 1/2 whenever ``a1 == aN``.
    """
    a1, aN = float(a1), float(aN)
    if not (a1 > 0 and aN > 0) or not np.isfinite(a1 + aN):
        raise InvalidInputError(f"a1 and aN must be positive and finite, got {a1}, {aN}")
    s1, s2 = np.sqrt(a1), np.sqrt(aN)
    return float(2.0 * s1 * s2 / (s1 + s2) ** 2)


@dataclass(frozen=True)
class ProblemData:
    """Data entering the interior estimate.

    ``u_sup`` and ``f_sup`` are sup-norms on the larger subdomain, ``delta``
    the localization radius.
    """

    a: WeightVector
    c_h: float
    u_sup: float
    f_sup: float
    delta: float

    def __post_init__(self):
        object.__setattr__(self, "a", _as_weights(self.a))
        if not self.a.class_A:
            raise NotClassAError(f"a_1 and a_N must be positive, got {self.a.weights}")
        for name in ("c_h", "u_sup", "f_sup"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise InvalidInputError(f"{name} must be finite and nonnegative, got {v}")
        if not np.isfinite(self.delta) or self.delta <= 0:
            raise InvalidInputError(f"delta must be positive, got {self.delta}")

    @property
    def a1(self) -> float:
        return self.a.weights[0]

    @property
    def aN(self) -> float:
        return self.a.weights[-1]

    @property
    def root_sum_sq(self) -> float:
        return (np.sqrt(self.a1) + np.sqrt(self.aN)) ** 2


@dataclass(frozen=True)
class TheoremConstants:
    L: float
    D: float
    C: float
    B: float


def theorem_constants(data: ProblemData) -> TheoremConstants:
    S = data.root_sum_sq
    delta, c_h = data.delta, data.c_h
    L = 2.0 * data.u_sup / delta**2
    D = 2.0 * data.u_sup
    C = 2.0 * (L * (data.a.one_norm + c_h * delta * (1.0 + 2.0 * L * delta)) + data.f_sup + 1.0) / S
    B = 2.0 * L * delta * c_h / S
    return TheoremConstants(L=float(L), D=float(D), C=float(C), B=float(B))


def barrier_params_for(data: ProblemData) -> _barrier.BarrierParams:
    """Barrier parameters ``(1 - beta, B, C, D, delta)`` for the comparison function."""
    k = theorem_constants(data)
    A = 1.0 - beta(data.a1, data.aN)
    return _barrier.BarrierParams(A=A, B=k.B, C=k.C, D=k.D, delta=data.delta)


def comparison_ode_residual(data: ProblemData, b: _barrier.BarrierFunction, r) -> np.ndarray:
    """Residual of the un-normalized radial ODE at `r`.

    ``S phi'' + ((a1 + aN)/r + 2 L delta C_H) phi' + 2 (L (|a|_1 + C_H delta (1 + 2 L delta)) + |f| + 1)``
    with ``S = (sqrt(a1) + sqrt(aN))^2``; zero for the barrier of
    :func:`barrier_params_for`.
    """
    k = theorem_constants(data)
    r = np.asarray(r, dtype=float)
    d, c_h = data.delta, data.c_h
    rhs = 2.0 * (k.L * (data.a.one_norm + c_h * d * (1.0 + 2.0 * k.L * d)) + data.f_sup + 1.0)
    f1 = _barrier.phi_prime(b, r)
    f2 = _barrier.phi_double_prime(b, r)
    return data.root_sum_sq * f2 + ((data.a1 + data.aN) / r + 2.0 * k.L * d * c_h) * f1 + rhs


def _unit(e) -> np.ndarray:
    e = np.asarray(e, dtype=float).ravel()
    n = np.linalg.norm(e)
    if e.size < 1 or not abs(n - 1.0) <= 1e-12:
        raise InvalidInputError(f"direction must be a unit vector, |e| = {n}")
    return e


def _theta_values(phi_p, phi_pp, r, eps):
    p = phi_p / r
    return phi_pp * (1.0 + 2.0 * eps * phi_pp), p * (1.0 + 2.0 * eps * p)


def build_theta(phi_p: float, phi_pp: float, r: float, eps: float, e):
    """Matrix ``Theta_eps`` and its predicted ascending spectrum.

    ``Theta = phi''(1 + 2 eps phi'') P + (phi'/r)(1 + 2 eps phi'/r)(I - P)``
    with ``P = e e^T``. The first value is simple, the second has
    multiplicity N - 1; the prediction is ascending as long as
    ``eps < theta_ordering_threshold(phi_p, phi_pp, r)``.
    """
    if r <= 0:
        raise InvalidInputError("r must be positive")
    if eps < 0:
        raise InvalidInputError("eps must be nonnegative")
    e = _unit(e)
    N = e.size
    mu1, mu2 = _theta_values(phi_p, phi_pp, r, eps)
    P = np.outer(e, e)
    theta = as_symmetric(mu1 * P + mu2 * (np.eye(N) - P))
    predicted = np.sort(np.array([mu1] + [mu2] * (N - 1)), kind="stable")
    return theta, predicted


def theta_ordering_threshold(phi_p: float, phi_pp: float, r: float) -> float:
    """Largest eps for which ``phi''(1 + 2 eps phi'') < (phi'/r)(1 + 2 eps phi'/r)``.

    Returns ``inf`` when the ordering holds for every eps >= 0 and 0 when it
    already fails at eps = 0.
    """
    p, s = phi_p / r, phi_pp
    if not s < p:
        return 0.0
    # gap(eps) = (p - s) + 2 eps (p^2 - s^2)
    if p * p >= s * s:
        return np.inf
    return 1.0 / (2.0 * (-s - p))


def contradiction_eps(phi_p: float, phi_pp: float, r: float, a1: float, aN: float) -> float:
    """Bound below which ``1 <= eps (S phi''^2 + (a1 + aN)(phi'/r)^2)`` is impossible."""
    S = (np.sqrt(a1) + np.sqrt(aN)) ** 2
    q = S * phi_pp**2 + (a1 + aN) * (phi_p / r) ** 2
    return np.inf if q == 0 else 1.0 / q


@dataclass(frozen=True)
class DoublingReport:
    trials: int
    admissible: int
    generation_failures: int
    violations: tuple[int, int, int]
    worst_margins: tuple[float, float, float]

    @property
    def passed(self) -> bool:
        return self.generation_failures == 0 and sum(self.violations) == 0

    def as_dict(self) -> dict:
        return {
            "trials": self.trials,
            "admissible": self.admissible,
            "generation_failures": self.generation_failures,
            "violations": list(self.violations),
            "worst_margins": list(self.worst_margins),
            "passed": self.passed,
        }


def _block_gap(theta, X, Y):
    return np.block([[theta - X, -theta], [-theta, theta + Y]])


def check_pair(theta, X, Y, a1: float, aN: float, e, tol: float | None = None) -> dict:
    """Test the block inequality for ``(X, Y)`` and the three consequences.

    The block inequality is ``diag(X, -Y) <= [[Theta, -Theta], [-Theta, Theta]]``.
    Margins are right side minus left side, so nonnegative means the
    inequality holds:

    * ``S <Theta e, e> - (a1 lambda_1(X) - aN lambda_N(Y))``
    * ``aN lambda_N(Theta) - aN lambda_N(X)``
    * ``a1 lambda_N(Theta) + a1 lambda_1(Y)``
    """
    theta, X, Y = as_symmetric(theta), as_symmetric(X), as_symmetric(Y)
    e = _unit(e)
    scale = 1.0 + max(np.abs(theta).max(), np.abs(X).max(), np.abs(Y).max())
    tol = 1e-9 * scale if tol is None else tol
    gap_min = float(eigenvalues(_block_gap(theta, X, Y))[0])
    lx, ly, lt = eigenvalues(X), eigenvalues(Y), eigenvalues(theta)
    S = (np.sqrt(a1) + np.sqrt(aN)) ** 2
    margins = (
        float(S * (e @ theta @ e) - (a1 * lx[0] - aN * ly[-1])),
        float(aN * lt[-1] - aN * lx[-1]),
        float(a1 * lt[-1] + a1 * ly[0]),
    )
    return {
        "admissible": gap_min >= -tol,
        "block_gap_min": gap_min,
        "margins": margins,
        "holds": tuple(m >= -tol for m in margins),
        "tol": tol,
    }


def admissible_pair(theta, rng: np.random.Generator):
    """Random ``(X, Y)`` satisfying the block inequality by construction.

    With ``S`` positive definite and ``T`` positive semidefinite,
    ``X = Theta - Theta S^-1 Theta - T`` and ``Y = S - Theta`` make the gap
    matrix ``[[Theta S^-1 Theta + T, -Theta], [-Theta, S]]`` positive
    semidefinite (its Schur complement is ``T``).
    """
    theta = as_symmetric(theta)
    N = theta.shape[0]
    Q, _ = np.linalg.qr(rng.standard_normal((N, N)))
    S = (Q * np.exp(rng.normal(0.0, 1.0, N))) @ Q.T
    R = rng.standard_normal((N, N)) * rng.uniform(0.0, 1.0)
    T = R.T @ R
    X = theta - theta @ np.linalg.solve(S, theta) - T
    Y = S - theta
    return as_symmetric(X), as_symmetric(Y)


def verify_doubling_inequalities(
    theta, a1: float, aN: float, e, trials: int, seed: int = 0, max_retries: int = 10
) -> DoublingReport:
    """Check the three eigenvalue consequences on random admissible pairs."""
    if trials < 1:
        raise InvalidInputError("trials must be >= 1")
    if not (a1 > 0 and aN > 0):
        raise NotClassAError("a1 and aN must be positive")
    rng = np.random.default_rng(seed)
    admissible = failures = 0
    violations = [0, 0, 0]
    worst = [np.inf, np.inf, np.inf]
    for _ in range(trials):
        for _ in range(max_retries):
            X, Y = admissible_pair(theta, rng)
            res = check_pair(theta, X, Y, a1, aN, e)
            if res["admissible"]:
                break
        else:
            failures += 1
            continue
        admissible += 1
        for i, (m, ok) in enumerate(zip(res["margins"], res["holds"])):
            worst[i] = min(worst[i], m)
            violations[i] += not ok
    return DoublingReport(trials, admissible, failures, tuple(violations), tuple(float(w) for w in worst))


def proofcheck(data: ProblemData, r: float | None = None, eps: float | None = None,
               trials: int = 500, seed: int = 0, nodes: int = 100) -> dict:
    """Run every computable step of the comparison argument for `data`.

    Builds the barrier, checks its properties and the radial ODE, forms
    ``Theta_eps`` at distance `r` along a random direction, compares its
    spectrum with the prediction and tests the three eigenvalue inequalities
    on random admissible pairs. ``eps`` defaults to half the ordering
    threshold (capped at 0.1).
    """
    rng = np.random.default_rng(seed)
    params = barrier_params_for(data)
    b = _barrier.build(params)
    props = _barrier.verify_properties(b)
    rr = _barrier.verification_nodes(data.delta, nodes)
    ode = np.abs(comparison_ode_residual(data, b, rr))
    # terms grow like r^-A near 0, so also report the residual relative to them
    ode_scale = 1.0 + data.root_sum_sq * np.abs(_barrier.phi_double_prime(b, rr))
    r = 0.5 * data.delta if r is None else float(r)
    f1, f2 = _barrier.phi_prime(b, r), _barrier.phi_double_prime(b, r)
    threshold = theta_ordering_threshold(f1, f2, r)
    if eps is None:
        eps = min(0.5 * threshold, 0.1)
    e = rng.standard_normal(data.a.dim)
    e /= np.linalg.norm(e)
    theta, predicted = build_theta(f1, f2, r, eps, e)
    spectrum_error = float(np.abs(eigenvalues(theta) - predicted).max())
    doubling = verify_doubling_inequalities(theta, data.a1, data.aN, e, trials, seed)
    k = theorem_constants(data)
    return {
        "beta": beta(data.a1, data.aN),
        "constants": {"L": k.L, "D": k.D, "C": k.C, "B": k.B},
        "barrier": {"A": params.A, "K": b.K, "properties_passed": props.passed,
                    "checks": props.as_dict()["checks"]},
        "holder_constant_surrogate": b.seminorm_bound(),
        "comparison_ode_max_residual": float(ode.max()),
        "comparison_ode_max_relative_residual": float((ode / ode_scale).max()),
        "theta": {"r": r, "eps": float(eps), "ordering_threshold": float(threshold),
                  "spectrum_error": spectrum_error, "predicted": [float(v) for v in predicted]},
        "doubling": doubling.as_dict(),
        "contradiction_eps": contradiction_eps(f1, f2, r, data.a1, data.aN),
    }
