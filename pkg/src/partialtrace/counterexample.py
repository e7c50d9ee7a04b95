"""A continuous solution with no Hölder modulus when ``a_1 = a_N = 0``.

``u(x) = f(x_1)`` with ``f(t) = 1 / (2 - log|t|)`` (and ``f(0) = 0``) solves
``a_2 lambda_2(D^2 u) + ... + a_{N-1} lambda_{N-1}(D^2 u) = 0`` in the unit
ball in the viscosity sense, yet ``f(t) / |t|^alpha`` is unbounded near 0
for every ``alpha > 0``. The checks here are numerical witnesses of those
facts; the sampled ones are evidence, not proofs.
"""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

from .errors import DomainError, InvalidInputError
from .operators import _as_weights, evaluate
from .spectral import eigenvalues

__all__ = [
    "f_value",
    "f_prime",
    "f_second",
    "ConcavityReport",
    "concavity_check",
    "BlowupTable",
    "holder_blowup",
    "SpotcheckReport",
    "check_candidate",
    "supersolution_spotcheck",
    "subsolution_search",
    "viscosity_residual_away_from_plane",
]


def _domain(t, allow_zero=True):
    t = np.asarray(t, dtype=float)
    if not np.all(np.abs(t) < 1.0):
        raise DomainError("t must lie in (-1, 1)")
    if not allow_zero and np.any(t == 0.0):
        raise DomainError("derivatives of f are not defined at t = 0")
    return t


def _scalar(val, t):
    return float(val) if np.ndim(t) == 0 else val


def f_value(t):
    """``1 / (2 - log|t|)`` for ``t != 0`` and 0 at ``t = 0``."""
    t = _domain(t)
    with np.errstate(divide="ignore"):
        val = np.where(t == 0.0, 0.0, 1.0 / (2.0 - np.log(np.abs(t))))
    return _scalar(val, t)


def f_prime(t):
    """``1 / (t (2 - log|t|)^2)``."""
    t = _domain(t, allow_zero=False)
    return _scalar(1.0 / (t * (2.0 - np.log(np.abs(t))) ** 2), t)


def f_second(t):
    """``log|t| / (t^2 (2 - log|t|)^3)``, negative on ``0 < |t| < 1``."""
    t = _domain(t, allow_zero=False)
    L = np.log(np.abs(t))
    return _scalar(L / (t * t * (2.0 - L) ** 3), t)


@dataclass(frozen=True)
class ConcavityReport:
    samples: int
    violations: int
    max_f_second: float

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def as_dict(self) -> dict:
        return {"samples": self.samples, "violations": self.violations,
                "max_f_second": self.max_f_second, "passed": self.passed}


def concavity_check(samples: int = 1000) -> ConcavityReport:
    """Sign of ``f''`` at log-spaced ``|t|`` in ``(1e-12, 1 - 1e-6)`` and their mirrors."""
    if samples < 1:
        raise InvalidInputError("samples must be >= 1")
    # log-spaced towards both ends of (0, 1)
    half = max(samples // 2, 1)
    small = np.geomspace(1e-12, 0.5, half)
    large = 1.0 - np.geomspace(1e-6, 0.5, samples - half + 1)[:-1]
    t = np.concatenate([small, large])
    t = np.concatenate([t, -t])
    fs = f_second(t)
    return ConcavityReport(len(t), int(np.sum(~(fs < 0))), float(fs.max()))


@dataclass(frozen=True)
class BlowupTable:
    """Rows ``(alpha, k, t_k, f(t_k) / t_k^alpha)`` with ``t_k = 10^-k``."""

    rows: tuple[tuple[float, int, float, float], ...]

    def ratios(self, alpha: float) -> np.ndarray:
        return np.array([r[3] for r in self.rows if r[0] == alpha])

    def onset(self, alpha: float) -> int | None:
        """Smallest k from which the ratios increase strictly up to the last row."""
        R = self.ratios(alpha)
        ks = [r[1] for r in self.rows if r[0] == alpha]
        inc = np.diff(R) > 0
        if inc.size == 0 or not inc[-1]:
            return None
        j = len(inc)
        while j > 0 and inc[j - 1]:
            j -= 1
        return ks[j]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("alpha,k,t,ratio\n")
        for alpha, k, t, ratio in self.rows:
            buf.write(f"{float(alpha)!r},{k},{float(t)!r},{float(ratio)!r}\n")
        return buf.getvalue()


def holder_blowup(alphas, k_max: int) -> BlowupTable:
    """Tabulate ``R(alpha, k) = f(t_k) / t_k^alpha = 10^(k alpha) / (2 + k ln 10)``."""
    if k_max < 2:
        raise InvalidInputError("k_max must be >= 2")
    rows = []
    for alpha in alphas:
        alpha = float(alpha)
        if not 0.0 < alpha <= 1.0:
            raise InvalidInputError(f"alpha must lie in (0, 1], got {alpha}")
        for k in range(1, k_max + 1):
            t = 10.0 ** (-k)
            rows.append((alpha, k, t, float(10.0 ** (k * alpha) / (2.0 + k * np.log(10.0)))))
    return BlowupTable(tuple(rows))


@dataclass(frozen=True)
class SpotcheckReport:
    N: int
    trials: int
    accepted: int
    violations: int
    max_lambda: float
    max_restricted: float
    tol: float

    @property
    def inconclusive(self) -> bool:
        return self.accepted == 0

    @property
    def passed(self) -> bool:
        return self.accepted > 0 and self.violations == 0

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in
                ("N", "trials", "accepted", "violations", "max_lambda", "max_restricted", "tol")} | {
            "passed": self.passed, "inconclusive": self.inconclusive,
            "note": "touching from below certified on sampled points only"}


def _ball_points(N: int, radius: float, n: int, seed: int) -> np.ndarray:
    """Quasi-random points in the ball, half of them on the hyperplane x_1 = 0."""
    sob = qmc.Sobol(N + 1, scramble=True, seed=seed)
    Z = sob.random_base2(int(np.ceil(np.log2(n))))[:n]
    # direction from inverse-normal of the first N coordinates, radius from the last
    G = ndtri(np.clip(Z[:, :N], 1e-12, 1 - 1e-12))
    G /= np.linalg.norm(G, axis=1, keepdims=True)
    pts = radius * G * Z[:, N:] ** (1.0 / N)
    pts[: n // 2, 0] = 0.0
    return pts


def check_candidate(p, M, radius: float = 0.05, points: int = 10_000, seed: int = 0) -> dict:
    """Touching test and eigenvalue data for one quadratic ``q(x) = p.x + x^T M x / 2``."""
    p = np.asarray(p, dtype=float)
    M = 0.5 * (np.asarray(M, dtype=float) + np.asarray(M, dtype=float).T)
    N = p.size
    D = _ball_points(N, radius, points, seed)
    q = D @ p + 0.5 * np.einsum("ij,jk,ik->i", D, M, D)
    return {
        "touches_below": bool(np.all(q <= f_value(D[:, 0]) + 1e-12)),
        "lambda_n_minus_1": float(eigenvalues(M)[N - 2]),
        "restricted_max": float(eigenvalues(M[1:, 1:])[-1]),
    }


def supersolution_spotcheck(trials: int, seed: int = 0, N: int = 3,
                            radius: float = 0.05, points: int = 10_000,
                            tol: float = 1e-6) -> SpotcheckReport:
    """Quadratics touching ``u(x) = f(x_1)`` from below at ``(0, x0')`` have ``lambda_{N-1} <= 0``.

    Since ``u`` does not depend on ``x'``, the touching point can be taken as the
    origin. Candidates ``q(x) = p.x + x^T M x / 2`` are accepted if
    ``q <= u`` on a quasi-random sample of the ball of `radius` around ``x0``.
    For each accepted candidate both ``lambda_{N-1}(M)`` and the largest
    Rayleigh quotient of ``M`` on ``{x_1 = 0}`` must be at most `tol`.
    """
    if N < 3:
        raise InvalidInputError("N must be >= 3")
    if trials < 1:
        raise InvalidInputError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    D = _ball_points(N, radius, points, seed)
    u_vals = f_value(D[:, 0])
    accepted = violations = 0
    max_lam = max_res = -np.inf
    for _ in range(trials):
        p = np.zeros(N)
        p[0] = rng.uniform(-3, 3)
        if rng.random() < 0.2:
            p[1:] = rng.normal(0, 0.05, N - 1)
        M = rng.normal(0, 1.0, (N, N))
        M = 0.5 * (M + M.T)
        M[1:, 1:] -= rng.uniform(0, 3) * np.eye(N - 1)
        q = D @ p + 0.5 * np.einsum("ij,jk,ik->i", D, M, D)
        if np.any(q > u_vals + 1e-12):
            continue
        accepted += 1
        lam = eigenvalues(M)[N - 2]
        restricted = eigenvalues(M[1:, 1:])[-1]
        max_lam, max_res = max(max_lam, lam), max(max_res, restricted)
        if lam > tol or restricted > tol:
            violations += 1
    return SpotcheckReport(N, trials, accepted, violations, float(max_lam), float(max_res), tol)


def subsolution_search(trials: int, seed: int = 0, N: int = 3, bound: float = 100.0,
                       radius: float = 0.05) -> int:
    """Count quadratics with coefficients bounded by `bound` touching ``u`` from above on the plane.

    The sample includes points at ``x_1 = +-10^-j`` so the logarithmic cusp is
    resolved; the expected count is zero. Heuristic evidence only.
    """
    rng = np.random.default_rng(seed)
    D = _ball_points(N, radius, 4000, seed)
    near = np.zeros((2 * 12, N))
    near[:, 0] = np.concatenate([10.0 ** -np.arange(2, 14), -(10.0 ** -np.arange(2, 14))])
    D = np.vstack([D, near])
    u_vals = f_value(D[:, 0])
    found = 0
    for _ in range(trials):
        p = rng.uniform(-bound, bound, N)
        M = rng.uniform(-bound, bound, (N, N))
        M = 0.5 * (M + M.T)
        q = D @ p + 0.5 * np.einsum("ij,jk,ik->i", D, M, D)
        if np.all(q >= u_vals):
            found += 1
    return found


def viscosity_residual_away_from_plane(a, points=None, samples: int = 200, seed: int = 0) -> dict:
    """Evaluate ``M_a(D^2 u)`` at points with ``x_1 != 0`` for weights with ``a_1 = a_N = 0``.

    There ``D^2 u = diag(f''(x_1), 0, ..., 0)`` and its only nonzero
    eigenvalue, ``f'' < 0``, is ``lambda_1``.
    """
    a = _as_weights(a)
    N = a.dim
    if N < 3 or a.weights[0] != 0.0 or a.weights[-1] != 0.0:
        raise InvalidInputError("weights must have N >= 3 and a_1 = a_N = 0")
    if points is None:
        rng = np.random.default_rng(seed)
        points = rng.uniform(-0.6, 0.6, (samples, N))
        points[:, 0] = np.where(points[:, 0] == 0.0, 0.1, points[:, 0])
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[1] != N or np.any(points[:, 0] == 0.0):
        raise InvalidInputError("points must have N coordinates and x_1 != 0")
    values = []
    for x in points:
        Hess = np.zeros((N, N))
        Hess[0, 0] = f_second(x[0])
        values.append(evaluate(a, Hess))
    values = np.array(values)
    worst = float(np.abs(values).max())
    return {"samples": len(values), "max_abs_value": worst, "passed": worst <= 1e-9}
