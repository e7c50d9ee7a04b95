"""Weighted partial trace operators ``M_a(X) = sum_i a_i lambda_i(X)``.

Covers the general operator, the Pucci-type special cases, the sampled
min-max form of ``lambda_1 + lambda_N``, the ellipticity constants of the
Pucci class containing ``M_a`` and first-order terms ``H(p)`` with their
growth constant.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidInputError, NotClassAError
from .spectral import as_symmetric, eigenvalues, random_orthogonal

__all__ = [
    "WeightVector",
    "HamiltonianSpec",
    "evaluate",
    "pucci_weights",
    "isaacs_minmax",
    "sphere_samples",
    "ellipticity_constants",
    "MonotonicityReport",
    "monotonicity_margin",
    "degenerate_ellipticity_check",
]

MONOTONE_TOL = 1e-8


@dataclass(frozen=True)
class WeightVector:
    """Nonnegative weights ``(a_1, ..., a_N)`` attached to ordered eigenvalues."""

    weights: tuple[float, ...]

    def __post_init__(self):
        w = tuple(float(x) for x in np.ravel(self.weights))
        if len(w) < 1:
            raise InvalidInputError("weight vector must be nonempty")
        if not all(np.isfinite(w)):
            raise InvalidInputError("weights must be finite")
        if any(x < 0 for x in w):
            raise InvalidInputError(f"weights must be nonnegative, got {w}")
        object.__setattr__(self, "weights", w)

    @classmethod
    def of(cls, *weights) -> "WeightVector":
        if len(weights) == 1 and np.ndim(weights[0]) == 1:
            weights = tuple(weights[0])
        return cls(tuple(weights))

    def __len__(self):
        return len(self.weights)

    @property
    def dim(self) -> int:
        return len(self.weights)

    @property
    def a_star(self) -> float:
        return min(self.weights[0], self.weights[-1])

    @property
    def one_norm(self) -> float:
        return float(sum(self.weights))

    @property
    def class_A(self) -> bool:
        return self.weights[0] > 0 and self.weights[-1] > 0

    def as_array(self) -> np.ndarray:
        return np.array(self.weights)


def _as_weights(a) -> WeightVector:
    return a if isinstance(a, WeightVector) else WeightVector(tuple(np.ravel(a)))


@dataclass(frozen=True)
class HamiltonianSpec:
    """First-order term ``H(p)`` together with a growth constant ``c_h``.

    ``c_h`` is a constant for which
    ``|H(p + q) - H(p)| <= c_h (1 + |p| + |q|) |q|`` holds for all p, q.
    Build instances with :meth:`zero`, :meth:`power_law` or :meth:`custom`.
    """

    kind: str
    c_h: float = 0.0
    A: float = 0.0
    B: float = 0.0
    tau: float = 0.0
    func: Callable | None = field(default=None, compare=False, repr=False)

    @classmethod
    def zero(cls) -> "HamiltonianSpec":
        return cls("zero")

    @classmethod
    def power_law(cls, A: float, B: float, tau: float) -> "HamiltonianSpec":
        """``H(p) = A|p|^2 + B|p|^tau`` with ``c_h = 2|A| + |B| max(tau, 1) + |B|``.

        For ``0 < tau < 1`` and ``B != 0`` no such constant exists (the
        difference quotient at ``p = 0`` behaves like ``|q|^(tau - 1)``), so
        those exponents are rejected. ``|p|^0`` is taken to be 1.
        """
        A, B, tau = float(A), float(B), float(tau)
        if not 0.0 <= tau <= 2.0:
            raise InvalidInputError(f"tau must lie in [0, 2], got {tau}")
        if B != 0.0 and 0.0 < tau < 1.0:
            raise InvalidInputError(
                f"H(p) = B|p|^tau with 0 < tau < 1 has no finite growth constant (tau={tau})"
            )
        c_h = 2.0 * abs(A) + abs(B) * max(tau, 1.0) + abs(B)
        return cls("power_law", c_h=c_h, A=A, B=B, tau=tau)

    @classmethod
    def custom(cls, func: Callable, c_h: float) -> "HamiltonianSpec":
        if c_h < 0:
            raise InvalidInputError("c_h must be nonnegative")
        return cls("custom", c_h=float(c_h), func=func)

    def __call__(self, p) -> np.ndarray:
        """Evaluate on gradients stacked along the last axis."""
        p = np.asarray(p, dtype=float)
        if self.kind == "zero":
            return np.zeros(p.shape[:-1])
        if self.kind == "power_law":
            norm = np.sqrt(np.sum(p * p, axis=-1))
            return self.A * norm**2 + self.B * norm**self.tau
        return np.asarray(self.func(p), dtype=float)

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero" or (self.kind == "power_law" and self.A == 0 and self.B == 0)


def evaluate(a, X) -> float:
    """``M_a(X) = sum_i a_i lambda_i(X)`` with eigenvalues in ascending order."""
    a = _as_weights(a)
    X = as_symmetric(X)
    if X.shape[0] != a.dim:
        raise InvalidInputError(f"weights have length {a.dim} but X is {X.shape}")
    return float(np.dot(a.weights, eigenvalues(X)))


def pucci_weights(kind: str, k: int, N: int) -> WeightVector:
    """Weights reproducing ``P^-_k`` (k smallest) or ``P^+_k`` (k largest eigenvalues)."""
    if not 1 <= k <= N:
        raise InvalidInputError(f"k must lie in [1, {N}], got {k}")
    w = np.zeros(N)
    if kind == "minus":
        w[:k] = 1.0
    elif kind == "plus":
        w[N - k:] = 1.0
    else:
        raise InvalidInputError(f"kind must be 'minus' or 'plus', got {kind!r}")
    return WeightVector(tuple(w))


def _fibonacci_sphere(n: int) -> np.ndarray:
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = np.pi * (3.0 - np.sqrt(5.0)) * i
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def sphere_samples(N: int, n: int, seed: int = 0) -> np.ndarray:
    """Unit vectors in R^N: a randomly rotated Fibonacci lattice for N = 3, Gaussian otherwise."""
    rng = np.random.default_rng(seed)
    if N == 3:
        return _fibonacci_sphere(n) @ random_orthogonal(3, rng).T
    Z = rng.standard_normal((n, N))
    return Z / np.linalg.norm(Z, axis=1, keepdims=True)


def isaacs_minmax(X, angular_samples: int, seed: int = 0) -> float:
    """Sampled ``min_xi max_eta (<X xi, xi> + <X eta, eta>)`` over unit vectors.

    Converges to ``lambda_1(X) + lambda_N(X)`` as the number of samples grows.
    """
    X = as_symmetric(X)
    N = X.shape[0]
    if angular_samples < N:
        raise InvalidInputError(f"need at least N={N} angular samples")
    U = sphere_samples(N, angular_samples, seed)
    q = np.einsum("ij,jk,ik->i", U, X, U)
    # the inner max does not depend on xi
    return float(q.min() + q.max())


def ellipticity_constants(a) -> tuple[float, float]:
    """Constants ``(a_* / N, |a|_1)`` of the Pucci class containing ``M_a``."""
    a = _as_weights(a)
    if not a.class_A:
        raise NotClassAError(f"a_1 and a_N must be positive, got {a.weights}")
    return a.a_star / a.dim, a.one_norm


@dataclass(frozen=True)
class MonotonicityReport:
    trials: int
    violations: int
    worst_margin: float
    tol: float = MONOTONE_TOL

    @property
    def passed(self) -> bool:
        return self.violations == 0


def monotonicity_margin(a, X, Y) -> float:
    """``M_a(Y) - M_a(X)``; nonnegative whenever ``X <= Y``."""
    return evaluate(a, Y) - evaluate(a, X)


def degenerate_ellipticity_check(a, trials: int, seed: int = 0) -> MonotonicityReport:
    """Check ``M_a(X) <= M_a(X + P^T P)`` on random symmetric X and square P."""
    a = _as_weights(a)
    if trials < 1:
        raise InvalidInputError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    N = a.dim
    worst = np.inf
    violations = 0
    for _ in range(trials):
        X = rng.uniform(-1, 1, (N, N))
        X = 0.5 * (X + X.T)
        P = rng.standard_normal((N, N)) * rng.uniform(0, 1)
        margin = monotonicity_margin(a, X, X + P.T @ P)
        worst = min(worst, margin)
        if margin < -MONOTONE_TOL:
            violations += 1
    return MonotonicityReport(trials, violations, float(worst))
