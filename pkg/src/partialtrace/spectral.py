"""Ordered eigenvalues of small dense symmetric matrices.

Everything downstream needs ``lambda_1(X) <= ... <= lambda_N(X)`` for
matrices of size at most ten, so the decomposition is a plain cyclic Jacobi
iteration rather than a LAPACK call: it is deterministic, accurate to a few
ulps for these sizes, and has no hidden ordering conventions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "Spectrum",
    "as_symmetric",
    "eigen_decompose",
    "eigenvalues",
    "loewner_leq",
    "rayleigh_quotient",
    "random_orthogonal",
    "courant_fischer_upper",
]

JACOBI_TOL = 1e-14
MAX_SWEEPS = 60


def as_symmetric(M) -> np.ndarray:
    """Return a read-only, exactly symmetric float copy of `M`.

    The input is symmetrized as ``(M + M.T) / 2`` so that ``S[i, j] == S[j, i]``
    holds bit for bit.
    """
    A = np.array(M, dtype=float, copy=True)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise InvalidInputError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInputError("matrix has non-finite entries")
    S = 0.5 * (A + A.T)
    S.setflags(write=False)
    return S


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues with an orthonormal frame.

    ``frame[i]`` is a unit eigenvector for ``eigenvalues[i]``.
    """

    eigenvalues: np.ndarray
    frame: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def reconstruct(self) -> np.ndarray:
        return (self.frame.T * self.eigenvalues) @ self.frame


def _jacobi(A: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    a = np.array(A, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    norm = np.sqrt(np.sum(a * a))
    if n == 1 or norm == 0.0:
        return np.diag(a).copy(), v
    iu = np.triu_indices(n, 1)
    for _ in range(MAX_SWEEPS):
        off = np.sqrt(2.0 * np.sum(a[iu] ** 2))
        if off <= tol * norm:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + np.hypot(theta, 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    return np.diag(a).copy(), v


def eigen_decompose(M, tol: float = JACOBI_TOL) -> Spectrum:
    """Eigen-decomposition of a symmetric matrix with ascending eigenvalues.

    Parameters
    ----------
    M : array_like, shape (N, N)
        Symmetric matrix; it is symmetrized before use.
    tol : float
        Sweeps stop once the off-diagonal Frobenius norm drops below
        ``tol * ||M||_F``.

    Returns
    -------
    Spectrum
        Sorted eigenvalues (stable sort) and the matching orthonormal frame.
    """
    S = as_symmetric(M)
    w, v = _jacobi(S, tol)
    order = np.argsort(w, kind="stable")
    w = w[order]
    frame = np.ascontiguousarray(v[:, order].T)
    w.setflags(write=False)
    frame.setflags(write=False)
    return Spectrum(w, frame)


def eigenvalues(M) -> np.ndarray:
    """Ascending eigenvalues of a symmetric matrix."""
    return eigen_decompose(M).eigenvalues


def loewner_leq(X, Y, tol: float = 0.0) -> bool:
    """True iff ``X <= Y`` in the Loewner order, i.e. ``lambda_1(Y - X) >= -tol``."""
    X = as_symmetric(X)
    Y = as_symmetric(Y)
    if X.shape != Y.shape:
        raise InvalidInputError(f"dimension mismatch: {X.shape} vs {Y.shape}")
    return bool(eigenvalues(Y - X)[0] >= -tol)


def rayleigh_quotient(M, x) -> float:
    x = np.asarray(x, dtype=float)
    return float(x @ np.asarray(M) @ x / (x @ x))


def random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal matrix (QR of a Gaussian with sign fix)."""
    Z = rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    return Q * np.sign(np.diag(R))


def courant_fischer_upper(M, k: int, samples: int, seed: int = 0) -> float:
    """Sampled upper bound for ``lambda_k(M)`` from the min-max formula.

    ``lambda_k(M) = min over k-dimensional W of max over unit w in W of <Mw, w>``.
    The minimum is taken over `samples` random k-dimensional subspaces, so the
    result is never below ``lambda_k(M)`` (up to round-off) and decreases
    towards it as `samples` grows.
    """
    S = as_symmetric(M)
    n = S.shape[0]
    if not 1 <= k <= n:
        raise InvalidInputError(f"k must lie in [1, {n}], got {k}")
    if samples < 1:
        raise InvalidInputError("samples must be >= 1")
    if k == n:
        return float(eigenvalues(S)[-1])
    rng = np.random.default_rng(seed)
    best = np.inf
    for _ in range(samples):
        Q, _ = np.linalg.qr(rng.standard_normal((n, k)))
        R = Q.T @ S @ Q
        top = R[0, 0] if k == 1 else eigenvalues(R)[-1]
        best = min(best, float(top))
    return best
