"""Independent reference implementations used only by the tests.

Written with plain loops and dense linear algebra so they share no code
with the vectorized library routines they check.
"""
from itertools import product
from math import gcd

import numpy as np


def lattice_directions(width):
    out = []
    for p, q in product(range(-width, width + 1), repeat=2):
        if (p, q) == (0, 0) or gcd(abs(p), abs(q)) != 1:
            continue
        if (-p, -q) not in out:
            out.append((p, q))
    return out


def _usable(i, j, p, q, nx, ny):
    return 0 <= i - p < nx and 0 <= i + p < nx and 0 <= j - q < ny and 0 <= j + q < ny


def _d2(U, i, j, p, q, h):
    return (U[i + p, j + q] - 2 * U[i, j] + U[i - p, j - q]) / (h * h * (p * p + q * q))


def loop_residual(U, a1, a2, h, F, width=1, H=None):
    """Node-by-node residual of the monotone scheme; F is indexed like U."""
    nx, ny = U.shape
    m = min(a1, a2)
    dirs = lattice_directions(width)
    R = np.zeros_like(U)
    for i in range(1, nx - 1):
        for j in range(1, ny - 1):
            lap = _d2(U, i, j, 1, 0, h) + _d2(U, i, j, 0, 1, h)
            vals = [_d2(U, i, j, p, q, h) for p, q in dirs if _usable(i, j, p, q, nx, ny)]
            r = m * lap + (a1 - m) * min(vals) + (a2 - m) * max(vals)
            if H is not None:
                g = np.array([(U[i + 1, j] - U[i - 1, j]) / (2 * h), (U[i, j + 1] - U[i, j - 1]) / (2 * h)])
                r += float(H(g))
            R[i, j] = r - F[i, j]
    return R


def howard_fixed_point(G, a1, a2, h, F, width=1, max_policies=100):
    """Exact discrete solution (H = 0) by policy iteration on the chosen direction.

    For fixed directions the scheme is linear; each policy is solved with a
    dense solve, then every node switches to the direction attaining the
    min (a1 > a2) or max (a2 > a1) for the new iterate.
    """
    nx, ny = G.shape
    m = min(a1, a2)
    extra = (a1 - m) if a1 > a2 else (a2 - m)
    pick = min if a1 > a2 else max
    dirs = lattice_directions(width)
    interior = [(i, j) for i in range(1, nx - 1) for j in range(1, ny - 1)]
    index = {node: k for k, node in enumerate(interior)}
    policy = {node: (1, 0) for node in interior}
    U = G.astype(float).copy()
    for _ in range(max_policies):
        n = len(interior)
        A = np.zeros((n, n))
        b = np.array([F[i, j] for i, j in interior], dtype=float)

        def add(k, i, j, p, q, w):
            c = w / (h * h * (p * p + q * q))
            for s in (1, -1):
                nb = (i + s * p, j + s * q)
                if nb in index:
                    A[k, index[nb]] += c
                else:
                    b[k] -= c * G[nb]
            A[k, k] -= 2 * c

        for k, (i, j) in enumerate(interior):
            add(k, i, j, 1, 0, m)
            add(k, i, j, 0, 1, m)
            if extra > 0:
                add(k, i, j, *policy[(i, j)], extra)
        sol = np.linalg.solve(A, b)
        for k, node in enumerate(interior):
            U[node] = sol[k]
        if extra == 0:
            return U
        new = {}
        for i, j in interior:
            cands = [(p, q) for p, q in dirs if _usable(i, j, p, q, nx, ny)]
            vals = [_d2(U, i, j, p, q, h) for p, q in cands]
            best = pick(vals)
            cur = _d2(U, i, j, *policy[(i, j)], h)
            # keep the current direction on ties so the iteration terminates
            new[(i, j)] = policy[(i, j)] if cur == best else cands[vals.index(best)]
        if new == policy:
            return U
        policy = new
    raise RuntimeError("policy iteration did not settle")
