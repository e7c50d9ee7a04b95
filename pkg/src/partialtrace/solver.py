"""Monotone wide-stencil solver for ``a1 lambda_1(D^2 u) + a2 lambda_2(D^2 u) + H(Du) = f`` in 2D.

In two dimensions, with ``m = min(a1, a2)``,

    a1 lambda_1 + a2 lambda_2 = m (lambda_1 + lambda_2) + (a1 - m) lambda_1 + (a2 - m) lambda_2,

and only one of the last two coefficients is nonzero. The trace is discretized
by the five-point Laplacian and the extreme eigenvalues by the min / max of
directional second differences over a wide stencil, which gives a monotone
(degenerate elliptic) scheme. The discrete problem is solved by explicit
pseudo-time stepping from a transfinite interpolation of the boundary data.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Callable, NamedTuple

import numpy as np

from .errors import DivergenceError, DomainError, InvalidInputError, NotClassAError
from .operators import HamiltonianSpec, WeightVector, _as_weights

__all__ = [
    "Grid",
    "GridFunction",
    "StencilSet",
    "Region",
    "SolverConfig",
    "SolveResult",
    "directional_second_difference",
    "discrete_operator",
    "initial_guess",
    "solve",
    "default_region",
    "holder_seminorm",
    "estimate_exponent",
    "stability_bound",
]


@dataclass(frozen=True)
class Grid:
    """Uniform ``nx`` by ``ny`` node grid with spacing ``h``.

    Arrays on the grid are indexed ``[i, j]`` with ``x = x0 + i h`` and
    ``y = y0 + j h``. ``boundary`` is the Dirichlet data: a callable
    ``g(x, y)`` or an ``(nx, ny)`` array of which only the boundary ring is read.
    """

    nx: int
    ny: int
    h: float
    origin: tuple[float, float] = (0.0, 0.0)
    boundary: Callable | np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.nx < 3 or self.ny < 3:
            raise InvalidInputError("grid needs at least 3 nodes per axis")
        if not self.h > 0:
            raise InvalidInputError("grid spacing must be positive")

    @classmethod
    def unit_square(cls, n: int, boundary=None) -> "Grid":
        return cls(n, n, 1.0 / (n - 1), (0.0, 0.0), boundary)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def x(self) -> np.ndarray:
        return self.origin[0] + self.h * np.arange(self.nx)

    @property
    def y(self) -> np.ndarray:
        return self.origin[1] + self.h * np.arange(self.ny)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x, self.y, indexing="ij")

    def sample(self, func) -> np.ndarray:
        """Evaluate ``func(x, y)`` (or broadcast an array / scalar) on all nodes."""
        if callable(func):
            X, Y = self.mesh()
            return np.broadcast_to(np.asarray(func(X, Y), dtype=float), self.shape).copy()
        return np.broadcast_to(np.asarray(func, dtype=float), self.shape).copy()

    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        mask[0, :] = mask[-1, :] = mask[:, 0] = mask[:, -1] = True
        return mask


@dataclass(frozen=True)
class GridFunction:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.shape:
            raise InvalidInputError(f"values have shape {v.shape}, grid is {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            raise InvalidInputError("grid function has non-finite values")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, grid: Grid, func) -> "GridFunction":
        return cls(grid, grid.sample(func))


@dataclass(frozen=True)
class StencilSet:
    """Primitive lattice directions ``(p, q)`` with ``|p|, |q| <= width``, one per +-pair."""

    width: int = 1
    directions: tuple[tuple[int, int], ...] = field(init=False)

    def __post_init__(self):
        if self.width < 1:
            raise InvalidInputError("stencil width must be >= 1")
        w = self.width
        dirs = []
        for p in range(0, w + 1):
            for q in range(-w, w + 1):
                if (p == 0 and q <= 0) or gcd(p, abs(q)) != 1:
                    continue
                dirs.append((p, q))
        dirs.sort(key=lambda d: (d[0] ** 2 + d[1] ** 2, d))
        object.__setattr__(self, "directions", tuple(dirs))

    @staticmethod
    def canonical(v) -> tuple[int, int]:
        p, q = int(v[0]), int(v[1])
        return (p, q) if (p > 0 or (p == 0 and q > 0)) else (-p, -q)

    def partner(self, v) -> tuple[int, int]:
        """The orthogonal direction ``(-q, p)``, canonicalized."""
        return self.canonical((-v[1], v[0]))

    def __iter__(self):
        return iter(self.directions)

    def __len__(self):
        return len(self.directions)


class Region(NamedTuple):
    """Half-open index box ``[i0, i1) x [j0, j1)``."""

    i0: int
    i1: int
    j0: int
    j1: int

    def slices(self):
        return slice(self.i0, self.i1), slice(self.j0, self.j1)


def default_region(grid: Grid) -> Region:
    """Centered box whose distance to the boundary is 1/8 of the side."""
    bi, bj = (grid.nx - 1) // 8, (grid.ny - 1) // 8
    return Region(bi, grid.nx - bi, bj, grid.ny - bj)


def directional_second_difference(u: GridFunction, node, v) -> float:
    """``(u(x + h v) - 2 u(x) + u(x - h v)) / (h^2 |v|^2)`` at an interior node."""
    g = u.grid
    i, j = node
    p, q = v
    if not (0 < i < g.nx - 1 and 0 < j < g.ny - 1):
        raise DomainError(f"node {node} is not interior")
    if not (0 <= i - abs(p) and i + abs(p) < g.nx and 0 <= j - abs(q) and j + abs(q) < g.ny):
        raise DomainError(f"direction {v} leaves the grid at node {node}")
    U = u.values
    return float((U[i + p, j + q] - 2.0 * U[i, j] + U[i - p, j - q]) / (g.h**2 * (p * p + q * q)))


class _Scheme:
    """Precomputed slices and masks for repeated residual evaluation."""

    def __init__(self, grid: Grid, a: WeightVector, H: HamiltonianSpec, stencil: StencilSet):
        a = _as_weights(a)
        if a.dim != 2:
            raise InvalidInputError("the grid solver handles two-dimensional weights only")
        if not a.class_A:
            raise NotClassAError(f"both weights must be positive, got {a.weights}")
        self.grid, self.H, self.stencil = grid, H, stencil
        self.a1, self.a2 = a.weights
        self.m = min(self.a1, self.a2)
        nx, ny, w = grid.nx, grid.ny, stencil.width
        ii, jj = np.meshgrid(np.arange(1, nx - 1), np.arange(1, ny - 1), indexing="ij")
        self.dirs = []
        for p, q in stencil:
            if (p, q) in ((1, 0), (0, 1)):
                continue
            valid = (ii - p >= 0) & (ii + p < nx) & (jj - abs(q) >= 0) & (jj + abs(q) < ny)
            if not valid.any():
                continue
            self.dirs.append((p, q, None if valid.all() else valid))
        self.w = w
        self.pad = np.zeros((nx + 2 * w, ny + 2 * w))
        self.h2 = grid.h**2

    def _shift(self, p, q):
        w, nx, ny = self.w, self.grid.nx, self.grid.ny
        return self.pad[w + 1 + p: w + nx - 1 + p, w + 1 + q: w + ny - 1 + q]

    def _d2(self, p, q, centre2):
        return (self._shift(p, q) + self._shift(-p, -q) - centre2) / (self.h2 * (p * p + q * q))

    def residual(self, U: np.ndarray, F: np.ndarray) -> np.ndarray:
        """Interior residual, shape ``(nx - 2, ny - 2)``."""
        w = self.w
        self.pad[w:-w, w:-w] = U
        c2 = 2.0 * U[1:-1, 1:-1]
        dxx = self._d2(1, 0, c2)
        dyy = self._d2(0, 1, c2)
        res = self.m * (dxx + dyy)
        if self.a1 > self.m:
            lo = np.minimum(dxx, dyy)
            for p, q, valid in self.dirs:
                d = self._d2(p, q, c2)
                lo = np.minimum(lo, d if valid is None else np.where(valid, d, np.inf))
            res += (self.a1 - self.m) * lo
        elif self.a2 > self.m:
            hi = np.maximum(dxx, dyy)
            for p, q, valid in self.dirs:
                d = self._d2(p, q, c2)
                hi = np.maximum(hi, d if valid is None else np.where(valid, d, -np.inf))
            res += (self.a2 - self.m) * hi
        if not self.H.is_zero:
            res += self.H(self.gradient(U))
        return res - F

    def gradient(self, U: np.ndarray) -> np.ndarray:
        h = self.grid.h
        gx = (U[2:, 1:-1] - U[:-2, 1:-1]) / (2.0 * h)
        gy = (U[1:-1, 2:] - U[1:-1, :-2]) / (2.0 * h)
        return np.stack([gx, gy], axis=-1)


def _interior(grid: Grid, f) -> np.ndarray:
    if f is None:
        return np.zeros((grid.nx - 2, grid.ny - 2))
    if isinstance(f, GridFunction):
        return f.values[1:-1, 1:-1]
    arr = np.asarray(f, dtype=float) if not callable(f) else None
    if arr is not None and arr.shape == (grid.nx - 2, grid.ny - 2):
        return arr
    return grid.sample(f)[1:-1, 1:-1]


def discrete_operator(u: GridFunction, a, H: HamiltonianSpec | None = None, f=None,
                      stencil: StencilSet | int = 1) -> GridFunction:
    """Scheme residual ``M_a^h(u) + H(D_h u) - f`` on interior nodes (zero on the boundary).

    Directions that reach outside the grid at a node are dropped from the
    min / max there; the axis directions are always available.
    """
    stencil = stencil if isinstance(stencil, StencilSet) else StencilSet(stencil)
    scheme = _Scheme(u.grid, a, H or HamiltonianSpec.zero(), stencil)
    out = np.zeros(u.grid.shape)
    out[1:-1, 1:-1] = scheme.residual(u.values, _interior(u.grid, f))
    return GridFunction(u.grid, out)


def initial_guess(grid: Grid, g=None) -> np.ndarray:
    """Transfinite (Coons) interpolation of the boundary values; exact on the boundary."""
    G = grid.sample(grid.boundary if g is None else g)
    s = np.linspace(0.0, 1.0, grid.nx)[:, None]
    t = np.linspace(0.0, 1.0, grid.ny)[None, :]
    left, right = G[0, :][None, :], G[-1, :][None, :]
    bottom, top = G[:, 0][:, None], G[:, -1][:, None]
    corners = ((1 - s) * (1 - t) * G[0, 0] + s * (1 - t) * G[-1, 0]
               + (1 - s) * t * G[0, -1] + s * t * G[-1, -1])
    U = (1 - s) * left + s * right + (1 - t) * bottom + t * top - corners
    mask = grid.boundary_mask()
    U[mask] = G[mask]
    return U


@dataclass(frozen=True)
class SolverConfig:
    """Pseudo-time parameters; ``tau=None`` means ``h^2 / (4 |a|_1 w^2)``."""

    tau: float | None = None
    max_iter: int = 200_000
    tol: float = 1e-8
    stencil_width: int = 1

    def time_step(self, grid: Grid, a: WeightVector) -> float:
        if self.tau is not None:
            return float(self.tau)
        return grid.h**2 / (4.0 * _as_weights(a).one_norm * self.stencil_width**2)


def stability_bound(grid: Grid, a) -> float:
    """Largest step keeping the explicit update monotone when ``H = 0``."""
    return grid.h**2 / (2.0 * _as_weights(a).one_norm)


class SolveResult(NamedTuple):
    u: GridFunction
    iterations: int
    residual: float
    diagnostics: dict


def solve(grid: Grid, a, H: HamiltonianSpec | None = None, f=None,
          config: SolverConfig | None = None, u0=None) -> SolveResult:
    """Relax ``u <- u + tau * residual(u)`` on the interior until ``max|residual| <= tol``.

    Each step reads only the current iterate and writes a fresh one, so the
    result does not depend on evaluation order.

    Raises
    ------
    DivergenceError
        If the residual grows to twice its smallest value so far.
    """
    config = config or SolverConfig()
    a = _as_weights(a)
    H = H or HamiltonianSpec.zero()
    scheme = _Scheme(grid, a, H, StencilSet(config.stencil_width))
    if grid.boundary is None and u0 is None:
        raise InvalidInputError("grid has no boundary data")
    tau = config.time_step(grid, a)
    if not tau > 0:
        raise InvalidInputError("tau must be positive")
    F = _interior(grid, f)
    U = initial_guess(grid) if u0 is None else np.array(u0, dtype=float)
    best = np.inf
    it = 0
    while True:
        R = scheme.residual(U, F)
        res = float(np.abs(R).max())
        if not np.isfinite(res) or res > 2.0 * best:
            raise DivergenceError(
                f"residual grew from {best:.3e} to {res:.3e} at iteration {it} (tau={tau:.3e})",
                it, res, best,
            )
        best = min(best, res)
        if res <= config.tol or it >= config.max_iter:
            break
        U_next = U.copy()
        U_next[1:-1, 1:-1] += tau * R
        U = U_next
        it += 1
    diagnostics = {"tau": tau, "converged": res <= config.tol}
    if not H.is_zero:
        grad = scheme.gradient(U)
        diagnostics["max_gradient"] = float(np.sqrt((grad**2).sum(-1)).max())
        diagnostics["max_first_order_term"] = float(np.abs(H(grad)).max())
    return SolveResult(GridFunction(grid, U), it, res, diagnostics)


def _region(u: GridFunction, region) -> tuple[np.ndarray, Region]:
    g = u.grid
    region = default_region(g) if region is None else Region(*region)
    i0, i1, j0, j1 = region
    if not (0 <= i0 < i1 <= g.nx and 0 <= j0 < j1 <= g.ny):
        raise InvalidInputError(f"region {tuple(region)} is empty or outside the grid")
    return u.values[region.slices()], region


def holder_seminorm(u: GridFunction, beta: float, region=None) -> float:
    """Brute-force ``max |u(x) - u(y)| / |x - y|^beta`` over node pairs in `region`."""
    if not 0 < beta <= 1:
        raise InvalidInputError(f"beta must lie in (0, 1], got {beta}")
    V, reg = _region(u, region)
    if V.size < 2:
        raise InvalidInputError("region must contain at least two nodes")
    ii, jj = np.meshgrid(np.arange(V.shape[0]), np.arange(V.shape[1]), indexing="ij")
    pts = np.column_stack([ii.ravel(), jj.ravel()]).astype(float) * u.grid.h
    vals = V.ravel()
    best = 0.0
    n = len(vals)
    chunk = max(1, 2_000_000 // n)
    for start in range(0, n - 1, chunk):
        stop = min(start + chunk, n - 1)
        d2 = ((pts[start:stop, None, :] - pts[None, :, :]) ** 2).sum(-1)
        dv = np.abs(vals[start:stop, None] - vals[None, :])
        # keep pairs (k, l) with l > k only
        upper = np.arange(n)[None, :] > np.arange(start, stop)[:, None]
        ratio = np.where(upper, dv / np.where(upper, d2, 1.0) ** (0.5 * beta), 0.0)
        best = max(best, float(ratio.max()))
    return best


def _modulus(V: np.ndarray, radius: int, start: int, current: float) -> float:
    # offsets with start < |(di, dj)| <= radius, one per +-pair
    best = current
    n0, n1 = V.shape
    for di in range(0, min(radius, n0 - 1) + 1):
        for dj in range(-min(radius, n1 - 1), min(radius, n1 - 1) + 1):
            if di == 0 and dj <= 0:
                continue
            r2 = di * di + dj * dj
            if r2 > radius * radius or r2 <= start * start:
                continue
            a = V[di:, max(dj, 0): n1 + min(dj, 0)]
            b = V[: n0 - di, max(-dj, 0): n1 - max(dj, 0)]
            best = max(best, float(np.abs(a - b).max()))
    return best


def estimate_exponent(u: GridFunction, region=None, min_scales: int = 4) -> tuple[float, float]:
    """Fit ``log omega(r) ~ alpha log r`` over dyadic radii ``r = h, 2h, 4h, ...``.

    ``omega(r) = max over node pairs in the region with |x - y| <= r of |u(x) - u(y)|``.
    Radii go up to half the shorter side of the region.

    Returns
    -------
    alpha_hat : float
        Least-squares slope.
    fit_r2 : float
        Coefficient of determination of the fit.
    """
    V, _ = _region(u, region)
    side = min(V.shape) - 1
    radii = []
    k = 1
    while k <= max(side // 2, 1):
        radii.append(k)
        k *= 2
    if len(radii) < min_scales:
        raise InvalidInputError(f"region supports only {len(radii)} dyadic scales, need {min_scales}")
    omega = []
    prev, current = 0, 0.0
    for k in radii:
        current = _modulus(V, k, prev, current)
        omega.append(current)
        prev = k
    omega = np.array(omega)
    if not np.all(omega > 0):
        raise InvalidInputError("exponent undefined: u is constant at some scale of the region")
    x = np.log(np.array(radii) * u.grid.h)
    y = np.log(omega)
    slope, intercept = np.polyfit(x, y, 1)
    fit = slope * x + intercept
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(((y - fit) ** 2).sum()) / ss_tot
    return float(slope), float(r2)
