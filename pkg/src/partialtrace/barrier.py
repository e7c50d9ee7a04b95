"""Radial barrier for the Hölder estimate.

The barrier is the solution of

    phi''(r) + (A / r + B) phi'(r) = -C,   0 < r <= delta,   phi(0) = 0,

given by ``phi(r) = int_0^r psi(s) ds`` with

    psi(s) = exp(-B s) s^(-A) (K - C int_0^s t^A exp(B t) dt),

where K is fixed by ``psi(delta) = D / delta``. Because ``psi`` is linear in
K the normalization is solved exactly instead of by root finding.

Integrals are taken in the variable ``u = s^(1 - A)``, which removes the
``s^(-A)`` singularity, with composite Gauss-Legendre panels that are
geometrically graded towards ``u = 0``.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidInputError, NotApplicableError

__all__ = [
    "BarrierParams",
    "BarrierFunction",
    "PropertyCheck",
    "BarrierReport",
    "build",
    "phi",
    "phi_prime",
    "phi_double_prime",
    "verify_properties",
    "closed_form_b0",
    "to_csv",
    "verification_nodes",
]

PANELS = 64
ORDER = 10
GRADING_LEVELS = 12
GRADING_RATIO = 0.2


@dataclass(frozen=True)
class BarrierParams:
    A: float
    B: float
    C: float
    D: float
    delta: float

    def __post_init__(self):
        vals = (self.A, self.B, self.C, self.D, self.delta)
        if not all(np.isfinite(v) for v in vals):
            raise InvalidInputError(f"barrier parameters must be finite: {vals}")
        if not 0.0 < self.A < 1.0:
            raise InvalidInputError(f"A must lie in (0, 1), got {self.A}")
        if self.C <= 0.0:
            raise InvalidInputError(f"C must be positive, got {self.C}")
        if self.B < 0.0 or self.D < 0.0:
            raise InvalidInputError("B and D must be nonnegative")
        if self.delta <= 0.0:
            raise InvalidInputError(f"delta must be positive, got {self.delta}")


def _panel_edges(U: float, panels: int) -> np.ndarray:
    uniform = np.linspace(0.0, U, panels + 1)
    first = uniform[1] * GRADING_RATIO ** np.arange(GRADING_LEVELS, 0, -1)
    return np.concatenate([[0.0], first, uniform[1:]])


@dataclass(frozen=True)
class BarrierFunction:
    """Evaluable barrier; create with :func:`build`."""

    params: BarrierParams
    K: float
    edges: np.ndarray = field(repr=False)
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    I_edges: np.ndarray = field(repr=False)
    phi_edges: np.ndarray = field(repr=False)

    # --- integrals in u = s^(1-A) -------------------------------------
    def _gauss(self, fun, lo, hi):
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        half = 0.5 * (hi - lo)
        u = (lo + half)[..., None] + half[..., None] * self.nodes
        return half * np.sum(self.weights * fun(u), axis=-1)

    def _s(self, u):
        return u ** (1.0 / (1.0 - self.params.A))

    def _I_integrand(self, u):
        A, B = self.params.A, self.params.B
        return u ** (2.0 * A / (1.0 - A)) * np.exp(B * self._s(u)) / (1.0 - A)

    def _phi_integrand(self, u):
        p = self.params
        s = self._s(u)
        return np.exp(-p.B * s) * (self.K - p.C * self.tail_integral(s)) / (1.0 - p.A)

    def _panel_of(self, u):
        k = np.searchsorted(self.edges, u, side="right") - 1
        return np.clip(k, 0, len(self.edges) - 2)

    def tail_integral(self, s) -> np.ndarray:
        """``int_0^s t^A exp(B t) dt`` for ``0 <= s <= delta``."""
        u = np.asarray(s, dtype=float) ** (1.0 - self.params.A)
        k = self._panel_of(u)
        return self.I_edges[k] + self._gauss(self._I_integrand, self.edges[k], u)

    def psi(self, s) -> np.ndarray:
        p = self.params
        s = np.asarray(s, dtype=float)
        return np.exp(-p.B * s) * s ** (-p.A) * (self.K - p.C * self.tail_integral(s))

    def _check(self, r, allow_zero=False):
        r = np.asarray(r, dtype=float)
        lo_ok = r >= 0.0 if allow_zero else r > 0.0
        if not np.all(lo_ok & (r <= self.params.delta)):
            raise DomainError(f"r must lie in (0, {self.params.delta}]")
        return r

    def __call__(self, r):
        return phi(self, r)

    def seminorm_bound(self) -> float:
        """``K / (1 - A)``, the bound on ``phi(r) / r^(1 - A)``."""
        return self.K / (1.0 - self.params.A)


def build(params: BarrierParams, panels: int = PANELS, order: int = ORDER) -> BarrierFunction:
    """Construct the barrier for `params`.

    ``K = D delta^(A-1) exp(B delta) + C int_0^delta t^A exp(B t) dt``.
    """
    if not isinstance(params, BarrierParams):
        params = BarrierParams(*params)
    A, B, C, D, delta = params.A, params.B, params.C, params.D, params.delta
    x, w = np.polynomial.legendre.leggauss(order)
    edges = _panel_edges(delta ** (1.0 - A), panels)
    # K is not needed for the inner integral, so build that first
    b = BarrierFunction(params, np.nan, edges, x, w, np.zeros(len(edges)), np.zeros(len(edges)))
    pieces = b._gauss(b._I_integrand, edges[:-1], edges[1:])
    I_edges = np.concatenate([[0.0], np.cumsum(pieces)])
    b = BarrierFunction(params, np.nan, edges, x, w, I_edges, np.zeros(len(edges)))
    K = D * delta ** (A - 1.0) * np.exp(B * delta) + C * I_edges[-1]
    b = BarrierFunction(params, float(K), edges, x, w, I_edges, np.zeros(len(edges)))
    pieces = b._gauss(b._phi_integrand, edges[:-1], edges[1:])
    phi_edges = np.concatenate([[0.0], np.cumsum(pieces)])
    for arr in (edges, I_edges, phi_edges):
        arr.setflags(write=False)
    return BarrierFunction(params, float(K), edges, x, w, I_edges, phi_edges)


def _out(val, r):
    return float(val) if np.ndim(r) == 0 else val


def phi(b: BarrierFunction, r):
    """Barrier value; ``phi(0) = 0``."""
    r = b._check(r, allow_zero=True)
    u = r ** (1.0 - b.params.A)
    k = b._panel_of(u)
    val = b.phi_edges[k] + b._gauss(b._phi_integrand, b.edges[k], u)
    return _out(np.where(r == 0.0, 0.0, val), r)


def phi_prime(b: BarrierFunction, r):
    r = b._check(r)
    return _out(b.psi(r), r)


def phi_double_prime(b: BarrierFunction, r):
    """Second derivative read off the ODE: ``-C - (A/r + B) phi'(r)``."""
    r = b._check(r)
    p = b.params
    return _out(-p.C - (p.A / r + p.B) * b.psi(r), r)


@dataclass(frozen=True)
class PropertyCheck:
    name: str
    passed: bool
    worst_margin: float


@dataclass(frozen=True)
class BarrierReport:
    params: BarrierParams
    K: float
    checks: tuple[PropertyCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "params": {k: getattr(self.params, k) for k in ("A", "B", "C", "D", "delta")},
            "K": self.K,
            "passed": self.passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "worst_margin": c.worst_margin}
                for c in self.checks
            ],
        }


def verification_nodes(delta: float, grid_points: int) -> np.ndarray:
    return np.geomspace(delta * 1e-6, delta, grid_points)


def verify_properties(b: BarrierFunction, grid_points: int = 200) -> BarrierReport:
    """Node-wise check of the four barrier properties on a log-spaced grid.

    * ``phi' > 0`` and ``phi'' < 0``
    * ``phi'' - phi'/r <= -C`` (slack 1e-8)
    * ``phi(delta) >= D`` (slack 1e-9)
    * ``phi(r) <= K r^(1-A) / (1-A)`` (relative slack 1e-8)

    Failures are reported, never raised. Signs are certified at the nodes
    only, not between them.
    """
    if grid_points < 2:
        raise InvalidInputError("grid_points must be >= 2")
    p = b.params
    r = verification_nodes(p.delta, grid_points)
    f0 = phi(b, r)
    f1 = phi_prime(b, r)
    f2 = phi_double_prime(b, r)
    m1 = float(min(f1.min(), (-f2).min()))
    m2 = float(np.min(-p.C + 1e-8 - (f2 - f1 / r)))
    m3 = float(f0[-1] - p.D + 1e-9)
    bound = b.K * r ** (1.0 - p.A) / (1.0 - p.A) * (1.0 + 1e-8)
    m4 = float(np.min(bound - f0))
    checks = (
        PropertyCheck("increasing_concave", m1 > 0.0, m1),
        PropertyCheck("radial_concavity", m2 >= 0.0, m2),
        PropertyCheck("height_at_delta", m3 >= 0.0, m3),
        PropertyCheck("holder_growth", m4 >= 0.0, m4),
    )
    return BarrierReport(p, b.K, checks)


def closed_form_b0(params: BarrierParams) -> tuple[float, float]:
    """Coefficients of ``phi(r) = c1 r^(1-A) - c2 r^2`` when ``B = 0``.

    Computed analytically, independently of the quadrature:
    ``K = D delta^(A-1) + C delta^(A+1) / (A+1)``, ``c1 = K / (1-A)``,
    ``c2 = C / (2 (1+A))``.
    """
    if params.B != 0.0:
        raise NotApplicableError("closed form exists only for B = 0")
    A, C, D, delta = params.A, params.C, params.D, params.delta
    K = D * delta ** (A - 1.0) + C * delta ** (A + 1.0) / (A + 1.0)
    return K / (1.0 - A), C / (2.0 * (1.0 + A))


def to_csv(b: BarrierFunction, r) -> str:
    r = np.atleast_1d(np.asarray(r, dtype=float))
    buf = io.StringIO()
    buf.write("r,phi,phi_prime,phi_double_prime\n")
    table = np.column_stack([r, phi(b, r), phi_prime(b, r), phi_double_prime(b, r)])
    for row in table:
        buf.write(",".join(repr(float(v)) for v in row) + "\n")
    return buf.getvalue()
