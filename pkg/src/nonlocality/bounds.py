"""Uncertainty constants C_J and Sorensen-Molmer minimum-variance curves F_J.

Both are computed through Legendre duality on spin-J tridiagonal Hamiltonians:

* ``C_J = min_psi  Var(J^X) + Var(J^Y)``.  Writing the sum as
  ``<J^2 - (J^Z)^2> - <J^X>^2 - <J^Y>^2`` and using ``-t^2 = min_a (a^2/4 - a t)``
  gives ``C_J = min_a [lambda_min(J^2 - (J^Z)^2 - a J^X) + a^2/4]``.
* ``F_J(x) = min Var(J^Z)/J`` at fixed ``<J^X> = xJ``.  With
  ``Var(J^Z) = min_c <(J^Z - c)^2>`` and a Lagrange multiplier ``mu`` for the
  mean constraint, ``J F_J(x) = min_c max_mu [lambda_min((J^Z - c)^2 - mu J^X) + mu x J]``.
  Integer J has its optimum at c = 0; half-integer J needs c near 1/2 at small x.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numba import njit

from .linalg import _lowest_eigenvalue, tridiagonal_ground_state
from .spin import Convention, SpinMagnitude, make_spin_operators

_INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class CJValue:
    j: SpinMagnitude
    convention: Convention
    value: float
    dual_gap: float
    multiplier: float = 0.0


@dataclass(frozen=True, eq=False)
class FJCurve:
    """Samples of the minimum-variance frontier, ``x = <J^X>/J``, ``y = min Var(J^Z)/J``."""

    j: SpinMagnitude
    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        if xs.shape != ys.shape or xs.ndim != 1 or xs.shape[0] < 2:
            raise ValueError("curve needs matching 1-D sample arrays of length >= 2")
        if np.any(np.diff(xs) <= 0):
            raise ValueError("curve samples must have strictly increasing x")
        xs.setflags(write=False)
        ys.setflags(write=False)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.xs.tolist(), self.ys.tolist()))


# -- numba kernels ---------------------------------------------------------------


@njit(cache=True)
def _spin_tridiagonal(two_j):
    j = two_j / 2.0
    d = two_j + 1
    m = np.empty(d)
    for i in range(d):
        m[i] = j - i
    xoff = np.empty(d - 1)
    for i in range(d - 1):
        mm = m[i + 1]
        xoff[i] = 0.5 * np.sqrt(max(j * (j + 1.0) - mm * (mm + 1.0), 0.0))
    return m, xoff


@njit(cache=True)
def _legendre_value(m, xoff, c, target, diag, off, iters):
    """max_{mu >= 0} lambda_min((J^Z - c)^2 - mu J^X) + mu * target."""
    for i in range(m.shape[0]):
        diag[i] = (m[i] - c) ** 2
    lo = 0.0
    hi = 1.0 - 1e-13

    def objective(t):
        mu = t / (1.0 - t)
        for i in range(xoff.shape[0]):
            off[i] = -mu * xoff[i]
        return _lowest_eigenvalue(diag, off) + mu * target

    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1 = objective(x1)
    f2 = objective(x2)
    for _ in range(iters):
        if f1 < f2:
            lo = x1
            x1 = x2
            f1 = f2
            x2 = lo + _INV_PHI * (hi - lo)
            f2 = objective(x2)
        else:
            hi = x2
            x2 = x1
            f2 = f1
            x1 = hi - _INV_PHI * (hi - lo)
            f1 = objective(x1)
    best = max(f1, f2)
    # the maximum may sit on the boundary mu = 0
    return max(best, objective(0.0))


@njit(cache=True)
def _frontier_values(two_j, xs, n_coarse, c_iters, mu_iters):
    m, xoff = _spin_tridiagonal(two_j)
    j = two_j / 2.0
    d = m.shape[0]
    diag = np.empty(d)
    off = np.empty(d - 1)
    c_max = min(j, 1.0)
    out = np.empty(xs.shape[0])
    for k in range(xs.shape[0]):
        x = xs[k]
        if x >= 1.0:
            # only the J^X = J coherent state reaches x = 1; its Var(J^Z) is J/2
            out[k] = 0.5
            continue
        target = x * j
        best = np.inf
        best_i = 0
        step = c_max / (n_coarse - 1)
        for i in range(n_coarse):
            v = _legendre_value(m, xoff, i * step, target, diag, off, mu_iters)
            if v < best:
                best = v
                best_i = i
        lo = max(0.0, (best_i - 1) * step)
        hi = min(c_max, (best_i + 1) * step)
        x1 = hi - _INV_PHI * (hi - lo)
        x2 = lo + _INV_PHI * (hi - lo)
        f1 = _legendre_value(m, xoff, x1, target, diag, off, mu_iters)
        f2 = _legendre_value(m, xoff, x2, target, diag, off, mu_iters)
        for _ in range(c_iters):
            if f1 > f2:
                lo = x1
                x1 = x2
                f1 = f2
                x2 = lo + _INV_PHI * (hi - lo)
                f2 = _legendre_value(m, xoff, x2, target, diag, off, mu_iters)
            else:
                hi = x2
                x2 = x1
                f2 = f1
                x1 = hi - _INV_PHI * (hi - lo)
                f1 = _legendre_value(m, xoff, x1, target, diag, off, mu_iters)
        best = min(best, f1, f2)
        out[k] = max(best, 0.0) / j
    return out


# -- public API ------------------------------------------------------------------


def frontier_values(j, xs, n_coarse: int = 11, c_iters: int = 32, mu_iters: int = 48) -> np.ndarray:
    """F_J evaluated pointwise at each x in ``xs`` (0 <= x <= 1)."""
    mag = SpinMagnitude.of(j)
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if np.any(xs < 0) or np.any(xs > 1):
        raise ValueError("x must lie in [0, 1]")
    return _frontier_values(mag.two_j, np.ascontiguousarray(xs), n_coarse, c_iters, mu_iters)


def frontier_value(j, x: float) -> float:
    return float(frontier_values(j, [x])[0])


def compute_fj_curve(j, n_samples: int = 1001) -> FJCurve:
    """F_J sampled on a uniform x grid. Results are memoized (curves are immutable)."""
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    return _fj_curve(SpinMagnitude.of(j), int(n_samples))


@lru_cache(maxsize=64)
def _fj_curve(mag: SpinMagnitude, n_samples: int) -> FJCurve:
    xs = np.linspace(0.0, 1.0, n_samples)
    return FJCurve(mag, xs, frontier_values(mag, xs))


def quadratic_separable_bound(j, x: float) -> float:
    """x^2 / 4J, the bound implied by Var(J^Y) <= J^2 alone."""
    if not 0 <= x <= 1:
        raise ValueError("x must lie in [0, 1]")
    return x * x / (4 * SpinMagnitude.of(j).j)


def _secant(xs, ys, i, x):
    slope = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])
    return ys[i] + slope * (x - xs[i])


def fj_lookup(curve: FJCurve, x: float) -> float:
    """Conservative (never too high) value of F_J at x.

    Exact at sample points. Between samples the neighbouring secants, extended
    into the gap, lie below a convex curve; their maximum is returned.
    """
    xs, ys = curve.xs, curve.ys
    if not xs[0] <= x <= xs[-1]:
        raise ValueError(f"x={x} outside the sampled range [{xs[0]}, {xs[-1]}]")
    i = int(np.searchsorted(xs, x, side="right")) - 1
    if xs[i] == x:
        return float(ys[i])
    candidates = [0.0]
    if i >= 1:
        candidates.append(_secant(xs, ys, i - 1, x))
    if i + 2 < xs.shape[0]:
        candidates.append(_secant(xs, ys, i + 1, x))
    if len(candidates) == 1:
        candidates.append(min(ys[i], ys[i + 1]))
    return float(min(max(candidates), _secant(xs, ys, i, x)))


def fj_chord(curve: FJCurve, x: float) -> float:
    """Linear interpolation between samples; an upper estimate for convex F_J."""
    if not curve.xs[0] <= x <= curve.xs[-1]:
        raise ValueError(f"x={x} outside the sampled range")
    return float(np.interp(x, curve.xs, curve.ys))


@dataclass
class CurveBank:
    """Lazily computed F_J curves keyed by spin.

    ``mode="exact"`` evaluates F_J pointwise through the dual (cached);
    ``mode="lookup"`` uses sampled curves and :func:`fj_lookup`.
    """

    n_samples: int = 1001
    mode: str = "exact"
    _curves: dict = field(default_factory=dict, repr=False)
    _points: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.mode not in ("exact", "lookup"):
            raise ValueError(f"unknown curve-bank mode {self.mode!r}")

    def curve(self, j) -> FJCurve:
        mag = SpinMagnitude.of(j)
        if mag not in self._curves:
            self._curves[mag] = compute_fj_curve(mag, self.n_samples)
        return self._curves[mag]

    def add(self, curve: FJCurve) -> None:
        self._curves[curve.j] = curve

    def value(self, j, x: float) -> float:
        mag = SpinMagnitude.of(j)
        x = min(max(float(x), 0.0), 1.0)
        if self.mode == "lookup":
            return fj_lookup(self.curve(mag), x)
        key = (mag, x)
        if key not in self._points:
            self._points[key] = frontier_value(mag, x)
        return self._points[key]


# -- C_J ---------------------------------------------------------------------------


def _golden_min(f, lo, hi, iters=100):
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 > f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_PHI * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_PHI * (hi - lo)
            f1 = f(x1)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def compute_cj(j, convention: Convention = Convention.STANDARD, n_grid: int = 401) -> CJValue:
    """Minimum of Var(J^X) + Var(J^Y) over spin-j states, with a stationarity gap."""
    ops = make_spin_operators(j, convention)
    mag = ops.magnitude
    a_diag = np.real(np.diag(ops.jsq - ops.jz @ ops.jz)).copy()
    x_off = np.real(np.diag(ops.jx, 1)).copy()

    def dual(alpha):
        return _lowest_eigenvalue(a_diag, -alpha * x_off) + alpha * alpha / 4.0

    hi = (4 * mag.j + 4) * ops.scale
    grid = np.linspace(0.0, hi, n_grid)
    vals = np.array([dual(a) for a in grid])
    k = int(np.argmin(vals))
    lo_b, hi_b = grid[max(k - 1, 0)], grid[min(k + 1, n_grid - 1)]
    alpha, g_val = _golden_min(dual, lo_b, hi_b)
    if vals[k] < g_val:
        alpha, g_val = grid[k], vals[k]

    _, psi = tridiagonal_ground_state(a_diag, -alpha * x_off)
    a_mat = np.diag(a_diag)
    jx, jy = ops.jx.real, ops.jy
    primal = float(
        psi @ a_mat @ psi - (psi @ jx @ psi) ** 2 - abs(np.vdot(psi, jy @ psi)) ** 2
    )
    return CJValue(mag, convention, value=primal, dual_gap=max(g_val - primal, 0.0), multiplier=float(alpha))
