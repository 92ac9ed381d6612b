"""Small dense eigensolvers.

Two paths are provided:

* :func:`hermitian_eigensolve` -- cyclic Jacobi for a general complex Hermitian
  matrix (dimension up to a few hundred).
* :func:`tridiagonal_lowest` / :func:`tridiagonal_ground_state` -- Sturm-sequence
  bisection plus shifted inverse iteration for real symmetric tridiagonal
  matrices. Spin Hamiltonians in the J^Z basis and the two-mode BEC Hamiltonian
  in the Fock basis both have this shape.

The kernels are compiled with numba; results are deterministic for a given input.
"""

from __future__ import annotations

import numpy as np
from numba import njit

HERMITIAN_TOL = 1e-10


class NotHermitianError(ValueError):
    pass


@njit(cache=True)
def _jacobi_sweeps(a, v, max_sweeps):
    n = a.shape[0]
    scale = 0.0
    for i in range(n):
        for j in range(n):
            scale += abs(a[i, j]) ** 2
    scale = np.sqrt(scale)
    if scale == 0.0:
        return 0
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += abs(a[p, q]) ** 2
        if np.sqrt(2.0 * off) <= 1e-15 * scale:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                if theta >= 0.0:
                    t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # U = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                u10 = -s * np.conj(phase)
                u11 = c * np.conj(phase)
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp + u10 * akq
                    a[k, q] = s * akp + u11 * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk + np.conj(u10) * aqk
                    a[q, k] = s * apk + np.conj(u11) * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp + u10 * vkq
                    v[k, q] = s * vkp + u11 * vkq
    return max_sweeps


def hermitian_eigensolve(matrix, max_sweeps: int = 100):
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a Hermitian matrix."""
    a = np.array(matrix, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    norm = max(np.abs(a).max(initial=0.0), 1.0)
    if np.abs(a - a.conj().T).max(initial=0.0) > HERMITIAN_TOL * norm:
        raise NotHermitianError("matrix is not Hermitian within tolerance")
    a = 0.5 * (a + a.conj().T)
    v = np.eye(a.shape[0], dtype=np.complex128)
    _jacobi_sweeps(a, v, max_sweeps)
    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


# -- symmetric tridiagonal ---------------------------------------------------


@njit(cache=True)
def _sturm_count(diag, off, x):
    """Number of eigenvalues strictly below x."""
    n = diag.shape[0]
    count = 0
    q = 1.0
    for i in range(n):
        if i == 0:
            q = diag[0] - x
        else:
            q = diag[i] - x - off[i - 1] * off[i - 1] / q
        if abs(q) < 1e-290:
            q = -1e-290
        if q < 0.0:
            count += 1
    return count


@njit(cache=True)
def _gershgorin(diag, off):
    n = diag.shape[0]
    lo = np.inf
    hi = -np.inf
    for i in range(n):
        r = 0.0
        if i > 0:
            r += abs(off[i - 1])
        if i < n - 1:
            r += abs(off[i])
        lo = min(lo, diag[i] - r)
        hi = max(hi, diag[i] + r)
    return lo, hi


@njit(cache=True)
def _lowest_eigenvalue(diag, off):
    lo, hi = _gershgorin(diag, off)
    width = max(abs(lo), abs(hi), 1e-300)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi or hi - lo <= 4e-16 * width:
            break
        if _sturm_count(diag, off, mid) >= 1:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@njit(cache=True)
def _shifted_solve(diag, off, sigma, rhs):
    """Solve (T - sigma I) y = rhs by LDL^T; T - sigma I is positive definite here."""
    n = diag.shape[0]
    dd = np.empty(n)
    ll = np.empty(max(n - 1, 0))
    dd[0] = diag[0] - sigma
    for i in range(1, n):
        ll[i - 1] = off[i - 1] / dd[i - 1]
        dd[i] = diag[i] - sigma - ll[i - 1] * off[i - 1]
    y = rhs.copy()
    for i in range(1, n):
        y[i] -= ll[i - 1] * y[i - 1]
    for i in range(n):
        y[i] /= dd[i]
    for i in range(n - 2, -1, -1):
        y[i] -= ll[i] * y[i + 1]
    return y


@njit(cache=True)
def _ground_state(diag, off):
    n = diag.shape[0]
    lam = _lowest_eigenvalue(diag, off)
    lo, hi = _gershgorin(diag, off)
    spread = max(hi - lo, 1e-300)
    sigma = lam - 1e-9 * spread
    v = np.empty(n)
    for i in range(n):
        # deterministic start vector with no special symmetry
        v[i] = 1.0 + 0.5 * np.sin(1.0 + 2.3 * i)
    v /= np.sqrt(np.sum(v * v))
    for _ in range(30):
        w = _shifted_solve(diag, off, sigma, v)
        w /= np.sqrt(np.sum(w * w))
        if w[np.argmax(np.abs(w))] < 0:
            w = -w
        delta = np.max(np.abs(w - v))
        v = w
        if delta < 1e-15:
            break
    return lam, v


def _as_tridiagonal(diag, off):
    d = np.ascontiguousarray(diag, dtype=np.float64)
    e = np.ascontiguousarray(off, dtype=np.float64)
    if d.ndim != 1 or e.ndim != 1 or e.shape[0] != max(d.shape[0] - 1, 0):
        raise ValueError("tridiagonal input needs len(off) == len(diag) - 1")
    if d.shape[0] == 0:
        raise ValueError("empty matrix")
    return d, e


def tridiagonal_lowest(diag, off) -> float:
    d, e = _as_tridiagonal(diag, off)
    return float(_lowest_eigenvalue(d, e))


def tridiagonal_ground_state(diag, off):
    """Lowest eigenpair of a real symmetric tridiagonal matrix.

    The returned vector is unit-norm with its largest-magnitude entry positive.
    """
    d, e = _as_tridiagonal(diag, off)
    if d.shape[0] == 1:
        return float(d[0]), np.ones(1)
    lam, v = _ground_state(d, e)
    return float(lam), v
