"""Spin-J operator algebra and pure states on a chain of sites.

Basis convention: the single-site basis is ordered by descending m, so index 0
is |J, +J> ("up", |0> in qubit notation) and index d-1 is |J, -J>. Composite
states use C ordering: site 0 is the slowest-varying index, matching
``np.kron(op_0, op_1, ...)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

import numpy as np

from .linalg import hermitian_eigensolve, NotHermitianError  # noqa: F401

MAX_DIM = 4096
NORM_TOL = 1e-12


class ConventionError(ValueError):
    pass


class DimensionError(ValueError):
    pass


class Convention(enum.Enum):
    STANDARD = "standard"
    PAULI = "pauli"


@dataclass(frozen=True, order=True)
class SpinMagnitude:
    """Spin quantum number stored as the integer 2j."""

    two_j: int

    def __post_init__(self):
        if not isinstance(self.two_j, (int, np.integer)) or self.two_j < 1:
            raise ValueError(f"2j must be a positive integer, got {self.two_j!r}")

    @classmethod
    def of(cls, j) -> "SpinMagnitude":
        if isinstance(j, SpinMagnitude):
            return j
        value = Fraction(j) if isinstance(j, (str, int, Fraction)) else Fraction(float(j))
        if (2 * value).denominator != 1:
            raise ValueError(f"{j!r} is not a half-integer")
        return cls(int(2 * value))

    @property
    def j(self) -> float:
        return self.two_j / 2

    @property
    def d(self) -> int:
        return self.two_j + 1

    @property
    def m_values(self) -> np.ndarray:
        """m = J, J-1, ..., -J in basis order."""
        return self.j - np.arange(self.d)

    def __str__(self):
        return str(self.two_j // 2) if self.two_j % 2 == 0 else f"{self.two_j}/2"


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SpinOperatorSet:
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray
    jplus: np.ndarray
    jminus: np.ndarray
    jsq: np.ndarray
    magnitude: SpinMagnitude
    convention: Convention

    @property
    def scale(self) -> float:
        """Outcome scale relative to the standard convention (2 for Pauli)."""
        return 2.0 if self.convention is Convention.PAULI else 1.0

    def ladder(self, sign: int) -> np.ndarray:
        return self.jplus if sign > 0 else self.jminus


def ladder_coefficient(j: float, m: float) -> float:
    """<m+1|J^+|m> = sqrt(J(J+1) - m(m+1))."""
    return float(np.sqrt(max(j * (j + 1) - m * (m + 1), 0.0)))


def make_spin_operators(j, convention: Convention = Convention.STANDARD) -> SpinOperatorSet:
    mag = SpinMagnitude.of(j)
    if convention is Convention.PAULI and mag.two_j != 1:
        raise ConventionError("the Pauli convention is only defined for spin 1/2")
    m = mag.m_values
    d = mag.d
    jp = np.zeros((d, d), dtype=np.complex128)
    # column i holds m_i; J^+ moves it to row i-1 (m+1)
    for i in range(1, d):
        jp[i - 1, i] = ladder_coefficient(mag.j, m[i])
    jz = np.diag(m).astype(np.complex128)
    scale = 2.0 if convention is Convention.PAULI else 1.0
    jp *= scale
    jz *= scale
    jm = jp.conj().T.copy()
    jx = (jp + jm) / 2
    jy = (jp - jm) / 2j
    jsq = jx @ jx + jy @ jy + jz @ jz
    return SpinOperatorSet(
        jx=_readonly(jx),
        jy=_readonly(jy),
        jz=_readonly(jz),
        jplus=_readonly(jx + 1j * jy),
        jminus=_readonly(jx - 1j * jy),
        jsq=_readonly(jsq),
        magnitude=mag,
        convention=convention,
    )


def rotated_component(ops: SpinOperatorSet, theta: float) -> np.ndarray:
    """cos(theta) J^X + sin(theta) J^Y."""
    return np.cos(theta) * ops.jx + np.sin(theta) * ops.jy


def rotated_ladder(ops: SpinOperatorSet, theta: float, sign: int) -> np.ndarray:
    """J^{theta,X} + i s J^{theta,Y} in the frame rotated by theta about Z.

    Equal to exp(-i s theta) J^{s}.
    """
    return np.exp(-1j * sign * theta) * ops.ladder(sign)


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray
    site_dims: tuple[int, ...]

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128).ravel()
        dims = tuple(int(d) for d in self.site_dims)
        if not dims or any(d < 1 for d in dims):
            raise DimensionError(f"invalid site dimensions {dims}")
        total = int(np.prod(dims))
        if total > MAX_DIM:
            raise DimensionError(f"composite dimension {total} exceeds the cap {MAX_DIM}")
        if amps.shape[0] != total:
            raise DimensionError(f"{amps.shape[0]} amplitudes for site dims {dims}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm {norm!r})")
        object.__setattr__(self, "amplitudes", _readonly(amps.copy()))
        object.__setattr__(self, "site_dims", dims)

    @classmethod
    def from_unnormalized(cls, amplitudes, site_dims) -> "PureState":
        amps = np.asarray(amplitudes, dtype=np.complex128).ravel()
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("zero vector cannot be normalized")
        return cls(amps / norm, tuple(site_dims))

    @property
    def n_sites(self) -> int:
        return len(self.site_dims)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.site_dims)


@dataclass(frozen=True, eq=False)
class CompositeOperator:
    matrix: np.ndarray
    site_dims: tuple[int, ...] = field(default=())

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=np.complex128)
        dims = tuple(int(d) for d in self.site_dims) or (mat.shape[0],)
        total = int(np.prod(dims))
        if mat.shape != (total, total):
            raise DimensionError(f"matrix shape {mat.shape} does not match site dims {dims}")
        object.__setattr__(self, "matrix", _readonly(mat.copy()))
        object.__setattr__(self, "site_dims", dims)

    def __matmul__(self, other: "CompositeOperator") -> "CompositeOperator":
        _check_dims(self.site_dims, other.site_dims)
        return CompositeOperator(self.matrix @ other.matrix, self.site_dims)

    def __add__(self, other: "CompositeOperator") -> "CompositeOperator":
        _check_dims(self.site_dims, other.site_dims)
        return CompositeOperator(self.matrix + other.matrix, self.site_dims)

    def __rmul__(self, scalar) -> "CompositeOperator":
        return CompositeOperator(scalar * self.matrix, self.site_dims)

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        m = self.matrix
        return bool(np.abs(m - m.conj().T).max(initial=0.0) <= tol * max(1.0, np.abs(m).max(initial=0.0)))


def _check_dims(a, b):
    if tuple(a) != tuple(b):
        raise DimensionError(f"site dims {tuple(a)} and {tuple(b)} differ")


def embed_at_site(op, site: int, site_dims) -> CompositeOperator:
    """op on `site`, identity elsewhere."""
    dims = tuple(int(d) for d in site_dims)
    op = np.asarray(op, dtype=np.complex128)
    if not 0 <= site < len(dims):
        raise DimensionError(f"site {site} out of range for {len(dims)} sites")
    if op.shape != (dims[site], dims[site]):
        raise DimensionError(f"operator shape {op.shape} does not fit site of dimension {dims[site]}")
    if int(np.prod(dims)) > MAX_DIM:
        raise DimensionError(f"composite dimension exceeds the cap {MAX_DIM}")
    factors = [np.eye(d) for d in dims]
    factors[site] = op
    return CompositeOperator(reduce(np.kron, factors), dims)


def product_operator(site_ops, site_dims) -> CompositeOperator:
    """Tensor product of per-site operators; ``site_ops`` maps site -> matrix."""
    dims = tuple(int(d) for d in site_dims)
    factors = [np.eye(d) for d in dims]
    for site, op in site_ops.items():
        factors[site] = np.asarray(op, dtype=np.complex128)
    return CompositeOperator(reduce(np.kron, factors), dims)


def apply_local(state: PureState | np.ndarray, site_ops, site_dims=None) -> np.ndarray:
    """Apply a product of single-site operators to a state vector.

    Works on the reshaped tensor, so no composite matrix is ever formed.
    Returns the (generally unnormalized) flat result vector.
    """
    if isinstance(state, PureState):
        dims = state.site_dims
        psi = state.tensor()
    else:
        dims = tuple(site_dims)
        psi = np.asarray(state, dtype=np.complex128).reshape(dims)
    for site, op in site_ops.items():
        psi = np.moveaxis(np.tensordot(op, psi, axes=([1], [site])), 0, site)
    return psi.reshape(-1)


def _as_matrix(state: PureState, op) -> np.ndarray:
    if isinstance(op, CompositeOperator):
        if len(op.site_dims) > 1:
            _check_dims(op.site_dims, state.site_dims)
        mat = op.matrix
    else:
        mat = np.asarray(op, dtype=np.complex128)
    if mat.shape != (state.dim, state.dim):
        raise DimensionError(f"operator of shape {mat.shape} on a state of dimension {state.dim}")
    return mat


def expectation(state: PureState, op) -> complex:
    mat = _as_matrix(state, op)
    psi = state.amplitudes
    return complex(np.vdot(psi, mat @ psi))


def variance(state: PureState, op) -> float:
    mat = _as_matrix(state, op)
    if np.abs(mat - mat.conj().T).max(initial=0.0) > 1e-10 * max(1.0, np.abs(mat).max(initial=0.0)):
        raise NotHermitianError("variance needs a Hermitian operator")
    psi = state.amplitudes
    phi = mat @ psi
    mean = np.vdot(psi, phi).real
    return float(np.vdot(phi, phi).real - mean * mean)


def random_state(site_dims, rng: np.random.Generator) -> PureState:
    """Haar-random pure state."""
    dims = tuple(site_dims)
    total = int(np.prod(dims))
    z = rng.normal(size=total) + 1j * rng.normal(size=total)
    return PureState.from_unnormalized(z, dims)


def product_state(site_vectors) -> PureState:
    vecs = [np.asarray(v, dtype=np.complex128) for v in site_vectors]
    vecs = [v / np.linalg.norm(v) for v in vecs]
    return PureState.from_unnormalized(reduce(np.kron, vecs), tuple(v.shape[0] for v in vecs))


def basis_index(m: float, mag: SpinMagnitude) -> int:
    """Single-site basis index of |J, m>."""
    idx = mag.j - m
    if abs(idx - round(idx)) > 1e-9 or not 0 <= round(idx) < mag.d:
        raise ValueError(f"m={m} is not a valid projection for J={mag}")
    return int(round(idx))
