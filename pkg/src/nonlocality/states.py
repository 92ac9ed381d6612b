"""Quantum states: singlet, GHZ, correlated spin-J families, two-mode BEC ground state."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .collective import CollectiveMoments
from .linalg import tridiagonal_ground_state
from .spin import MAX_DIM, DimensionError, PureState, SpinMagnitude

__all__ = [
    "BECParams",
    "CorrelatedStateSpec",
    "Tridiagonal",
    "TwoModeState",
    "bec_ground_state",
    "bec_hamiltonian",
    "correlated_state",
    "ghz_state",
    "schwinger_moments",
    "singlet_state",
]


def singlet_state() -> PureState:
    """(|up,down> - |down,up>)/sqrt(2)."""
    amps = np.array([0.0, 1.0, -1.0, 0.0]) / np.sqrt(2)
    return PureState(amps, (2, 2))


def ghz_state(n_sites: int) -> PureState:
    if n_sites < 2:
        raise ValueError("GHZ state needs at least two sites")
    if 2**n_sites > MAX_DIM:
        raise DimensionError(f"{n_sites} qubits exceed the dense cap of {MAX_DIM} amplitudes")
    amps = np.zeros(2**n_sites)
    amps[0] = amps[-1] = 1 / np.sqrt(2)
    return PureState(amps, (2,) * n_sites)


@dataclass(frozen=True)
class CorrelatedStateSpec:
    """Amplitudes ``r`` are listed for m = -J, ..., +J and need not be normalized."""

    n_sites: int
    j: SpinMagnitude
    r: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "j", SpinMagnitude.of(self.j))
        r = tuple(float(x) for x in self.r)
        if self.n_sites < 1:
            raise ValueError("need at least one site")
        if len(r) != self.j.d:
            raise ValueError(f"expected {self.j.d} amplitudes for J={self.j}, got {len(r)}")
        if not any(r):
            raise ValueError("at least one amplitude must be nonzero")
        object.__setattr__(self, "r", r)

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.square(self.r)))


def correlated_state(spec: CorrelatedStateSpec) -> PureState:
    """(1/sqrt(n)) sum_m r_m |J,m>^N."""
    d = spec.j.d
    total = d**spec.n_sites
    if total > MAX_DIM:
        raise DimensionError(f"dimension {total} exceeds the dense cap {MAX_DIM}")
    amps = np.zeros(total)
    # |k,k,...,k> sits at flat index k * (d^N - 1)/(d - 1)
    stride = (total - 1) // (d - 1)
    for m_index, r_m in enumerate(spec.r):
        k = d - 1 - m_index  # basis index of m = -J + m_index
        amps[k * stride] = r_m
    return PureState(amps / np.sqrt(spec.norm_sq), (d,) * spec.n_sites)


# -- two-mode BEC -------------------------------------------------------------


@dataclass(frozen=True)
class BECParams:
    n_atoms: int
    kappa: float = 1.0
    g: float = 0.0

    def __post_init__(self):
        if self.n_atoms < 1:
            raise ValueError("n_atoms must be >= 1")
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")
        if self.g < 0:
            raise ValueError("g must be non-negative")


@dataclass(frozen=True, eq=False)
class Tridiagonal:
    diag: np.ndarray
    off: np.ndarray

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.off, 1) + np.diag(self.off, -1)


@dataclass(frozen=True, eq=False)
class TwoModeState:
    """Amplitudes over the Fock basis |n_a, N - n_a>, indexed by n_a = 0..N."""

    amplitudes: np.ndarray
    n_atoms: int

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128).ravel()
        if amps.shape[0] != self.n_atoms + 1:
            raise DimensionError(f"{amps.shape[0]} amplitudes for N={self.n_atoms}")
        if abs(np.linalg.norm(amps) - 1) > 1e-12:
            raise ValueError("two-mode state is not normalized")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)


def _hopping(n_atoms: int) -> np.ndarray:
    """<n_a+1, N-n_a-1| a^dag b |n_a, N-n_a> for n_a = 0..N-1."""
    na = np.arange(n_atoms)
    return np.sqrt((na + 1.0) * (n_atoms - na))


def bec_hamiltonian(p: BECParams) -> Tridiagonal:
    """kappa (a^dag b + a b^dag) + (g/2)(a^dag a^dag a a + b^dag b^dag b b) at fixed N."""
    n = p.n_atoms
    na = np.arange(n + 1, dtype=float)
    nb = n - na
    diag = 0.5 * p.g * (na * (na - 1) + nb * (nb - 1))
    return Tridiagonal(diag, p.kappa * _hopping(n))


def _fix_phase(v: np.ndarray) -> np.ndarray:
    mags = np.abs(v)
    k = int(np.flatnonzero(mags >= mags.max() * (1 - 1e-12))[0])
    return v * (np.abs(v[k]) / v[k])


def bec_ground_state(p: BECParams) -> TwoModeState:
    h = bec_hamiltonian(p)
    _, v = tridiagonal_ground_state(h.diag, h.off)
    v = _fix_phase(v.astype(np.complex128))
    return TwoModeState(v / np.linalg.norm(v), p.n_atoms)


def schwinger_moments(s: TwoModeState) -> CollectiveMoments:
    """Collective spin moments with J^Z = (a^dag a - b^dag b)/2, J^X = (a^dag b + a b^dag)/2."""
    n = s.n_atoms
    psi = s.amplitudes
    m = np.arange(n + 1) - n / 2
    hop = _hopping(n)

    def raise_(v):  # a^dag b
        out = np.zeros_like(v)
        out[1:] = hop * v[:-1]
        return out

    def lower(v):  # a b^dag
        out = np.zeros_like(v)
        out[:-1] = hop * v[1:]
        return out

    jx_psi = 0.5 * (raise_(psi) + lower(psi))
    jy_psi = (raise_(psi) - lower(psi)) / 2j
    jz_psi = m * psi

    def mean_var(phi):
        mean = np.vdot(psi, phi).real
        return mean, max(np.vdot(phi, phi).real - mean * mean, 0.0)

    mx, vx = mean_var(jx_psi)
    my, vy = mean_var(jy_psi)
    mz, vz = mean_var(jz_psi)
    j_sq = np.vdot(jx_psi, jx_psi).real + np.vdot(jy_psi, jy_psi).real + np.vdot(jz_psi, jz_psi).real
    return CollectiveMoments(
        mean_x=mx, mean_y=my, mean_z=mz,
        var_x=vx, var_y=vy, var_z=vz,
        n_atoms=n, j_tot=n / 2, j_sq=j_sq,
    )
