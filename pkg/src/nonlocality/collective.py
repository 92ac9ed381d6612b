"""Collective-spin criteria: spin squeezing, entanglement depth, collective
steering, and EPR inference variances.

Axis roles are explicit arguments. In the two-mode BEC the mean spin points
along X and the squeezing shows up in Z, which is the default here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bounds import CurveBank
from .linalg import hermitian_eigensolve
from .results import CriterionResult, Verdict
from .spin import Convention, DimensionError, PureState, SpinMagnitude, apply_local, make_spin_operators

AXES = ("x", "y", "z")
DEPTH_TOL = 1e-9


class UndefinedSqueezingError(ValueError):
    pass


@dataclass(frozen=True)
class CollectiveMoments:
    mean_x: float
    mean_y: float
    mean_z: float
    var_x: float
    var_y: float
    var_z: float
    n_atoms: int
    j_tot: float
    j_sq: float | None = None

    def __post_init__(self):
        for ax in AXES:
            if self.var(ax) < -1e-12:
                raise ValueError(f"negative variance along {ax}")
            if abs(self.mean(ax)) > self.j_tot * (1 + 1e-12) + 1e-12:
                raise ValueError(f"mean along {ax} exceeds the total spin")

    def mean(self, axis: str) -> float:
        return getattr(self, f"mean_{_axis(axis)}")

    def var(self, axis: str) -> float:
        return getattr(self, f"var_{_axis(axis)}")


def collective_moments(state: PureState) -> CollectiveMoments:
    """Moments of J^a = sum_k J_k^a for a chain of spin-1/2 sites (standard units)."""
    if any(d != 2 for d in state.site_dims):
        raise DimensionError("collective moments are defined here for spin-1/2 sites")
    ops = make_spin_operators(SpinMagnitude(1), Convention.STANDARD)
    psi = state.amplitudes
    stats = {}
    for ax in AXES:
        op = getattr(ops, f"j{ax}")
        phi = sum(apply_local(state, {k: op}) for k in range(state.n_sites))
        mean = np.vdot(psi, phi).real
        stats[ax] = (float(mean), float(max(np.vdot(phi, phi).real - mean * mean, 0.0)))
    n = state.n_sites
    return CollectiveMoments(
        mean_x=stats["x"][0], mean_y=stats["y"][0], mean_z=stats["z"][0],
        var_x=stats["x"][1], var_y=stats["y"][1], var_z=stats["z"][1],
        n_atoms=n, j_tot=n / 2,
    )


def _axis(axis: str) -> str:
    a = axis.lower()
    if a not in AXES:
        raise ValueError(f"axis must be one of {AXES}, got {axis!r}")
    return a


@dataclass(frozen=True)
class DepthResult:
    """Entanglement depth certified by the minimum-variance curves.

    Violating the F_{J0} bound means some block has spin J > J0 and therefore
    more than 2*J0 particles. ``n0 = 2*max(J0) + 1`` is that certified minimum
    block size; the hypothesis being excluded is "blocks of at most 2*J0".
    """

    n0: int
    violated_curves: tuple[float, ...]


@dataclass(frozen=True)
class InferenceVariances:
    v_x_given_b: float
    v_p_given_b: float

    def __post_init__(self):
        if self.v_x_given_b < -1e-12 or self.v_p_given_b < -1e-12:
            raise ValueError("inference variances must be non-negative")


# -- spin squeezing -------------------------------------------------------------


def xi_parameter(m: CollectiveMoments, squeezed_axis: str = "z", mean_axis: str = "x") -> float:
    """sqrt(N) * std(J_squeezed) / |<J_mean>|."""
    mean = abs(m.mean(mean_axis))
    if mean <= 1e-9 * m.n_atoms:
        raise UndefinedSqueezingError("mean spin vanishes along the chosen axis")
    return float(np.sqrt(m.n_atoms * max(m.var(squeezed_axis), 0.0)) / mean)


def pairwise_entanglement_test(m: CollectiveMoments, squeezed_axis: str = "z",
                               mean_axis: str = "x") -> CriterionResult:
    """Var(J_squeezed) >= <J_mean>^2 / N holds for separable spin-1/2 ensembles."""
    lhs = max(m.var(squeezed_axis), 0.0)
    rhs = m.mean(mean_axis) ** 2 / m.n_atoms
    # relative tolerance keeps the coherent state (exact equality) unviolated
    return CriterionResult.build(lhs, rhs, "spin_squeezing", Verdict.ENTANGLEMENT, sense="lower",
                                 tol=1e-10 * max(rhs, 1.0))


# -- minimum-variance (SM) curves ---------------------------------------------------


def sm_bound(j_tot: float, j0, mean_x: float, curve_bank: CurveBank) -> float:
    """j_tot * F_{J0}(|<J^X>| / j_tot): minimum Var(J^Z) for blocks of spin <= J0."""
    if j_tot <= 0:
        raise ValueError("j_tot must be positive")
    x = abs(mean_x) / j_tot
    if x > 1 + 1e-12:
        raise ValueError("|mean| exceeds j_tot")
    return j_tot * curve_bank.value(j0, min(x, 1.0))


def steering_bound(j_tot: float, j0, mean_z_of_b: float, curve_bank: CurveBank) -> float:
    """Bound on the inferred variance of group B: j_tot * F_{J0}(|<J_B^Z>| / j_tot)."""
    return sm_bound(j_tot, j0, mean_z_of_b, curve_bank)


def steering_test(inferred_var: float, j_tot: float, j0, mean_z_of_b: float,
                  curve_bank: CurveBank) -> CriterionResult:
    rhs = steering_bound(j_tot, j0, mean_z_of_b, curve_bank)
    return CriterionResult.build(inferred_var, rhs, f"collective_steering_j{SpinMagnitude.of(j0)}",
                                 Verdict.EPR_STEERING, sense="lower", tol=DEPTH_TOL * max(j_tot, 1.0))


def _violates(m: CollectiveMoments, two_j0: int, bank: CurveBank, mean_axis: str, var_axis: str) -> bool:
    bound = sm_bound(m.j_tot, SpinMagnitude(two_j0), m.mean(mean_axis), bank)
    return m.var(var_axis) < bound - DEPTH_TOL * max(m.j_tot, 1.0)


def depth_of_entanglement(m: CollectiveMoments, curve_bank: CurveBank,
                          mean_axis: str = "x", var_axis: str = "z") -> DepthResult:
    """Largest J0 whose minimum-variance bound the data beat.

    The curves are nested (F_{J0+1/2} <= F_{J0}), so the violated set is a
    prefix J0 = 1/2, 1, ..., J* and a binary search over 2*J0 finds J*.
    Candidate J0 runs up to (N-1)/2: a block of all N particles cannot be
    excluded by N-particle data.
    """
    hi = m.n_atoms - 1  # largest 2*J0
    if hi < 1 or not _violates(m, 1, curve_bank, mean_axis, var_axis):
        return DepthResult(1, ())
    lo = 1  # invariant: lo violated
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if _violates(m, mid, curve_bank, mean_axis, var_axis):
            lo = mid
        else:
            hi = mid - 1
    return DepthResult(lo + 1, tuple(k / 2 for k in range(1, lo + 1)))


# -- EPR inference variances ----------------------------------------------------


def _split(state: PureState, a_sites, b_sites):
    a_sites, b_sites = tuple(a_sites), tuple(b_sites)
    if not a_sites or not b_sites:
        raise ValueError("both A and B need at least one site")
    if set(a_sites) & set(b_sites):
        raise ValueError("A and B must act on disjoint sites")
    n = state.n_sites
    if any(not 0 <= s < n for s in a_sites + b_sites) or len(set(a_sites + b_sites)) != len(a_sites + b_sites):
        raise ValueError("invalid site indices")
    rest = tuple(s for s in range(n) if s not in a_sites + b_sites)
    dims = state.site_dims
    d_a = int(np.prod([dims[s] for s in a_sites]))
    d_b = int(np.prod([dims[s] for s in b_sites]))
    psi = np.transpose(state.tensor(), a_sites + b_sites + rest).reshape(d_a, d_b, -1)
    return psi, d_a, d_b


def _check_op(op, d: int, name: str) -> np.ndarray:
    op = np.asarray(op, dtype=np.complex128)
    if op.shape != (d, d):
        raise DimensionError(f"{name} has shape {op.shape}, expected {(d, d)}")
    return op


def _inference_variance(psi: np.ndarray, x_a: np.ndarray, o_b: np.ndarray, degeneracy_tol: float) -> float:
    vals, vecs = hermitian_eigensolve(o_b)
    total = 0.0
    start = 0
    while start < len(vals):
        stop = start + 1
        while stop < len(vals) and vals[stop] - vals[start] <= degeneracy_tol:
            stop += 1
        proj = vecs[:, start:stop] @ vecs[:, start:stop].conj().T
        phi = np.einsum("bc,acr->abr", proj, psi)
        p = np.vdot(phi, phi).real
        if p > 1e-15:
            x_phi = np.einsum("ac,cbr->abr", x_a, phi)
            mean = np.vdot(phi, x_phi).real / p
            second = np.vdot(x_phi, x_phi).real / p
            total += p * max(second - mean * mean, 0.0)
        start = stop
    return float(total)


def inference_variances(state: PureState, obs_a_x, obs_a_p, obs_b_1, obs_b_2,
                        a_sites=(0,), b_sites=(1,), degeneracy_tol: float = 1e-9) -> InferenceVariances:
    """Average conditional variances V(X|O_B) and V(P|Q_B).

    V(X|O_B) = sum_b P(b) Var(X | b), with b running over the distinct
    eigenvalues of O_B (degenerate eigenvalues share one projector). Sites
    outside A and B are traced out.
    """
    psi, d_a, d_b = _split(state, a_sites, b_sites)
    x_a = _check_op(obs_a_x, d_a, "obs_a_x")
    p_a = _check_op(obs_a_p, d_a, "obs_a_p")
    o_b = _check_op(obs_b_1, d_b, "obs_b_1")
    q_b = _check_op(obs_b_2, d_b, "obs_b_2")
    return InferenceVariances(
        _inference_variance(psi, x_a, o_b, degeneracy_tol),
        _inference_variance(psi, p_a, q_b, degeneracy_tol),
    )


def robertson_bound(state: PureState, obs_a_x, obs_a_p, a_sites=(0,)) -> float:
    """|<[X, P]>|^2 / 4 evaluated on the A marginal."""
    others = tuple(s for s in range(state.n_sites) if s not in tuple(a_sites))
    if not others:
        psi = state.tensor().reshape(-1, 1)
        d_a = psi.shape[0]
    else:
        d_a = int(np.prod([state.site_dims[s] for s in a_sites]))
        psi = np.transpose(state.tensor(), tuple(a_sites) + others).reshape(d_a, -1)
    x = _check_op(obs_a_x, d_a, "obs_a_x")
    p = _check_op(obs_a_p, d_a, "obs_a_p")
    comm = x @ p - p @ x
    return float(abs(np.vdot(psi, comm @ psi)) ** 2 / 4)


def epr_paradox_test(iv: InferenceVariances, bound: float, form: str = "product",
                     tol: float = 1e-12) -> CriterionResult:
    """EPR paradox when the inferred uncertainties beat a local bound.

    ``form="product"`` compares V(X|O_B) * V(P|Q_B) with ``bound`` (e.g. a
    Robertson product bound); ``form="sum"`` compares V(X|O_B) + V(P|Q_B) with
    ``bound`` (e.g. C_J for spin components).
    """
    if not bound > 0:
        raise ValueError("bound must be positive")
    if form == "product":
        lhs = iv.v_x_given_b * iv.v_p_given_b
    elif form == "sum":
        lhs = iv.v_x_given_b + iv.v_p_given_b
    else:
        raise ValueError(f"unknown form {form!r}")
    return CriterionResult.build(lhs, bound, f"epr_{form}", Verdict.EPR_STEERING, sense="lower", tol=tol)
