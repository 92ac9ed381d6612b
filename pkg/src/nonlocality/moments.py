"""MABK, CFRD and CHSH moment inequalities for hybrid LHV/LHS partitions.

The first ``t`` sites of an N-site system are "trusted": they are modelled by
local quantum states instead of arbitrary hidden-variable distributions.
``t = 0`` is a Bell test, ``t = 1`` an EPR-steering test and ``t = N`` an
entanglement test.

MABK quantities use the Pauli convention (outcomes +-1); CFRD quantities use
standard spin units.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .bounds import CJValue, compute_cj
from .spin import (
    Convention,
    ConventionError,
    DimensionError,
    PureState,
    SpinMagnitude,
    apply_local,
    expectation,
    ladder_coefficient,
    make_spin_operators,
    product_operator,
    rotated_component,
    rotated_ladder,
)
from .results import CriterionResult, Verdict
from .states import CorrelatedStateSpec

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class Form(enum.Enum):
    SINGLE = "single"  # Re Pi
    SUM = "sum"  # Re Pi + Im Pi


class GenuineKind(enum.Enum):
    SVETLICHNY_SUM = "svetlichny_sum"
    GENUINE_ENT_SINGLE = "genuine_ent_single"
    GENUINE_ENT_SUM = "genuine_ent_sum"


@dataclass(frozen=True)
class MeasurementSettings:
    angles: tuple[float, ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        angles = tuple(float(a) for a in self.angles)
        signs = tuple(int(s) for s in self.signs)
        if len(angles) != len(signs):
            raise ValueError("angles and signs must have one entry per site")
        if any(s not in (1, -1) for s in signs):
            raise ValueError("signs must be +1 or -1")
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "signs", signs)

    @property
    def n_sites(self) -> int:
        return len(self.angles)

    @classmethod
    def ladder(cls, n: int, theta0: float = 0.0, delta: float = 0.0, sign: int = 1) -> "MeasurementSettings":
        """Uniform angle ladder theta_k = theta0 + k*delta with a common sign."""
        return cls(tuple(theta0 + k * delta for k in range(n)), (sign,) * n)


@dataclass(frozen=True)
class HybridPartition:
    t: int

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("t must be non-negative")

    def check(self, n: int) -> None:
        if self.t > n:
            raise ValueError(f"t={self.t} exceeds the number of sites {n}")


def hybrid_verdict(n: int, t: int) -> Verdict:
    if t == 0:
        return Verdict.BELL_NONLOCALITY
    if t == 1 and n > 1:
        return Verdict.EPR_STEERING
    return Verdict.ENTANGLEMENT


# -- MABK ---------------------------------------------------------------------


def _require_qubits(state: PureState) -> None:
    if any(d != 2 for d in state.site_dims):
        raise DimensionError("MABK moments are defined on spin-1/2 sites only")


def mabk_moment(state: PureState, settings: MeasurementSettings) -> complex:
    """<prod_k (J_k^{theta_k,X} + i s_k J_k^{theta_k,Y})> with Pauli operators."""
    _require_qubits(state)
    if settings.n_sites != state.n_sites:
        raise ValueError("settings do not match the number of sites")
    ops = make_spin_operators(SpinMagnitude(1), Convention.PAULI)
    site_ops = {k: rotated_ladder(ops, th, s) for k, (th, s) in enumerate(zip(settings.angles, settings.signs))}
    return complex(np.vdot(state.amplitudes, apply_local(state, site_ops)))


def ghz_mabk_moment(n: int, settings: MeasurementSettings) -> complex:
    """Closed-form MABK moment of the N-qubit GHZ state.

    Only |0...0><1...1| terms survive a product of ladder operators, so the
    moment is 2^(N-1) exp(-i s sum(theta)) when all signs agree and 0 otherwise.
    """
    if settings.n_sites != n:
        raise ValueError("settings do not match the number of sites")
    signs = set(settings.signs)
    if len(signs) > 1:
        return 0j
    s = signs.pop()
    return complex(2.0 ** (n - 1) * np.exp(-1j * s * sum(settings.angles)))


def form_value(moment: complex, form: Form) -> float:
    return moment.real if form is Form.SINGLE else moment.real + moment.imag


def mabk_threshold(n: int, t: int, form: Form) -> float:
    """Classical bound on Re Pi (SINGLE) or Re Pi + Im Pi (SUM) with t trusted sites."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 <= t <= n:
        raise ValueError(f"need 0 <= t <= n, got t={t}, n={n}")
    if t == 0:
        if form is Form.SINGLE:
            if n % 2 == 0:
                raise ValueError("with t=0 the single-moment bound applies to odd n only")
            return 2.0 ** ((n - 1) / 2)
        if n % 2 == 1:
            raise ValueError("with t=0 the summed-moment bound applies to even n only")
        return 2.0 ** (n / 2)
    if form is Form.SINGLE:
        return 2.0 ** ((n - t) / 2)
    return 2.0 ** ((n - t + 1) / 2)


def genuine_threshold(n: int, kind: GenuineKind) -> float:
    if n < 2:
        raise ValueError("genuine multipartite thresholds need n >= 2")
    if kind is GenuineKind.SVETLICHNY_SUM:
        return 2.0 ** (n - 1)
    if kind is GenuineKind.GENUINE_ENT_SINGLE:
        return 2.0 ** (n - 2)
    return 2.0 ** (n - 1.5)


def genuine_form(kind: GenuineKind) -> Form:
    return Form.SINGLE if kind is GenuineKind.GENUINE_ENT_SINGLE else Form.SUM


def mabk_result(moment: complex, n: int, partition: HybridPartition, form: Form,
                genuine: GenuineKind | None = None) -> CriterionResult:
    """Compare a precomputed MABK moment with the relevant threshold."""
    if genuine is not None:
        form = genuine_form(genuine)
        rhs = genuine_threshold(n, genuine)
        verdict = Verdict.GENUINE_BELL if genuine is GenuineKind.SVETLICHNY_SUM else Verdict.GENUINE_ENTANGLEMENT
        ident = f"mabk_{genuine.value}"
    else:
        partition.check(n)
        rhs = mabk_threshold(n, partition.t, form)
        verdict = hybrid_verdict(n, partition.t)
        ident = f"mabk_{form.value}_t{partition.t}"
    return CriterionResult.build(form_value(moment, form), rhs, ident, verdict)


def evaluate_mabk(state: PureState, settings: MeasurementSettings, partition: HybridPartition,
                  form: Form, genuine: GenuineKind | None = None) -> CriterionResult:
    return mabk_result(mabk_moment(state, settings), state.n_sites, partition, form, genuine)


def _golden_max(f, lo, hi, iters=80):
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_PHI * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_PHI * (hi - lo)
            f1 = f(x1)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def optimize_mabk_settings(n: int, form: Form, state: PureState | None = None,
                           grid: int = 32, rounds: int = 4) -> tuple[MeasurementSettings, complex]:
    """Maximize the chosen MABK form over uniform angle ladders.

    Without a state the GHZ closed form is used. Both sign choices are tried;
    the (theta0, delta) grid optimum is refined by alternating golden sections.
    """
    if state is not None and state.n_sites != n:
        raise ValueError("state does not match n")

    def moment(settings):
        return ghz_mabk_moment(n, settings) if state is None else mabk_moment(state, settings)

    best = (-math.inf, None, 0j)
    step = 2 * math.pi / grid
    for sign in (1, -1):
        def obj(t0, dl):
            return form_value(moment(MeasurementSettings.ladder(n, t0, dl, sign)), form)

        vals = [(obj(a * step - math.pi, b * step - math.pi), a, b) for a in range(grid) for b in range(grid)]
        v, a, b = max(vals)
        t0, dl = a * step - math.pi, b * step - math.pi
        for _ in range(rounds):
            t0, v = _golden_max(lambda x: obj(x, dl), t0 - step, t0 + step)
            dl, v = _golden_max(lambda x: obj(t0, x), dl - step, dl + step)
        if v > best[0]:
            s = MeasurementSettings.ladder(n, t0, dl, sign)
            best = (v, s, moment(s))
    return best[1], best[2]


# -- CHSH ---------------------------------------------------------------------


def chsh_correlation(state: PureState, theta: float, phi: float) -> float:
    """E(theta, phi) with B's outcomes relabelled, so the singlet gives cos(theta - phi)."""
    _require_qubits(state)
    if state.n_sites != 2:
        raise DimensionError("CHSH needs exactly two qubits")
    ops = make_spin_operators(SpinMagnitude(1), Convention.PAULI)
    op = product_operator({0: rotated_component(ops, theta), 1: rotated_component(ops, phi)}, (2, 2))
    return -expectation(state, op).real


def chsh_value(state: PureState, theta: float, theta_p: float, phi: float, phi_p: float) -> float:
    """B = E(theta,phi) - E(theta,phi') + E(theta',phi) + E(theta',phi')."""
    e = chsh_correlation
    return e(state, theta, phi) - e(state, theta, phi_p) + e(state, theta_p, phi) + e(state, theta_p, phi_p)


# -- CFRD ---------------------------------------------------------------------


def _common_spin(state: PureState) -> SpinMagnitude:
    dims = set(state.site_dims)
    if len(dims) != 1:
        raise DimensionError("CFRD evaluation needs all sites to share one spin")
    return SpinMagnitude(dims.pop() - 1)


def cfrd_moment(state: PureState, settings: MeasurementSettings) -> complex:
    mag = _common_spin(state)
    if settings.n_sites != state.n_sites:
        raise ValueError("settings do not match the number of sites")
    ops = make_spin_operators(mag, Convention.STANDARD)
    site_ops = {k: rotated_ladder(ops, th, s) for k, (th, s) in enumerate(zip(settings.angles, settings.signs))}
    return complex(np.vdot(state.amplitudes, apply_local(state, site_ops)))


def cfrd_lhs(state: PureState, settings: MeasurementSettings) -> float:
    """|<prod_k J_k^{s_k}>|^2 in standard units, each ladder in its rotated frame."""
    return abs(cfrd_moment(state, settings)) ** 2


def _check_cj(cj: CJValue, mag: SpinMagnitude) -> None:
    if cj.convention is not Convention.STANDARD:
        raise ConventionError("CFRD bounds use the standard convention")
    if cj.j != mag:
        raise ValueError(f"C_J computed for J={cj.j}, sites have J={mag}")


def cfrd_rhs(state: PureState, partition: HybridPartition, cj: CJValue | None = None) -> float:
    """<prod_{k<=t} ((J^X)^2 + (J^Y)^2 - C_J) prod_{k>t} ((J^X)^2 + (J^Y)^2)>.

    Each factor is J(J+1) - (J^Z)^2 (minus C_J), diagonal in the product basis.
    """
    mag = _common_spin(state)
    partition.check(state.n_sites)
    if cj is None:
        cj = compute_cj(mag)
    _check_cj(cj, mag)
    base = mag.j * (mag.j + 1) - mag.m_values**2
    weights = np.abs(state.tensor()) ** 2
    for k in range(state.n_sites):
        factor = base - cj.value if k < partition.t else base
        shape = [1] * state.n_sites
        shape[k] = mag.d
        weights = weights * factor.reshape(shape)
    return float(weights.sum())


def _cfrd_id(partition: HybridPartition) -> str:
    return f"cfrd_t{partition.t}"


def evaluate_cfrd(state: PureState, settings: MeasurementSettings, partition: HybridPartition,
                  cj: CJValue | None = None) -> CriterionResult:
    lhs = cfrd_lhs(state, settings)
    rhs = cfrd_rhs(state, partition, cj)
    return CriterionResult.build(lhs, rhs, _cfrd_id(partition), hybrid_verdict(state.n_sites, partition.t))


# closed forms for the correlated family sum_m r_m |J,m>^N


def correlated_cfrd_moment(spec: CorrelatedStateSpec, settings: MeasurementSettings) -> complex:
    n = spec.n_sites
    if settings.n_sites != n:
        raise ValueError("settings do not match the number of sites")
    signs = set(settings.signs)
    if len(signs) > 1:
        return 0j
    s = signs.pop()
    j = spec.j.j
    r = np.asarray(spec.r)  # r[i] belongs to m = -J + i
    total = 0.0
    for i in range(spec.j.d - 1):
        m = -j + i
        total += r[i + 1] * r[i] * ladder_coefficient(j, m) ** n
    return complex(total / spec.norm_sq * np.exp(-1j * s * sum(settings.angles)))


def correlated_cfrd_lhs(spec: CorrelatedStateSpec, settings: MeasurementSettings) -> float:
    return abs(correlated_cfrd_moment(spec, settings)) ** 2


def correlated_cfrd_rhs(spec: CorrelatedStateSpec, partition: HybridPartition, cj: CJValue | None = None) -> float:
    partition.check(spec.n_sites)
    if cj is None:
        cj = compute_cj(spec.j)
    _check_cj(cj, spec.j)
    j = spec.j.j
    m = -j + np.arange(spec.j.d)
    base = j * (j + 1) - m**2
    t, n = partition.t, spec.n_sites
    r2 = np.square(spec.r)
    return float(np.sum(r2 * (base - cj.value) ** t * base ** (n - t)) / spec.norm_sq)


def evaluate_correlated_cfrd(spec: CorrelatedStateSpec, settings: MeasurementSettings,
                             partition: HybridPartition, cj: CJValue | None = None) -> CriterionResult:
    lhs = correlated_cfrd_lhs(spec, settings)
    rhs = correlated_cfrd_rhs(spec, partition, cj)
    return CriterionResult.build(lhs, rhs, _cfrd_id(partition), hybrid_verdict(spec.n_sites, partition.t))


def _symmetric_r(angles: np.ndarray, d: int) -> np.ndarray:
    """Map hyperspherical angles in [0, pi/2] to a symmetric non-negative r."""
    half = len(angles) + 1
    h = np.empty(half)
    carry = 1.0
    for i, a in enumerate(angles):
        h[i] = carry * math.cos(a)
        carry *= math.sin(a)
    h[-1] = carry
    r = np.empty(d)
    r[:half] = h
    r[d - half:] = h[::-1]
    return r


def optimize_amplitudes(n_sites: int, j, partition: HybridPartition, restarts: int = 20,
                        seed: int = 0, tol: float = 1e-8, cj: CJValue | None = None):
    """Maximize the CFRD ratio L/R over symmetric real amplitudes r_m = r_{-m}.

    The closed forms are used; for the correlated family the ratio does not
    depend on the measurement angles, so settings are all-zero angles with
    raising operators. Returns (r, settings, result) with r scaled so that
    r_{+-J} = 1 when that entry is nonzero.
    """
    if n_sites < 2:
        raise ValueError("n_sites must be >= 2")
    mag = SpinMagnitude.of(j)
    partition.check(n_sites)
    if cj is None:
        cj = compute_cj(mag)
    settings = MeasurementSettings.ladder(n_sites)
    d = mag.d
    n_angles = (d + 1) // 2 - 1

    def ratio(angles):
        spec = CorrelatedStateSpec(n_sites, mag, tuple(_symmetric_r(angles, d)))
        rhs = correlated_cfrd_rhs(spec, partition, cj)
        return correlated_cfrd_lhs(spec, settings) / rhs if rhs > 0 else -math.inf

    rng = np.random.default_rng(seed)
    starts = [np.full(n_angles, math.pi / 4)]
    starts += [rng.uniform(0, math.pi / 2, n_angles) for _ in range(restarts - 1)]
    best_angles, best_val = starts[0], ratio(starts[0])
    for start in starts if n_angles else []:
        angles = start.copy()
        val = ratio(angles)
        for _ in range(200):
            prev = val
            for i in range(n_angles):
                def along(a, i=i):
                    trial = angles.copy()
                    trial[i] = a
                    return ratio(trial)
                a, v = _golden_max(along, 0.0, math.pi / 2, iters=60)
                if v >= val:
                    angles[i], val = a, v
            if val - prev <= tol * max(abs(val), 1.0):
                break
        if val > best_val:
            best_angles, best_val = angles, val

    r = _symmetric_r(best_angles, d)
    if r[0] > 1e-12:
        r = r / r[0]
    else:
        r = r / r.max()
    spec = CorrelatedStateSpec(n_sites, mag, tuple(r))
    return r, settings, evaluate_correlated_cfrd(spec, settings, partition, cj)
