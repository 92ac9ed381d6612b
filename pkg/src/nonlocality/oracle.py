"""Brute-force certification of classical bounds.

Deterministic strategies suffice for LHV bounds: any hidden-variable average is
a convex mixture, and a linear objective over a polytope peaks at a vertex.
For the MABK moment every untrusted site contributes a factor
``<J^X> + i<J^Y>`` with both components in [-1, 1], so the vertices are the
four corners +-1 +-i. Trusted sites are local quantum states with
``<J^X>^2 + <J^Y>^2 <= 1`` (a disk); their phase is chosen analytically.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .moments import Form, GenuineKind, genuine_threshold, mabk_threshold
from .spin import Convention, SpinMagnitude, make_spin_operators

MAX_CORNER_SITES = 12
AGREE_TOL = 1e-6
_CORNERS = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j])


class Objective(enum.Enum):
    RE = "re"
    RE_PLUS_IM = "re_plus_im"

    @property
    def form(self) -> Form:
        return Form.SINGLE if self is Objective.RE else Form.SUM


class SiteKind(enum.Enum):
    CORNER = "corner"
    DISK = "disk"


@dataclass(frozen=True)
class LocalStrategy:
    mx: tuple[float, ...]
    my: tuple[float, ...]
    kinds: tuple[SiteKind, ...]

    def __post_init__(self):
        if not len(self.mx) == len(self.my) == len(self.kinds):
            raise ValueError("strategy components must have equal length")
        for x, y, k in zip(self.mx, self.my, self.kinds):
            if k is SiteKind.CORNER and (abs(x) != 1 or abs(y) != 1):
                raise ValueError("corner sites need mx, my in {-1, +1}")
            if k is SiteKind.DISK and x * x + y * y > 1 + 1e-12:
                raise ValueError("disk sites need mx^2 + my^2 <= 1")

    def product(self) -> complex:
        return complex(np.prod(np.array(self.mx) + 1j * np.array(self.my)))


@dataclass(frozen=True)
class OracleReport:
    inequality_id: str
    objective: Objective
    n: int
    t: int
    max_value: float
    argmax: LocalStrategy | None
    analytic_bound: float
    agrees: bool

    def as_row(self) -> dict:
        return {
            "inequality_id": self.inequality_id,
            "n": self.n,
            "t": self.t,
            "oracle_max": self.max_value,
            "analytic_bound": self.analytic_bound,
            "agrees": self.agrees,
        }


def _score(z, objective: Objective):
    return z.real if objective is Objective.RE else z.real + z.imag


def _corner_products(n: int) -> np.ndarray:
    """All 4^n corner products, site 0 slowest-varying."""
    vals = np.ones(1, dtype=np.complex128)
    for _ in range(n):
        vals = (vals[:, None] * _CORNERS[None, :]).ravel()
    return vals


def _corner_search(n: int, objective: Objective | None):
    """Exhaustive search of 4^n corners.

    With an objective the best score is returned; with ``None`` the largest
    modulus. The enumeration is split into prefix and suffix blocks so memory
    stays at 4^(n/2) entries.
    """
    if n > MAX_CORNER_SITES:
        raise ValueError(f"corner enumeration is capped at n={MAX_CORNER_SITES}")
    if n == 0:
        return (1.0 if objective is None else _score(1 + 0j, objective)), ()
    n_pre = n // 2
    pre = _corner_products(n_pre)
    suf = _corner_products(n - n_pre)
    best, best_idx = -math.inf, (0, 0)
    for i, p in enumerate(pre):
        z = p * suf
        s = np.abs(z) if objective is None else _score(z, objective)
        k = int(np.argmax(s))
        if s[k] > best:
            best, best_idx = float(s[k]), (i, k)
    digits = np.unravel_index(best_idx[0], (4,) * n_pre) if n_pre else ()
    digits = tuple(digits) + tuple(np.unravel_index(best_idx[1], (4,) * (n - n_pre)))
    return best, tuple(int(d) for d in digits)


def lhv_corner_extremum(n: int, objective: Objective) -> float:
    """Analytic maximum over corner strategies for either parity of n.

    Corner products are 2^(n/2) exp(i(n pi/4 + k pi/2)). Where a MABK bound
    applies (odd n for Re, even n for Re+Im) it is that bound; otherwise the
    phase cannot be aligned as well and the extremum is larger.
    """
    if objective is Objective.RE:
        return 2.0 ** ((n - 1) / 2) if n % 2 else 2.0 ** (n / 2)
    return 2.0 ** (n / 2) if n % 2 == 0 else 2.0 ** ((n + 1) / 2)


def _analytic_bound(n: int, t: int, objective: Objective) -> float:
    if t == 0:
        try:
            return mabk_threshold(n, 0, objective.form)
        except ValueError:
            return lhv_corner_extremum(n, objective)
    return mabk_threshold(n, t, objective.form)


def _report(ident, objective, n, t, value, strategy, bound) -> OracleReport:
    return OracleReport(ident, objective, n, t, float(value), strategy, float(bound),
                        bool(abs(value - bound) <= AGREE_TOL))


def _corner_strategy(digits) -> tuple[list, list]:
    z = _CORNERS[list(digits)] if digits else np.array([])
    return [float(v.real) for v in z], [float(v.imag) for v in z]


def corner_max(n: int, objective: Objective) -> OracleReport:
    """Exact maximum of the objective over all deterministic LHV strategies."""
    if n < 1:
        raise ValueError("n must be >= 1")
    value, digits = _corner_search(n, objective)
    mx, my = _corner_strategy(digits)
    strategy = LocalStrategy(tuple(mx), tuple(my), (SiteKind.CORNER,) * n)
    ident = "mabk_re" if objective is Objective.RE else "mabk_sum"
    return _report(ident, objective, n, 0, value, strategy, _analytic_bound(n, 0, objective))


def hybrid_max(n: int, t: int, objective: Objective) -> OracleReport:
    """Maximum with sites 0..t-1 trusted (disk) and the rest LHV (corner).

    A disk factor has modulus <= 1 and free phase, so for t >= 1 the best
    choice rotates the corner product onto the direction favoured by the
    objective: Re reaches |P|, Re+Im reaches sqrt(2)|P|.
    """
    if n < 1 or not 0 <= t <= n:
        raise ValueError(f"need n >= 1 and 0 <= t <= n, got n={n}, t={t}")
    if t == 0:
        rep = corner_max(n, objective)
        return OracleReport("hybrid_re" if objective is Objective.RE else "hybrid_sum", objective, n, 0,
                            rep.max_value, rep.argmax, rep.analytic_bound, rep.agrees)
    modulus, digits = _corner_search(n - t, None)
    mx, my = _corner_strategy(digits)
    corner_prod = complex(np.prod(np.array(mx) + 1j * np.array(my))) if digits else 1 + 0j
    target = 0.0 if objective is Objective.RE else math.pi / 4
    phase = target - math.atan2(corner_prod.imag, corner_prod.real)
    disk_x = [math.cos(phase)] + [1.0] * (t - 1)
    disk_y = [math.sin(phase)] + [0.0] * (t - 1)
    strategy = LocalStrategy(tuple(disk_x + mx), tuple(disk_y + my),
                             (SiteKind.DISK,) * t + (SiteKind.CORNER,) * (n - t))
    value = _score(strategy.product(), objective)
    ident = "hybrid_re" if objective is Objective.RE else "hybrid_sum"
    return _report(ident, objective, n, t, value, strategy, _analytic_bound(n, t, objective))


def _square_vertices(half_width: float) -> np.ndarray:
    return half_width * _CORNERS


def svetlichny_max(n: int) -> OracleReport:
    """Largest Re+Im over bipartitions k | n-k.

    Each group's joint moment obeys the algebraic limits |Re|, |Im| <= 2^(k-1),
    i.e. lies in a square. The objective is bilinear in the two group moments,
    so the maximum sits on a pair of square vertices.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    best = -math.inf
    for k in range(1, n):
        z = _square_vertices(2.0 ** (k - 1))[:, None] * _square_vertices(2.0 ** (n - k - 1))[None, :]
        best = max(best, float(np.max(z.real + z.imag)))
    bound = genuine_threshold(n, GenuineKind.SVETLICHNY_SUM)
    return _report("svetlichny", Objective.RE_PLUS_IM, n, 0, best, None, bound)


def genuine_entanglement_max(n: int, objective: Objective) -> OracleReport:
    """Largest objective over bipartitions whose groups are separately quantum.

    A k-qubit group moment lies in a disk of radius 2^(k-1) (algebraic limit
    combined with rotation about Z); the product of two disks has radius
    2^(n-2), with free phase.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    best = -math.inf
    angles = np.linspace(0.0, 2 * math.pi, 721)
    for k in range(1, n):
        radius = 2.0 ** (k - 1) * 2.0 ** (n - k - 1)
        z = radius * np.exp(1j * angles)
        best = max(best, float(np.max(_score(z, objective))))
    kind = GenuineKind.GENUINE_ENT_SINGLE if objective is Objective.RE else GenuineKind.GENUINE_ENT_SUM
    return _report(f"genuine_ent_{objective.value}", objective, n, 0, best, None, genuine_threshold(n, kind))


def chsh_lhv_max() -> OracleReport:
    """max of a b - a b' + a' b + a' b' over deterministic outcomes +-1."""
    best = max(a * b - a * bp + ap * b + ap * bp for a, ap, b, bp in itertools.product((1, -1), repeat=4))
    return _report("chsh", Objective.RE, 2, 0, float(best), None, 2.0)


# -- random-state scans -------------------------------------------------------


class ScanObjective(enum.Enum):
    SUM_VAR_XY = "sum_var_xy"
    VAR_Z_AT_MEAN_X = "var_z_at_mean_x"


@dataclass(frozen=True, eq=False)
class ScanResult:
    j: SpinMagnitude
    objective: ScanObjective
    minimum: float  # SUM_VAR_XY: sample minimum (after polishing)
    xs: np.ndarray  # VAR_Z_AT_MEAN_X: |<J^X>|/J of every sample
    ys: np.ndarray  # VAR_Z_AT_MEAN_X: Var(J^Z)/J of every sample
    max_var_y: float

    def envelope(self, n_bins: int = 50) -> tuple[np.ndarray, np.ndarray]:
        """Lowest y and its x within each x-bin (bins with no samples dropped)."""
        edges = np.linspace(0, 1, n_bins + 1)
        idx = np.clip(np.searchsorted(edges, self.xs, side="right") - 1, 0, n_bins - 1)
        ex, ey = [], []
        for b in range(n_bins):
            sel = np.flatnonzero(idx == b)
            if sel.size:
                k = sel[np.argmin(self.ys[sel])]
                ex.append(self.xs[k])
                ey.append(self.ys[k])
        return np.array(ex), np.array(ey)


def _moments(psi: np.ndarray, ops):
    """Means and variances of J^X, J^Y, J^Z for a batch of row-vector states."""
    out = {}
    for name in ("jx", "jy", "jz"):
        op = getattr(ops, name)
        phi = psi @ op.T
        mean = np.einsum("ij,ij->i", psi.conj(), phi).real
        second = np.einsum("ij,ij->i", phi.conj(), phi).real
        out[name] = (mean, second - mean**2)
    return out


def _sum_var_xy(vec: np.ndarray, ops) -> float:
    psi = vec / np.linalg.norm(vec)
    m = _moments(psi[None, :], ops)
    return float(m["jx"][1][0] + m["jy"][1][0])


def random_state_min_scan(j, objective: ScanObjective, samples: int, seed: int = 0,
                          polish: int = 8, chunk: int = 20000) -> ScanResult:
    """Sample Haar-random spin-j states and record the chosen objective.

    For SUM_VAR_XY the best samples are additionally refined by local descent
    over unnormalized amplitudes; every evaluated point is a physical state, so
    the reported minimum never undercuts the true one.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    mag = SpinMagnitude.of(j)
    ops = make_spin_operators(mag, Convention.STANDARD)
    rng = np.random.default_rng(seed)
    d = mag.d
    xs, ys, sums, vecs = [], [], [], []
    max_var_y = 0.0
    remaining = samples
    while remaining:
        size = min(chunk, remaining)
        remaining -= size
        z = rng.normal(size=(size, d)) + 1j * rng.normal(size=(size, d))
        psi = z / np.linalg.norm(z, axis=1, keepdims=True)
        m = _moments(psi, ops)
        max_var_y = max(max_var_y, float(m["jy"][1].max()))
        if objective is ScanObjective.SUM_VAR_XY:
            s = m["jx"][1] + m["jy"][1]
            order = np.argsort(s)[:polish]
            sums.append(s[order])
            vecs.append(psi[order])
        else:
            xs.append(np.abs(m["jx"][0]) / mag.j)
            ys.append(m["jz"][1] / mag.j)

    if objective is ScanObjective.SUM_VAR_XY:
        s = np.concatenate(sums)
        v = np.concatenate(vecs)
        order = np.argsort(s)[:polish]
        best = float(s[order[0]])

        def f(params):
            return _sum_var_xy(params[:d] + 1j * params[d:], ops)

        for k in order:
            start = np.concatenate([v[k].real, v[k].imag])
            res = minimize(f, start, method="BFGS", options={"gtol": 1e-10})
            best = min(best, f(res.x))
        return ScanResult(mag, objective, best, np.empty(0), np.empty(0), max_var_y)

    xs_all, ys_all = np.concatenate(xs), np.concatenate(ys)
    return ScanResult(mag, objective, float(ys_all.min()), xs_all, ys_all, max_var_y)
