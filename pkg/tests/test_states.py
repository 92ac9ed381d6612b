import itertools
from math import comb

import numpy as np
import pytest

from nonlocality.moments import MeasurementSettings, chsh_correlation, mabk_moment
from nonlocality.spin import (
    Convention,
    DimensionError,
    SpinMagnitude,
    expectation,
    make_spin_operators,
    product_operator,
)
from nonlocality.states import (
    BECParams,
    CorrelatedStateSpec,
    TwoModeState,
    bec_ground_state,
    bec_hamiltonian,
    correlated_state,
    ghz_state,
    schwinger_moments,
    singlet_state,
)

PAULI = make_spin_operators(0.5, Convention.PAULI)
PAULIS = [np.eye(2), PAULI.jx, PAULI.jy, PAULI.jz]


def test_singlet():
    s = singlet_state()
    assert np.linalg.norm(s.amplitudes) == pytest.approx(1.0, abs=1e-12)
    zz = product_operator({0: PAULI.jz, 1: PAULI.jz}, (2, 2))
    assert expectation(s, zz).real == pytest.approx(-1.0)
    assert chsh_correlation(s, 0.0, 0.0) == pytest.approx(1.0)
    assert chsh_correlation(s, 0.3, 1.1) == pytest.approx(np.cos(0.3 - 1.1))


def test_ghz():
    g2 = ghz_state(2)
    np.testing.assert_allclose(g2.amplitudes, [2**-0.5, 0, 0, 2**-0.5])
    xx = product_operator({0: PAULI.jx, 1: PAULI.jx}, (2, 2))
    assert expectation(g2, xx).real == pytest.approx(1.0)
    assert mabk_moment(ghz_state(3), MeasurementSettings.ladder(3)) == pytest.approx(4.0)
    for n in range(2, 13):
        assert np.linalg.norm(ghz_state(n).amplitudes) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(DimensionError):
        ghz_state(13)
    with pytest.raises(ValueError):
        ghz_state(1)


def test_correlated_half_uniform_is_ghz():
    s = correlated_state(CorrelatedStateSpec(2, "1/2", (1, 1)))
    np.testing.assert_allclose(s.amplitudes, ghz_state(2).amplitudes, atol=1e-15)


@pytest.mark.parametrize("n", range(2, 7))
def test_correlated_half_matches_ghz_on_pauli_strings(n, rng):
    a = correlated_state(CorrelatedStateSpec(n, "1/2", (0.7, 0.7)))
    b = ghz_state(n)
    strings = list(itertools.product(range(4), repeat=n))
    for idx in rng.choice(len(strings), size=min(len(strings), 60), replace=False):
        op = product_operator({k: PAULIS[p] for k, p in enumerate(strings[idx])}, (2,) * n)
        assert expectation(a, op) == pytest.approx(expectation(b, op), abs=1e-12)


def test_correlated_spin_one():
    spec = CorrelatedStateSpec(3, 1, (1, 0.5, 1))
    s = correlated_state(spec)
    amps = s.amplitudes
    # |m,m,m> for m = 1, 0, -1 sits at basis index k*(1+3+9) for k = 0, 1, 2
    np.testing.assert_allclose(amps[[0, 13, 26]], np.array([1, 0.5, 1]) / np.sqrt(2.25))
    assert spec.norm_sq == pytest.approx(2.25)
    single = correlated_state(CorrelatedStateSpec(1, 1, (1, 1, 1)))
    assert expectation(single, make_spin_operators(1).jz).real == pytest.approx(0.0, abs=1e-15)


def test_correlated_validation():
    with pytest.raises(ValueError):
        CorrelatedStateSpec(2, 1, (0, 0, 0))
    with pytest.raises(ValueError):
        CorrelatedStateSpec(2, 1, (1, 1))
    with pytest.raises(DimensionError):
        correlated_state(CorrelatedStateSpec(8, 1, (1, 1, 1)))


def test_bec_hamiltonian_examples():
    h = bec_hamiltonian(BECParams(1, kappa=0.7, g=3.0))
    np.testing.assert_allclose(h.dense(), [[0, 0.7], [0.7, 0]])
    h = bec_hamiltonian(BECParams(2, kappa=1.0, g=0.0))
    np.testing.assert_allclose(h.off, [np.sqrt(2), np.sqrt(2)])
    np.testing.assert_allclose(h.diag, 0)
    h = bec_hamiltonian(BECParams(2, kappa=1e-300, g=2.0))
    np.testing.assert_allclose(h.diag, [2, 0, 2])


def test_bec_params_validation():
    for kwargs in ({"n_atoms": 0}, {"n_atoms": 3, "kappa": 0}, {"n_atoms": 3, "g": -1}):
        with pytest.raises(ValueError):
            BECParams(**kwargs)


def test_bec_ground_state_single_atom():
    amps = bec_ground_state(BECParams(1)).amplitudes
    # (|1,0> - |0,1>)/sqrt2 up to a global sign
    np.testing.assert_allclose(np.abs(amps), [2**-0.5, 2**-0.5])
    assert amps[0] * amps[1] == pytest.approx(-0.5)


@pytest.mark.parametrize("n", [1, 2, 5, 20, 100])
def test_bec_ground_state_g0_binomial(n):
    amps = bec_ground_state(BECParams(n)).amplitudes
    na = np.arange(n + 1)
    expected = (-1.0) ** na * np.sqrt([float(comb(n, int(k))) for k in na]) / 2 ** (n / 2)
    k = int(np.argmax(np.abs(expected)))
    expected *= np.sign(expected[k])
    np.testing.assert_allclose(amps, expected, atol=1e-10)


def test_bec_ground_state_is_lowest_eigenvector(rng):
    for n, g in [(10, 0.3), (50, 2.0), (100, 0.01)]:
        h = bec_hamiltonian(BECParams(n, 1.0, g)).dense()
        w = np.linalg.eigvalsh(h)
        v = bec_ground_state(BECParams(n, 1.0, g)).amplitudes
        assert np.vdot(v, h @ v).real == pytest.approx(w[0], abs=1e-9 * max(1, abs(w[0])))
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)
        k = int(np.argmax(np.abs(v)))
        assert v[k].imag == 0 and v[k].real > 0


def _spin_moments_dense(state: TwoModeState):
    """Schwinger moments via dense spin-N/2 matrices (n_a = N/2 + m)."""
    n = state.n_atoms
    ops = make_spin_operators(SpinMagnitude(n))
    psi = state.amplitudes[::-1]  # spin basis runs from m = +N/2 down
    out = {}
    for ax in "xyz":
        op = getattr(ops, f"j{ax}")
        mean = np.vdot(psi, op @ psi).real
        out[ax] = (mean, np.vdot(psi, op @ op @ psi).real - mean**2)
    return out


def test_schwinger_moments_against_dense_spin(rng):
    for n in [1, 3, 8, 25]:
        z = rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)
        s = TwoModeState(z / np.linalg.norm(z), n)
        m = schwinger_moments(s)
        ref = _spin_moments_dense(s)
        for ax in "xyz":
            assert m.mean(ax) == pytest.approx(ref[ax][0], abs=1e-10)
            assert m.var(ax) == pytest.approx(ref[ax][1], abs=1e-10)
        assert m.j_sq == pytest.approx(n * (n + 2) / 4, abs=1e-10)


def test_schwinger_examples():
    m = schwinger_moments(bec_ground_state(BECParams(40)))
    assert abs(m.mean_x) == pytest.approx(20.0, abs=1e-10)
    assert m.var_z == pytest.approx(10.0, abs=1e-10)
    fock = np.zeros(11)
    fock[10] = 1.0
    m = schwinger_moments(TwoModeState(fock, 10))
    assert m.mean_z == pytest.approx(5.0)
    assert m.var_z == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("g", [0.0, 0.05, 0.5, 2.0])
def test_ground_state_parity(g):
    m = schwinger_moments(bec_ground_state(BECParams(60, 1.0, g)))
    assert abs(m.mean_z) < 1e-10 and abs(m.mean_y) < 1e-10
    assert m.mean_x < 0  # kappa > 0 aligns the spin along -X
    assert m.j_sq == pytest.approx(60 * 62 / 4, abs=1e-9)
