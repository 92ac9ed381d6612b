import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nonlocality.spin import (
    Convention,
    ConventionError,
    DimensionError,
    NotHermitianError,
    PureState,
    SpinMagnitude,
    apply_local,
    embed_at_site,
    expectation,
    make_spin_operators,
    product_operator,
    product_state,
    random_state,
    rotated_component,
    variance,
)
from nonlocality.states import singlet_state

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.diag([1.0, -1.0]).astype(complex)
SPINS = [SpinMagnitude(k) for k in range(1, 9)]


def test_pauli_matrices():
    ops = make_spin_operators("1/2", Convention.PAULI)
    np.testing.assert_array_equal(ops.jx, SX)
    np.testing.assert_array_equal(ops.jy, SY)
    np.testing.assert_array_equal(ops.jz, SZ)


def test_standard_half_commutator():
    ops = make_spin_operators(0.5)
    np.testing.assert_allclose(ops.jx @ ops.jy - ops.jy @ ops.jx, 1j * ops.jz, atol=1e-12)


def test_spin_one_ladder_and_casimir():
    ops = make_spin_operators(1)
    # basis order m = 1, 0, -1: <0|J+|-1> is row 1, column 2
    assert ops.jplus[1, 2] == pytest.approx(np.sqrt(2), abs=1e-15)
    assert ops.jplus[0, 1] == pytest.approx(np.sqrt(2), abs=1e-15)
    np.testing.assert_allclose(ops.jsq, 2 * np.eye(3), atol=1e-12)


@pytest.mark.parametrize("mag", SPINS, ids=str)
def test_operator_invariants(mag):
    convs = [Convention.STANDARD] + ([Convention.PAULI] if mag.two_j == 1 else [])
    for conv in convs:
        ops = make_spin_operators(mag, conv)
        c = 2.0 if conv is Convention.PAULI else 1.0
        for op in (ops.jx, ops.jy, ops.jz, ops.jsq):
            np.testing.assert_allclose(op, op.conj().T, atol=1e-12)
        np.testing.assert_allclose(ops.jx @ ops.jy - ops.jy @ ops.jx, 1j * c * ops.jz, atol=1e-12)
        np.testing.assert_array_equal(ops.jplus, ops.jx + 1j * ops.jy)
        np.testing.assert_array_equal(ops.jminus, ops.jx - 1j * ops.jy)
        if conv is Convention.STANDARD:
            np.testing.assert_allclose(ops.jsq, mag.j * (mag.j + 1) * np.eye(mag.d), atol=1e-12)


def test_pauli_rejected_above_half():
    with pytest.raises(ConventionError):
        make_spin_operators(1, Convention.PAULI)


@pytest.mark.parametrize("bad", [0, -1, 0.3, "1/3"])
def test_invalid_spin_magnitude(bad):
    with pytest.raises(ValueError):
        SpinMagnitude.of(bad)


def test_spin_magnitude_parsing():
    assert SpinMagnitude.of("3/2") == SpinMagnitude(3)
    assert SpinMagnitude.of(2).d == 5
    assert str(SpinMagnitude(3)) == "3/2"
    np.testing.assert_array_equal(SpinMagnitude(2).m_values, [1, 0, -1])


def test_rotated_component():
    ops = make_spin_operators(0.5, Convention.PAULI)
    np.testing.assert_allclose(rotated_component(ops, 0.0), ops.jx, atol=1e-15)
    np.testing.assert_allclose(rotated_component(ops, np.pi / 2), ops.jy, atol=1e-15)
    diag = rotated_component(ops, np.pi / 4)
    np.testing.assert_allclose(diag, (ops.jx + ops.jy) / np.sqrt(2), atol=1e-15)
    np.testing.assert_allclose(np.linalg.eigvalsh(diag), [-1, 1], atol=1e-12)


def test_embed_at_site():
    ops = make_spin_operators(0.5, Convention.PAULI)
    np.testing.assert_array_equal(embed_at_site(ops.jz, 0, (2, 2)).matrix, np.diag([1, 1, -1, -1]))
    np.testing.assert_array_equal(embed_at_site(np.eye(3), 1, (2, 3)).matrix, np.eye(6))
    x1 = embed_at_site(ops.jx, 1, (2, 2)).matrix
    np.testing.assert_array_equal(x1, np.kron(np.eye(2), SX))
    with pytest.raises(DimensionError):
        embed_at_site(np.eye(3), 0, (2, 2))


def test_site_zero_is_slowest_index():
    # |0>_0 |1>_1 is flat index 1 with C ordering
    st_ = product_state([[1, 0], [0, 1]])
    assert abs(st_.amplitudes[1]) == pytest.approx(1.0)
    ops = make_spin_operators(0.5, Convention.PAULI)
    assert expectation(st_, embed_at_site(ops.jz, 0, (2, 2))).real == pytest.approx(1.0)
    assert expectation(st_, embed_at_site(ops.jz, 1, (2, 2))).real == pytest.approx(-1.0)


def test_expectation_examples():
    up = PureState(np.array([1, 0]), (2,))
    ops = make_spin_operators(0.5, Convention.PAULI)
    assert expectation(up, np.eye(2)) == pytest.approx(1.0)
    assert expectation(up, ops.jz) == pytest.approx(1.0)
    zz = product_operator({0: ops.jz, 1: ops.jz}, (2, 2))
    assert expectation(singlet_state(), zz) == pytest.approx(-1.0)
    with pytest.raises(DimensionError):
        expectation(up, np.eye(4))


def test_variance_examples():
    up = PureState(np.array([1, 0]), (2,))
    ops = make_spin_operators(0.5, Convention.PAULI)
    assert variance(up, ops.jz) == pytest.approx(0.0, abs=1e-15)
    assert variance(up, ops.jx) == pytest.approx(1.0)
    one = make_spin_operators(1)
    m0 = PureState(np.array([0, 1, 0]), (3,))
    assert variance(m0, one.jz) == pytest.approx(0.0, abs=1e-15)
    assert variance(m0, one.jx) == pytest.approx(1.0)
    with pytest.raises(NotHermitianError):
        variance(up, ops.jplus)


def test_state_validation():
    with pytest.raises(ValueError):
        PureState(np.array([1.0, 1.0]), (2,))
    with pytest.raises(DimensionError):
        PureState(np.array([1.0, 0, 0]), (2,))
    with pytest.raises(DimensionError):
        PureState.from_unnormalized(np.ones(2**13), (2,) * 13)


def test_apply_local_matches_kron(rng):
    ops = make_spin_operators(1)
    s = random_state((3, 2, 3), rng)
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    b = rng.normal(size=(2, 2))
    direct = np.kron(np.kron(a, b), ops.jx) @ s.amplitudes
    np.testing.assert_allclose(apply_local(s, {0: a, 1: b, 2: ops.jx}), direct, atol=1e-12)


def test_expectation_is_linear(rng):
    s = random_state((2, 3), rng)
    a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    b = rng.normal(size=(6, 6))
    lhs = expectation(s, 2.5 * a + b)
    assert lhs == pytest.approx(2.5 * expectation(s, a) + expectation(s, b), abs=1e-12)


@pytest.mark.parametrize("mag", [SpinMagnitude(k) for k in range(1, 5)], ids=str)
def test_variance_nonnegative_and_uncertainty_relation(mag, rng):
    ops = make_spin_operators(mag)
    for _ in range(1000):
        s = random_state((mag.d,), rng)
        vx, vy = variance(s, ops.jx), variance(s, ops.jy)
        assert vx >= -1e-12 and vy >= -1e-12 and variance(s, ops.jz) >= -1e-12
        assert np.sqrt(max(vx, 0) * max(vy, 0)) >= abs(expectation(s, ops.jz).real) / 2 - 1e-10


@settings(max_examples=50, deadline=None)
@given(theta=st.floats(-10, 10), two_j=st.integers(1, 6))
def test_rotated_component_spectrum(theta, two_j):
    ops = make_spin_operators(SpinMagnitude(two_j))
    w = np.linalg.eigvalsh(rotated_component(ops, theta))
    np.testing.assert_allclose(w, np.sort(SpinMagnitude(two_j).m_values), atol=1e-10)
