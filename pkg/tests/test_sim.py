"""Statevector primitives against dense-matrix references."""

import numpy as np
import pytest

from cdbench.sim import (
    MAX_QUBITS,
    PauliString,
    Statevector,
    apply_pauli,
    apply_rotation,
    expectation_pauli,
    expectation_pauli_sum,
    init_plus,
    init_zero,
    inner,
    norm,
    rotate_inplace,
)

from dense_oracle import (
    dense_expectation,
    dense_pauli,
    dense_rotation,
    random_letters,
    random_state,
)


def test_init_zero():
    state = init_zero(3)
    assert state.amplitudes[0] == 1.0
    assert np.all(state.amplitudes[1:] == 0)
    assert norm(state) == 1.0


def test_init_plus_uniform():
    state = init_plus(4)
    assert np.allclose(state.amplitudes, 0.25)
    assert abs(norm(state) - 1.0) < 1e-14


@pytest.mark.parametrize("bad", [0, -1, MAX_QUBITS + 1, 2.5, True])
def test_qubit_count_validation(bad):
    with pytest.raises(ValueError):
        init_zero(bad)


def test_pauli_string_validation():
    with pytest.raises(ValueError):
        PauliString(2, {})  # identity is not a string
    with pytest.raises(ValueError):
        PauliString(2, {2: "X"})  # qubit out of range
    with pytest.raises(ValueError):
        PauliString(2, {0: "Q"})
    with pytest.raises(ValueError):
        PauliString(2, [(0, "X"), (0, "Y")])


def test_pauli_string_masks():
    p = PauliString(4, {0: "X", 1: "Y", 3: "Z"})
    assert p.xmask == 0b0011
    assert p.zmask == 0b1010
    assert p.n_y == 1
    assert p.weight == 3


def test_apply_pauli_bit_flip_little_endian():
    # X on qubit 1 must map index 0 to index 2
    state = init_zero(2)
    flipped = apply_pauli(PauliString(2, {1: "X"}), state)
    assert flipped.amplitudes[2] == 1.0
    assert flipped.amplitudes[0] == 0.0


def test_apply_pauli_matches_dense():
    rng = np.random.default_rng(11)
    for _ in range(60):
        n = int(rng.integers(1, 7))
        letters = random_letters(rng, n)
        vec = random_state(rng, n)
        got = apply_pauli(PauliString(n, letters), Statevector(n, vec.copy()))
        want = dense_pauli(n, letters) @ vec
        assert np.max(np.abs(got.amplitudes - want)) < 1e-12


def test_apply_rotation_matches_dense():
    rng = np.random.default_rng(7)
    for _ in range(60):
        n = int(rng.integers(1, 7))
        letters = random_letters(rng, n)
        angle = float(rng.uniform(-8, 8))
        vec = random_state(rng, n)
        got = apply_rotation(PauliString(n, letters), angle, Statevector(n, vec.copy()))
        want = dense_rotation(n, letters, angle) @ vec
        assert np.max(np.abs(got.amplitudes - want)) < 1e-12


def test_rotate_inplace_equals_apply_rotation():
    rng = np.random.default_rng(3)
    n = 5
    for _ in range(30):
        letters = random_letters(rng, n)
        angle = float(rng.uniform(-4, 4))
        vec = random_state(rng, n)
        pauli = PauliString(n, letters)
        out = apply_rotation(pauli, angle, Statevector(n, vec.copy()))
        buf = vec.copy()
        rotate_inplace(pauli, angle, buf)
        assert np.array_equal(buf, out.amplitudes)


def test_norm_conserved_over_long_random_circuits():
    rng = np.random.default_rng(2024)
    for n in (4, 8, 12):
        state = init_plus(n)
        for _ in range(200):
            pauli = PauliString(n, random_letters(rng, n, max_weight=3))
            state = apply_rotation(pauli, float(rng.uniform(-6, 6)), state)
        assert abs(norm(state) - 1.0) <= 1e-10


def test_rotation_composition_and_periodicity():
    # R_P(a) R_P(b) = R_P(a+b); R_P(4*pi) = identity; R_P(2*pi) = -identity
    rng = np.random.default_rng(99)
    for _ in range(1000):
        n = int(rng.integers(1, 6))
        pauli = PauliString(n, random_letters(rng, n))
        a, b = rng.uniform(-6, 6, size=2)
        vec = random_state(rng, n)
        state = Statevector(n, vec.copy())
        two_step = apply_rotation(pauli, b, apply_rotation(pauli, a, state))
        one_step = apply_rotation(pauli, a + b, state)
        assert np.max(np.abs(two_step.amplitudes - one_step.amplitudes)) < 1e-12
        full_turn = apply_rotation(pauli, 4 * np.pi, state)
        assert np.max(np.abs(full_turn.amplitudes - vec)) < 1e-12
        half_turn = apply_rotation(pauli, 2 * np.pi, state)
        assert np.max(np.abs(half_turn.amplitudes + vec)) < 1e-12


def test_rotation_inverse():
    rng = np.random.default_rng(5)
    n = 4
    for _ in range(50):
        pauli = PauliString(n, random_letters(rng, n))
        angle = float(rng.uniform(-6, 6))
        vec = random_state(rng, n)
        state = Statevector(n, vec.copy())
        back = apply_rotation(pauli, -angle, apply_rotation(pauli, angle, state))
        assert np.max(np.abs(back.amplitudes - vec)) < 1e-12


def test_expectation_pauli_matches_dense():
    rng = np.random.default_rng(21)
    for _ in range(60):
        n = int(rng.integers(1, 7))
        letters = random_letters(rng, n)
        vec = random_state(rng, n)
        got = expectation_pauli(PauliString(n, letters), Statevector(n, vec))
        want = dense_expectation([(1.0, letters)], vec)
        assert abs(got - want) < 1e-12


def test_expectation_pauli_sum_matches_dense():
    rng = np.random.default_rng(22)
    n = 5
    for _ in range(20):
        terms = [(float(rng.uniform(-2, 2)), random_letters(rng, n)) for _ in range(6)]
        vec = random_state(rng, n)
        got = expectation_pauli_sum(
            [(c, PauliString(n, lt)) for c, lt in terms], Statevector(n, vec))
        assert abs(got - dense_expectation(terms, vec)) < 1e-11


def test_inner_and_norm():
    a = init_zero(2)
    b = init_plus(2)
    assert abs(inner(a, b) - 0.5) < 1e-15
    assert abs(inner(b, b) - 1.0) < 1e-15
    with pytest.raises(ValueError):
        inner(a, init_zero(3))


def test_dimension_mismatch_rejected():
    with pytest.raises(ValueError):
        apply_pauli(PauliString(3, {0: "X"}), init_zero(2))
    with pytest.raises(ValueError):
        expectation_pauli(PauliString(2, {0: "Z"}), init_zero(3))


def test_statevector_copy_is_independent():
    state = init_plus(3)
    dup = state.copy()
    dup.amplitudes[0] = 0.0
    assert state.amplitudes[0] != 0.0
