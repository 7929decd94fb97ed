"""
Statevector simulator walkthrough
=================================

Build small quantum states, rotate them with Pauli-string generators,
and read out expectation values. Everything downstream of this file
(cost functions, gradients, optimizers) is built from these few calls.
"""

import numpy as np

from cdbench.sim import (
    PauliString,
    apply_pauli,
    apply_rotation,
    expectation_pauli,
    init_plus,
    init_zero,
    norm,
)

# A PauliString maps qubit index -> letter; unlisted qubits are identity.
# Qubit 0 is the least significant bit of the basis-state index.
n = 3
zz = PauliString(n, {0: "Z", 1: "Z"})
print("operator:", zz)
print("weight:", zz.weight)

# |000> is amplitude 1 at index 0. Flipping qubit 2 with X moves it to
# index 4 = 0b100, which pins down the bit ordering.
state = init_zero(n)
flipped = apply_pauli(PauliString(n, {2: "X"}), state)
print("X on qubit 2 sends |000> to index", int(np.argmax(np.abs(flipped.amplitudes))))

# The only gate in the library is exp(-i * angle * P / 2). A half turn
# of angle pi about X is a bit flip up to global phase.
state = init_zero(1)
state = apply_rotation(PauliString(1, {0: "X"}), np.pi, state)
print("RX(pi)|0> amplitudes:", np.round(state.amplitudes, 6))

# Rotations are unitary, so norms survive long random circuits.
rng = np.random.default_rng(7)
state = init_plus(n)
for _ in range(100):
    qubits = rng.choice(n, size=2, replace=False)
    letters = {int(q): str(rng.choice(["X", "Y", "Z"])) for q in qubits}
    state = apply_rotation(PauliString(n, letters), float(rng.uniform(-6, 6)), state)
print("norm after 100 random gates:", norm(state))

# The uniform superposition has <Z_i Z_j> = 0 and <X_i> = 1.
plus = init_plus(n)
print("<ZZ> on |+++>:", expectation_pauli(zz, plus))
print("<X0> on |+++>:", expectation_pauli(PauliString(n, {0: "X"}), plus))

# Rotating |++> by ZZ then measuring X0 traces a cosine in the angle.
for angle in (0.0, np.pi / 4, np.pi / 2):
    rotated = apply_rotation(PauliString(2, {0: "Z", 1: "Z"}), angle, init_plus(2))
    x0 = expectation_pauli(PauliString(2, {0: "X"}), rotated)
    print(f"angle {angle:.3f}: <X0> = {x0:+.6f} (cos = {np.cos(angle):+.6f})")
