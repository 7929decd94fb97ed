"""Statevector simulation built on Pauli-string rotations.

Qubit ordering is little-endian throughout: qubit k lives in bit k of the
basis index, so |q1 q0> = |10> is index 1 for n=2. States are flat
complex128 arrays of length 2**n. The only gate primitive is the
rotation exp(-i*theta*P/2) for a Pauli string P, applied via index
pairs/strides rather than operator matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels

MAX_QUBITS = 30

_Y_PHASE = (1 + 0j, 1j, -1 + 0j, -1j)  # i**k


def _check_n_qubits(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise ValueError(f"n_qubits must be an integer, got {n!r}")
    if n < 1 or n > MAX_QUBITS:
        raise ValueError(
            f"n_qubits must be in [1, {MAX_QUBITS}], got {n} "
            f"(statevectors above {MAX_QUBITS} qubits exceed the supported capacity)"
        )


@dataclass(frozen=True)
class PauliString:
    """Tensor product of X/Y/Z letters on a subset of qubits.

    ``letters`` maps qubit index to one of "X", "Y", "Z"; omitted qubits
    carry the identity. At least one letter is required.
    """

    n_qubits: int
    letters: tuple = field(default=())

    def __init__(self, n_qubits: int, letters):
        _check_n_qubits(n_qubits)
        if isinstance(letters, dict):
            items = sorted(letters.items())
        else:
            items = sorted(letters)
        if not items:
            raise ValueError("PauliString needs at least one non-identity letter")
        seen = set()
        for q, letter in items:
            if not 0 <= q < n_qubits:
                raise ValueError(f"qubit {q} out of range for {n_qubits} qubits")
            if q in seen:
                raise ValueError(f"duplicate letter for qubit {q}")
            if letter not in ("X", "Y", "Z"):
                raise ValueError(f"letter must be X, Y or Z, got {letter!r}")
            seen.add(q)
        object.__setattr__(self, "n_qubits", int(n_qubits))
        object.__setattr__(self, "letters", tuple((int(q), l) for q, l in items))

    @property
    def weight(self) -> int:
        return len(self.letters)

    @property
    def xmask(self) -> int:
        return sum(1 << q for q, l in self.letters if l in ("X", "Y"))

    @property
    def zmask(self) -> int:
        return sum(1 << q for q, l in self.letters if l in ("Y", "Z"))

    @property
    def n_y(self) -> int:
        return sum(1 for _, l in self.letters if l == "Y")

    def __str__(self) -> str:
        return " ".join(f"{l}{q}" for q, l in self.letters)


@dataclass
class Statevector:
    """n-qubit pure state; amplitudes[z] is the coefficient of basis index z."""

    n_qubits: int
    amplitudes: np.ndarray

    def copy(self) -> "Statevector":
        return Statevector(self.n_qubits, self.amplitudes.copy())


def init_zero(n_qubits: int) -> Statevector:
    """|0...0>."""
    _check_n_qubits(n_qubits)
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return Statevector(n_qubits, amps)


def init_plus(n_qubits: int) -> Statevector:
    """|+>^n, every amplitude exactly 2**(-n/2)."""
    _check_n_qubits(n_qubits)
    amps = np.full(1 << n_qubits, 2.0 ** (-n_qubits / 2.0), dtype=np.complex128)
    return Statevector(n_qubits, amps)


def norm(state: Statevector) -> float:
    return float(np.linalg.norm(state.amplitudes))


def inner(bra: Statevector, ket: Statevector) -> complex:
    _check_same_size(bra, ket)
    return complex(np.vdot(bra.amplitudes, ket.amplitudes))


def _check_same_size(a, b) -> None:
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"qubit count mismatch: {a.n_qubits} vs {b.n_qubits}")


def _check_compatible(pauli: PauliString, state: Statevector) -> None:
    if pauli.n_qubits != state.n_qubits:
        raise ValueError(
            f"dimension mismatch: PauliString on {pauli.n_qubits} qubits, "
            f"state on {state.n_qubits}"
        )
    if state.amplitudes.shape != (1 << state.n_qubits,):
        raise ValueError(
            f"state has {state.amplitudes.shape} amplitudes, expected {(1 << state.n_qubits,)}"
        )


def _pauli_times(pauli: PauliString, amps: np.ndarray) -> np.ndarray:
    # zmask doubles as the phase mask: Y and Z letters both contribute (-1)^bit
    out = np.empty_like(amps)
    _kernels.apply_pauli_kernel(amps, out, pauli.xmask, pauli.zmask)
    ph = _Y_PHASE[pauli.n_y & 3]
    if ph != 1:
        out *= ph
    return out


def apply_pauli(pauli: PauliString, state: Statevector) -> Statevector:
    """Return P|state> as a new Statevector."""
    _check_compatible(pauli, state)
    return Statevector(state.n_qubits, _pauli_times(pauli, state.amplitudes))


def apply_rotation(pauli: PauliString, angle: float, state: Statevector) -> Statevector:
    """Return exp(-i*angle*P/2)|state> = cos(angle/2)|state> - i sin(angle/2) P|state>."""
    _check_compatible(pauli, state)
    out = state.amplitudes.copy()
    rotate_inplace(pauli, angle, out)
    return Statevector(state.n_qubits, out)


def rotate_inplace(pauli: PauliString, angle: float, amps: np.ndarray) -> None:
    """In-place exp(-i*angle*P/2) on a raw amplitude array."""
    xmask = pauli.xmask
    angle = float(angle)
    if xmask == 0:
        zm = np.array([pauli.zmask], dtype=np.int64)
        _kernels.rot_diag(amps, zm, np.array([angle], dtype=np.float64))
        return
    flip = xmask & -xmask
    if xmask == flip:
        # single flipped qubit: strided pair update
        q = flip.bit_length() - 1
        letter = dict(pauli.letters)[q]
        rest = np.array([pauli.zmask & ~flip], dtype=np.int64)
        _kernels.rot_flip(amps, q, letter == "Y", rest, np.array([angle], dtype=np.float64))
        return
    # general string: one auxiliary P|psi> buffer, still no matrices
    p_amps = _pauli_times(pauli, amps)
    c = np.cos(angle / 2.0)
    s = np.sin(angle / 2.0)
    amps *= c
    amps -= (1j * s) * p_amps


def expectation_pauli(pauli: PauliString, state: Statevector) -> float:
    """Real part of <state|P|state> (the value is real for normalized input)."""
    _check_compatible(pauli, state)
    acc = _kernels.bilinear_pauli(state.amplitudes, state.amplitudes, pauli.xmask, pauli.zmask)
    return float((acc * _Y_PHASE[pauli.n_y & 3]).real)


def expectation_pauli_sum(terms, state: Statevector) -> float:
    """<state| sum_k c_k P_k |state> for terms = [(c_k, PauliString), ...]."""
    total = 0.0
    for coeff, pauli in terms:
        total += float(coeff) * expectation_pauli(pauli, state)
    return total
