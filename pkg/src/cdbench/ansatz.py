"""Ansatz families and their compiled statevector evaluation.

Three families over an SK instance, all starting from |+>^n:

* dcqc: per layer, one Y rotation per qubit followed by one YZ rotation per
  coupled pair (Y on the lower index), pairs in lexicographic order. Mode
  "full" gives every gate its own parameter; "two_param" shares one
  parameter across the singles and one across the pairs of each layer.
* qaoa: per layer, the diagonal cost unitary (gate coefficient -2*J_ij on
  each ZZ pair, bound to the layer angle alpha) then one X rotation per
  qubit (coefficient 2, bound to beta).
* maqaoa: the qaoa circuit with every gate independently parameterized.

A gate applies exp(-i * angle * P / 2) with angle = coefficient *
theta[binding(gate)]. Evaluation compiles the gate list into runs of
mutually commuting rotations (diagonal blocks, shared-flip-bit groups) so
large circuits execute in a few passes over the state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels, sim
from .ising import SKInstance, cost_expectation
from .sim import PauliString, Statevector

FAMILIES = ("dcqc", "qaoa", "maqaoa")
DCQC_MODES = ("full", "two_param")


@dataclass(frozen=True)
class Gate:
    """One Pauli rotation; the applied angle is coefficient * theta[binding]."""

    pauli: PauliString
    coefficient: float


@dataclass
class Ansatz:
    n_qubits: int
    p: int
    family: str
    mode: str | None
    gates: tuple
    binding: np.ndarray
    m: int
    _program: list | None = field(default=None, repr=False, compare=False)
    _coefficients: np.ndarray | None = field(default=None, repr=False, compare=False)

    def gate_angles(self, theta: np.ndarray) -> np.ndarray:
        """Per-gate rotation angles for a parameter vector."""
        theta = _check_theta(self, theta)
        if self._coefficients is None:
            self._coefficients = np.array([g.coefficient for g in self.gates])
        return self._coefficients * theta[self.binding]

    def describe(self) -> dict:
        out = {"family": self.family, "p": self.p}
        if self.mode is not None:
            out["mode"] = self.mode
        return out


def _check_theta(ansatz: Ansatz, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (ansatz.m,):
        raise ValueError(
            f"{ansatz.family} ansatz with p={ansatz.p} takes {ansatz.m} parameters, "
            f"got shape {theta.shape}"
        )
    return theta


def _check_p(p: int) -> int:
    if not isinstance(p, (int, np.integer)) or isinstance(p, bool) or p < 1:
        raise ValueError(f"layer count p must be a positive integer, got {p!r}")
    return int(p)


def build_dcqc(instance: SKInstance, p: int, mode: str = "full") -> Ansatz:
    """Counterdiabatic-pool circuit: Y singles then YZ pairs, p layers."""
    p = _check_p(p)
    if mode not in DCQC_MODES:
        raise ValueError(f"dcqc mode must be one of {DCQC_MODES}, got {mode!r}")
    n = instance.n
    gates = []
    binding = []
    next_param = 0
    for layer in range(p):
        for q in range(n):
            gates.append(Gate(PauliString(n, {q: "Y"}), 2.0))
            if mode == "full":
                binding.append(next_param)
                next_param += 1
            else:
                binding.append(2 * layer)
        for i, j, _ in instance.couplings:
            gates.append(Gate(PauliString(n, {i: "Y", j: "Z"}), 2.0))
            if mode == "full":
                binding.append(next_param)
                next_param += 1
            else:
                binding.append(2 * layer + 1)
    m = next_param if mode == "full" else 2 * p
    return Ansatz(n, p, "dcqc", mode, tuple(gates), np.array(binding, dtype=np.int64), m)


def build_qaoa(instance: SKInstance, p: int) -> Ansatz:
    """Standard QAOA: shared cost angle alpha and mixer angle beta per layer."""
    p = _check_p(p)
    n = instance.n
    gates = []
    binding = []
    for layer in range(p):
        for i, j, coupling in instance.couplings:
            gates.append(Gate(PauliString(n, {i: "Z", j: "Z"}), -2.0 * coupling))
            binding.append(2 * layer)
        for q in range(n):
            gates.append(Gate(PauliString(n, {q: "X"}), 2.0))
            binding.append(2 * layer + 1)
    return Ansatz(n, p, "qaoa", None, tuple(gates), np.array(binding, dtype=np.int64), 2 * p)


def build_maqaoa(instance: SKInstance, p: int) -> Ansatz:
    """Multi-angle QAOA: the qaoa gate sequence, one parameter per gate."""
    p = _check_p(p)
    n = instance.n
    gates = []
    for layer in range(p):
        for i, j, coupling in instance.couplings:
            gates.append(Gate(PauliString(n, {i: "Z", j: "Z"}), -2.0 * coupling))
        for q in range(n):
            gates.append(Gate(PauliString(n, {q: "X"}), 2.0))
    m = len(gates)
    return Ansatz(n, p, "maqaoa", None, tuple(gates), np.arange(m, dtype=np.int64), m)


def build_ansatz(instance: SKInstance, spec: dict) -> Ansatz:
    """Build from a descriptor {"family": ..., "p": ..., "mode": ...}."""
    if "family" not in spec:
        raise ValueError("ansatz spec missing required key 'family'")
    family = spec["family"]
    if family not in FAMILIES:
        raise ValueError(f"ansatz family must be one of {FAMILIES}, got {family!r}")
    p = spec.get("p", 1)
    mode = spec.get("mode")
    if family == "dcqc":
        return build_dcqc(instance, p, mode if mode is not None else "full")
    if mode is not None:
        raise ValueError(f"'mode' only applies to the dcqc family, not {family!r}")
    if family == "qaoa":
        return build_qaoa(instance, p)
    return build_maqaoa(instance, p)


# ---------------------------------------------------------------------------
# compiled evaluation


@dataclass
class _PairBlockPass:
    right_ptr: np.ndarray
    lefts: np.ndarray
    gate_idx: np.ndarray


@dataclass
class _DiagPass:
    zmasks: np.ndarray
    gate_idx: np.ndarray


@dataclass
class _FlipHighPass:
    flip_bit: int
    is_y: bool
    hi_bits: np.ndarray
    gate_idx: np.ndarray


@dataclass
class _FlipPass:
    flip_bit: int
    is_y: bool
    zmasks: np.ndarray
    gate_idx: np.ndarray


@dataclass
class _GenericPass:
    pauli: PauliString
    gate_index: int


def _gate_kind(gate: Gate):
    """('diag', None) | ('flip', (bit, letter)) | ('generic', None)."""
    pauli = gate.pauli
    if pauli.xmask == 0:
        return "diag", None
    flips = [(q, l) for q, l in pauli.letters if l in ("X", "Y")]
    if len(flips) == 1:
        return "flip", flips[0]
    return "generic", None


def _compile(ansatz: Ansatz) -> list:
    n = ansatz.n_qubits
    passes = []
    idx = 0
    gates = ansatz.gates
    while idx < len(gates):
        kind, info = _gate_kind(gates[idx])
        if kind == "generic":
            passes.append(_GenericPass(gates[idx].pauli, idx))
            idx += 1
            continue
        start = idx
        while idx < len(gates) and _gate_kind(gates[idx]) == (kind, info):
            idx += 1
        group = list(range(start, idx))
        if kind == "diag":
            passes.append(_compile_diag(n, gates, group))
        else:
            passes.append(_compile_flip(n, gates, group, info))
    return passes


def _compile_diag(n, gates, group):
    weights = [gates[g].pauli.letters for g in group]
    if all(len(ls) == 2 for ls in weights):
        # ZZ pair block: CSR by the higher qubit for the doubling kernel
        pairs = [(gates[g].pauli.letters[0][0], gates[g].pauli.letters[1][0], g) for g in group]
        pairs.sort(key=lambda t: (t[1], t[0]))
        counts = np.zeros(n + 1, dtype=np.int64)
        for _, j, _ in pairs:
            counts[j + 1] += 1
        right_ptr = np.cumsum(counts)
        lefts = np.array([i for i, _, _ in pairs], dtype=np.int64)
        gate_idx = np.array([g for _, _, g in pairs], dtype=np.int64)
        return _PairBlockPass(right_ptr, lefts, gate_idx)
    zmasks = np.array([gates[g].pauli.zmask for g in group], dtype=np.int64)
    return _DiagPass(zmasks, np.array(group, dtype=np.int64))


def _compile_flip(n, gates, group, info):
    flip_bit, letter = info
    is_y = letter == "Y"
    flip_mask = 1 << flip_bit
    tails = [gates[g].pauli.zmask & ~flip_mask for g in group]
    if len(group) == 1 and tails[0] == 0:
        return _FlipHighPass(
            flip_bit, is_y, np.empty(0, dtype=np.int64), np.array(group, dtype=np.int64)
        )
    single_high = [
        t != 0 and (t & (t - 1)) == 0 and t > flip_mask for t in tails
    ]
    if all(single_high) and len(set(tails)) == len(tails):
        order = sorted(range(len(group)), key=lambda k: tails[k])
        hi_bits = np.array([tails[k].bit_length() - 1 for k in order], dtype=np.int64)
        gate_idx = np.array([group[k] for k in order], dtype=np.int64)
        return _FlipHighPass(flip_bit, is_y, hi_bits, gate_idx)
    zmasks = np.array(tails, dtype=np.int64)
    return _FlipPass(flip_bit, is_y, zmasks, np.array(group, dtype=np.int64))


def _program(ansatz: Ansatz) -> list:
    if ansatz._program is None:
        ansatz._program = _compile(ansatz)
    return ansatz._program


def _apply_program(ansatz: Ansatz, angles: np.ndarray, amps: np.ndarray) -> None:
    for step in _program(ansatz):
        if isinstance(step, _PairBlockPass):
            _kernels.diag_pair_block(
                amps, ansatz.n_qubits, step.right_ptr, step.lefts, angles[step.gate_idx]
            )
        elif isinstance(step, _DiagPass):
            _kernels.rot_diag(amps, step.zmasks, angles[step.gate_idx])
        elif isinstance(step, _FlipHighPass):
            _kernels.rot_flip_high(
                amps, ansatz.n_qubits, step.flip_bit, step.is_y,
                step.hi_bits, angles[step.gate_idx],
            )
        elif isinstance(step, _FlipPass):
            _kernels.rot_flip(
                amps, step.flip_bit, step.is_y, step.zmasks, angles[step.gate_idx]
            )
        else:
            sim.rotate_inplace(step.pauli, angles[step.gate_index], amps)


def prepare_state(ansatz: Ansatz, theta: np.ndarray) -> Statevector:
    """Apply the parameterized circuit to |+>^n."""
    angles = ansatz.gate_angles(theta)
    state = sim.init_plus(ansatz.n_qubits)
    _apply_program(ansatz, angles, state.amplitudes)
    return state


class EvalCounter:
    """Counts cost-function evaluations for one run."""

    __slots__ = ("count",)

    def __init__(self):
        self.count = 0

    def add(self, k: int = 1) -> None:
        self.count += k


def evaluate(ansatz: Ansatz, theta, instance: SKInstance, counter: EvalCounter | None = None):
    """Energy and state at theta; charges exactly one evaluation."""
    if instance.n != ansatz.n_qubits:
        raise ValueError(
            f"instance has {instance.n} spins but ansatz acts on {ansatz.n_qubits} qubits"
        )
    state = prepare_state(ansatz, theta)
    if counter is not None:
        counter.add(1)
    return cost_expectation(instance, state), state


def evaluate_at_gate_angles(ansatz: Ansatz, angles, instance: SKInstance,
                            counter: EvalCounter | None = None) -> float:
    """Energy with explicit per-gate angles (used by per-gate shift rules)."""
    angles = np.asarray(angles, dtype=np.float64)
    if angles.shape != (len(ansatz.gates),):
        raise ValueError(
            f"expected {len(ansatz.gates)} gate angles, got shape {angles.shape}"
        )
    state = sim.init_plus(ansatz.n_qubits)
    _apply_program(ansatz, angles, state.amplitudes)
    if counter is not None:
        counter.add(1)
    return cost_expectation(instance, state)


class CostFunction:
    """J(theta) = <H_c> of the prepared state, with evaluation counting."""

    def __init__(self, ansatz: Ansatz, instance: SKInstance):
        if instance.n != ansatz.n_qubits:
            raise ValueError(
                f"instance has {instance.n} spins but ansatz acts on {ansatz.n_qubits} qubits"
            )
        self.ansatz = ansatz
        self.instance = instance
        self.counter = EvalCounter()

    @property
    def m(self) -> int:
        return self.ansatz.m

    @property
    def evaluations(self) -> int:
        return self.counter.count

    def __call__(self, theta) -> float:
        energy, _ = evaluate(self.ansatz, theta, self.instance, self.counter)
        return energy

    def energy_and_state(self, theta):
        return evaluate(self.ansatz, theta, self.instance, self.counter)

    def at_gate_angles(self, angles) -> float:
        return evaluate_at_gate_angles(self.ansatz, angles, self.instance, self.counter)
