"""Sherrington-Kirkpatrick instances, exact ground truth, and solution-quality metrics.

Couplings J_ij are i.i.d. uniform on {-1, +1} over all unordered pairs,
drawn from a seeded PCG64 stream in lexicographic pair order, so an
(n, seed) pair fully determines the instance. The classical cost of a
bitstring z is -sum_{i<j} J_ij s_i s_j with s_k = +1 when bit k of z is 0
and -1 when it is 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .sim import MAX_QUBITS, PauliString, Statevector

ENUM_MAX_QUBITS = 24


@dataclass
class SKInstance:
    """All-to-all +-1 spin glass on n spins.

    couplings holds (i, j, J) triples with i < j in lexicographic order.
    seed is None for instances loaded from explicit coupling lists.
    """

    n: int
    seed: int | None
    couplings: tuple
    _energies: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool):
            raise ValueError(f"n must be an integer, got {self.n!r}")
        if self.n < 2 or self.n > MAX_QUBITS:
            raise ValueError(f"n must be in [2, {MAX_QUBITS}], got {self.n}")
        seen = set()
        for entry in self.couplings:
            if len(entry) != 3:
                raise ValueError(f"coupling entries must be (i, j, J), got {entry!r}")
            i, j, coupling = entry
            if not (0 <= i < j < self.n):
                raise ValueError(f"coupling ({i}, {j}) needs 0 <= i < j < {self.n}")
            if (i, j) in seen:
                raise ValueError(f"duplicate coupling for pair ({i}, {j})")
            if not np.isfinite(coupling):
                raise ValueError(f"coupling for pair ({i}, {j}) is not finite")
            seen.add((i, j))
        self.couplings = tuple((int(i), int(j), float(c)) for i, j, c in self.couplings)

    @property
    def n_pairs(self) -> int:
        return len(self.couplings)

    def pair_arrays(self):
        left = np.array([i for i, _, _ in self.couplings], dtype=np.int64)
        right = np.array([j for _, j, _ in self.couplings], dtype=np.int64)
        weight = np.array([c for _, _, c in self.couplings], dtype=np.float64)
        return left, right, weight


@dataclass(frozen=True)
class GroundTruth:
    """Exact enumeration result: minimal energy and every bitstring attaining it."""

    energy: float
    optimal_bitstrings: tuple
    degeneracy: int


def generate_sk(n: int, seed: int) -> SKInstance:
    """Draw an instance with J_ij i.i.d. uniform on {-1, +1} from PCG64(seed)."""
    if n < 2:
        raise ValueError(f"an SK instance needs n >= 2, got {n}")
    rng = np.random.Generator(np.random.PCG64(seed))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    draws = rng.integers(0, 2, size=len(pairs)) * 2 - 1
    couplings = tuple((i, j, float(c)) for (i, j), c in zip(pairs, draws))
    return SKInstance(n=n, seed=int(seed), couplings=couplings)


def energies_vector(instance: SKInstance) -> np.ndarray:
    """Classical energy of every bitstring, indexed by the little-endian integer.

    Cached on the instance; only available up to ENUM_MAX_QUBITS.
    """
    if instance.n > ENUM_MAX_QUBITS:
        raise ValueError(
            f"exact enumeration is capped at {ENUM_MAX_QUBITS} qubits, got n={instance.n}"
        )
    if instance._energies is None:
        left, right, weight = instance.pair_arrays()
        instance._energies = _kernels.sk_energies(instance.n, left, right, weight)
    return instance._energies


def classical_energy(instance: SKInstance, bits: int) -> float:
    """Energy of one bitstring (bit k of `bits` is spin k; 0 means +1)."""
    if not 0 <= bits < (1 << instance.n):
        raise ValueError(f"bitstring {bits} out of range for n={instance.n}")
    e = 0.0
    for i, j, coupling in instance.couplings:
        aligned = (((bits >> i) ^ (bits >> j)) & 1) == 0
        e -= coupling if aligned else -coupling
    return e


def exact_ground_truth(instance: SKInstance) -> GroundTruth:
    """Minimal classical energy and the full argmin set, by enumeration."""
    energies = energies_vector(instance)
    ground = float(energies.min())
    # +-1 couplings give exact integer energies; a tiny tolerance keeps the
    # argmin set stable for user-supplied fractional couplings too
    optimal = np.flatnonzero(energies <= ground + 1e-9)
    return GroundTruth(
        energy=ground,
        optimal_bitstrings=tuple(int(z) for z in optimal),
        degeneracy=int(optimal.size),
    )


def cost_expectation(instance: SKInstance, state: Statevector) -> float:
    """<state|H_c|state> using the diagonal structure of the cost."""
    if instance.n != state.n_qubits:
        raise ValueError(
            f"instance has {instance.n} spins but state has {state.n_qubits} qubits"
        )
    if instance.n <= ENUM_MAX_QUBITS:
        return float(_kernels.diag_expectation(energies_vector(instance), state.amplitudes))
    # beyond the enumeration cap: single fused pass, no 2**n energy table
    left, right, weight = instance.pair_arrays()
    return float(_kernels.zz_expectation(state.amplitudes, left, right, weight))


def cost_pauli_terms(instance: SKInstance):
    """H_c as a Pauli sum [(-J_ij, Z_i Z_j), ...] for the generic expectation route."""
    return [
        (-coupling, PauliString(instance.n, {i: "Z", j: "Z"}))
        for i, j, coupling in instance.couplings
    ]


def approximation_ratio(energy: float, ground_energy: float) -> float:
    """energy / ground_energy; 1 at the ground state, 0 for the uniform state."""
    if ground_energy >= 0:
        raise ValueError(
            f"approximation ratio undefined for ground energy {ground_energy} >= 0"
        )
    return float(energy / ground_energy)


def ground_state_fidelity(state: Statevector, truth: GroundTruth) -> float:
    """Probability mass the state puts on the optimal bitstring set."""
    idx = np.fromiter(truth.optimal_bitstrings, dtype=np.int64)
    amps = state.amplitudes[idx]
    return float(np.sum(amps.real**2 + amps.imag**2))


def to_json_dict(instance: SKInstance) -> dict:
    return {
        "n": instance.n,
        "seed": instance.seed,
        "couplings": [[i, j, c] for i, j, c in instance.couplings],
    }


def from_json_dict(data: dict) -> SKInstance:
    for key in ("n", "couplings"):
        if key not in data:
            raise ValueError(f"instance JSON missing required key {key!r}")
    return SKInstance(
        n=data["n"],
        seed=data.get("seed"),
        couplings=tuple(tuple(entry) for entry in data["couplings"]),
    )


def save_instance(instance: SKInstance, path) -> None:
    with open(path, "w") as fh:
        json.dump(to_json_dict(instance), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_instance(path) -> SKInstance:
    with open(path) as fh:
        return from_json_dict(json.load(fh))
