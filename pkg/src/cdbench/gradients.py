"""Gradient rules for circuit cost functions.

Four interchangeable routes to dJ/dtheta:

* parameter_shift: exact two-point rule applied gate by gate. Each gate
  bound to a parameter is shifted by +-pi/(4r) in its own angle and the
  contributions are chain-ruled through the gate coefficient. r = 1/2 is
  the exact setting for exp(-i*angle*P/2) gates; other r values are
  accepted but only r = 1/2 is validated.
* spsa_gradient: simultaneous-perturbation estimate from one symmetric
  pair of evaluations along a random +-1 direction.
* adjoint_gradient: reverse-sweep derivative of the statevector cost;
  numerically identical to parameter_shift at a fraction of the cost, and
  charged as a single evaluation.
* finite_difference: central differences in the free parameters; the
  reference oracle, never used by the optimizer loop.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels, sim
from .ansatz import Ansatz, CostFunction, prepare_state
from .ising import SKInstance, energies_vector

_Y_PHASE = (1 + 0j, 1j, -1 + 0j, -1j)

GRADIENT_METHODS = ("parameter_shift", "spsa", "adjoint", "finite_difference")


def parameter_shift(cost: CostFunction, theta, r: float = 0.5) -> np.ndarray:
    """Exact gradient via per-gate angle shifts; 2 evaluations per gate."""
    if r <= 0:
        raise ValueError(f"shift constant r must be positive, got {r}")
    ansatz = cost.ansatz
    theta = np.asarray(theta, dtype=np.float64)
    base = ansatz.gate_angles(theta)
    shift = np.pi / (4.0 * r)
    grad = np.zeros(ansatz.m)
    for g, gate in enumerate(ansatz.gates):
        up = base.copy()
        up[g] += shift
        down = base.copy()
        down[g] -= shift
        slope = r * (cost.at_gate_angles(up) - cost.at_gate_angles(down))
        grad[ansatz.binding[g]] += gate.coefficient * slope
    return grad


def spsa_gradient(fn, theta, c: float = 0.1, rng=None, delta=None) -> np.ndarray:
    """Rank-one simultaneous-perturbation estimate from 2 evaluations.

    delta defaults to a fresh +-1 draw from rng; every component of the
    returned vector is the same measured slope times the corresponding
    sign, so g_i * delta_i is constant across i.
    """
    theta = np.asarray(theta, dtype=np.float64)
    if c <= 0:
        raise ValueError(f"perturbation scale c must be positive, got {c}")
    if delta is None:
        if rng is None:
            raise ValueError("spsa_gradient needs either an explicit delta or an rng")
        delta = rng.integers(0, 2, size=theta.size) * 2 - 1
    delta = np.asarray(delta, dtype=np.float64)
    if delta.shape != theta.shape or not np.all(np.abs(delta) == 1.0):
        raise ValueError("delta must be a +-1 vector matching theta's shape")
    j_plus = fn(theta + c * delta)
    j_minus = fn(theta - c * delta)
    return (j_plus - j_minus) / (2.0 * c) * delta


def adjoint_gradient(cost: CostFunction, theta) -> np.ndarray:
    """Reverse-sweep gradient; one forward pass, one backward pass.

    Matches parameter_shift to solver precision while being charged as a
    single function evaluation.
    """
    ansatz = cost.ansatz
    instance = cost.instance
    theta = np.asarray(theta, dtype=np.float64)
    angles = ansatz.gate_angles(theta)
    psi = prepare_state(ansatz, theta).amplitudes
    lam = energies_vector(instance) * psi
    grad = np.zeros(ansatz.m)
    for g in range(len(ansatz.gates) - 1, -1, -1):
        gate = ansatz.gates[g]
        pauli = gate.pauli
        val = _kernels.bilinear_pauli(lam, psi, pauli.xmask, pauli.zmask)
        val *= _Y_PHASE[pauli.n_y & 3]
        grad[ansatz.binding[g]] += gate.coefficient * val.imag
        sim.rotate_inplace(pauli, -angles[g], psi)
        sim.rotate_inplace(pauli, -angles[g], lam)
    cost.counter.add(1)
    return grad


def finite_difference(fn, theta, h: float = 1e-5) -> np.ndarray:
    """Central differences in the free parameters; 2m evaluations."""
    if h <= 0:
        raise ValueError(f"step h must be positive, got {h}")
    theta = np.asarray(theta, dtype=np.float64)
    grad = np.empty(theta.size)
    for i in range(theta.size):
        up = theta.copy()
        up[i] += h
        down = theta.copy()
        down[i] -= h
        grad[i] = (fn(up) - fn(down)) / (2.0 * h)
    return grad


@dataclass
class GradientRequest:
    """Bundle describing one gradient computation."""

    ansatz: Ansatz
    instance: SKInstance
    theta: np.ndarray
    method: str
    r: float = 0.5
    c: float = 0.1
    h: float = 1e-5
    rng: object = None
    delta: np.ndarray | None = field(default=None)

    def __post_init__(self):
        if self.method not in GRADIENT_METHODS:
            raise ValueError(
                f"gradient method must be one of {GRADIENT_METHODS}, got {self.method!r}"
            )


def evaluate_gradient(request: GradientRequest, cost: CostFunction | None = None) -> np.ndarray:
    """Dispatch a GradientRequest, reusing a caller-supplied CostFunction if given."""
    if cost is None:
        cost = CostFunction(request.ansatz, request.instance)
    if request.method == "parameter_shift":
        return parameter_shift(cost, request.theta, r=request.r)
    if request.method == "spsa":
        return spsa_gradient(cost, request.theta, c=request.c,
                             rng=request.rng, delta=request.delta)
    if request.method == "adjoint":
        return adjoint_gradient(cost, request.theta)
    return finite_difference(cost, request.theta, h=request.h)
