"""
Four routes to the same gradient
================================

The cost is E(theta) = <psi(theta)| H |psi(theta)>. Two routes are exact
(parameter shift and adjoint), one is a controllable approximation
(finite differences), and one is a cheap stochastic estimate (SPSA).
Each charges a different number of circuit evaluations, which is what
the optimizer benchmark ultimately measures.
"""

import numpy as np

from cdbench.ansatz import CostFunction, build_ansatz
from cdbench.gradients import (
    adjoint_gradient,
    finite_difference,
    parameter_shift,
    spsa_gradient,
)
from cdbench.ising import generate_sk

instance = generate_sk(6, seed=1)
ansatz = build_ansatz(instance, {"family": "dcqc", "p": 1, "mode": "full"})
cost = CostFunction(ansatz, instance)
print(f"m = {ansatz.m} parameters, {len(ansatz.gates)} gates")

rng = np.random.default_rng(11)
theta = rng.uniform(-np.pi, np.pi, size=ansatz.m)

# Exact analytic gradient via shifted evaluations, two per gate.
cost.counter.count = 0
g_shift = parameter_shift(cost, theta)
print("parameter shift evals:", cost.counter.count)

# Same numbers from one reverse sweep over the circuit.
cost.counter.count = 0
g_adj = adjoint_gradient(cost, theta)
print("adjoint evals:", cost.counter.count)
print("max |adjoint - shift|:", np.max(np.abs(g_adj - g_shift)))

# Central differences converge quadratically in the step h.
for h in (1e-3, 1e-5):
    g_fd = finite_difference(cost, theta, h=h)
    print(f"fd h={h:g}: max error {np.max(np.abs(g_fd - g_shift)):.3e}")

# SPSA probes one random direction with two evaluations total. Any
# single estimate is crude; the average over draws is not.
cost.counter.count = 0
estimates = [spsa_gradient(cost, theta, rng=rng, c=0.05) for _ in range(200)]
print("spsa evals for 200 estimates:", cost.counter.count)
mean_est = np.mean(estimates, axis=0)
err_one = np.linalg.norm(estimates[0] - g_shift) / np.linalg.norm(g_shift)
err_avg = np.linalg.norm(mean_est - g_shift) / np.linalg.norm(g_shift)
print(f"relative error: single draw {err_one:.2f}, 200-draw mean {err_avg:.2f}")

# Tied parameters chain-rule automatically: the two_param gradient is
# the groupwise sum of the full gradient.
tied = build_ansatz(instance, {"family": "dcqc", "p": 1, "mode": "two_param"})
tied_cost = CostFunction(tied, instance)
theta2 = np.array([0.4, -0.7])
wide = np.array([0.4] * instance.n + [-0.7] * (ansatz.m - instance.n))
g_tied = parameter_shift(tied_cost, theta2)
g_wide = parameter_shift(cost, wide)
summed = np.array([g_wide[: instance.n].sum(), g_wide[instance.n:].sum()])
print("tied gradient:", np.round(g_tied, 6))
print("groupwise sum:", np.round(summed, 6))
