"""
Ansatz families and their parameter budgets
===========================================

Three circuit families share one calling convention: a parameter vector
of length m goes in, an energy comes out. They differ in which gates
appear and how parameters are shared across gates.

  dcqc    Y rotations on every qubit plus YZ rotations on every pair.
          mode="full" gives each gate its own angle; mode="two_param"
          ties all singles to one angle and all pairs to another.
  qaoa    alternating cost and mixer layers, two angles per layer.
  maqaoa  same layer structure as qaoa with every gate untied.
"""

import numpy as np

from cdbench.ansatz import build_ansatz, evaluate, prepare_state
from cdbench.ising import exact_ground_truth, generate_sk

instance = generate_sk(6, seed=1)
truth = exact_ground_truth(instance)
print("instance: n=6, ground energy", truth.energy)

specs = [
    {"family": "dcqc", "p": 1, "mode": "full"},
    {"family": "dcqc", "p": 1, "mode": "two_param"},
    {"family": "qaoa", "p": 1},
    {"family": "maqaoa", "p": 1},
]

print("\nparameter counts (n=6, one layer):")
for spec in specs:
    ansatz = build_ansatz(instance, spec)
    mode = spec.get("mode", "-")
    print(f"  {spec['family']:8s} {mode:10s} m={ansatz.m:3d} gates={len(ansatz.gates)}")

# A gate entry records its generator and a fixed coefficient; the
# binding array says which parameter drives it, so the applied angle
# of gate i is coefficient * theta[binding[i]].
full = build_ansatz(instance, {"family": "dcqc", "p": 1, "mode": "full"})
print("\nfirst dcqc gate:", full.gates[0].pauli,
      "param", int(full.binding[0]), "coeff", full.gates[0].coefficient)

# Tied parameters replicate: two_param at theta=(a, b) matches full with
# a for every single-qubit gate and b for every pair gate.
tied = build_ansatz(instance, {"family": "dcqc", "p": 1, "mode": "two_param"})
a, b = 0.37, -0.81
wide = np.array([a] * instance.n + [b] * (full.m - instance.n))
state_tied = prepare_state(tied, np.array([a, b]))
state_wide = prepare_state(full, wide)
gap = np.max(np.abs(state_tied.amplitudes - state_wide.amplitudes))
print("two_param vs replicated full:", gap)

# Energies at a shared random draw. Untrained angles land near zero
# (the table mean); training is what separates the families.
rng = np.random.default_rng(3)
print("\nenergy at random theta:")
for spec in specs:
    ansatz = build_ansatz(instance, spec)
    theta = rng.uniform(-np.pi, np.pi, size=ansatz.m)
    energy, _ = evaluate(ansatz, theta, instance)
    mode = spec.get("mode", "-")
    print(f"  {spec['family']:8s} {mode:10s} E = {energy:+8.4f}")

# Depth is a multiplier: p layers repeat the gate pool with fresh
# parameters (qaoa reuses two angles per layer).
for p in (1, 2, 3):
    ansatz = build_ansatz(instance, {"family": "maqaoa", "p": p})
    print(f"maqaoa p={p}: m={ansatz.m}")
