"""
Random coupler instances and exact ground truth
===============================================
"""

import numpy as np

from cdbench.ising import (
    approximation_ratio,
    cost_expectation,
    energies_vector,
    exact_ground_truth,
    generate_sk,
    ground_state_fidelity,
)
from cdbench.sim import init_plus

# All-to-all +-1 couplers on 8 qubits, reproducible from the seed.
instance = generate_sk(8, seed=1)
print("qubits:", instance.n)
print("couplings:", len(instance.couplings))
print("first five:", instance.couplings[:5])

# The cost operator diagonal, one energy per basis state.
table = energies_vector(instance)
print("energy range:", table.min(), "to", table.max())
print("mean energy:", table.mean())

# Exact minimum by enumeration. Optimal bitstrings come in pairs since
# flipping every spin leaves all two-body terms alone.
truth = exact_ground_truth(instance)
print("ground energy:", truth.energy)
print("degeneracy:", truth.degeneracy)
print("optimal bitstrings:", [format(z, "08b") for z in truth.optimal_bitstrings])

# The uniform superposition averages the whole table, which is zero
# here because +1 and -1 couplers come out balanced in expectation.
plus = init_plus(instance.n)
print("<H> on |+>^8:", cost_expectation(instance, plus))

# Quality scores used throughout the benchmark: the approximation ratio
# rescales energy so 0 is the table mean and 1 is the ground energy,
# and fidelity is the probability mass on optimal basis states.
print("ratio at mean energy:", approximation_ratio(0.0, truth.energy))
print("ratio at ground energy:", approximation_ratio(truth.energy, truth.energy))
print("fidelity of |+>^8:", ground_state_fidelity(plus, truth))

# Same seed, same instance; different seed, different couplers.
again = generate_sk(8, seed=1)
other = generate_sk(8, seed=2)
print("seed repeatable:", again.couplings == instance.couplings)
print("seed 2 differs:", other.couplings != instance.couplings)

# Ground energies concentrate as n grows; a quick look at the trend.
for n in (6, 10, 14):
    sample = [exact_ground_truth(generate_sk(n, s)).energy / n for s in range(5)]
    print(f"n={n:2d}: ground energy per qubit {np.mean(sample):+.3f}")
