"""Benchmarks for variational-circuit optimizers on Sherrington-Kirkpatrick spin glasses.

The package couples a little-endian statevector simulator with three
ansatz families (counterdiabatic-inspired, QAOA, multi-angle QAOA), four
gradient rules, eight optimizer configurations, and PCA projections of
optimization trajectories, plus a reproducible experiment harness.
"""

__version__ = "0.1.0"
