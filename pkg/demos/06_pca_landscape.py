"""
Flattening a 36-parameter trajectory onto a 2d energy map
=========================================================

An optimizer walks through a high-dimensional parameter space, but the
walk itself is often nearly planar. Principal components of the visited
points give the plane; evaluating the true energy on a grid in that
plane gives a landscape the trajectory can be drawn on.
"""

import numpy as np

from cdbench.ansatz import build_ansatz
from cdbench.harness import make_initial_thetas
from cdbench.ising import exact_ground_truth, generate_sk
from cdbench.optimizers import OptimizerConfig, run_optimizer
from cdbench.pca import explained_variance_top2, fit_pca, landscape_grid, lift, project

instance = generate_sk(8, seed=1)
truth = exact_ground_truth(instance)
ansatz = build_ansatz(instance, {"family": "dcqc", "p": 1, "mode": "full"})
print(f"m = {ansatz.m}, ground energy {truth.energy}")

theta0 = make_initial_thetas(seed=0, count=1, m=ansatz.m)[0]
record = run_optimizer(
    ansatz, instance, OptimizerConfig(kind="spsa_bfgs", budget=900),
    theta0, rng=np.random.default_rng(5), ground_truth=truth)
print(f"optimized: E {record.final_energy:+.4f}, ratio {record.final_ratio:.4f}, "
      f"{len(record.iterates)} iterates")

# Fit the principal axes of the visited points.
thetas = np.array([it.theta for it in record.iterates])
model = fit_pca(thetas)
top2 = explained_variance_top2(model)
print(f"top-2 explained variance: {top2:.3f}")
print("per-component shares:", np.round(model.explained_variance_ratio()[:4], 3))

# Project the walk onto the plane. Start sits far out, end near the
# middle of the cloud of late iterates.
coords = project(model, thetas)
print("first point in plane:", np.round(coords[0], 3))
print("last point in plane:", np.round(coords[-1], 3))

# Lifting a plane point back to full dimension is exact on the plane.
roundtrip = lift(model, coords[-1])
print("lift residual off-plane:", np.linalg.norm(roundtrip - thetas[-1]))

# Energy surface on a coarse grid around the trajectory.
xs, ys, energies = landscape_grid(model, ansatz, instance, thetas,
                                  resolution=9, pad=0.25)
print("\nenergy grid (rows = second axis, ground =", truth.energy, ")")
for r in reversed(range(9)):
    print("  " + " ".join(f"{energies[r, c]:6.1f}" for c in range(9)))
best = np.unravel_index(energies.argmin(), energies.shape)
print("grid minimum:", energies[best], "at plane point",
      (round(float(xs[best[1]]), 2), round(float(ys[best[0]]), 2)))
