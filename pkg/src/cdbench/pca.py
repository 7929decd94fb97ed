"""Principal-component analysis of optimization trajectories.

Projects a recorded parameter trajectory onto its top two principal
directions and evaluates the cost on a grid in that plane, giving a
two-dimensional picture of the landscape the optimizer actually
traversed. Components are eigenvectors of the trajectory covariance;
the explained-variance split of the top two components tells how planar
the trajectory was.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .ansatz import Ansatz, prepare_state
from .ising import SKInstance, cost_expectation


@dataclass(frozen=True)
class PCAModel:
    """Eigendecomposition of a trajectory's parameter covariance."""

    mean: np.ndarray            # (m,)
    components: np.ndarray      # (k, m) rows, descending eigenvalue order
    eigenvalues: np.ndarray     # (k,) descending, clamped at 0

    @property
    def n_components(self) -> int:
        return self.components.shape[0]

    def explained_variance_ratio(self) -> np.ndarray:
        total = float(self.eigenvalues.sum())
        if total <= 0.0:
            return np.zeros_like(self.eigenvalues)
        return self.eigenvalues / total


def fit_pca(thetas) -> PCAModel:
    """Fit all principal components of a trajectory matrix (M, m), M >= 2."""
    thetas = np.asarray(thetas, dtype=np.float64)
    if thetas.ndim != 2:
        raise ValueError(f"trajectory must be a 2-D array, got shape {thetas.shape}")
    rows, m = thetas.shape
    if rows < 2:
        raise ValueError(f"PCA needs at least 2 trajectory points, got {rows}")
    mean = thetas.mean(axis=0)
    centered = thetas - mean
    cov = centered.T @ centered / (rows - 1)
    eigenvalues, vectors = np.linalg.eigh(cov)
    order = np.argsort(eigenvalues)[::-1]
    eigenvalues = np.clip(eigenvalues[order], 0.0, None)
    components = vectors[:, order].T
    # Sign convention: the entry of largest magnitude is non-negative,
    # which makes the decomposition reproducible across LAPACK builds.
    for row in components:
        pivot = np.argmax(np.abs(row))
        if row[pivot] < 0:
            row *= -1.0
    return PCAModel(mean=mean, components=components, eigenvalues=eigenvalues)


def project(model: PCAModel, thetas, k: int = 2) -> np.ndarray:
    """Coordinates of parameter vectors in the top-k component plane."""
    thetas = np.atleast_2d(np.asarray(thetas, dtype=np.float64))
    if k < 1 or k > model.n_components:
        raise ValueError(f"k must be in [1, {model.n_components}], got {k}")
    return (thetas - model.mean) @ model.components[:k].T


def lift(model: PCAModel, coords) -> np.ndarray:
    """Map plane coordinates back to full parameter vectors."""
    coords = np.atleast_2d(np.asarray(coords, dtype=np.float64))
    k = coords.shape[1]
    if k > model.n_components:
        raise ValueError(f"coordinates have {k} columns but model has {model.n_components}")
    return coords @ model.components[:k] + model.mean


def explained_variance_top2(model: PCAModel) -> float:
    ratios = model.explained_variance_ratio()
    return float(ratios[: min(2, ratios.size)].sum())


def landscape_grid(model: PCAModel, ansatz: Ansatz, instance: SKInstance,
                   trajectory, resolution: int = 50, pad: float = 0.2):
    """Cost surface on a grid spanning the projected trajectory's bounding box.

    Returns (xs, ys, energies) with energies shaped (resolution, resolution),
    energies[i, j] evaluated at plane point (xs[j], ys[i]). The box is the
    trajectory bounding box expanded by `pad` on each side; a degenerate
    (zero-span) axis is padded by 1.0 so the grid stays two-dimensional.
    """
    if resolution < 2:
        raise ValueError(f"grid resolution must be at least 2, got {resolution}")
    coords = project(model, trajectory, k=2)
    lo = coords.min(axis=0)
    hi = coords.max(axis=0)
    span = hi - lo
    # an axis whose spread is pure round-off gets a fixed 1.0 margin so the
    # grid stays visibly two-dimensional
    floor = 1e-12 * max(1.0, float(span.max()))
    for axis in range(2):
        margin = pad * span[axis] if span[axis] > floor else 1.0
        lo[axis] -= margin
        hi[axis] += margin
    xs = np.linspace(lo[0], hi[0], resolution)
    ys = np.linspace(lo[1], hi[1], resolution)
    energies = np.empty((resolution, resolution))
    for i, y in enumerate(ys):
        plane = np.column_stack([xs, np.full(resolution, y)])
        thetas = lift(model, plane)
        for j in range(resolution):
            state = prepare_state(ansatz, thetas[j])
            energies[i, j] = cost_expectation(instance, state)
    return xs, ys, energies


def write_landscape_csv(path, xs, ys, energies) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["x", "y", "energy"])
        for i in range(len(ys)):
            for j in range(len(xs)):
                writer.writerow([f"{xs[j]:.12g}", f"{ys[i]:.12g}", f"{energies[i, j]:.12g}"])


def write_trajectory_csv(path, coords, energies) -> None:
    coords = np.atleast_2d(np.asarray(coords, dtype=np.float64))
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["step", "x", "y", "energy"])
        for idx in range(coords.shape[0]):
            writer.writerow([idx, f"{coords[idx, 0]:.12g}", f"{coords[idx, 1]:.12g}",
                             f"{energies[idx]:.12g}"])
