"""End-to-end acceptance: ten numbered criteria, one test and one line each.

The shared compare run (criteria 4, 6, 8, 10) races all eight optimizer
kinds on one 10-qubit instance with ten shared starting points and a
1000-evaluation budget. The scaling sweep (criterion 7) runs SPSA-BFGS
across n = 10..20 at a 3000-evaluation budget. Instance seed 1 and init
seed 0 are fixed; every number below is deterministic.
"""

import json
import math
import os
import time

import numpy as np
import pytest

from cdbench.ansatz import (
    CostFunction,
    build_ansatz,
    build_dcqc,
    build_maqaoa,
    build_qaoa,
)
from cdbench.gradients import adjoint_gradient, finite_difference, parameter_shift
from cdbench.harness import ExperimentConfig, ScalingConfig, make_initial_thetas, run_compare, run_scaling
from cdbench.ising import (
    cost_expectation,
    cost_pauli_terms,
    exact_ground_truth,
    generate_sk,
)
from cdbench.optimizers import (
    CountedFunction,
    OptimizerConfig,
    bfgs_update,
    cobyla_minimize,
    gradient_minimize,
    initial_simplex,
    nelder_mead_minimize,
    run_optimizer,
)
from cdbench.optimizers import _CallableEngine
from cdbench.pca import explained_variance_top2, fit_pca
from cdbench.sim import PauliString, Statevector, apply_rotation, expectation_pauli_sum, init_plus, norm

from dense_oracle import random_letters, random_state

ACCEPT_N = 10
ACCEPT_INSTANCE_SEED = 1
ACCEPT_INIT_SEED = 0
ACCEPT_BUDGET = 1000
ACCEPT_INITS = 10
SCALING_SIZES = [10, 12, 14, 16, 18, 20]
SCALING_BUDGET = 3000
ALL_KINDS = ["ps_sgd", "ps_adam", "ps_bfgs", "spsa_sgd", "spsa_adam",
             "spsa_bfgs", "cobyla", "nelder_mead"]

COMPARE_CONFIG = {
    "instance": {"n": ACCEPT_N, "seed": ACCEPT_INSTANCE_SEED},
    "ansatz": {"family": "dcqc", "p": 1, "mode": "full"},
    "optimizers": ALL_KINDS,
    "inits": ACCEPT_INITS,
    "seed": ACCEPT_INIT_SEED,
    "budget": ACCEPT_BUDGET,
}


def announce(number, name, elapsed, detail=""):
    suffix = f" [{elapsed:.1f}s]" if elapsed is not None else ""
    print(f"\ncriterion {number} ({name}): PASS{suffix} {detail}".rstrip())


@pytest.fixture(scope="session")
def compare_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("acceptance_compare")
    start = time.time()
    records = run_compare(ExperimentConfig.from_dict(COMPARE_CONFIG), out)
    return {"out": out, "records": records, "elapsed": time.time() - start}


@pytest.fixture(scope="session")
def scaling_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("acceptance_scaling")
    config = ScalingConfig.from_dict({
        "sizes": SCALING_SIZES,
        "families": ["dcqc", "maqaoa"],
        "optimizer": "spsa_bfgs",
        "inits": ACCEPT_INITS,
        "seed": ACCEPT_INIT_SEED,
        "instance_seed": ACCEPT_INSTANCE_SEED,
        "budget": SCALING_BUDGET,
    })
    start = time.time()
    records = run_scaling(config, out)
    return {"out": out, "records": records, "elapsed": time.time() - start}


def ansatz_variants(instance):
    return {
        "dcqc_full": build_dcqc(instance, 1, "full"),
        "dcqc_two_param": build_dcqc(instance, 1, "two_param"),
        "qaoa": build_qaoa(instance, 1),
        "maqaoa": build_maqaoa(instance, 1),
    }


def test_criterion_01_gradient_equivalence():
    start = time.time()
    rng = np.random.default_rng(13)
    checked = 0
    worst_pair = 0.0
    worst_fd = 0.0
    for n in (4, 6, 8, 10):
        instance = generate_sk(n, 100 + n)
        for ansatz in ansatz_variants(instance).values():
            cost = CostFunction(ansatz, instance)
            for _ in range(13):  # 52 draws per variant across the sizes
                theta = rng.uniform(-np.pi, np.pi, size=ansatz.m)
                adj = adjoint_gradient(cost, theta)
                ps = parameter_shift(cost, theta)
                fd = finite_difference(cost, theta, h=1e-5)
                worst_pair = max(worst_pair, float(np.max(np.abs(adj - ps))))
                assert np.max(np.abs(adj - ps)) <= 1e-9
                for grad in (adj, ps):
                    rel = np.abs(grad - fd) / np.maximum(1.0, np.abs(fd))
                    worst_fd = max(worst_fd, float(rel.max()))
                    assert np.max(rel) <= 1e-5
                checked += 1
    elapsed = time.time() - start
    assert elapsed < 60
    announce(1, "gradient equivalence", elapsed,
             f"{checked} gradients, max |adjoint-shift| {worst_pair:.2e}, "
             f"max rel-vs-fd {worst_fd:.2e}")


def test_criterion_02_simulation_invariants():
    start = time.time()
    rng = np.random.default_rng(14)
    for n in (4, 8, 12):
        state = init_plus(n)
        for _ in range(200):
            pauli = PauliString(n, random_letters(rng, n, max_weight=3))
            state = apply_rotation(pauli, float(rng.uniform(-6, 6)), state)
        assert abs(norm(state) - 1.0) <= 1e-10
    for _ in range(1000):
        n = int(rng.integers(1, 6))
        pauli = PauliString(n, random_letters(rng, n))
        vec = random_state(rng, n)
        a, b = rng.uniform(-6, 6, size=2)
        stacked = apply_rotation(pauli, b,
                                 apply_rotation(pauli, a, Statevector(n, vec.copy())))
        merged = apply_rotation(pauli, a + b, Statevector(n, vec.copy()))
        assert np.max(np.abs(stacked.amplitudes - merged.amplitudes)) < 1e-12
        cycle = apply_rotation(pauli, 4 * np.pi, Statevector(n, vec.copy()))
        assert np.max(np.abs(cycle.amplitudes - vec)) < 1e-12
    elapsed = time.time() - start
    assert elapsed < 60
    announce(2, "simulation invariants", elapsed,
             "600 gates norm-conserving, 1000 composition/periodicity trials")


def vectorized_enumeration(instance):
    """Independent ground-truth oracle: whole-table numpy recomputation."""
    z = np.arange(1 << instance.n, dtype=np.int64)
    total = np.zeros(z.size)
    for i, j, coupling in instance.couplings:
        s_i = 1.0 - 2.0 * ((z >> i) & 1)
        s_j = 1.0 - 2.0 * ((z >> j) & 1)
        total -= coupling * s_i * s_j
    return total


def test_criterion_03_oracle_equivalence():
    start = time.time()
    rng = np.random.default_rng(15)
    for _ in range(100):
        n = int(rng.integers(2, 11))
        instance = generate_sk(n, int(rng.integers(0, 10**6)))
        state = Statevector(n, random_state(rng, n))
        assert abs(cost_expectation(instance, state)
                   - expectation_pauli_sum(cost_pauli_terms(instance), state)) < 1e-10
    for index in range(50):
        n = 4 + index % 13  # sizes 4..16
        instance = generate_sk(n, 1000 + index)
        table = vectorized_enumeration(instance)
        truth = exact_ground_truth(instance)
        assert truth.energy == table.min()
        assert truth.optimal_bitstrings == tuple(np.flatnonzero(table == table.min()))
        mask = (1 << n) - 1
        optimal = set(truth.optimal_bitstrings)
        assert all((z ^ mask) in optimal for z in optimal)
    elapsed = time.time() - start
    assert elapsed < 120
    announce(3, "cost and ground-truth oracles", elapsed,
             "100 expectation pairs, 50 enumerations Z2-closed")


def test_criterion_04_accounting_exactness(compare_run):
    start = time.time()
    m = 55  # 10 singles + 45 pairs, one layer
    for rec in compare_run["records"]:
        evals = [it.evaluations for it in rec.iterates]
        deltas = [b - a for a, b in zip(evals, evals[1:])]
        if rec.optimizer == "nelder_mead":
            assert evals[0] == m + 1
            assert all(d == 1 for d in deltas)
        else:
            assert evals[0] == 1
            if rec.optimizer in ("ps_sgd", "ps_adam"):
                assert all(d == 2 * m + 1 for d in deltas)
            elif rec.optimizer == "ps_bfgs":
                for it, d in zip(rec.iterates[1:], deltas):
                    assert it.probes >= 1 and d == 2 * m + it.probes
            else:  # spsa_sgd, spsa_adam, spsa_bfgs, cobyla
                assert all(d == 3 for d in deltas)
        assert rec.total_evaluations == evals[-1]
    announce(4, "evaluation accounting", time.time() - start,
             f"{len(compare_run['records'])} records, per-iteration charges exact")


def test_criterion_05_ansatz_quality_ordering():
    start = time.time()
    instance = generate_sk(ACCEPT_N, ACCEPT_INSTANCE_SEED)
    truth = exact_ground_truth(instance)
    config = OptimizerConfig(kind="ps_adam", budget=None, max_iterations=50)
    stats = {}
    for name, ansatz in ansatz_variants(instance).items():
        thetas = make_initial_thetas(ACCEPT_INIT_SEED, ACCEPT_INITS, ansatz.m)
        finals = []
        ratios = []
        for i in range(ACCEPT_INITS):
            record = run_optimizer(ansatz, instance, config, thetas[i],
                                   ground_truth=truth)
            finals.append(record.final_energy)
            ratios.append(record.final_ratio)
        stats[name] = (float(np.median(finals)), float(np.median(ratios)))
    assert stats["dcqc_full"][0] < stats["maqaoa"][0]
    assert stats["dcqc_full"][1] >= 0.99
    assert stats["dcqc_two_param"][1] <= 0.95
    assert stats["qaoa"][1] <= 0.95
    elapsed = time.time() - start
    assert elapsed < 600
    announce(5, "ansatz quality ordering", elapsed,
             f"median ratios: full {stats['dcqc_full'][1]:.4f}, "
             f"maqaoa {stats['maqaoa'][1]:.4f}, "
             f"2-param {stats['dcqc_two_param'][1]:.4f}/{stats['qaoa'][1]:.4f}")


def race_stats(records):
    stats = {}
    for kind in ALL_KINDS:
        group = [r for r in records if r.optimizer == kind]
        evals = [r.ratio_threshold_hit["evaluations"] if r.ratio_threshold_hit
                 else math.inf for r in group]
        stats[kind] = {
            "median_evals": float(np.median(evals)),
            "median_energy": float(np.median([r.final_energy for r in group])),
        }
    return stats


def race_key(stats, kind):
    # primary: evaluations to the 0.9 ratio threshold; tie-break: final energy
    return (stats[kind]["median_evals"], stats[kind]["median_energy"])


def test_criterion_06_optimizer_race(compare_run):
    stats = race_stats(compare_run["records"])
    sb = stats["spsa_bfgs"]["median_evals"]
    for kind in ALL_KINDS:
        if kind != "spsa_bfgs":
            assert sb < stats[kind]["median_evals"], \
                f"spsa_bfgs ({sb}) not ahead of {kind} ({stats[kind]['median_evals']})"
    ps_order = sorted(("ps_sgd", "ps_adam", "ps_bfgs"),
                      key=lambda k: race_key(stats, k))
    assert ps_order[0] == "ps_adam", f"PS group order {ps_order}"
    assert race_key(stats, "cobyla") < race_key(stats, "nelder_mead")
    assert compare_run["elapsed"] < 1800
    announce(6, "optimizer race", compare_run["elapsed"],
             f"median evals to 0.9: spsa_bfgs {sb:.0f}, "
             f"cobyla {stats['cobyla']['median_evals']:.0f}, "
             f"nelder_mead {stats['nelder_mead']['median_evals']:.0f}")


def test_criterion_07_scaling(scaling_run):
    rows = {}
    for (n, family), records in scaling_run["records"].items():
        ratios = [r.final_ratio for r in records]
        rows[(n, family)] = (float(np.median(ratios)), float(np.max(ratios)))
    detail = []
    for n in SCALING_SIZES:
        dcqc_median, dcqc_best = rows[(n, "dcqc")]
        maqaoa_median, _ = rows[(n, "maqaoa")]
        assert dcqc_median >= maqaoa_median, \
            f"n={n}: dcqc median {dcqc_median:.4f} < maqaoa {maqaoa_median:.4f}"
        if n <= 16:
            assert dcqc_best >= 0.99, f"n={n}: best dcqc ratio {dcqc_best:.4f}"
        detail.append(f"n={n} {dcqc_median:.3f}/{maqaoa_median:.3f}")
    assert scaling_run["elapsed"] < 7200
    announce(7, "size scaling", scaling_run["elapsed"],
             "dcqc/maqaoa medians: " + ", ".join(detail))


def test_criterion_08_pca_landscape(compare_run):
    start = time.time()
    rng = np.random.default_rng(16)
    for _ in range(20):
        thetas = rng.standard_normal((30, 12)) * rng.uniform(0.5, 2.0, size=12)
        model = fit_pca(thetas)
        gram = model.components @ model.components.T
        assert np.max(np.abs(gram - np.eye(model.n_components))) < 1e-8
        centered = thetas - thetas.mean(axis=0)
        cov = centered.T @ centered / (thetas.shape[0] - 1)
        for vec, lam in zip(model.components, model.eigenvalues):
            assert np.max(np.abs(cov @ vec - lam * vec)) < 1e-8
        assert abs(model.explained_variance_ratio().sum() - 1.0) < 1e-8

    group = [r for r in compare_run["records"] if r.optimizer == "spsa_bfgs"]
    assert len(group) == ACCEPT_INITS
    top2 = [explained_variance_top2(fit_pca(np.array([it.theta for it in r.iterates])))
            for r in group]
    planar = sum(1 for v in top2 if v >= 0.7)
    assert planar >= 5, f"top-2 explained variance >= 0.7 in only {planar}/10 runs"
    soft = "" if planar >= 7 else f" (soft target 7/10 missed: {planar}/10)"
    elapsed = time.time() - start
    assert elapsed < 600
    announce(8, "pca landscape", elapsed,
             f"top-2 variance >= 0.7 in {planar}/10 trajectories"
             f" (min {min(top2):.3f}, median {np.median(top2):.3f}){soft}")
    if planar < 7:
        print(f"criterion 8 soft shortfall: top-2 shares {[round(v, 3) for v in top2]}")


def test_criterion_09_optimizer_references():
    start = time.time()
    A = np.array([[3.0, 1.0], [1.0, 2.0]])
    target = np.array([1.0, -2.0])

    def quad(x):
        d = np.asarray(x) - target
        return 0.5 * float(d @ A @ d)

    def quad_grad(x):
        return A @ (np.asarray(x) - target)

    theta0 = np.array([4.0, -3.0])
    cfg = OptimizerConfig(kind="ps_bfgs", budget=None, max_iterations=10)
    rec = gradient_minimize(CountedFunction(quad), _CallableEngine(quad_grad, 2),
                            "bfgs", theta0, cfg)
    assert rec.final_energy < 1e-8

    cfg = OptimizerConfig(kind="ps_adam", budget=None, max_iterations=300)
    rec = gradient_minimize(CountedFunction(quad), _CallableEngine(quad_grad, 2),
                            "adam", theta0, cfg)
    assert rec.final_energy < 1e-6

    cfg = OptimizerConfig(kind="ps_sgd", budget=None, max_iterations=200)
    rec = gradient_minimize(CountedFunction(quad), _CallableEngine(quad_grad, 2),
                            "sgd", theta0, cfg)
    assert rec.final_energy < 0.1

    cfg = OptimizerConfig(kind="cobyla", budget=None, max_iterations=5000)
    rec = cobyla_minimize(CountedFunction(lambda x: float((x[0] - 2.0) ** 2)),
                          np.array([0.0]), cfg, np.random.default_rng(0))
    assert rec.converged and abs(rec.final_theta[0] - 2.0) < 1e-3

    cfg = OptimizerConfig(kind="nelder_mead", budget=None, max_iterations=5000)
    rec = nelder_mead_minimize(CountedFunction(quad), theta0, cfg)
    assert rec.converged and rec.final_energy < 1e-3

    rng = np.random.default_rng(17)
    for _ in range(10):
        root = rng.standard_normal((3, 3))
        B = root @ root.T + 3 * np.eye(3)
        s = rng.standard_normal(3)
        y = rng.standard_normal(3)
        if y @ s <= 1e-8:
            y = -y
        B_new, applied = bfgs_update(B, s, y)
        assert applied and np.max(np.abs(B_new @ s - y)) < 1e-10

    steps = initial_simplex(np.zeros(2), scale=1.0)[1:]
    assert abs(steps[0, 0] - 0.965926) < 1e-5
    assert abs(steps[0, 1] - 0.258819) < 1e-5
    elapsed = time.time() - start
    assert elapsed < 60
    announce(9, "optimizer unit references", elapsed,
             "quadratics, secant condition, simplex constants")


def test_criterion_10_determinism(compare_run, tmp_path):
    start = time.time()
    again = tmp_path / "rerun"
    run_compare(ExperimentConfig.from_dict(COMPARE_CONFIG), again)
    first = compare_run["out"]
    compared = 0
    for name in ("config.json", "summary.csv", "medians.csv", "traces.csv"):
        assert (again / name).read_bytes() == \
            (first / name).read_bytes(), f"{name} differs between reruns"
        compared += 1
    record_names = sorted(os.listdir(first / "records"))
    assert sorted(os.listdir(again / "records")) == record_names
    for name in record_names:
        assert (again / "records" / name).read_bytes() == \
            (first / "records" / name).read_bytes(), f"records/{name} differs"
        compared += 1
    announce(10, "byte-level determinism", time.time() - start,
             f"{compared} files identical across independent reruns")
