"""Gradient routes against finite differences and against each other."""

import numpy as np
import pytest

from cdbench.ansatz import CostFunction, build_dcqc, build_maqaoa, build_qaoa
from cdbench.gradients import (
    GradientRequest,
    adjoint_gradient,
    evaluate_gradient,
    finite_difference,
    parameter_shift,
    spsa_gradient,
)
from cdbench.ising import generate_sk


def fd_oracle(fn, theta, h=1e-6):
    """Central differences written out longhand, the reference for everything."""
    theta = np.asarray(theta, dtype=np.float64)
    grad = np.empty(theta.size)
    for i in range(theta.size):
        up, down = theta.copy(), theta.copy()
        up[i] += h
        down[i] -= h
        grad[i] = (fn(up) - fn(down)) / (2 * h)
    return grad


def make_cost(n=5, seed=6, family="dcqc", p=1):
    inst = generate_sk(n, seed)
    builders = {
        "dcqc": lambda: build_dcqc(inst, p, "full"),
        "dcqc2": lambda: build_dcqc(inst, p, "two_param"),
        "qaoa": lambda: build_qaoa(inst, p),
        "maqaoa": lambda: build_maqaoa(inst, p),
    }
    return CostFunction(builders[family](), inst)


@pytest.mark.parametrize("family", ["dcqc", "dcqc2", "qaoa", "maqaoa"])
def test_parameter_shift_matches_fd_oracle(family):
    rng = np.random.default_rng(1)
    cost = make_cost(family=family)
    for _ in range(3):
        theta = rng.uniform(-np.pi, np.pi, size=cost.m)
        ps = parameter_shift(cost, theta)
        fd = fd_oracle(cost, theta)
        assert np.max(np.abs(ps - fd)) < 1e-7


def test_parameter_shift_single_gate_analytic():
    # one Y rotation from |+> on one coupling pair: J(t) follows a sinusoid
    # in the doubled angle, so dJ/dt = 2 * r * (J(t + pi/(4r)/2...)) reduces
    # to the exact derivative of the closed form; check against numpy.cos
    inst = generate_sk(2, 0)
    cost = make_cost(n=2, seed=0, family="dcqc2")
    rng = np.random.default_rng(2)
    for _ in range(10):
        theta = rng.uniform(-2, 2, size=2)
        ps = parameter_shift(cost, theta)
        h = 1e-7
        for i in range(2):
            up, down = theta.copy(), theta.copy()
            up[i] += h
            down[i] -= h
            num = (cost(up) - cost(down)) / (2 * h)
            assert abs(ps[i] - num) < 1e-6


def test_adjoint_matches_parameter_shift():
    rng = np.random.default_rng(3)
    for family in ("dcqc", "dcqc2", "qaoa", "maqaoa"):
        cost = make_cost(n=6, seed=11, family=family)
        for _ in range(3):
            theta = rng.uniform(-np.pi, np.pi, size=cost.m)
            assert np.max(np.abs(adjoint_gradient(cost, theta)
                                 - parameter_shift(cost, theta))) < 1e-11


def test_adjoint_matches_on_multilayer():
    rng = np.random.default_rng(4)
    cost = make_cost(n=4, seed=2, family="dcqc", p=3)
    theta = rng.uniform(-np.pi, np.pi, size=cost.m)
    assert np.max(np.abs(adjoint_gradient(cost, theta)
                         - parameter_shift(cost, theta))) < 1e-11


def test_adjoint_charges_one_evaluation():
    cost = make_cost()
    adjoint_gradient(cost, np.zeros(cost.m))
    assert cost.evaluations == 1


def test_parameter_shift_charges_two_per_gate():
    cost = make_cost(n=4, seed=0, family="qaoa")
    parameter_shift(cost, np.zeros(2))
    assert cost.evaluations == 2 * len(cost.ansatz.gates)


def test_parameter_shift_validates_r():
    cost = make_cost()
    with pytest.raises(ValueError):
        parameter_shift(cost, np.zeros(cost.m), r=0.0)


def test_spsa_rank_one_structure():
    cost = make_cost()
    rng = np.random.default_rng(5)
    theta = rng.uniform(-1, 1, size=cost.m)
    grad = spsa_gradient(cost, theta, c=0.1, rng=rng)
    # every |g_i| equals the same measured slope magnitude
    assert np.allclose(np.abs(grad), np.abs(grad[0]))


def test_spsa_exactly_two_evaluations():
    cost = make_cost()
    spsa_gradient(cost, np.zeros(cost.m), rng=np.random.default_rng(0))
    assert cost.evaluations == 2


def test_spsa_unbiased_on_quadratic():
    # for f(x) = x.A x with A diagonal, the estimator averages to the true
    # gradient as the +-1 directions are symmetric
    a = np.array([1.0, 2.0, 3.0, 4.0])

    def f(x):
        return float(np.dot(a * x, x))

    x0 = np.array([0.5, -0.3, 0.2, 0.1])
    true_grad = 2 * a * x0
    rng = np.random.default_rng(12)
    estimates = [spsa_gradient(f, x0, c=1e-4, rng=rng) for _ in range(4000)]
    mean = np.mean(estimates, axis=0)
    assert np.max(np.abs(mean - true_grad)) < 0.05


def test_spsa_explicit_delta_and_validation():
    def f(x):
        return float(np.sum(x**2))

    delta = np.array([1.0, -1.0])
    grad = spsa_gradient(f, np.array([1.0, 1.0]), c=0.5, delta=delta)
    # slope along delta at (1,1) is 0, gradient estimate is exactly 0
    assert np.allclose(grad, 0.0)
    with pytest.raises(ValueError):
        spsa_gradient(f, np.zeros(2), c=-1.0, delta=delta)
    with pytest.raises(ValueError):
        spsa_gradient(f, np.zeros(2), delta=np.array([1.0, 0.5]))
    with pytest.raises(ValueError):
        spsa_gradient(f, np.zeros(2))  # no rng, no delta


def test_finite_difference_validates_h():
    with pytest.raises(ValueError):
        finite_difference(lambda x: 0.0, np.zeros(2), h=0.0)


def test_finite_difference_on_polynomial():
    def f(x):
        return float(x[0] ** 3 + 2 * x[1] ** 2)

    grad = finite_difference(f, np.array([2.0, 1.0]), h=1e-6)
    assert np.max(np.abs(grad - np.array([12.0, 4.0]))) < 1e-5


def test_two_param_gradient_sums_gate_contributions():
    # chain rule: the shared-parameter gradient is the sum of the full
    # ansatz gradient over each binding group
    inst = generate_sk(5, 13)
    full = CostFunction(build_dcqc(inst, 1, "full"), inst)
    shared = CostFunction(build_dcqc(inst, 1, "two_param"), inst)
    theta2 = np.array([0.4, -0.7])
    lifted = np.concatenate([np.full(5, theta2[0]), np.full(10, theta2[1])])
    g_full = parameter_shift(full, lifted)
    g_shared = parameter_shift(shared, theta2)
    assert abs(g_shared[0] - g_full[:5].sum()) < 1e-10
    assert abs(g_shared[1] - g_full[5:].sum()) < 1e-10


def test_evaluate_gradient_dispatch():
    inst = generate_sk(4, 3)
    ansatz = build_qaoa(inst, 1)
    theta = np.array([0.3, 0.5])
    ps = evaluate_gradient(GradientRequest(ansatz, inst, theta, "parameter_shift"))
    adj = evaluate_gradient(GradientRequest(ansatz, inst, theta, "adjoint"))
    fd = evaluate_gradient(GradientRequest(ansatz, inst, theta, "finite_difference"))
    assert np.max(np.abs(ps - adj)) < 1e-11
    assert np.max(np.abs(ps - fd)) < 1e-7
    sp = evaluate_gradient(GradientRequest(
        ansatz, inst, theta, "spsa", delta=np.array([1.0, -1.0])))
    assert sp.shape == (2,)
    with pytest.raises(ValueError):
        GradientRequest(ansatz, inst, theta, "downhill")


def test_evaluate_gradient_reuses_cost():
    inst = generate_sk(4, 3)
    ansatz = build_qaoa(inst, 1)
    cost = CostFunction(ansatz, inst)
    evaluate_gradient(GradientRequest(ansatz, inst, np.zeros(2), "adjoint"), cost)
    assert cost.evaluations == 1
