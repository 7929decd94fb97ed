"""Classical optimizers with exact evaluation accounting.

Eight optimizer kinds: {parameter-shift, SPSA} gradients crossed with
{SGD, Adam, BFGS} updates, plus the derivative-free COBYLA-style
trust-region scheme and Nelder-Mead. Every run produces a RunRecord whose
per-iterate energies are exact re-evaluations at the recorded parameters
and whose cumulative evaluation counts follow the selected accounting
mode:

* "paper": fixed per-iteration charges - 2m+1 for parameter-shift kinds
  (plus any BFGS line-search probes beyond the first), 3 for SPSA kinds,
  3 for cobyla, 1 for nelder_mead after the m+1 simplex setup.
* "true": the measured number of cost evaluations, where an adjoint
  gradient counts as one evaluation.

Parameter-shift kinds default to the adjoint engine, which returns the
same numbers as the literal shift rule; set grad_engine="shift" to pay
the literal 2m-evaluation price.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .ansatz import Ansatz, CostFunction, EvalCounter, prepare_state
from .gradients import adjoint_gradient, finite_difference, parameter_shift, spsa_gradient
from .ising import (
    GroundTruth,
    SKInstance,
    approximation_ratio,
    ground_state_fidelity,
    to_json_dict,
)

OPTIMIZER_KINDS = (
    "ps_sgd",
    "ps_adam",
    "ps_bfgs",
    "spsa_sgd",
    "spsa_adam",
    "spsa_bfgs",
    "cobyla",
    "nelder_mead",
)

GRAD_ENGINES = ("adjoint", "shift", "fd")
ACCOUNTING_MODES = ("paper", "true")


@dataclass
class OptimizerConfig:
    """Hyperparameters for one optimizer run; defaults follow the benchmarks."""

    kind: str
    budget: int | None = 1000
    max_iterations: int | None = None
    accounting: str = "paper"
    grad_engine: str = "adjoint"
    shift_r: float = 0.5
    # a_k = a / (A + k)**b step schedule for SGD (and SPSA-BFGS steps)
    sgd_a: float = 0.1
    sgd_stability: float = 10.0
    sgd_decay: float = 0.602
    adam_rate: float = 0.1
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    spsa_c: float = 0.1
    spsa_c_decay: float = 0.101
    bfgs_armijo: float = 1e-4
    bfgs_max_backtracks: int = 30
    bfgs_curvature_eps: float = 1e-10
    bfgs_noise_gate: float = 1.0
    bfgs_step_a: float = 2.0
    bfgs_step_stability: float = 10.0
    bfgs_step_decay: float = 0.45
    bfgs_step_cap: float = math.pi
    cobyla_rho_init: float = 2.5
    cobyla_rho_end: float = 1e-5
    cobyla_probe_frac: float = 0.3
    cobyla_shrink: float = 0.93
    nm_scale: float = 1.0
    nm_tol: float = 1e-8
    threshold: float = 0.9

    def __post_init__(self):
        if self.kind not in OPTIMIZER_KINDS:
            raise ValueError(f"optimizer kind must be one of {OPTIMIZER_KINDS}, got {self.kind!r}")
        if self.accounting not in ACCOUNTING_MODES:
            raise ValueError(
                f"accounting must be one of {ACCOUNTING_MODES}, got {self.accounting!r}"
            )
        if self.grad_engine not in GRAD_ENGINES:
            raise ValueError(
                f"grad_engine must be one of {GRAD_ENGINES}, got {self.grad_engine!r}"
            )
        if self.budget is None and self.max_iterations is None:
            raise ValueError("at least one of budget / max_iterations must be set")
        if self.budget is not None and self.budget < 0:
            raise ValueError(f"budget must be non-negative, got {self.budget}")
        if self.max_iterations is not None and self.max_iterations < 0:
            raise ValueError(f"max_iterations must be non-negative, got {self.max_iterations}")

    @classmethod
    def from_dict(cls, data: dict) -> "OptimizerConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown optimizer config keys: {sorted(unknown)}")
        if "kind" not in data:
            raise ValueError("optimizer config missing required key 'kind'")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# update rules


def sgd_step(theta, grad, k: int, schedule=(0.1, 10.0, 0.602)) -> np.ndarray:
    """theta - a_k * grad with a_k = a / (A + k)**b, k counted from 0."""
    a, stability, decay = schedule
    return np.asarray(theta) - (a / (stability + k) ** decay) * np.asarray(grad)


@dataclass
class AdamState:
    theta: np.ndarray
    m: np.ndarray
    v: np.ndarray

    @classmethod
    def fresh(cls, theta) -> "AdamState":
        theta = np.asarray(theta, dtype=np.float64)
        return cls(theta, np.zeros_like(theta), np.zeros_like(theta))


def adam_step(state: AdamState, grad, k: int, hyper=(0.1, 0.9, 0.999, 1e-8)):
    """One Adam update; k is 1-based for the bias corrections."""
    if k < 1:
        raise ValueError(f"Adam's bias correction needs k >= 1, got {k}")
    rate, beta1, beta2, eps = hyper
    grad = np.asarray(grad, dtype=np.float64)
    m = beta1 * state.m + (1 - beta1) * grad
    v = beta2 * state.v + (1 - beta2) * grad**2
    m_hat = m / (1 - beta1**k)
    v_hat = v / (1 - beta2**k)
    theta = state.theta - rate * m_hat / (np.sqrt(v_hat) + eps)
    return AdamState(theta, m, v), theta


def bfgs_update(B, delta_theta, y, curvature_eps: float = 1e-10):
    """Rank-two curvature update; returns (B', applied).

    Skipped (applied=False) when y . delta_theta <= curvature_eps, which
    keeps B positive definite under noisy gradients.
    """
    delta_theta = np.asarray(delta_theta, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    ys = float(y @ delta_theta)
    if ys <= curvature_eps:
        return B, False
    bd = B @ delta_theta
    dbd = float(delta_theta @ bd)
    if dbd <= curvature_eps:
        return B, False
    return B + np.outer(y, y) / ys - np.outer(bd, bd) / dbd, True


def initial_simplex(theta0, scale: float = 1.0) -> np.ndarray:
    """Nelder-Mead start simplex: theta0 plus m displaced vertices.

    Vertex i adds p to coordinate i and q elsewhere, with
    p = (a/(m*sqrt(2)))*(sqrt(m+1)+m-1) and q = (a/(m*sqrt(2)))*(sqrt(m+1)-1).
    """
    theta0 = np.asarray(theta0, dtype=np.float64)
    m = theta0.size
    base = scale / (m * math.sqrt(2.0))
    p = base * (math.sqrt(m + 1.0) + m - 1.0)
    q = base * (math.sqrt(m + 1.0) - 1.0)
    simplex = np.tile(theta0, (m + 1, 1))
    for i in range(1, m + 1):
        simplex[i] += q
        simplex[i, i - 1] += p - q
    return simplex


# ---------------------------------------------------------------------------
# run records


@dataclass
class Iterate:
    iteration: int
    theta: np.ndarray
    energy: float
    evaluations: int
    true_evaluations: int
    ratio: float | None = None
    fidelity: float | None = None
    probes: int = 0
    note: str | None = None

    def to_dict(self) -> dict:
        return {
            "type": "iterate",
            "iteration": self.iteration,
            "theta": [float(x) for x in self.theta],
            "energy": float(self.energy),
            "evaluations": self.evaluations,
            "true_evaluations": self.true_evaluations,
            "ratio": self.ratio,
            "fidelity": self.fidelity,
            "probes": self.probes,
            "note": self.note,
        }


@dataclass
class RunRecord:
    optimizer: str
    m: int
    accounting: str
    budget: int | None
    max_iterations: int | None
    threshold: float
    theta0: np.ndarray
    iterates: list
    final_theta: np.ndarray
    final_energy: float | None
    converged: bool
    stop_reason: str
    total_evaluations: int
    total_true_evaluations: int
    ratio_threshold_hit: dict | None = None
    fidelity_threshold_hit: dict | None = None
    final_ratio: float | None = None
    final_fidelity: float | None = None
    ansatz_spec: dict | None = None
    instance_spec: dict | None = None
    label: str | None = None

    def meta_dict(self) -> dict:
        return {
            "type": "meta",
            "optimizer": self.optimizer,
            "m": self.m,
            "accounting": self.accounting,
            "budget": self.budget,
            "max_iterations": self.max_iterations,
            "threshold": self.threshold,
            "theta0": [float(x) for x in self.theta0],
            "final_theta": [float(x) for x in self.final_theta],
            "final_energy": None if self.final_energy is None else float(self.final_energy),
            "converged": self.converged,
            "stop_reason": self.stop_reason,
            "iterations": len(self.iterates) - 1 if self.iterates else 0,
            "total_evaluations": self.total_evaluations,
            "total_true_evaluations": self.total_true_evaluations,
            "ratio_threshold_hit": self.ratio_threshold_hit,
            "fidelity_threshold_hit": self.fidelity_threshold_hit,
            "final_ratio": self.final_ratio,
            "final_fidelity": self.final_fidelity,
            "ansatz": self.ansatz_spec,
            "instance": self.instance_spec,
            "label": self.label,
        }

    @classmethod
    def from_dicts(cls, meta: dict, iterate_dicts: list) -> "RunRecord":
        iterates = [
            Iterate(
                iteration=d["iteration"],
                theta=np.array(d["theta"], dtype=np.float64),
                energy=d["energy"],
                evaluations=d["evaluations"],
                true_evaluations=d["true_evaluations"],
                ratio=d.get("ratio"),
                fidelity=d.get("fidelity"),
                probes=d.get("probes", 0),
                note=d.get("note"),
            )
            for d in iterate_dicts
        ]
        return cls(
            optimizer=meta["optimizer"],
            m=meta["m"],
            accounting=meta["accounting"],
            budget=meta.get("budget"),
            max_iterations=meta.get("max_iterations"),
            threshold=meta.get("threshold", 0.9),
            theta0=np.array(meta["theta0"], dtype=np.float64),
            iterates=iterates,
            final_theta=np.array(meta["final_theta"], dtype=np.float64),
            final_energy=meta.get("final_energy"),
            converged=meta["converged"],
            stop_reason=meta["stop_reason"],
            total_evaluations=meta["total_evaluations"],
            total_true_evaluations=meta["total_true_evaluations"],
            ratio_threshold_hit=meta.get("ratio_threshold_hit"),
            fidelity_threshold_hit=meta.get("fidelity_threshold_hit"),
            final_ratio=meta.get("final_ratio"),
            final_fidelity=meta.get("final_fidelity"),
            ansatz_spec=meta.get("ansatz"),
            instance_spec=meta.get("instance"),
            label=meta.get("label"),
        )


class CountedFunction:
    """Wrap a plain callable with an evaluation counter."""

    def __init__(self, fn):
        self.fn = fn
        self.counter = EvalCounter()

    def __call__(self, theta):
        self.counter.add(1)
        return float(self.fn(theta))


class _Recorder:
    """Accumulates iterates, billed charges, and threshold crossings."""

    def __init__(self, counter, accounting, threshold, metrics_fn):
        self.counter = counter
        self.accounting = accounting
        self.threshold = threshold
        self.metrics_fn = metrics_fn
        self.iterates: list = []
        self.billed = 0
        self.ratio_hit = None
        self.fidelity_hit = None

    def record(self, iteration, theta, energy, paper_charge, true_charge,
               probes=0, note=None, metrics=None):
        charge = paper_charge if self.accounting == "paper" else true_charge
        self.billed += charge
        if metrics is None:
            metrics = self.metrics_fn(theta, energy) if self.metrics_fn else {}
        ratio = metrics.get("ratio")
        fidelity = metrics.get("fidelity")
        self.iterates.append(
            Iterate(iteration, np.array(theta, dtype=np.float64), float(energy),
                    self.billed, self.counter.count, ratio, fidelity, probes, note)
        )
        if self.ratio_hit is None and ratio is not None and ratio >= self.threshold:
            self.ratio_hit = {"iteration": iteration, "evaluations": self.billed}
        if self.fidelity_hit is None and fidelity is not None and fidelity >= self.threshold:
            self.fidelity_hit = {"iteration": iteration, "evaluations": self.billed}


def _finish(cfg, theta0, rec, converged, stop_reason, m,
            label=None, ansatz_spec=None, instance_spec=None):
    # The returned point is the best recorded iterate, not the last one;
    # stochastic kinds keep bouncing after they pass through the minimum.
    best = min(rec.iterates, key=lambda it: it.energy) if rec.iterates else None
    return RunRecord(
        optimizer=cfg.kind,
        m=m,
        accounting=cfg.accounting,
        budget=cfg.budget,
        max_iterations=cfg.max_iterations,
        threshold=cfg.threshold,
        theta0=np.array(theta0, dtype=np.float64),
        iterates=rec.iterates,
        final_theta=np.array(theta0 if best is None else best.theta, dtype=np.float64),
        final_energy=None if best is None else best.energy,
        converged=converged,
        stop_reason=stop_reason,
        total_evaluations=rec.billed,
        total_true_evaluations=rec.counter.count,
        ratio_threshold_hit=rec.ratio_hit,
        fidelity_threshold_hit=rec.fidelity_hit,
        final_ratio=None if best is None else best.ratio,
        final_fidelity=None if best is None else best.fidelity,
        label=label,
        ansatz_spec=ansatz_spec,
        instance_spec=instance_spec,
    )


# ---------------------------------------------------------------------------
# gradient engines and steppers


class _AdjointEngine:
    name = "adjoint"

    def __init__(self, cost: CostFunction):
        self.cost = cost
        self.paper_charge = 2 * cost.m
        self.min_true_charge = 1

    def __call__(self, theta, k):
        return adjoint_gradient(self.cost, theta)


class _ShiftEngine:
    name = "shift"

    def __init__(self, cost: CostFunction, r: float):
        self.cost = cost
        self.r = r
        self.paper_charge = 2 * cost.m
        self.min_true_charge = 2 * len(cost.ansatz.gates)

    def __call__(self, theta, k):
        return parameter_shift(self.cost, theta, r=self.r)


class _FdEngine:
    name = "fd"

    def __init__(self, fn, m, h: float = 1e-5):
        self.fn = fn
        self.h = h
        self.paper_charge = 2 * m
        self.min_true_charge = 2 * m

    def __call__(self, theta, k):
        return finite_difference(self.fn, theta, h=self.h)


class _SpsaEngine:
    name = "spsa"

    def __init__(self, fn, c0, gamma, rng):
        self.fn = fn
        self.c0 = c0
        self.gamma = gamma
        self.rng = rng
        self.paper_charge = 2
        self.min_true_charge = 2

    def __call__(self, theta, k):
        c_k = self.c0 / (k + 1) ** self.gamma
        return spsa_gradient(self.fn, theta, c=c_k, rng=self.rng)


class _CallableEngine:
    name = "callable"

    def __init__(self, grad_fn, m):
        self.grad_fn = grad_fn
        self.paper_charge = 2 * m
        self.min_true_charge = 0

    def __call__(self, theta, k):
        return np.asarray(self.grad_fn(theta), dtype=np.float64)


class _SgdStepper:
    def __init__(self, cfg: OptimizerConfig):
        self.schedule = (cfg.sgd_a, cfg.sgd_stability, cfg.sgd_decay)

    def step(self, k, theta, grad, energy, fn):
        return sgd_step(theta, grad, k, self.schedule), None, 0, None


class _AdamStepper:
    def __init__(self, cfg: OptimizerConfig, theta0):
        self.hyper = (cfg.adam_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps)
        self.state = AdamState.fresh(theta0)

    def step(self, k, theta, grad, energy, fn):
        self.state, theta_next = adam_step(self.state, grad, k + 1, self.hyper)
        return theta_next, None, 0, None


class _BfgsStepper:
    """BFGS direction with either backtracking line search or a fixed schedule.

    line_search=True charges one probe per trial point and reuses the
    accepted probe as the iterate's tracking energy. line_search=False
    (noisy SPSA gradients) takes schedule-length steps a_k = a/(A+k)**b
    along the direction and keeps a step only if it lowers the energy,
    spending the iterate's tracking evaluation on that test; B-updates
    additionally require the curvature signal to dominate the noise
    (cos(y, delta) > bfgs_noise_gate), else B drifts toward a random
    ill-conditioned matrix and the direction loses its descent bias.
    """

    def __init__(self, cfg: OptimizerConfig, m, line_search: bool):
        self.cfg = cfg
        self.B = np.eye(m)
        self.line_search = line_search
        self.prev_theta = None
        self.prev_grad = None

    def step(self, k, theta, grad, energy, fn):
        cfg = self.cfg
        note = None
        if self.prev_theta is not None:
            delta = theta - self.prev_theta
            y = grad - self.prev_grad
            gated = False
            if not self.line_search:
                scale = float(np.linalg.norm(delta) * np.linalg.norm(y))
                gated = scale == 0.0 or float(y @ delta) <= cfg.bfgs_noise_gate * scale
            if gated:
                note = "noise_gate_skip"
            else:
                self.B, applied = bfgs_update(
                    self.B, delta, y, cfg.bfgs_curvature_eps,
                )
                if not applied:
                    note = "curvature_skip"
        try:
            direction = -np.linalg.solve(self.B, grad)
        except np.linalg.LinAlgError:
            direction = -grad
            self.B = np.eye(theta.size)
            note = "singular_reset"
        slope = float(grad @ direction)
        if slope >= 0.0:
            direction = -grad
            slope = -float(grad @ grad)
            self.B = np.eye(theta.size)
            note = "nondescent_reset"
        self.prev_theta = np.array(theta)
        self.prev_grad = np.array(grad)

        if not self.line_search:
            # Noisy gradients carry an arbitrary scale, so the schedule sets
            # the step length outright along the quasi-Newton direction.
            a_k = cfg.bfgs_step_a / (cfg.bfgs_step_stability + k) ** cfg.bfgs_step_decay
            length = float(np.linalg.norm(direction))
            if length == 0.0:
                return theta, None, 0, note
            candidate = theta + (min(a_k, cfg.bfgs_step_cap) / length) * direction
            value = fn(candidate)
            if value < energy:
                return candidate, value, 1, note
            return theta, energy, 1, "rejected" if note is None else note + "+rejected"

        alpha = 1.0
        probes = 0
        theta_new = theta
        e_new = energy
        for _ in range(cfg.bfgs_max_backtracks + 1):
            candidate = theta + alpha * direction
            value = fn(candidate)
            probes += 1
            theta_new, e_new = candidate, value
            if value <= energy + cfg.bfgs_armijo * alpha * slope:
                break
            alpha *= 0.5
        else:
            note = "linesearch_exhausted" if note is None else note + "+linesearch_exhausted"
        return theta_new, e_new, probes, note


# ---------------------------------------------------------------------------
# optimizer loops


def _prequel(fn_obj, theta0, cfg, rec, initial_true_cost, initial_paper_cost,
             track_fn):
    """Record the starting point, or bail out if the budget cannot cover it."""
    if cfg.budget is not None and initial_paper_cost > cfg.budget:
        return None
    energy, metrics = track_fn(theta0)
    rec.record(0, theta0, energy, initial_paper_cost, initial_true_cost, metrics=metrics)
    return energy


def gradient_minimize(fn_obj, engine, method: str, theta0, cfg: OptimizerConfig,
                      track_fn=None, metrics_fn=None):
    """Shared loop for the six gradient-based optimizer kinds.

    fn_obj is a counted callable; track_fn(theta) -> (energy, metrics)
    charges exactly one evaluation.
    """
    theta0 = np.asarray(theta0, dtype=np.float64)
    if track_fn is None:
        def track_fn(th):
            return fn_obj(th), {}
    rec = _Recorder(fn_obj.counter, cfg.accounting, cfg.threshold, metrics_fn)

    if method == "sgd":
        stepper = _SgdStepper(cfg)
    elif method == "adam":
        stepper = _AdamStepper(cfg, theta0)
    elif method == "bfgs":
        stepper = _BfgsStepper(cfg, theta0.size, line_search=engine.name != "spsa")
    else:
        raise ValueError(f"unknown gradient method {method!r}")

    energy = _prequel(fn_obj, theta0, cfg, rec, 1, 1, track_fn)
    if energy is None:
        return _finish(cfg, theta0, rec, False, "budget", theta0.size)

    theta = theta0
    stop_reason = "max_iterations"
    k = 0
    while True:
        if cfg.max_iterations is not None and k >= cfg.max_iterations:
            stop_reason = "max_iterations"
            break
        min_charge = (engine.paper_charge + 1 if cfg.accounting == "paper"
                      else engine.min_true_charge + 1)
        if cfg.budget is not None and rec.billed + min_charge > cfg.budget:
            stop_reason = "budget"
            break
        k += 1
        before = fn_obj.counter.count
        grad = engine(theta, k - 1)
        theta_new, e_new, probes, note = stepper.step(k - 1, theta, grad, energy, fn_obj)
        if e_new is None:
            e_new, metrics = track_fn(theta_new)
        else:
            metrics = metrics_fn(theta_new, e_new) if metrics_fn else {}
        true_charge = fn_obj.counter.count - before
        paper_charge = engine.paper_charge + max(probes, 1)
        rec.record(k, theta_new, e_new, paper_charge, true_charge, probes, note, metrics)
        theta, energy = theta_new, e_new

    return _finish(cfg, theta0, rec, False, stop_reason, theta0.size)


def cobyla_minimize(fn_obj, theta0, cfg: OptimizerConfig, rng,
                    track_fn=None, metrics_fn=None):
    """Linear-approximation trust-region descent; exactly 3 evaluations per iteration.

    Each iteration probes J symmetrically along a random +-1 direction
    inside the current radius rho, steps to the trust boundary along the
    modelled descent direction, and accepts the best improving point;
    stagnation shrinks rho until it falls below cobyla_rho_end.
    """
    theta0 = np.asarray(theta0, dtype=np.float64)
    m = theta0.size
    if track_fn is None:
        def track_fn(th):
            return fn_obj(th), {}
    rec = _Recorder(fn_obj.counter, cfg.accounting, cfg.threshold, metrics_fn)
    energy = _prequel(fn_obj, theta0, cfg, rec, 1, 1, track_fn)
    if energy is None:
        return _finish(cfg, theta0, rec, False, "budget", m)

    theta = theta0
    rho = cfg.cobyla_rho_init
    converged = False
    stop_reason = "max_iterations"
    k = 0
    while True:
        if rho < cfg.cobyla_rho_end:
            converged = True
            stop_reason = "rho_end"
            break
        if cfg.max_iterations is not None and k >= cfg.max_iterations:
            stop_reason = "max_iterations"
            break
        if cfg.budget is not None and rec.billed + 3 > cfg.budget:
            stop_reason = "budget"
            break
        k += 1
        before = fn_obj.counter.count
        delta = rng.integers(0, 2, size=m) * 2 - 1
        unit = delta / math.sqrt(m)
        offset = cfg.cobyla_probe_frac * rho
        hi_point = theta + offset * unit
        lo_point = theta - offset * unit
        j_hi = fn_obj(hi_point)
        j_lo = fn_obj(lo_point)
        slope = (j_hi - j_lo) / (2.0 * offset)
        if slope == 0.0:
            candidate = theta + rho * unit
        else:
            candidate = theta - rho * math.copysign(1.0, slope) * unit
        j_cand = fn_obj(candidate)
        # The boundary candidate failing means the linear model is wrong at
        # this radius, even if an inner probe happened to improve.
        candidate_ok = j_cand < energy
        note = "boundary_step" if candidate_ok else "shrink"
        options = [(j_cand, candidate), (j_hi, hi_point), (j_lo, lo_point)]
        best_j, best_theta = min(options, key=lambda t: t[0])
        if best_j < energy:
            theta, energy = best_theta, best_j
        if not candidate_ok:
            rho *= cfg.cobyla_shrink
        true_charge = fn_obj.counter.count - before
        rec.record(k, theta, energy, 3, true_charge, 0, note)

    return _finish(cfg, theta0, rec, converged, stop_reason, m)


def nelder_mead_minimize(fn_obj, theta0, cfg: OptimizerConfig,
                         track_fn=None, metrics_fn=None, stat_trace=None):
    """Classical Nelder-Mead; charged one evaluation per iteration in paper mode.

    Uses the displaced-vertex start simplex from initial_simplex and the
    standard reflect/expand/contract/shrink coefficients (1, 2, 0.5, 0.5).
    Converges when the root-mean-square spread of the vertex values
    (normalized by m) drops below nm_tol.
    """
    theta0 = np.asarray(theta0, dtype=np.float64)
    m = theta0.size
    rec = _Recorder(fn_obj.counter, cfg.accounting, cfg.threshold, metrics_fn)
    if cfg.budget is not None and m + 1 > cfg.budget:
        return _finish(cfg, theta0, rec, False, "budget", m)

    simplex = initial_simplex(theta0, cfg.nm_scale)
    values = np.array([fn_obj(v) for v in simplex])
    order = np.argsort(values, kind="stable")
    simplex, values = simplex[order], values[order]
    metrics = metrics_fn(simplex[0], values[0]) if metrics_fn else {}
    rec.record(0, simplex[0], values[0], m + 1, m + 1, metrics=metrics)

    def spread():
        mean = values.mean()
        return math.sqrt(float(np.sum((values - mean) ** 2)) / m)

    converged = False
    stop_reason = "max_iterations"
    k = 0
    while True:
        if stat_trace is not None:
            stat_trace.append(spread())
        if spread() < cfg.nm_tol:
            converged = True
            stop_reason = "simplex_tolerance"
            break
        if cfg.max_iterations is not None and k >= cfg.max_iterations:
            stop_reason = "max_iterations"
            break
        if cfg.budget is not None and rec.billed + 1 > cfg.budget:
            stop_reason = "budget"
            break
        k += 1
        before = fn_obj.counter.count
        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        reflected = centroid + (centroid - worst)
        j_reflected = fn_obj(reflected)
        note = "reflect"
        if j_reflected < values[0]:
            expanded = centroid + 2.0 * (centroid - worst)
            j_expanded = fn_obj(expanded)
            if j_expanded < j_reflected:
                simplex[-1], values[-1] = expanded, j_expanded
                note = "expand"
            else:
                simplex[-1], values[-1] = reflected, j_reflected
        elif j_reflected < values[-2]:
            simplex[-1], values[-1] = reflected, j_reflected
        else:
            if j_reflected < values[-1]:
                contracted = centroid + 0.5 * (reflected - centroid)
            else:
                contracted = centroid - 0.5 * (centroid - worst)
            j_contracted = fn_obj(contracted)
            if j_contracted < min(j_reflected, values[-1]):
                simplex[-1], values[-1] = contracted, j_contracted
                note = "contract"
            else:
                best = simplex[0].copy()
                for i in range(1, m + 1):
                    simplex[i] = best + 0.5 * (simplex[i] - best)
                    values[i] = fn_obj(simplex[i])
                note = "shrink"
        order = np.argsort(values, kind="stable")
        simplex, values = simplex[order], values[order]
        true_charge = fn_obj.counter.count - before
        rec.record(k, simplex[0], values[0], 1, true_charge, 0, note)

    return _finish(cfg, theta0, rec, converged, stop_reason, m)


# ---------------------------------------------------------------------------
# circuit adapter


def run_optimizer(ansatz: Ansatz, instance: SKInstance, config: OptimizerConfig,
                  theta0, rng=None, ground_truth: GroundTruth | None = None,
                  label: str | None = None,
                  track_fidelity: bool = True) -> RunRecord:
    """Run one optimizer on the circuit cost from a given start point.

    track_fidelity=False skips the per-iterate overlap metric; the ratio only
    needs the energy, so large-n sweeps avoid one extra state prep per step.
    """
    theta0 = np.asarray(theta0, dtype=np.float64)
    if theta0.shape != (ansatz.m,):
        raise ValueError(
            f"theta0 must have shape ({ansatz.m},) for this ansatz, got {theta0.shape}"
        )
    if rng is None:
        rng = np.random.default_rng(0)
    cost = CostFunction(ansatz, instance)

    def metrics_from_state(state, energy):
        if ground_truth is None:
            return {}
        out = {"ratio": approximation_ratio(energy, ground_truth.energy)}
        if track_fidelity and state is not None:
            out["fidelity"] = ground_state_fidelity(state, ground_truth)
        return out

    def track_fn(theta):
        energy, state = cost.energy_and_state(theta)
        return energy, metrics_from_state(state, energy)

    def metrics_fn(theta, energy):
        if ground_truth is None:
            return {}
        # analysis only; not charged
        state = prepare_state(ansatz, theta) if track_fidelity else None
        return metrics_from_state(state, energy)

    kind = config.kind
    if kind in ("cobyla", "nelder_mead"):
        if kind == "cobyla":
            record = cobyla_minimize(cost, theta0, config, rng, track_fn, metrics_fn)
        else:
            record = nelder_mead_minimize(cost, theta0, config, track_fn, metrics_fn)
    else:
        grad_name, method = kind.split("_", 1)
        if grad_name == "spsa":
            engine = _SpsaEngine(cost, config.spsa_c, config.spsa_c_decay, rng)
        elif config.grad_engine == "adjoint":
            engine = _AdjointEngine(cost)
        elif config.grad_engine == "shift":
            engine = _ShiftEngine(cost, config.shift_r)
        else:
            engine = _FdEngine(cost, cost.m)
        record = gradient_minimize(cost, engine, method, theta0, config,
                                   track_fn, metrics_fn)

    record.ansatz_spec = ansatz.describe()
    record.instance_spec = to_json_dict(instance)
    record.label = label
    return record
