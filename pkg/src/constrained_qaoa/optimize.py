"""Derivative-free maximisation of variational objectives."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .ansatz import AnsatzPlan, ParameterSet, _graph_tables, execute_plan, params_from_vector
from .errors import ObjectiveError, ParameterError

log = logging.getLogger(__name__)

TWO_PI = 2 * np.pi
METHODS = ("nelder-mead", "coordinate-descent")


@dataclass
class OptimizerConfig:
    method: str = "nelder-mead"
    max_evals: int | None = None  # None -> 500 * dim
    xtol: float = 1e-6
    ftol: float = 1e-6
    seed: int | None = 0
    step: float = 0.5  # initial simplex edge / coordinate bracket, radians
    restarts: int = 1  # polishing restarts from the incumbent
    random_starts: int = 3  # extra seeded starts drawn uniformly from [0, 2*pi)^dim
    periodic: bool = True

    def __post_init__(self):
        if self.method not in METHODS:
            raise ParameterError(f"unknown optimizer method {self.method!r}")
        if self.max_evals is not None and self.max_evals < 1:
            raise ParameterError("max_evals must be >= 1")
        if self.restarts < 0 or self.random_starts < 0:
            raise ParameterError("restart counts must be >= 0")
        if self.xtol <= 0 or self.ftol <= 0:
            raise ParameterError("tolerances must be > 0")

    def budget(self, dim: int) -> int:
        return self.max_evals if self.max_evals is not None else 500 * dim


@dataclass
class OptimResult:
    best_params: np.ndarray
    best_value: float
    evals_used: int
    converged: bool
    history: list[float] = field(default_factory=list, repr=False)


class _BudgetExhausted(Exception):
    pass


class _Tracker:
    """Counts evaluations, keeps the incumbent and enforces the budget."""

    def __init__(self, objective, budget, periodic):
        self.objective = objective
        self.budget = budget
        self.periodic = periodic
        self.evals = 0
        self.best_x = None
        self.best_f = -np.inf
        self.history: list[float] = []

    def __call__(self, x) -> float:
        if self.evals >= self.budget:
            raise _BudgetExhausted
        x = np.asarray(x, dtype=float)
        if self.periodic:
            x = np.mod(x, TWO_PI)
            x[x >= TWO_PI] = 0.0  # mod of tiny negatives rounds up to 2*pi
        f = self.objective(x)
        self.evals += 1
        if not np.isfinite(f):
            raise ObjectiveError(f"objective returned {f} at {x.tolist()}", params=x.copy())
        f = float(f)
        if f > self.best_f:
            self.best_f, self.best_x = f, x.copy()
        self.history.append(self.best_f)
        return f


def maximize(objective, dim: int, cfg: OptimizerConfig | None = None, x0=None) -> OptimResult:
    """Maximise ``objective`` over ``dim`` real parameters starting from ``x0`` (zeros by default).

    One local search runs from ``x0`` and one from each of ``cfg.random_starts``
    seeded uniform points; then ``cfg.restarts`` polishing searches restart
    from the incumbent.  All searches share the ``cfg.budget(dim)``
    evaluation budget.  The returned point is the best one evaluated, so the
    result is never worse than the starting point.  Runs are deterministic
    for a fixed ``cfg.seed``.
    """
    cfg = cfg or OptimizerConfig()
    if dim < 1:
        raise ParameterError(f"dim must be >= 1, got {dim}")
    x0 = np.zeros(dim) if x0 is None else np.asarray(x0, dtype=float).copy()
    if x0.shape != (dim,):
        raise ParameterError(f"x0 must have shape ({dim},)")
    rng = np.random.default_rng(cfg.seed)
    track = _Tracker(objective, cfg.budget(dim), cfg.periodic)
    local = _nelder_mead if cfg.method == "nelder-mead" else _coordinate_descent
    starts = [x0] + [rng.uniform(0, TWO_PI, dim) for _ in range(cfg.random_starts)]
    converged = False
    try:
        track(x0)
        for start in starts:
            converged = local(track, start, cfg, rng)
        for _ in range(cfg.restarts):
            converged = local(track, track.best_x, cfg, rng)
    except _BudgetExhausted:
        converged = False
    return OptimResult(track.best_x, track.best_f, track.evals, converged, track.history)


def _nelder_mead(track: _Tracker, start, cfg: OptimizerConfig, rng) -> bool:
    dim = len(start)
    signs = rng.choice([-1.0, 1.0], size=dim)
    simplex = np.vstack([start] + [start + cfg.step * signs[i] * np.eye(dim)[i] for i in range(dim)])
    res = minimize(
        lambda x: -track(x), start, method="Nelder-Mead",
        options={
            "initial_simplex": simplex,
            "xatol": cfg.xtol,
            "fatol": cfg.ftol,
            "maxfev": track.budget - track.evals,
            "maxiter": 10 * track.budget,
        },
    )
    return bool(res.success)


def _coordinate_descent(track: _Tracker, start, cfg: OptimizerConfig, rng, grid: int = 12) -> bool:
    x = np.array(start, dtype=float)
    fx = track(x)
    while True:
        before = fx
        for i in rng.permutation(len(x)):
            cand = x.copy()
            best_t, best_f = x[i], fx
            for t in x[i] + np.linspace(0, TWO_PI, grid, endpoint=False)[1:]:
                cand[i] = t
                f = track(cand)
                if f > best_f:
                    best_t, best_f = t, f
            h = TWO_PI / grid

            def neg(t):
                cand[i] = t
                return -track(cand)

            r = minimize_scalar(neg, bounds=(best_t - h, best_t + h), method="bounded",
                                options={"xatol": cfg.xtol})
            if -r.fun > best_f:
                best_t, best_f = r.x, -r.fun
            x[i], fx = best_t, best_f
        if fx - before <= cfg.ftol:
            return True


def value_table(plan: AnsatzPlan, objective_kind: str) -> np.ndarray:
    """Diagonal objective over all basis indices: weight, or weight - lam * violations."""
    w, pen, _ = _graph_tables(plan.graph)
    if objective_kind == "hamming":
        return w
    if objective_kind == "penalized":
        return w - plan.lam * pen
    raise ParameterError(f"unknown objective kind {objective_kind!r}")


def default_objective(plan: AnsatzPlan) -> str:
    return "penalized" if plan.kind == "qaoa_plus" else "hamming"


def evaluate_objective(plan: AnsatzPlan, params: ParameterSet, objective_kind: str | None = None) -> float:
    table = value_table(plan, objective_kind or default_objective(plan))
    sv = execute_plan(plan, params)
    return float(np.dot(sv.probabilities, table))


def make_objective(plan: AnsatzPlan, objective_kind: str | None = None):
    """Objective as a function of the free-parameter vector."""
    table = value_table(plan, objective_kind or default_objective(plan))

    def f(x):
        sv = execute_plan(plan, params_from_vector(plan, x))
        return float(np.dot(sv.probabilities, table))

    return f
