"""End-to-end runs of QAOA+, the QAO-Ansatz and the Dynamic Quantum Variational Ansatz."""
from __future__ import annotations

import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .ansatz import (
    AnsatzPlan,
    build_dqva,
    build_qao,
    build_qaoa_plus,
    execute_plan,
    free_parameter_count,
    params_from_vector,
    randomize_order,
)
from .errors import FeasibilityError, ParameterError
from .graph import Graph, exact_mis, greedy_mis, hamming_weight, is_independent
from .metrics import ResourceCount, approximation_ratio, count_resources, optimal_suboptimal_split, sp_table
from .optimize import OptimizerConfig, OptimResult, make_objective, maximize
from .statevector import full_distribution, sample

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
CSV_FIELDS = (
    "schema", "run_id", "algorithm", "graph", "graph_seed", "n", "edges", "p", "lam",
    "vector_beta", "initial", "budget", "m", "mode", "shots", "seed", "best_bitstring",
    "best_weight", "e_max", "approximation_ratio", "sp_opt", "sp_subopt", "objective_value",
    "evals", "free_parameters", "mixer_applications", "multi_controlled_toffolis",
    "iterations", "rounds_to_best",
)


@dataclass
class RunRecord:
    algorithm: str
    graph: Graph
    config: dict
    best_bitstring: str
    best_weight: int
    e_max: int
    approximation_ratio: float
    sp_table: dict[int, float]
    sp_opt: float
    sp_subopt: float
    resources: ResourceCount
    objective_value: float
    evals: int
    trace: list[dict] = field(default_factory=list)
    run_id: str = ""
    graph_seed: int | None = None
    wall_time: float = 0.0

    @property
    def rounds_to_best(self) -> int:
        return rounds_to_weight(self, self.best_weight)

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "run_id": self.run_id,
            "algorithm": self.algorithm,
            "graph": {"n": self.graph.n, "edges": [list(e) for e in self.graph.sorted_edges],
                      "seed": self.graph_seed},
            "config": self.config,
            "best_bitstring": self.best_bitstring,
            "best_weight": self.best_weight,
            "e_max": self.e_max,
            "approximation_ratio": self.approximation_ratio,
            "sp_table": {str(h): v for h, v in self.sp_table.items()},
            "sp_opt": self.sp_opt,
            "sp_subopt": self.sp_subopt,
            "resources": self.resources.as_dict(),
            "objective_value": self.objective_value,
            "evals": self.evals,
            "trace": self.trace,
            "wall_time": self.wall_time,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_row(self) -> dict:
        """Flat CSV row; wall time is left out so exact-mode reruns are byte-identical."""
        c = self.config
        return {
            "schema": SCHEMA_VERSION,
            "run_id": self.run_id,
            "algorithm": self.algorithm,
            "graph": self.graph.describe(),
            "graph_seed": "" if self.graph_seed is None else self.graph_seed,
            "n": self.graph.n,
            "edges": len(self.graph.edges),
            "p": c.get("p", ""),
            "lam": c.get("lam", ""),
            "vector_beta": c.get("vector_beta", ""),
            "initial": c.get("initial", ""),
            "budget": c.get("mixer_budget", ""),
            "m": c.get("m", ""),
            "mode": c.get("mode", ""),
            "shots": c.get("shots", ""),
            "seed": c.get("seed", ""),
            "best_bitstring": self.best_bitstring,
            "best_weight": self.best_weight,
            "e_max": self.e_max,
            "approximation_ratio": repr(self.approximation_ratio),
            "sp_opt": repr(self.sp_opt),
            "sp_subopt": repr(self.sp_subopt),
            "objective_value": repr(self.objective_value),
            "evals": self.evals,
            "free_parameters": self.resources.free_parameters,
            "mixer_applications": self.resources.mixer_applications,
            "multi_controlled_toffolis": self.resources.multi_controlled_toffolis,
            "iterations": sum(1 for e in self.trace if e["round"] > 0),
            "rounds_to_best": self.rounds_to_best if self.trace else "",
        }


def rounds_to_weight(record: RunRecord, target: int) -> int:
    """First outer round whose incumbent reaches ``target``; ``m + 1`` if never reached."""
    for entry in record.trace:
        if entry["incumbent_weight"] >= target:
            return entry["round"]
    return int(record.config.get("m", len(record.trace))) + 1


def best_feasible(dist, g: Graph, cutoff: float = 0.0) -> str | None:
    """Heaviest independent set in the support; ties go to the lexicographically smallest string."""
    cands = [s for s, v in dist.items() if v > cutoff and is_independent(g, s)]
    if not cands:
        return None
    return min(cands, key=lambda s: (-hamming_weight(s), s))


def _output_distribution(sv, mode: str, shots: int | None, seed):
    if mode == "exact":
        return full_distribution(sv, 0.0)
    if mode == "sampled":
        if not shots:
            raise ParameterError("sampled mode needs shots >= 1")
        return sample(sv, shots, seed)
    raise ParameterError(f"unknown mode {mode!r}")


def _finish(algorithm, g, plan, result: OptimResult, config, mode, shots, seed,
            support_cutoff, t0) -> RunRecord:
    sv = execute_plan(plan, params_from_vector(plan, result.best_params))
    dist = _output_distribution(sv, mode, shots, seed)
    e_max, _ = exact_mis(g)
    best = best_feasible(dist, g, support_cutoff if mode == "exact" else 0) or "0" * g.n
    sp_opt, sp_sub = optimal_suboptimal_split(dist, g, e_max)
    return RunRecord(
        algorithm=algorithm,
        graph=g,
        config=config,
        best_bitstring=best,
        best_weight=hamming_weight(best),
        e_max=e_max,
        approximation_ratio=approximation_ratio(dist, g, e_max),
        sp_table=sp_table(dist, g),
        sp_opt=sp_opt,
        sp_subopt=sp_sub,
        resources=count_resources(plan),
        objective_value=result.best_value,
        evals=result.evals_used,
        wall_time=time.perf_counter() - t0,
    )


def solve_qaoa_plus(g: Graph, p: int, lam: float, optimizer: OptimizerConfig | None = None,
                    mode: str = "exact", shots: int | None = None, seed: int = 0,
                    support_cutoff: float = 1e-4) -> RunRecord:
    """Optimise weight - lam * violations from |+>^n over 2p angles, then prune infeasible output."""
    t0 = time.perf_counter()
    optimizer = optimizer or OptimizerConfig(seed=seed)
    plan = build_qaoa_plus(g, p, lam)
    result = maximize(make_objective(plan), free_parameter_count(plan), optimizer)
    config = {"p": p, "lam": lam, "mode": mode, "shots": shots, "seed": seed,
              "optimizer": asdict(optimizer)}
    return _finish("qaoa_plus", g, plan, result, config, mode, shots, seed, support_cutoff, t0)


def solve_qao(g: Graph, p: int, vector_beta: bool, initial: str = "zero",
              optimizer: OptimizerConfig | None = None, mode: str = "exact",
              shots: int | None = None, seed: int = 0, order_seed=None,
              support_cutoff: float = 1e-4) -> RunRecord:
    """Optimise expected Hamming weight with constraint-preserving partial mixers."""
    t0 = time.perf_counter()
    optimizer = optimizer or OptimizerConfig(seed=seed)
    plan = build_qao(g, p, vector_beta, initial, order_seed)
    result = maximize(make_objective(plan), free_parameter_count(plan), optimizer)
    config = {"p": p, "vector_beta": vector_beta, "initial": initial, "mode": mode,
              "shots": shots, "seed": seed, "order_seed": order_seed,
              "optimizer": asdict(optimizer)}
    algorithm = "qao_vector" if vector_beta else "qao_scalar"
    return _finish(algorithm, g, plan, result, config, mode, shots, seed, support_cutoff, t0)


@dataclass
class DqvaConfig:
    mixer_budget: int = 3
    m: int = 3
    warm_starts: tuple[str, ...] = ("zero", "greedy")
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    mode: str = "exact"
    shots: int | None = None
    seed: int = 0
    p: int = 1
    max_layers: int = 2
    support_cutoff: float = 1e-4
    reshuffle_on_update: bool = False

    def __post_init__(self):
        if self.m < 1:
            raise ParameterError("m must be >= 1")
        if self.p < 1 or self.max_layers < self.p:
            raise ParameterError("need 1 <= p <= max_layers")
        self.warm_starts = tuple(self.warm_starts)


def select_active_mixers(g: Graph, mask, budget: int, seed=None, max_layers: int = 2,
                         min_layers: int = 1) -> set[tuple[int, int]]:
    """Choose which (layer, node) partial mixers run under a fixed mixer budget.

    ``mask`` is a bitstring or boolean sequence over nodes; masked nodes never
    get a mixer.  When the unmasked nodes outnumber the budget a seeded random
    subset fills layer 0.  Otherwise extra layers (up to ``max_layers``) are
    opened over the unmasked nodes, so the active count is
    ``min(budget, layers * unmasked)``.
    """
    if isinstance(mask, str):
        mask = [c == "1" for c in mask]
    if len(mask) != g.n:
        raise ParameterError(f"mask has length {len(mask)}, expected {g.n}")
    budget = max(1, min(int(budget), g.n * max_layers))
    free = [i for i in range(g.n) if not mask[i]]
    if not free:
        return set()
    rng = np.random.default_rng(seed)
    layers = max(min_layers, min(max_layers, math.ceil(budget / len(free))))
    remaining = min(budget, layers * len(free))
    active = set()
    k = 0
    while remaining > 0:
        take = min(remaining, len(free))
        picked = free if take == len(free) else sorted(int(i) for i in rng.choice(free, take, replace=False))
        active.update((k, i) for i in picked)
        remaining -= take
        k += 1
    return active


def _resolve_warm_starts(g: Graph, cfg: DqvaConfig, rng) -> list[str]:
    starts = []
    for ws in cfg.warm_starts:
        if ws == "zero":
            s = "0" * g.n
        elif ws == "greedy":
            s = greedy_mis(g, int(rng.integers(2**31)))
        else:
            s = ws
            if len(s) != g.n or set(s) - {"0", "1"}:
                raise ParameterError(f"bad warm start {ws!r}")
        if not is_independent(g, s):
            raise FeasibilityError(f"warm start {s} is not an independent set")
        starts.append(s)
    if not starts:
        raise ParameterError("at least one warm start is required")
    return starts


def _stuck(g: Graph, state: str) -> bool:
    """True when every node is set or has a set neighbour: no partial mixer can act."""
    return all(state[i] == "1" or any(state[j] == "1" for j in g.neighbors(i)) for i in range(g.n))


def solve_dqva(g: Graph, cfg: DqvaConfig | None = None) -> RunRecord:
    """Warm start, mask, optimise, re-mask on improvement, randomise when stuck; best over warm starts.

    ``trace`` holds one entry per inner optimisation: outer round, running
    iteration index, best weight so far across all warm starts, the weight of
    the best string measured in that iteration and the optimised objective.
    """
    t0 = time.perf_counter()
    cfg = cfg or DqvaConfig()
    rng = np.random.default_rng(cfg.seed)
    starts = _resolve_warm_starts(g, cfg, rng)
    budget = max(1, min(cfg.mixer_budget, g.n))

    trace: list[dict] = []
    best_state = None
    best_dist, best_plan, best_result = None, None, None
    total_evals = 0
    iteration = 0
    for ws_index, start in enumerate(starts):
        state = start
        order = tuple(range(g.n))
        last = None  # (plan, result, dist) of the most recent optimisation
        if best_state is None or hamming_weight(state) > hamming_weight(best_state):
            best_state = state
        trace.append({"warm_start": ws_index, "round": 0, "iteration": iteration,
                      "incumbent_weight": hamming_weight(best_state),
                      "measured_weight": hamming_weight(state), "objective": None,
                      "active_mixers": 0, "layers": 0})
        for r in range(1, cfg.m + 1):
            if _stuck(g, state):
                break
            if r > 1:
                probe = build_dqva(g, 1, state, mask=[[c == "1" for c in state]], mixer_order=[order])
                order = randomize_order(probe, int(rng.integers(2**31))).mixer_order[0]
            h_old, h_new = -1, hamming_weight(state)
            while h_new > h_old and not _stuck(g, state):
                active = select_active_mixers(g, state, budget, int(rng.integers(2**31)),
                                              cfg.max_layers, cfg.p)
                layers = max(cfg.p, 1 + max(k for k, _ in active))
                mask = [[(k, i) not in active for i in range(g.n)] for k in range(layers)]
                plan = build_dqva(g, layers, state, mask, [order] * layers)
                opt = OptimizerConfig(**{**asdict(cfg.optimizer), "seed": int(rng.integers(2**31))})
                result = maximize(make_objective(plan), free_parameter_count(plan), opt)
                total_evals += result.evals_used
                sv = execute_plan(plan, params_from_vector(plan, result.best_params))
                dist = _output_distribution(sv, cfg.mode, cfg.shots, int(rng.integers(2**31)))
                last = (plan, result, dist)
                iteration += 1
                cutoff = cfg.support_cutoff if cfg.mode == "exact" else 0
                q = best_feasible(dist, g, cutoff) or state
                h_old, h_new = hamming_weight(state), hamming_weight(q)
                if h_new > h_old:
                    state = q
                    if cfg.reshuffle_on_update:
                        order = tuple(int(i) for i in rng.permutation(g.n))
                if hamming_weight(state) > hamming_weight(best_state):
                    best_state = state
                trace.append({
                    "warm_start": ws_index,
                    "round": r,
                    "iteration": iteration,
                    "incumbent_weight": hamming_weight(best_state),
                    "measured_weight": h_new,
                    "objective": result.best_value,
                    "active_mixers": len(active),
                    "layers": layers,
                })
                log.debug("dqva ws=%d round=%d it=%d state=%s", ws_index, r, iteration, state)
        if last is not None and (best_dist is None or state == best_state):
            best_plan, best_result, best_dist = last

    e_max, _ = exact_mis(g)
    config = {"mixer_budget": cfg.mixer_budget, "m": cfg.m, "warm_starts": list(cfg.warm_starts),
              "warm_start_strings": starts, "mode": cfg.mode, "shots": cfg.shots, "seed": cfg.seed,
              "p": cfg.p, "max_layers": cfg.max_layers, "support_cutoff": cfg.support_cutoff,
              "reshuffle_on_update": cfg.reshuffle_on_update, "optimizer": asdict(cfg.optimizer)}
    if best_dist is None:
        # Every warm start was already stuck: report the classical state itself.
        best_dist = {best_state: 1.0}
        resources = ResourceCount(0, {}, 0, 0)
        objective = float(hamming_weight(best_state))
    else:
        resources = count_resources(best_plan)
        objective = best_result.best_value
    sp_opt, sp_sub = optimal_suboptimal_split(best_dist, g, e_max)
    return RunRecord(
        algorithm="dqva",
        graph=g,
        config=config,
        best_bitstring=best_state,
        best_weight=hamming_weight(best_state),
        e_max=e_max,
        approximation_ratio=approximation_ratio(best_dist, g, e_max),
        sp_table=sp_table(best_dist, g),
        sp_opt=sp_opt,
        sp_subopt=sp_sub,
        resources=resources,
        objective_value=objective,
        evals=total_evals,
        trace=trace,
        wall_time=time.perf_counter() - t0,
    )
