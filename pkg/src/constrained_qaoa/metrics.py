"""Output-quality metrics and the Toffoli-level resource model.

A distribution is a mapping from bitstring to either a probability (exact
mode) or a shot count (sampled mode).  Every metric normalises by
``max(total, 1)``: for counts that is the shot total, for probabilities it is
1, so both modes share one code path and truncated exact distributions are
not silently renormalised.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .ansatz import AnsatzPlan, free_parameter_count
from .errors import ParameterError, UndefinedRatioError
from .graph import Graph, hamming_weight, is_independent


@dataclass(frozen=True)
class ResourceCount:
    multi_controlled_toffolis: int
    per_gate_control_counts: dict[int, int] = field(default_factory=dict)
    free_parameters: int = 0
    mixer_applications: int = 0

    def as_dict(self) -> dict:
        return {
            "multi_controlled_toffolis": self.multi_controlled_toffolis,
            "per_gate_control_counts": {str(k): v for k, v in sorted(self.per_gate_control_counts.items())},
            "free_parameters": self.free_parameters,
            "mixer_applications": self.mixer_applications,
        }


def _total(dist) -> float:
    return max(float(sum(dist.values())), 1.0)


def pruned_expectation(dist, g: Graph) -> float:
    """Expected Hamming weight counting only independent sets; infeasible mass stays in the denominator."""
    if not dist:
        raise ParameterError("distribution is empty")
    num = sum(v * hamming_weight(s) for s, v in dist.items() if is_independent(g, s))
    return num / _total(dist)


def approximation_ratio(dist, g: Graph, e_max: int) -> float:
    if e_max <= 0:
        raise UndefinedRatioError("approximation ratio undefined for e_max = 0")
    return pruned_expectation(dist, g) / e_max


def summed_probability(dist, g: Graph, h: int, feasible_only: bool = False) -> float:
    """Probability mass on strings of Hamming weight exactly ``h``."""
    if not 0 <= h <= g.n:
        raise ParameterError(f"weight {h} outside [0, {g.n}]")
    mass = sum(v for s, v in dist.items()
               if hamming_weight(s) == h and (not feasible_only or is_independent(g, s)))
    return mass / _total(dist)


def sp_table(dist, g: Graph, feasible_only: bool = True) -> dict[int, float]:
    return {h: summed_probability(dist, g, h, feasible_only) for h in range(g.n + 1)}


def optimal_suboptimal_split(dist, g: Graph, e_max: int) -> tuple[float, float]:
    """(mass on maximum independent sets, mass on non-empty smaller independent sets)."""
    table = sp_table(dist, g, feasible_only=True)
    return table[e_max], sum(table[h] for h in range(1, e_max))


def count_resources(plan: AnsatzPlan) -> ResourceCount:
    """Two multi-controlled Toffolis per applied partial mixer with at least one control.

    The control arity of node i's mixer is its degree; isolated nodes need a
    bare rotation and add nothing to the Toffoli tally.  QAOA+ uses only one-
    and two-qubit gates and reports zero Toffolis.
    """
    params = free_parameter_count(plan)
    if plan.kind == "qaoa_plus":
        return ResourceCount(0, {}, params, 0)
    applied = plan.active()
    arities = Counter()
    for _, i in applied:
        deg = plan.graph.degree(i)
        if deg:
            arities[deg] += 2
    return ResourceCount(sum(arities.values()), dict(arities), params, len(applied))
