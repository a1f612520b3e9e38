"""Declarative circuit plans for QAOA+, the QAO-Ansatz and DQVA, and their execution.

Layer structure per kind:

* ``qaoa_plus``: start in |+>^n; each layer applies exp(i*gamma*C_pen) and
  then exp(i*beta*sum_i X_i).
* ``qao_scalar`` / ``qao_vector`` / ``dqva``: start in a feasible state; each
  layer applies the partial mixers in ``mixer_order`` and then
  exp(i*gamma*H).  Scalar mode shares one beta per layer; vector and dqva
  modes have one angle per (layer, node).

``mixer_order[k]`` lists node indices in the order the partial mixers are
*applied* in layer k.  ``mask[k][i]`` set means the partial mixer of node i in
layer k is replaced by the identity and its angle is not a free parameter.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .errors import CapabilityError, FeasibilityError, ParameterError
from .graph import Graph, edge_violations, is_independent, neighbor_masks, weights
from .statevector import (
    StateVector,
    init_basis,
    init_plus,
    init_w,
    partial_mixer_inplace,
    phase_inplace,
    rx_all_inplace,
)

KINDS = ("qaoa_plus", "qao_scalar", "qao_vector", "dqva")
VECTOR_KINDS = ("qao_vector", "dqva")
# 2^26 complex128 amplitudes is 1 GiB; beyond that the dense simulator is not useful.
MAX_QUBITS = 26


@dataclass(frozen=True)
class AnsatzPlan:
    kind: str
    graph: Graph
    p: int
    initial: str
    mixer_order: tuple[tuple[int, ...], ...]
    mask: tuple[tuple[bool, ...], ...]
    lam: float = 0.0

    def __post_init__(self):
        n = self.graph.n
        if n > MAX_QUBITS:
            raise CapabilityError(f"statevector simulation limited to {MAX_QUBITS} qubits, got {n}")
        if self.kind not in KINDS:
            raise ParameterError(f"unknown ansatz kind {self.kind!r}")
        if self.p < 1:
            raise ParameterError(f"depth must be >= 1, got {self.p}")
        if self.lam < 0:
            raise ParameterError(f"penalty multiplier must be >= 0, got {self.lam}")
        if len(self.mixer_order) != self.p or len(self.mask) != self.p:
            raise ParameterError("mixer_order and mask need one row per layer")
        for order in self.mixer_order:
            if sorted(order) != list(range(n)):
                raise ParameterError(f"mixer order {order} is not a permutation of range({n})")
        if any(len(row) != n for row in self.mask):
            raise ParameterError(f"mask rows must have length {n}")
        if self.initial not in ("plus", "zero", "w"):
            if len(self.initial) != n or set(self.initial) - {"0", "1"}:
                raise ParameterError(f"bad initial state {self.initial!r}")

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def vector_beta(self) -> bool:
        return self.kind in VECTOR_KINDS

    def active(self) -> list[tuple[int, int]]:
        """(layer, node) pairs whose partial mixer is applied, in execution order."""
        return [(k, i) for k in range(self.p) for i in self.mixer_order[k] if not self.mask[k][i]]

    def summary(self) -> dict:
        return {
            "kind": self.kind,
            "p": self.p,
            "lam": self.lam,
            "initial": self.initial,
            "mixer_order": [list(o) for o in self.mixer_order],
            "mask": ["".join("1" if m else "0" for m in row) for row in self.mask],
        }


@dataclass
class ParameterSet:
    gammas: np.ndarray
    betas: np.ndarray


def _identity_rows(n: int, p: int):
    return tuple(tuple(range(n)) for _ in range(p)), tuple((False,) * n for _ in range(p))


def build_qaoa_plus(g: Graph, p: int, lam: float) -> AnsatzPlan:
    order, mask = _identity_rows(g.n, p)
    return AnsatzPlan("qaoa_plus", g, p, "plus", order, mask, float(lam))


def _check_initial(g: Graph, initial: str) -> str:
    if initial in ("zero", "w", "plus"):
        return initial
    if len(initial) != g.n:
        raise ParameterError(f"initial bitstring {initial!r} has wrong length for n={g.n}")
    if not is_independent(g, initial):
        raise FeasibilityError(f"initial state {initial} is not an independent set")
    return initial


def build_qao(g: Graph, p: int, vector_beta: bool = False, initial: str = "zero",
              order_seed=None) -> AnsatzPlan:
    """QAO-Ansatz plan.  ``order_seed=None`` keeps the identity mixer order."""
    if initial == "plus":
        raise FeasibilityError("|+> is not supported on the feasible subspace")
    initial = _check_initial(g, initial)
    order, mask = _identity_rows(g.n, p)
    if order_seed is not None:
        rng = np.random.default_rng(order_seed)
        order = tuple(tuple(int(i) for i in rng.permutation(g.n)) for _ in range(p))
    kind = "qao_vector" if vector_beta else "qao_scalar"
    return AnsatzPlan(kind, g, p, initial, order, mask)


def build_dqva(g: Graph, p: int, initial: str, mask=None, mixer_order=None) -> AnsatzPlan:
    initial = _check_initial(g, initial)
    if initial in ("plus", "w"):
        raise ParameterError("DQVA starts from a single basis state")
    ident_order, ident_mask = _identity_rows(g.n, p)
    mask = ident_mask if mask is None else tuple(tuple(bool(m) for m in row) for row in mask)
    order = ident_order if mixer_order is None else tuple(tuple(int(i) for i in o) for o in mixer_order)
    return AnsatzPlan("dqva", g, p, initial, order, mask)


def free_parameter_count(plan: AnsatzPlan) -> int:
    if not plan.vector_beta:
        return 2 * plan.p
    return plan.p + sum(1 for row in plan.mask for m in row if not m)


def zero_params(plan: AnsatzPlan) -> ParameterSet:
    shape = (plan.p, plan.n) if plan.vector_beta else (plan.p,)
    return ParameterSet(np.zeros(plan.p), np.zeros(shape))


def params_from_vector(plan: AnsatzPlan, x) -> ParameterSet:
    """Unpack the optimizer's free-variable vector: gammas first, then unmasked betas row-major."""
    x = np.asarray(x, dtype=float)
    if x.shape != (free_parameter_count(plan),):
        raise ParameterError(f"expected {free_parameter_count(plan)} free parameters, got {x.shape}")
    gammas = x[: plan.p].copy()
    if not plan.vector_beta:
        return ParameterSet(gammas, x[plan.p:].copy())
    betas = np.zeros((plan.p, plan.n))
    free = ~np.array(plan.mask, dtype=bool)
    betas[free] = x[plan.p:]
    return ParameterSet(gammas, betas)


def params_to_vector(plan: AnsatzPlan, params: ParameterSet) -> np.ndarray:
    _check_params(plan, params)
    if not plan.vector_beta:
        return np.concatenate([params.gammas, params.betas]).astype(float)
    free = ~np.array(plan.mask, dtype=bool)
    return np.concatenate([params.gammas, np.asarray(params.betas)[free]]).astype(float)


def _check_params(plan: AnsatzPlan, params: ParameterSet) -> None:
    beta_shape = (plan.p, plan.n) if plan.vector_beta else (plan.p,)
    if np.shape(params.gammas) != (plan.p,) or np.shape(params.betas) != beta_shape:
        raise ParameterError(
            f"{plan.kind} with p={plan.p} needs gammas {(plan.p,)} and betas {beta_shape}, "
            f"got {np.shape(params.gammas)} and {np.shape(params.betas)}")


@lru_cache(maxsize=64)
def _graph_tables(g: Graph):
    w = weights(g.n).astype(float)
    pen = edge_violations(g).astype(float)
    w.flags.writeable = False
    pen.flags.writeable = False
    return w, pen, tuple(int(m) for m in neighbor_masks(g))


def initial_state(plan: AnsatzPlan) -> StateVector:
    if plan.initial == "plus":
        return init_plus(plan.n)
    if plan.initial == "w":
        return init_w(plan.n)
    if plan.initial == "zero":
        return init_basis(plan.n, "0" * plan.n)
    return init_basis(plan.n, plan.initial)


def execute_plan(plan: AnsatzPlan, params: ParameterSet) -> StateVector:
    _check_params(plan, params)
    n = plan.n
    w, pen, nbmask = _graph_tables(plan.graph)
    sv = initial_state(plan)
    amps = sv.amps
    gammas = np.asarray(params.gammas, dtype=float)
    betas = np.asarray(params.betas, dtype=float)
    for k in range(plan.p):
        if plan.kind == "qaoa_plus":
            phase_inplace(amps, gammas[k] * pen)
            rx_all_inplace(amps, n, betas[k])
            continue
        for i in plan.mixer_order[k]:
            if plan.mask[k][i]:
                continue
            angle = betas[k, i] if plan.vector_beta else betas[k]
            partial_mixer_inplace(amps, n, i, nbmask[i], angle)
        phase_inplace(amps, gammas[k] * w)
    return sv


def apply_mask(plan: AnsatzPlan, state: str) -> AnsatzPlan:
    """Mask, in every layer, the partial mixer of each node set to 1 in ``state``."""
    if len(state) != plan.n:
        raise ParameterError(f"state {state!r} has length {len(state)}, expected {plan.n}")
    row = tuple(c == "1" for c in state)
    return replace(plan, mask=tuple(row for _ in range(plan.p)))


def randomize_order(plan: AnsatzPlan, seed=None) -> AnsatzPlan:
    """Shuffle unmasked mixers among their own slots; masked identities stay put."""
    rng = np.random.default_rng(seed)
    rows = []
    for order, mask in zip(plan.mixer_order, plan.mask):
        slots = [pos for pos, node in enumerate(order) if not mask[node]]
        movers = [order[pos] for pos in slots]
        shuffled = [movers[j] for j in rng.permutation(len(movers))]
        new = list(order)
        for pos, node in zip(slots, shuffled):
            new[pos] = node
        rows.append(tuple(new))
    return replace(plan, mixer_order=tuple(rows))
