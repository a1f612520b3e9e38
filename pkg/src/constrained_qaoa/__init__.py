"""Variational quantum approaches to Maximum Independent Set on an exact statevector simulator."""
from .ansatz import (
    AnsatzPlan,
    ParameterSet,
    apply_mask,
    build_dqva,
    build_qao,
    build_qaoa_plus,
    execute_plan,
    free_parameter_count,
    params_from_vector,
    params_to_vector,
    randomize_order,
    zero_params,
)
from .errors import (
    CapabilityError,
    ConstrainedQAOAError,
    FeasibilityError,
    ObjectiveError,
    ParameterError,
    UndefinedRatioError,
)
from .graph import (
    Graph,
    complete,
    erdos_renyi,
    exact_mis,
    greedy_mis,
    hamming_weight,
    is_independent,
    path,
    read_edgelist,
    ring,
    write_edgelist,
)
from .metrics import (
    ResourceCount,
    approximation_ratio,
    count_resources,
    pruned_expectation,
    summed_probability,
)
from .optimize import OptimizerConfig, OptimResult, evaluate_objective, maximize
from .solver import DqvaConfig, RunRecord, select_active_mixers, solve_dqva, solve_qao, solve_qaoa_plus
from .statevector import (
    StateVector,
    apply_diagonal_phase,
    apply_partial_mixer,
    apply_rx_all,
    expectation_diagonal,
    full_distribution,
    init_basis,
    init_plus,
    init_w,
    sample,
)

__version__ = "0.1.0"
