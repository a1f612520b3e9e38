from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import dense
from constrained_qaoa import (
    FeasibilityError,
    Graph,
    ParameterError,
    ParameterSet,
    apply_mask,
    build_dqva,
    build_qao,
    build_qaoa_plus,
    erdos_renyi,
    execute_plan,
    free_parameter_count,
    full_distribution,
    init_basis,
    is_independent,
    params_from_vector,
    params_to_vector,
    path,
    randomize_order,
    ring,
    zero_params,
)
from constrained_qaoa.graph import feasible_mask, greedy_mis

SQUARE = ring(4)


def random_params(plan, rng):
    x = rng.uniform(0, 2 * np.pi, free_parameter_count(plan))
    return params_from_vector(plan, x)


def test_free_parameter_counts():
    g14 = erdos_renyi(14, 0.2, seed=7)
    assert free_parameter_count(build_qao(g14, 7, vector_beta=False)) == 14
    assert free_parameter_count(build_qao(g14, 1, vector_beta=True)) == 15
    mask = [[i >= 6 for i in range(14)]]
    assert free_parameter_count(build_dqva(g14, 1, "0" * 14, mask=mask)) == 7
    assert free_parameter_count(build_qaoa_plus(SQUARE, 1, 2.0)) == 2


def test_qaoa_plus_zero_angles_uniform():
    plan = build_qaoa_plus(SQUARE, 1, 2.0)
    sv = execute_plan(plan, zero_params(plan))
    assert np.allclose(sv.probabilities, 1 / 16, atol=1e-15)


def test_qao_scalar_zero_angles_from_zero():
    plan = build_qao(SQUARE, 1, vector_beta=False, initial="zero")
    assert full_distribution(execute_plan(plan, zero_params(plan))) == {"0000": 1.0}


def test_qao_output_feasible_at_large_angles():
    plan = build_qao(SQUARE, 1, vector_beta=False, initial="zero")
    sv = execute_plan(plan, ParameterSet(np.array([0.3]), np.array([np.pi / 2 - 0.1])))
    for s, p in full_distribution(sv, 1e-12).items():
        assert is_independent(SQUARE, s)


def test_qao_rejects_infeasible_basis_initial():
    with pytest.raises(FeasibilityError):
        build_qao(SQUARE, 1, initial="1100")


def test_basis_initial_zero_angles_reproduce_state():
    for plan in (build_qao(SQUARE, 2, True, "1010"), build_dqva(SQUARE, 1, "0100")):
        sv = execute_plan(plan, zero_params(plan))
        assert np.array_equal(sv.amps, init_basis(4, plan.initial).amps)


def test_dimension_mismatch():
    plan = build_qao(SQUARE, 2, vector_beta=True)
    with pytest.raises(ParameterError):
        execute_plan(plan, ParameterSet(np.zeros(2), np.zeros(2)))
    with pytest.raises(ParameterError):
        params_from_vector(plan, np.zeros(3))


def test_qao_vector_path3_matches_dense_product():
    g = path(3)
    plan = build_qao(g, 1, vector_beta=True, initial="zero")
    rng = np.random.default_rng(0)
    params = random_params(plan, rng)
    ref = dense.qao_state(g, dense.basis(3, "000"), params.gammas, params.betas, plan.mixer_order)
    assert np.max(np.abs(execute_plan(plan, params).amps - ref)) < 1e-12


def test_qaoa_plus_matches_dense_product():
    g = path(3)
    plan = build_qaoa_plus(g, 2, 1.5)
    params = random_params(plan, np.random.default_rng(1))
    ref = dense.qaoa_plus_state(g, params.gammas, params.betas)
    assert np.max(np.abs(execute_plan(plan, params).amps - ref)) < 1e-12


def test_apply_mask_examples():
    g = ring(6)
    plan = build_dqva(g, 2, "000000")
    masked = apply_mask(plan, "010010")
    # Positions 2 and 5 counted from one are nodes 1 and 4.
    assert all(row == (False, True, False, False, True, False) for row in masked.mask)
    assert apply_mask(plan, "000000").mask == plan.mask
    masked = apply_mask(plan, "010110")
    assert all([i for i, m in enumerate(row) if m] == [1, 3, 4] for row in masked.mask)


def test_randomize_order_keeps_masked_slots():
    plan = apply_mask(build_dqva(ring(6), 1, "000000"), "010110")
    seen = set()
    for seed in range(50):
        order = randomize_order(plan, seed).mixer_order[0]
        assert order[1] == 1 and order[3] == 3 and order[4] == 4
        assert sorted(order[k] for k in (0, 2, 5)) == [0, 2, 5]
        seen.add(order)
    # (2, 1, 5, 3, 4, 0) is the slot pattern V3 I2 V6 I4 I5 V1.
    assert (2, 1, 5, 3, 4, 0) in seen
    assert len(seen) == 6


def test_randomize_order_full_and_empty_mask():
    plan = build_dqva(ring(5), 1, "00000")
    order = randomize_order(plan, 3).mixer_order[0]
    assert sorted(order) == list(range(5))
    assert randomize_order(plan, 3) == randomize_order(plan, 3)
    full = build_dqva(ring(5), 1, "00000", mask=[[True] * 5])
    assert randomize_order(full, 9) == full


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 10), st.integers(0, 2**32 - 1), st.sampled_from(["zero", "w", "greedy"]),
       st.booleans())
def test_constrained_outputs_are_feasible(n, seed, initial, vector):
    rng = np.random.default_rng(seed)
    g = erdos_renyi(n, 0.35, seed=seed)
    if initial == "greedy":
        plan = build_dqva(g, 2, greedy_mis(g, seed), mask=rng.random((2, n)) < 0.3)
    else:
        plan = build_qao(g, 2, vector, initial, order_seed=seed)
    sv = execute_plan(plan, random_params(plan, rng))
    assert np.sum(sv.probabilities[~feasible_mask(g)]) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_masked_angles_are_ignored(seed):
    rng = np.random.default_rng(seed)
    g = erdos_renyi(6, 0.3, seed=seed)
    plan = build_dqva(g, 2, "000000", mask=rng.random((2, 6)) < 0.5)
    params = random_params(plan, rng)
    noisy = ParameterSet(params.gammas, params.betas + np.array(plan.mask) * rng.normal(size=(2, 6)))
    assert np.array_equal(execute_plan(plan, params).amps, execute_plan(plan, noisy).amps)


def test_mixer_order_matters_somewhere():
    plan_a = build_qao(SQUARE, 1, vector_beta=False, initial="zero")
    plan_b = replace(plan_a, mixer_order=((1, 0, 2, 3),))
    params = ParameterSet(np.array([0.0]), np.array([1.0]))
    diff = np.abs(execute_plan(plan_a, params).probabilities - execute_plan(plan_b, params).probabilities)
    assert diff.max() > 1e-3


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["qaoa_plus", "qao_scalar", "qao_vector", "dqva"]))
def test_parameter_vector_roundtrip(seed, kind):
    rng = np.random.default_rng(seed)
    g = erdos_renyi(5, 0.4, seed=seed)
    if kind == "qaoa_plus":
        plan = build_qaoa_plus(g, 2, 1.0)
    elif kind == "dqva":
        plan = build_dqva(g, 2, "00000", mask=rng.random((2, 5)) < 0.5)
    else:
        plan = build_qao(g, 2, kind == "qao_vector")
    x = rng.uniform(0, 6, free_parameter_count(plan))
    assert np.array_equal(params_to_vector(plan, params_from_vector(plan, x)), x)


def test_single_node_graph_plans():
    g = Graph(1)
    plan = build_qao(g, 1, vector_beta=True)
    sv = execute_plan(plan, ParameterSet(np.zeros(1), np.array([[np.pi / 2]])))
    assert sv.probabilities[1] == pytest.approx(1.0)


def test_plan_validation():
    with pytest.raises(ParameterError):
        build_qaoa_plus(SQUARE, 0, 1.0)
    with pytest.raises(ParameterError):
        build_qaoa_plus(SQUARE, 1, -1.0)
    with pytest.raises(ParameterError):
        build_dqva(SQUARE, 1, "0000", mixer_order=[[0, 1, 1, 2]])
