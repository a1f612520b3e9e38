import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import dense
from constrained_qaoa import (
    ParameterError,
    StateVector,
    apply_diagonal_phase,
    apply_partial_mixer,
    apply_rx_all,
    erdos_renyi,
    expectation_diagonal,
    full_distribution,
    hamming_weight,
    init_basis,
    init_plus,
    init_w,
    is_independent,
    ring,
    sample,
)
from constrained_qaoa.graph import feasible_mask, to_index, violations

SQUARE = ring(4)


def random_state(n, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector(n, v / np.linalg.norm(v))


def test_init_basis():
    assert np.array_equal(init_basis(2, "00").amps, [1, 0, 0, 0])
    sv = init_basis(2, "10")
    assert sv.amps[to_index("10")] == 1 and sv.amps[1] == 1
    sv = init_basis(4, "0101")
    assert sv.amps[to_index("0101")] == 1 and np.count_nonzero(sv.amps) == 1
    with pytest.raises(ParameterError):
        init_basis(3, "01")


def test_init_plus():
    assert np.allclose(init_plus(1).amps, [2**-0.5, 2**-0.5])
    assert np.allclose(init_plus(2).amps, 0.5)
    assert abs(init_plus(14).norm() - 1) < 1e-12


def test_init_w():
    sv = init_w(2)
    assert np.allclose(sv.amps[[to_index("10"), to_index("01")]], 2**-0.5)
    sv = init_w(4)
    for s in ("1000", "0100", "0010", "0001"):
        assert sv.amps[to_index(s)] == pytest.approx(0.5)
    for n in (3, 6):
        sv = init_w(n)
        for z, a in enumerate(sv.amps):
            if bin(z).count("1") != 1:
                assert a == 0


def test_diagonal_phase_examples():
    sv = random_state(3, 0)
    assert np.array_equal(apply_diagonal_phase(sv, lambda s: 0.0).amps, sv.amps)
    out = apply_diagonal_phase(init_basis(2, "11"), lambda s: np.pi * hamming_weight(s))
    assert np.allclose(out.probabilities, init_basis(2, "11").probabilities)
    assert out.amps[3] == pytest.approx(1.0)


def test_diagonal_phase_penalty_on_violating_state():
    gamma = 0.731
    # 1100 on the square ring violates exactly edge (0, 1), by direct scan.
    count = sum(1 for i, j in SQUARE.edges if "1100"[i] == "1100"[j] == "1")
    assert count == 1
    out = apply_diagonal_phase(init_basis(4, "1100"), lambda s: gamma * violations(SQUARE, s))
    assert out.amps[to_index("1100")] == pytest.approx(np.exp(1j * gamma * count))


def test_diagonal_phase_accepts_table():
    sv = random_state(3, 1)
    table = np.arange(8) * 0.1
    assert np.allclose(apply_diagonal_phase(sv, table).amps, np.exp(1j * table) * sv.amps)


def test_rx_all_examples():
    sv = random_state(3, 2)
    assert np.allclose(apply_rx_all(sv, 0.0).amps, sv.amps)
    out = apply_rx_all(init_basis(1, "0"), np.pi / 2)
    assert np.allclose(out.amps, [0, 1j])


@pytest.mark.parametrize("beta", [0.3, 1.1, 2.9])
def test_rx_all_matches_matrix_exponential(beta):
    sv = random_state(3, 3)
    assert np.max(np.abs(apply_rx_all(sv, beta).amps - dense.transverse_mixer(3, beta) @ sv.amps)) < 1e-10


def test_partial_mixer_no_neighbors_is_plain_rotation():
    sv = random_state(3, 4)
    beta = 0.77
    ref = dense.on_qubits(3, {1: np.array([[np.cos(beta), -1j * np.sin(beta)],
                                           [-1j * np.sin(beta), np.cos(beta)]])})
    assert np.allclose(apply_partial_mixer(sv, 1, set(), beta).amps, ref @ sv.amps, atol=1e-12)


def test_partial_mixer_blocked_by_neighbor():
    sv = init_basis(3, "011")
    out = apply_partial_mixer(sv, 0, {1, 2}, 1.2)
    assert np.array_equal(out.amps, sv.amps)


def test_partial_mixer_matches_formula_n3():
    sv = random_state(3, 5)
    beta = 0.9
    ref = dense.partial_mixer(3, 0, {1, 2}, beta) @ sv.amps
    assert np.max(np.abs(apply_partial_mixer(sv, 0, {1, 2}, beta).amps - ref)) < 1e-12


def test_partial_mixer_target_in_neighbors():
    with pytest.raises(ParameterError):
        apply_partial_mixer(init_plus(3), 0, {0, 1}, 0.4)


def test_partial_mixer_zero_angle_is_identity():
    sv = random_state(4, 6)
    assert np.array_equal(apply_partial_mixer(sv, 2, {1, 3}, 0.0).amps, sv.amps)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 3), st.integers(0, 2**32 - 1), st.floats(-7, 7))
def test_kernels_match_dense_unitaries_small_n(n, seed, angle):
    rng = np.random.default_rng(seed)
    sv = random_state(n, seed)
    target = int(rng.integers(n))
    nbrs = {int(j) for j in range(n) if j != target and rng.random() < 0.5}
    got = apply_partial_mixer(sv, target, nbrs, angle).amps
    assert np.max(np.abs(got - dense.partial_mixer(n, target, nbrs, angle) @ sv.amps)) < 1e-12
    got = apply_rx_all(sv, angle).amps
    assert np.max(np.abs(got - dense.transverse_mixer(n, angle) @ sv.amps)) < 1e-12


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1), st.floats(-7, 7))
def test_norm_preserved(n, seed, angle):
    sv = random_state(n, seed)
    rng = np.random.default_rng(seed)
    ops = [
        apply_rx_all(sv, angle),
        apply_partial_mixer(sv, 0, set(range(1, n)) if n > 1 else set(), angle),
        apply_diagonal_phase(sv, rng.normal(size=1 << n)),
    ]
    for out in ops:
        assert abs(np.sum(out.probabilities) - 1) < 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 9), st.integers(0, 2**32 - 1))
def test_feasible_subspace_preserved(n, seed):
    rng = np.random.default_rng(seed)
    g = erdos_renyi(n, 0.4, seed=seed)
    feas = feasible_mask(g)
    amps = np.where(feas, rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n), 0)
    sv = StateVector(n, amps / np.linalg.norm(amps))
    for _ in range(3):
        i = int(rng.integers(n))
        sv = apply_partial_mixer(sv, i, g.neighbors(i), rng.uniform(0, 2 * np.pi))
        sv = apply_diagonal_phase(sv, rng.normal(size=1 << n))
    assert np.all(np.abs(sv.amps[~feas]) <= 1e-12)


def test_partial_mixers_need_not_commute():
    g = ring(4)
    sv = init_basis(4, "0000")
    a = apply_partial_mixer(apply_partial_mixer(sv, 0, g.neighbors(0), 1.0), 1, g.neighbors(1), 1.0)
    b = apply_partial_mixer(apply_partial_mixer(sv, 1, g.neighbors(1), 1.0), 0, g.neighbors(0), 1.0)
    assert np.max(np.abs(a.amps - b.amps)) > 1e-3


def test_expectation_diagonal():
    assert expectation_diagonal(init_basis(4, "1010"), hamming_weight) == 2
    assert expectation_diagonal(init_plus(2), hamming_weight) == pytest.approx(1.0)
    assert expectation_diagonal(init_w(4), hamming_weight) == pytest.approx(1.0)


def test_full_distribution():
    assert full_distribution(init_basis(3, "101")) == {"101": 1.0}
    d = full_distribution(init_w(4), 1e-12)
    assert len(d) == 4 and all(v == pytest.approx(0.25) for v in d.values())
    sv = random_state(5, 9)
    cutoff = 0.01
    assert sum(full_distribution(sv, cutoff).values()) >= 1 - 32 * cutoff


def test_sample():
    assert sample(init_basis(3, "110"), 100, seed=1) == {"110": 100}
    counts = sample(init_plus(1), 10**6, seed=4)
    assert sum(counts.values()) == 10**6
    # Binomial std at 1e6 shots is 5e-4, so 0.005 is a 10-sigma band.
    assert abs(counts["0"] / 10**6 - 0.5) < 0.005
    assert sample(init_plus(4), 500, seed=3) == sample(init_plus(4), 500, seed=3)


def test_sampled_support_is_feasible_for_feasible_state():
    g = SQUARE
    amps = np.zeros(16, dtype=complex)
    amps[[to_index("1010"), to_index("0100")]] = [0.6, 0.8]
    for s in sample(StateVector(4, amps), 1000, seed=0):
        assert is_independent(g, s)
