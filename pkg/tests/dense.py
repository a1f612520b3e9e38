"""Dense-matrix reference constructions, built from the operator formulas directly.

Independent of the amplitude-indexing kernels under test: everything here is
Kronecker products and matrix exponentials.  Qubit i is bit i of the basis
index, so the Kronecker order is (n-1, ..., 1, 0).
"""
from functools import reduce

import numpy as np
from scipy.linalg import expm

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)


def on_qubits(n, ops):
    """Kronecker product with ``ops[q]`` on qubit q and identity elsewhere."""
    return reduce(np.kron, [ops.get(q, I2) for q in reversed(range(n))])


def number_op(n, i):
    return (on_qubits(n, {}) - on_qubits(n, {i: Z})) / 2


def hamming_op(n):
    return sum(number_op(n, i) for i in range(n))


def penalty_op(n, edges):
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    for i, j in edges:
        out += number_op(n, i) @ number_op(n, j)
    return out


def transverse_mixer(n, beta):
    return expm(1j * beta * sum(on_qubits(n, {i: X}) for i in range(n)))


def partial_mixer(n, target, neighbors, beta):
    """I + (exp(-i beta X_target) - I) * prod_j (1 + Z_j) / 2."""
    bbar = on_qubits(n, {})
    for j in neighbors:
        bbar = bbar @ ((on_qubits(n, {}) + on_qubits(n, {j: Z})) / 2)
    rot = expm(-1j * beta * on_qubits(n, {target: X}))
    return on_qubits(n, {}) + (rot - on_qubits(n, {})) @ bbar


def basis(n, s):
    v = np.zeros(1 << n, dtype=complex)
    v[sum(1 << i for i, c in enumerate(s) if c == "1")] = 1
    return v


def qaoa_plus_state(graph, gammas, betas):
    n = graph.n
    psi = np.full(1 << n, 2 ** (-n / 2), dtype=complex)
    pen = penalty_op(n, graph.edges)
    for g, b in zip(gammas, betas):
        psi = transverse_mixer(n, b) @ (expm(1j * g * pen) @ psi)
    return psi


def qao_state(graph, psi0, gammas, betas, orders, masks=None):
    """Layer k: partial mixers in ``orders[k]`` (first listed applied first), then exp(i gamma H)."""
    n = graph.n
    H = hamming_op(n)
    psi = psi0.copy()
    for k, g in enumerate(gammas):
        for i in orders[k]:
            if masks is not None and masks[k][i]:
                continue
            b = betas[k][i] if np.ndim(betas[k]) else betas[k]
            psi = partial_mixer(n, i, graph.neighbors(i), b) @ psi
        psi = expm(1j * g * H) @ psi
    return psi
