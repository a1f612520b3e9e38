"""Dense statevector simulation specialised to the three MIS ansatze.

Qubit ``i`` is bit ``i`` of the basis index (little-endian), matching the
character order of the bitstrings in :mod:`constrained_qaoa.graph`.

Public functions take a :class:`StateVector` and return a new one.  The
``*_inplace`` kernels operate on a raw complex buffer and are what
:func:`constrained_qaoa.ansatz.execute_plan` uses in its inner loop.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Union

import numpy as np

from .errors import ParameterError
from .graph import to_bitstring, to_index, weights

NORM_TOL = 1e-10

PhaseSpec = Union[Callable[[str], float], np.ndarray]


@dataclass
class StateVector:
    n: int
    amps: np.ndarray

    def __post_init__(self):
        self.amps = np.asarray(self.amps, dtype=np.complex128)
        if self.amps.shape != (1 << self.n,):
            raise ParameterError(f"expected {1 << self.n} amplitudes, got shape {self.amps.shape}")

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.probabilities)))

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.amps.copy())


def init_basis(n: int, s: str) -> StateVector:
    if len(s) != n:
        raise ParameterError(f"bitstring {s!r} has length {len(s)}, expected {n}")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[to_index(s)] = 1.0
    return StateVector(n, amps)


def init_plus(n: int) -> StateVector:
    if n < 1:
        raise ParameterError("n must be >= 1")
    return StateVector(n, np.full(1 << n, 2.0 ** (-n / 2), dtype=np.complex128))


def init_w(n: int) -> StateVector:
    """Equal superposition of the n single-node strings."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[[1 << i for i in range(n)]] = 1 / np.sqrt(n)
    return StateVector(n, amps)


def _as_table(n: int, spec: PhaseSpec) -> np.ndarray:
    if callable(spec):
        return np.array([spec(to_bitstring(z, n)) for z in range(1 << n)], dtype=float)
    table = np.asarray(spec, dtype=float)
    if table.shape != (1 << n,):
        raise ParameterError(f"value table must have length {1 << n}, got {table.shape}")
    return table


# -- in-place kernels -------------------------------------------------------

def phase_inplace(amps: np.ndarray, phases: np.ndarray) -> None:
    amps *= np.exp(1j * phases)


def rx_all_inplace(amps: np.ndarray, n: int, beta: float) -> None:
    """Apply exp(i*beta*X) to every qubit."""
    c, s = np.cos(beta), 1j * np.sin(beta)
    for q in range(n):
        v = amps.reshape(1 << (n - 1 - q), 2, 1 << q)
        a0 = v[:, 0, :].copy()
        a1 = v[:, 1, :]
        v[:, 0, :] = c * a0 + s * a1
        v[:, 1, :] = s * a0 + c * a1


@lru_cache(maxsize=4096)
def _mixer_pairs(n: int, target: int, control_mask: int) -> tuple[np.ndarray, np.ndarray]:
    z = np.arange(1 << n, dtype=np.int64)
    sel = ((z & control_mask) == 0) & (((z >> target) & 1) == 0)
    z0 = z[sel]
    z0.flags.writeable = False
    z1 = z0 | (1 << target)
    z1.flags.writeable = False
    return z0, z1


def partial_mixer_inplace(amps: np.ndarray, n: int, target: int, control_mask: int,
                          angle: float) -> None:
    """exp(-i*angle*X) on ``target`` wherever every bit in ``control_mask`` is 0."""
    if angle == 0.0:
        return
    z0, z1 = _mixer_pairs(n, target, int(control_mask))
    c, s = np.cos(angle), -1j * np.sin(angle)
    a0 = amps[z0]
    a1 = amps[z1]
    amps[z0] = c * a0 + s * a1
    amps[z1] = s * a0 + c * a1


# -- value-returning API ----------------------------------------------------

def apply_diagonal_phase(sv: StateVector, phase_of: PhaseSpec) -> StateVector:
    """Multiply amplitude z by exp(i*phase_of(z)).

    ``phase_of`` is either a callable on bitstrings or a precomputed table
    indexed by basis index.
    """
    out = sv.copy()
    phase_inplace(out.amps, _as_table(sv.n, phase_of))
    return out


def apply_rx_all(sv: StateVector, beta: float) -> StateVector:
    out = sv.copy()
    rx_all_inplace(out.amps, sv.n, beta)
    return out


def apply_partial_mixer(sv: StateVector, target: int, neighbors, angle: float) -> StateVector:
    neighbors = set(int(j) for j in neighbors)
    if target in neighbors:
        raise ParameterError(f"target qubit {target} cannot also be a control")
    if not 0 <= target < sv.n or any(not 0 <= j < sv.n for j in neighbors):
        raise ParameterError("qubit index out of range")
    mask = sum(1 << j for j in neighbors)
    out = sv.copy()
    partial_mixer_inplace(out.amps, sv.n, target, mask, angle)
    return out


def expectation_diagonal(sv: StateVector, value_of: PhaseSpec) -> float:
    return float(np.dot(sv.probabilities, _as_table(sv.n, value_of)))


def expected_weight(sv: StateVector) -> float:
    return float(np.dot(sv.probabilities, weights(sv.n)))


def full_distribution(sv: StateVector, cutoff: float = 0.0) -> dict[str, float]:
    if cutoff < 0:
        raise ParameterError("cutoff must be >= 0")
    probs = sv.probabilities
    return {to_bitstring(int(z), sv.n): float(probs[z]) for z in np.flatnonzero(probs > cutoff)}


def sample(sv: StateVector, shots: int, seed=None) -> dict[str, int]:
    if shots < 1:
        raise ParameterError("shots must be >= 1")
    probs = sv.probabilities
    probs = probs / probs.sum()
    counts = np.random.default_rng(seed).multinomial(shots, probs)
    return {to_bitstring(int(z), sv.n): int(counts[z]) for z in np.flatnonzero(counts)}
