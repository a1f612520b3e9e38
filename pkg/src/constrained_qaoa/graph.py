"""Problem instances for Maximum Independent Set.

Bitstrings are plain ``str`` objects of ``'0'``/``'1'`` characters where
character ``i`` is the membership bit of node ``i``.  The same convention is
used by the simulator (qubit ``i`` is bit ``i`` of the basis index), so a
string and a basis index can be converted with :func:`to_index` /
:func:`to_bitstring` without any reversal.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CapabilityError, ParameterError

EXHAUSTIVE_LIMIT = 20
EXACT_LIMIT = 30


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on nodes ``0 .. n-1``."""

    n: int
    edges: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError(f"graph needs at least one node, got n={self.n}")
        norm = set()
        for i, j in self.edges:
            i, j = int(i), int(j)
            if i == j:
                raise ParameterError(f"self-loop on node {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ParameterError(f"edge ({i}, {j}) out of range for n={self.n}")
            norm.add((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        return cls(n, frozenset(tuple(e) for e in edges))

    @property
    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def neighbors(self, i: int) -> frozenset[int]:
        return self._adjacency[i]

    def degree(self, i: int) -> int:
        return len(self._adjacency[i])

    @property
    def _adjacency(self) -> tuple[frozenset[int], ...]:
        adj = self.__dict__.get("_adj_cache")
        if adj is None:
            sets = [set() for _ in range(self.n)]
            for i, j in self.edges:
                sets[i].add(j)
                sets[j].add(i)
            adj = tuple(frozenset(s) for s in sets)
            object.__setattr__(self, "_adj_cache", adj)
        return adj

    def is_connected(self) -> bool:
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in self.neighbors(u):
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == self.n

    def describe(self) -> str:
        return f"n={self.n} m={len(self.edges)}"


def ring(n: int) -> Graph:
    """Cycle graph; ``ring(4)`` is the square ring used throughout the docs."""
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete(n: int) -> Graph:
    return Graph.from_edges(n, itertools.combinations(range(n), 2))


def erdos_renyi(n: int, p: float, seed=None, connected: bool = False,
                max_tries: int = 10_000) -> Graph:
    """Sample G(n, p): each of the n(n-1)/2 edges is kept independently with probability p.

    With ``connected=True`` the generator resamples from the same RNG stream
    until the graph is connected, so the result is still a pure function of
    ``(n, p, seed)``.
    """
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"edge probability must lie in [0, 1], got {p}")
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    pairs = list(itertools.combinations(range(n), 2))
    for _ in range(max_tries):
        keep = rng.random(len(pairs)) < p
        g = Graph.from_edges(n, [e for e, k in zip(pairs, keep) if k])
        if not connected or g.is_connected():
            return g
    raise CapabilityError(f"no connected G({n}, {p}) sample after {max_tries} tries")


def to_index(s: str) -> int:
    return sum(1 << i for i, c in enumerate(s) if c == "1")


def to_bitstring(z: int, n: int) -> str:
    return "".join("1" if (z >> i) & 1 else "0" for i in range(n))


def _check_bits(s: str) -> None:
    if any(c not in "01" for c in s):
        raise ParameterError(f"bitstring may only contain 0/1, got {s!r}")


def hamming_weight(s: str) -> int:
    return s.count("1")


def violations(g: Graph, s: str) -> int:
    """Number of edges with both endpoints set."""
    return sum(1 for i, j in g.edges if s[i] == "1" and s[j] == "1")


def is_independent(g: Graph, s: str) -> bool:
    if len(s) != g.n:
        raise ParameterError(f"bitstring length {len(s)} does not match n={g.n}")
    _check_bits(s)
    return all(not (s[i] == "1" and s[j] == "1") for i, j in g.edges)


def neighbor_masks(g: Graph) -> np.ndarray:
    """``masks[i]`` has bit ``j`` set for each neighbour ``j`` of ``i``."""
    masks = np.zeros(g.n, dtype=np.int64)
    for i, j in g.edges:
        masks[i] |= 1 << j
        masks[j] |= 1 << i
    return masks


def feasible_mask(g: Graph) -> np.ndarray:
    """Boolean array over all 2^n basis indices, True on independent sets."""
    z = np.arange(1 << g.n, dtype=np.int64)
    ok = np.ones(z.shape, dtype=bool)
    for i, j in g.edges:
        ok &= ((z >> i) & (z >> j) & 1) == 0
    return ok


def weights(n: int) -> np.ndarray:
    """Hamming weight of every basis index ``0 .. 2^n - 1``."""
    z = np.arange(1 << n, dtype=np.int64)
    w = np.zeros(z.shape, dtype=np.int64)
    for i in range(n):
        w += (z >> i) & 1
    return w


def edge_violations(g: Graph) -> np.ndarray:
    """Violated-edge count of every basis index."""
    z = np.arange(1 << g.n, dtype=np.int64)
    v = np.zeros(z.shape, dtype=np.int64)
    for i, j in g.edges:
        v += (z >> i) & (z >> j) & 1
    return v


def exact_mis(g: Graph) -> tuple[int, frozenset[str]]:
    """Size of the maximum independent set and every set attaining it."""
    if g.n > EXACT_LIMIT:
        raise CapabilityError(f"exact MIS limited to n <= {EXACT_LIMIT}, got {g.n}")
    if g.n < EXHAUSTIVE_LIMIT:
        w = np.where(feasible_mask(g), weights(g.n), -1)
        best = int(w.max())
        return best, frozenset(to_bitstring(int(z), g.n) for z in np.flatnonzero(w == best))
    return _branch_and_bound(g)


def _branch_and_bound(g: Graph) -> tuple[int, frozenset[str]]:
    # Enumerates all maximum sets, so prune only strictly worse branches.
    adj = [0] * g.n
    for i in range(g.n):
        for j in g.neighbors(i):
            adj[i] |= 1 << j
    best = [0]
    found: set[int] = set()

    def rec(chosen: int, size: int, candidates: int) -> None:
        if candidates == 0:
            if size > best[0]:
                best[0] = size
                found.clear()
            if size == best[0]:
                found.add(chosen)
            return
        if size + bin(candidates).count("1") < best[0]:
            return
        v = (candidates & -candidates).bit_length() - 1
        rec(chosen | (1 << v), size + 1, candidates & ~(1 << v) & ~adj[v])
        # Skipping v is only useful if some neighbour of v can still join.
        if candidates & adj[v]:
            rec(chosen, size, candidates & ~(1 << v))

    rec(0, 0, (1 << g.n) - 1)
    # Maximal sets reached by the recursion include all maximum ones.
    return best[0], frozenset(to_bitstring(z, g.n) for z in found)


def greedy_mis(g: Graph, seed=None) -> str:
    """Minimum-degree greedy: take a min-degree node, delete it and its neighbours, repeat.

    Degrees are recomputed on the remaining subgraph; ties are broken by the
    seeded RNG.  The result is always a maximal independent set.
    """
    rng = np.random.default_rng(seed)
    alive = set(range(g.n))
    chosen = []
    while alive:
        deg = {v: len(g.neighbors(v) & alive) for v in alive}
        low = min(deg.values())
        ties = sorted(v for v, d in deg.items() if d == low)
        v = ties[int(rng.integers(len(ties)))]
        chosen.append(v)
        alive -= {v} | g.neighbors(v)
    bits = ["0"] * g.n
    for v in chosen:
        bits[v] = "1"
    return "".join(bits)


def write_edgelist(g: Graph, path) -> None:
    lines = [f"n {g.n}"] + [f"{i} {j}" for i, j in g.sorted_edges]
    Path(path).write_text("\n".join(lines) + "\n")


def read_edgelist(path) -> Graph:
    """Parse the ``n <count>`` header followed by ``i j`` lines; ``#`` starts a comment."""
    n = None
    edges = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2 or parts[0] != "n":
                raise ParameterError(f"{path}:{lineno}: expected header 'n <count>'")
            n = int(parts[1])
            continue
        if len(parts) != 2:
            raise ParameterError(f"{path}:{lineno}: expected 'i j', got {raw!r}")
        edges.append((int(parts[0]), int(parts[1])))
    if n is None:
        raise ParameterError(f"{path}: missing 'n <count>' header")
    return Graph.from_edges(n, edges)
