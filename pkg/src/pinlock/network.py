"""Network topology and the coupling (Laplacian) matrix.

Node ids are 1-based at the boundary and mapped to 0-based array indices
internally. The coupling matrix uses the sign convention with 0/1
off-diagonal adjacency and diagonal entries equal to minus the degree,
so every row sums to zero exactly (the matrix is assembled in integer
arithmetic before conversion to float).
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .numerics import SymMatrix

__all__ = [
    "Topology", "CouplingMatrix", "coupling_matrix", "degrees", "is_connected",
    "topology_to_json", "topology_from_json",
]


@dataclass(frozen=True)
class Topology:
    """Undirected simple graph on nodes 1..n."""

    n: int
    edges: frozenset[tuple[int, int]]

    def __init__(self, n: int, edges) -> None:
        if not isinstance(n, int) or n < 1:
            raise InputError(f"node count must be a positive integer, got {n!r}")
        canon = set()
        for e in edges:
            try:
                i, j = e
            except (TypeError, ValueError):
                raise InputError(f"edge {e!r} is not a pair") from None
            if not (isinstance(i, int) and isinstance(j, int)):
                raise InputError(f"edge {e!r} must contain integer node ids")
            if i == j:
                raise InputError(f"self-loop on node {i} is not allowed")
            if not (1 <= i <= n and 1 <= j <= n):
                raise InputError(f"edge {e!r} references a node outside 1..{n}")
            canon.add((min(i, j), max(i, j)))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", frozenset(canon))

    def neighbors(self, i: int) -> list[int]:
        return sorted(
            (b if a == i else a) for a, b in self.edges if i in (a, b)
        )


@dataclass(frozen=True)
class CouplingMatrix:
    """Coupling matrix A: 0/1 adjacency off-diagonal, -degree on the diagonal."""

    matrix: SymMatrix

    def __post_init__(self) -> None:
        a = self.matrix.entries
        n = self.matrix.n
        off = a - np.diag(np.diag(a))
        if not np.all((off == 0.0) | (off == 1.0)):
            raise InputError("off-diagonal coupling entries must be 0 or 1")
        deg = off.sum(axis=1)
        if not np.array_equal(np.diag(a), -deg):
            raise InputError("diagonal must equal minus the node degree")

    @property
    def n(self) -> int:
        return self.matrix.n

    @property
    def entries(self) -> np.ndarray:
        return self.matrix.entries


def degrees(t: Topology) -> np.ndarray:
    """Number of incident edges per node (1-based node i at index i-1)."""
    k = np.zeros(t.n, dtype=int)
    for i, j in t.edges:
        k[i - 1] += 1
        k[j - 1] += 1
    return k


def coupling_matrix(t: Topology) -> CouplingMatrix:
    """Assemble A from the topology; row sums are exactly zero."""
    a = np.zeros((t.n, t.n), dtype=int)
    for i, j in t.edges:
        a[i - 1, j - 1] = 1
        a[j - 1, i - 1] = 1
    a -= np.diag(a.sum(axis=1))
    return CouplingMatrix(SymMatrix(a.astype(float)))


def is_connected(t: Topology) -> bool:
    """True iff the graph has a single connected component (BFS)."""
    if t.n == 1:
        return True
    adj: dict[int, list[int]] = {i: [] for i in range(1, t.n + 1)}
    for i, j in t.edges:
        adj[i].append(j)
        adj[j].append(i)
    seen = {1}
    queue = deque([1])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == t.n


def topology_to_json(t: Topology) -> str:
    return json.dumps({"n": t.n, "edges": sorted(list(e) for e in t.edges)})


def topology_from_json(text: str | dict) -> Topology:
    data = json.loads(text) if isinstance(text, str) else text
    try:
        n = data["n"]
        edges = [tuple(e) for e in data["edges"]]
    except (KeyError, TypeError) as exc:
        raise InputError(f"topology JSON must have 'n' and 'edges': {exc}") from None
    return Topology(n, edges)
