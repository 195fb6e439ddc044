"""Discrete core/periphery fitting.

The ideal pattern links a pair iff at least one endpoint is in the core.
Fit is the Pearson correlation between that pattern and the observed
undirected adjacency over unordered node pairs. Because both vectors are
binary, the correlation only depends on the core size and on the number of
observed edges with both endpoints in the periphery, which makes a
single-node flip an O(degree) update.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import TooFewNodes
from .network import PersonId, SimpleGraph

_EPS = 1e-12


@dataclass(frozen=True)
class CorePeripheryResult:
    fit: float
    core_ids: frozenset[PersonId]
    iterations: int
    degenerate: bool = False


def pattern_correlation(n: int, m: int, core_size: int, periphery_edges: int) -> float | None:
    """Correlation for a given assignment summary; None when either vector is constant."""
    pairs = n * (n - 1) // 2
    p = n - core_size
    ideal = pairs - p * (p - 1) // 2
    joint = m - periphery_edges
    var_obs = pairs * m - m * m
    var_ideal = pairs * ideal - ideal * ideal
    if var_obs <= 0 or var_ideal <= 0:
        return None
    return (pairs * joint - m * ideal) / math.sqrt(var_obs * var_ideal)


def _climb(adj, n, m, core):
    """Steepest-ascent single-flip hill climbing from the assignment ``core``."""
    periphery_nbrs = [sum(1 for w in adj[v] if not core[w]) for v in range(n)]
    core_size = sum(core)
    periphery_edges = sum(periphery_nbrs[v] for v in range(n) if not core[v]) // 2
    current = pattern_correlation(n, m, core_size, periphery_edges)
    score = -math.inf if current is None else current
    while True:
        best_v, best = -1, score
        for v in range(n):
            if core[v]:
                r = pattern_correlation(n, m, core_size - 1, periphery_edges + periphery_nbrs[v])
            else:
                r = pattern_correlation(n, m, core_size + 1, periphery_edges - periphery_nbrs[v])
            if r is not None and r > best + _EPS:
                best_v, best = v, r
        if best_v < 0:
            return score, core
        v = best_v
        if core[v]:
            core[v] = False
            core_size -= 1
            periphery_edges += periphery_nbrs[v]
            step = 1
        else:
            core[v] = True
            core_size += 1
            periphery_edges -= periphery_nbrs[v]
            step = -1
        for w in adj[v]:
            periphery_nbrs[w] += step
        score = best


def core_periphery_fit(graph: SimpleGraph, iterations: int = 20, seed: int = 0) -> CorePeripheryResult:
    """Best fit over ``iterations`` seeded random restarts of hill climbing."""
    n = len(graph.nodes)
    if n < 3:
        raise TooFewNodes("core/periphery needs at least 3 nodes")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    index = {v: i for i, v in enumerate(graph.nodes)}
    adj = [[index[w] for w in sorted(graph.adj[v])] for v in graph.nodes]
    m = graph.edge_count
    if m == 0 or m == n * (n - 1) // 2:
        # observed vector is constant, correlation undefined
        return CorePeripheryResult(0.0, frozenset(), iterations, degenerate=True)

    rng = np.random.Generator(np.random.PCG64(seed))
    best_score, best_core = -math.inf, None
    for _ in range(iterations):
        start = [bool(b) for b in rng.integers(0, 2, size=n)]
        score, core = _climb(adj, n, m, start)
        if score > best_score + _EPS:
            best_score, best_core = score, core
    if best_core is None or best_score <= 0:
        # no assignment correlates positively with the observed ties
        return CorePeripheryResult(0.0, frozenset(), iterations, degenerate=True)
    core_ids = frozenset(v for v, c in zip(graph.nodes, best_core) if c)
    return CorePeripheryResult(best_score, core_ids, iterations)
