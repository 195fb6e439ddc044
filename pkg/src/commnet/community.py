"""Louvain modularity optimisation on an undirected, unit-weight graph."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .errors import NoEdges, TooFewNodes
from .network import PersonId, SimpleGraph

_EPS = 1e-12


@dataclass(frozen=True)
class ModularityResult:
    score: float
    community_count: int
    partition: dict[PersonId, int]
    seed: int


def modularity_score(graph: SimpleGraph, partition: dict[PersonId, int]) -> float:
    """Newman modularity of ``partition``: sum over communities of e_c/m - (d_c/2m)^2."""
    m = graph.edge_count
    if m == 0:
        raise NoEdges("modularity needs at least one edge")
    intra = defaultdict(int)  # ordered within-community adjacencies (2 per edge)
    degree = defaultdict(int)
    for u in graph.nodes:
        c = partition[u]
        degree[c] += len(graph.adj[u])
        intra[c] += sum(1 for v in graph.adj[u] if partition[v] == c)
    two_m = 2.0 * m
    return sum(intra[c] / two_m - (degree[c] / two_m) ** 2 for c in degree)


def _move_nodes(adj, k, m2, order):
    """Local moving phase. Returns (community per node, whether anything moved)."""
    n = len(adj)
    comm = list(range(n))
    tot = list(k)
    any_move = False
    while True:
        moved = 0
        for i in order:
            ci = comm[i]
            links = defaultdict(float)
            for j, w in adj[i].items():
                if j != i:
                    links[comm[j]] += w
            tot[ci] -= k[i]
            best, best_gain = ci, links.get(ci, 0.0) - tot[ci] * k[i] / m2
            for c in sorted(links):
                gain = links[c] - tot[c] * k[i] / m2
                if gain > best_gain + _EPS:
                    best, best_gain = c, gain
            tot[best] += k[i]
            if best != ci:
                comm[i] = best
                moved += 1
        if not moved:
            return comm, any_move
        any_move = True


def _aggregate(adj, comm):
    relabel: dict[int, int] = {}
    for c in comm:
        relabel.setdefault(c, len(relabel))
    new_adj = [defaultdict(float) for _ in relabel]
    for i, nbrs in enumerate(adj):
        ci = relabel[comm[i]]
        for j, w in nbrs.items():
            new_adj[ci][relabel[comm[j]]] += w
    return [dict(sorted(a.items())) for a in new_adj], [relabel[c] for c in comm]


def louvain(graph: SimpleGraph, seed: int = 0) -> ModularityResult:
    """Greedy multi-level modularity maximisation.

    Nodes are visited in a seeded permutation of their canonical order at
    each level, so the result is a pure function of (graph, seed).
    """
    if len(graph.nodes) < 2:
        raise TooFewNodes("modularity needs at least 2 nodes")
    if graph.edge_count == 0:
        raise NoEdges("modularity needs at least one edge")
    rng = np.random.Generator(np.random.PCG64(seed))
    index = {v: i for i, v in enumerate(graph.nodes)}
    adj = [{index[w]: 1.0 for w in sorted(graph.adj[v])} for v in graph.nodes]
    membership = list(range(len(graph.nodes)))  # original node -> current level node

    while True:
        k = [sum(a.values()) for a in adj]
        m2 = sum(k)
        order = [int(i) for i in rng.permutation(len(adj))]
        comm, moved = _move_nodes(adj, k, m2, order)
        if not moved:
            break
        adj, level_map = _aggregate(adj, comm)
        membership = [level_map[c] for c in membership]

    relabel: dict[int, int] = {}
    partition = {}
    for v, c in zip(graph.nodes, membership):
        partition[v] = relabel.setdefault(c, len(relabel))
    return ModularityResult(
        score=modularity_score(graph, partition),
        community_count=len(relabel),
        partition=partition,
        seed=seed,
    )
