"""Shortest-path machinery: BFS distances and Brandes betweenness."""

from __future__ import annotations

from collections import deque
from typing import Hashable, Iterable, Mapping, Sequence

Adjacency = Mapping[Hashable, Sequence[Hashable]]


def bfs_distances(adj: Adjacency, source: Hashable, max_depth: int | None = None) -> dict:
    """Hop distances from ``source`` to every node it reaches (source included at 0)."""
    dist = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        d = dist[v]
        if max_depth is not None and d >= max_depth:
            continue
        for w in adj[v]:
            if w not in dist:
                dist[w] = d + 1
                queue.append(w)
    return dist


def betweenness(adj: Adjacency, nodes: Iterable[Hashable] | None = None) -> dict:
    """Unnormalised betweenness over ordered pairs (directed if ``adj`` is).

    Brandes' accumulation: one BFS per source, then dependencies are pushed
    back along the predecessor lists in reverse BFS order. For an undirected
    adjacency every unordered pair is counted twice.
    """
    order = list(adj) if nodes is None else list(nodes)
    cb = dict.fromkeys(order, 0.0)
    for s in order:
        stack = []
        preds: dict = {s: []}
        sigma = {s: 1}
        dist = {s: 0}
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            dv = dist[v]
            for w in adj[v]:
                if w not in dist:
                    dist[w] = dv + 1
                    sigma[w] = 0
                    preds[w] = []
                    queue.append(w)
                if dist[w] == dv + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = dict.fromkeys(stack, 0.0)
        while stack:
            w = stack.pop()
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                cb[w] += delta[w]
    return cb
