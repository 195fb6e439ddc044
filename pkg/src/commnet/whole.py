"""Whole-network measure suite.

Directed measures: density, in/out degree centralisation, betweenness
centralisation, average distance, average degree, assortativity.
Undirected projection: transitivity, modularity, core/periphery,
fragmentation (default mode) and "all" degree centralisation.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Mapping

from .community import ModularityResult, louvain
from .coreperiphery import CorePeripheryResult, core_periphery_fit
from .errors import DegenerateAttribute, MeasureError, TooFewNodes
from .network import CommunityNetwork, PersonId, undirected_projection, weak_components
from .paths import betweenness, bfs_distances

logger = logging.getLogger(__name__)

CONVENTIONS = {
    "density": "directed |E|/(n(n-1))",
    "fragmentation": "unreachable unordered pairs, undirected projection",
    "degree_centralisation": "Freeman; all=undirected projection, in/out=directed",
    "betweenness_centralisation": "Freeman over directed betweenness, max (n-1)^2(n-2)",
    "transitivity": "global, undirected projection",
    "modularity": "Louvain, undirected projection, unit weights",
    "average_distance": "directed, reachable ordered pairs only",
    "average_degree": "directed |E|/n",
    "assortativity": "Newman categorical over directed edges",
    "core_periphery": "discrete pattern correlation, undirected projection, restarted hill climbing",
}


def _require_nodes(net: CommunityNetwork, k: int, what: str) -> int:
    if net.n < k:
        raise TooFewNodes(f"{what} needs at least {k} nodes, got {net.n}")
    return net.n


def density(net: CommunityNetwork) -> float:
    n = _require_nodes(net, 2, "density")
    return net.m / (n * (n - 1))


def fragmentation(net: CommunityNetwork, mode: str = "undirected") -> float:
    """Share of node pairs joined by no path."""
    n = _require_nodes(net, 2, "fragmentation")
    if mode == "undirected":
        reachable = sum(len(c) * (len(c) - 1) // 2 for c in weak_components(net))
        return 1.0 - reachable / (n * (n - 1) // 2)
    if mode == "directed":
        reachable = sum(len(bfs_distances(net.successors, v)) - 1 for v in net.node_list)
        return 1.0 - reachable / (n * (n - 1))
    raise ValueError(f"unknown fragmentation mode {mode!r}")


def freeman(values, max_sum: float) -> float:
    values = list(values)
    top = max(values)
    return sum(top - v for v in values) / max_sum


def degree_centralisation(net: CommunityNetwork, mode: str = "all") -> float:
    n = _require_nodes(net, 3, "degree centralisation")
    if mode == "all":
        proj = undirected_projection(net)
        return freeman((proj.degree(v) for v in proj.nodes), (n - 1) * (n - 2))
    if mode == "out":
        degrees = (len(net.successors[v]) for v in net.node_list)
    elif mode == "in":
        degrees = (len(net.predecessors[v]) for v in net.node_list)
    else:
        raise ValueError(f"unknown degree mode {mode!r}")
    return freeman(degrees, (n - 1) ** 2)


def betweenness_centralisation(net: CommunityNetwork) -> float:
    n = _require_nodes(net, 3, "betweenness centralisation")
    cb = betweenness(net.successors, net.node_list)
    return freeman(cb.values(), (n - 1) ** 2 * (n - 2))


def transitivity(net: CommunityNetwork) -> float:
    _require_nodes(net, 3, "transitivity")
    proj = undirected_projection(net)
    closed = triples = 0
    for v in proj.nodes:
        nbrs = sorted(proj.adj[v])
        d = len(nbrs)
        triples += d * (d - 1) // 2
        for i, a in enumerate(nbrs):
            adj_a = proj.adj[a]
            closed += sum(1 for b in nbrs[i + 1:] if b in adj_a)
    return closed / triples if triples else 0.0


def modularity(net: CommunityNetwork, seed: int = 0) -> ModularityResult:
    return louvain(undirected_projection(net), seed=seed)


def average_distance(net: CommunityNetwork) -> float:
    _require_nodes(net, 2, "average distance")
    total = pairs = 0
    for v in net.node_list:
        dist = bfs_distances(net.successors, v)
        total += sum(dist.values())
        pairs += len(dist) - 1
    return total / pairs if pairs else 0.0


def average_degree(net: CommunityNetwork) -> float:
    n = _require_nodes(net, 1, "average degree")
    return net.m / n


def attribute_values(
    net: CommunityNetwork, attribute: str | Mapping[PersonId, str] | Callable[[PersonId], str]
) -> dict[PersonId, str]:
    """Resolve a categorical attribute for every node; missing values map to "unknown".

    String keys: ``gender``, ``projects`` (participant / non-participant) and
    ``tag:<prefix>`` which reads the value of a ``<prefix>:<value>`` role tag.
    """
    if callable(attribute):
        return {v: str(attribute(v)) for v in net.node_list}
    if isinstance(attribute, Mapping):
        return {v: str(attribute.get(v, "unknown")) for v in net.node_list}
    if attribute == "gender":
        return {v: a.gender or "unknown" for v, a in net.nodes.items()}
    if attribute == "projects":
        return {v: "participant" if a.projects else "non-participant" for v, a in net.nodes.items()}
    if attribute.startswith("tag:"):
        prefix = attribute[4:] + ":"
        out = {}
        for v, a in net.nodes.items():
            hits = sorted(t[len(prefix):] for t in a.role_tags if t.startswith(prefix))
            out[v] = hits[0] if hits else "unknown"
        return out
    raise ValueError(f"unknown attribute key {attribute!r}")


def assortativity(net: CommunityNetwork, attribute="gender") -> float:
    values = attribute_values(net, attribute)
    if len(set(values.values())) < 2:
        raise DegenerateAttribute(f"attribute {attribute!r} has a single category")
    m = net.m
    mixing = Counter((values[s], values[t]) for s, t in net.edges)
    rows = Counter(values[s] for s, _ in net.edges)
    cols = Counter(values[t] for _, t in net.edges)
    diag = sum(c for (i, j), c in mixing.items() if i == j)
    expected = sum(rows[c] * cols[c] for c in rows)
    # integer form of (sum e_ii - sum a_i b_i) / (1 - sum a_i b_i)
    denom = m * m - expected
    if denom == 0:
        raise DegenerateAttribute(f"attribute {attribute!r} has a degenerate mixing matrix")
    return (m * diag - expected) / denom


@dataclass(frozen=True)
class WholeConfig:
    seed: int = 0
    cp_iterations: int = 20
    fragmentation_mode: str = "undirected"
    assortativity_keys: tuple[str, ...] = ("gender", "projects")


@dataclass
class MetricsReport:
    view_name: str
    density: float | None = None
    fragmentation: float | None = None
    degree_centralisation: dict[str, float | None] = field(default_factory=dict)
    betweenness_centralisation: float | None = None
    transitivity: float | None = None
    modularity: dict[str, Any] = field(default_factory=dict)
    average_distance: float | None = None
    average_degree: float | None = None
    assortativity: dict[str, float | None] = field(default_factory=dict)
    core_periphery: dict[str, Any] = field(default_factory=dict)
    node_count: int = 0
    edge_count: int = 0
    flags: dict[str, str] = field(default_factory=dict)
    conventions: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def _guard(report: MetricsReport, name: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except MeasureError as exc:
        report.flags[name] = f"{type(exc).__name__}: {exc}"
        return None


def whole_report(net: CommunityNetwork, config: WholeConfig = WholeConfig(), view_name: str = "observed") -> MetricsReport:
    """Run every whole-network measure; failures become flags instead of aborting."""
    report = MetricsReport(view_name=view_name, node_count=net.n, edge_count=net.m)
    report.conventions = dict(CONVENTIONS, **{
        "fragmentation": CONVENTIONS["fragmentation"] if config.fragmentation_mode == "undirected"
        else "unreachable ordered pairs, directed",
        "seed": config.seed,
        "cp_iterations": config.cp_iterations,
        "assortativity_keys": list(config.assortativity_keys),
    })
    report.density = _guard(report, "density", density, net)
    report.fragmentation = _guard(report, "fragmentation", fragmentation, net, config.fragmentation_mode)
    report.degree_centralisation = {
        mode: _guard(report, f"degree_centralisation.{mode}", degree_centralisation, net, mode)
        for mode in ("all", "in", "out")
    }
    report.betweenness_centralisation = _guard(
        report, "betweenness_centralisation", betweenness_centralisation, net
    )
    report.transitivity = _guard(report, "transitivity", transitivity, net)

    mod = _guard(report, "modularity", modularity, net, config.seed)
    report.modularity = {
        "score": mod.score if mod else None,
        "community_count": mod.community_count if mod else (net.n or None),
        "seed": config.seed,
    }
    report.average_distance = _guard(report, "average_distance", average_distance, net)
    report.average_degree = _guard(report, "average_degree", average_degree, net)
    report.assortativity = {
        key: _guard(report, f"assortativity.{key}", assortativity, net, key)
        for key in config.assortativity_keys
    }

    cp: CorePeripheryResult | None = _guard(
        report, "core_periphery", core_periphery_fit,
        undirected_projection(net), config.cp_iterations, config.seed,
    )
    if cp is not None and cp.degenerate:
        report.flags["core_periphery"] = "degenerate: fit undefined, reported as 0"
    report.core_periphery = {
        "fit": cp.fit if cp else None,
        "iterations": config.cp_iterations,
        "core_ids": sorted(cp.core_ids) if cp else [],
    }
    return report
