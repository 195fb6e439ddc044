"""Per-ego measures and Gould-Fernandez brokerage roles."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Iterable, Mapping, Sequence

from .errors import IsolatedEgo, TooFewNeighbors, TooFewNodes, UnknownEgo
from .network import CommunityNetwork, PersonId
from .paths import betweenness, bfs_distances
from .whole import attribute_values

logger = logging.getLogger(__name__)

ROLES = ("coordinator", "consultant", "gatekeeper", "representative", "liaison")

EGO_CONVENTIONS = {
    "neighbors": "union of in- and out-neighbours",
    "two_step_reach": "directed out-reach within 2 steps; normalized by alter count",
    "neighborhood_density": "directed edges among neighbours / k(k-1), percent",
    "neighborhood_avg_distance": "artifact-defined: mean 1/d over ordered neighbour pairs inside the neighbourhood",
    "betweenness_normalized": "directed betweenness, egos rescaled to sum 100",
}


def _check_ego(net: CommunityNetwork, ego: PersonId) -> None:
    if ego not in net.egos:
        raise UnknownEgo(f"{ego!r} is not an ego of this network")


@dataclass(frozen=True)
class Reach:
    count: int
    normalized: float | None


def two_step_reach(net: CommunityNetwork, ego: PersonId) -> Reach:
    _check_ego(net, ego)
    count = len(bfs_distances(net.successors, ego, max_depth=2)) - 1
    return Reach(count, count / len(net.alters) if net.alters else None)


def reach_efficiency(net: CommunityNetwork, ego: PersonId) -> float:
    _check_ego(net, ego)
    k = len(net.neighbors(ego))
    if k == 0:
        raise IsolatedEgo(f"{ego!r} has no neighbours")
    return 100.0 * two_step_reach(net, ego).count / k


def _neighborhood(net: CommunityNetwork, ego: PersonId) -> list[PersonId]:
    _check_ego(net, ego)
    nbrs = sorted(net.neighbors(ego))
    if len(nbrs) < 2:
        raise TooFewNeighbors(f"{ego!r} has {len(nbrs)} neighbour(s)")
    return nbrs


def neighborhood_density(net: CommunityNetwork, ego: PersonId) -> float:
    nbrs = _neighborhood(net, ego)
    inside = set(nbrs)
    k = len(nbrs)
    ties = sum(1 for v in nbrs for w in net.successors[v] if w in inside)
    return 100.0 * ties / (k * (k - 1))


def neighborhood_avg_distance(net: CommunityNetwork, ego: PersonId) -> float:
    nbrs = _neighborhood(net, ego)
    inside = set(nbrs)
    sub = {v: [w for w in net.successors[v] if w in inside] for v in nbrs}
    k = len(nbrs)
    total = 0.0
    for v in nbrs:
        for w, d in bfs_distances(sub, v).items():
            if d:
                total += 1.0 / d
    return total / (k * (k - 1))


def ego_betweenness_normalized(net: CommunityNetwork) -> tuple[dict[PersonId, float], bool]:
    """Ego betweenness rescaled to sum to 100; second item flags the all-zero case."""
    if net.n < 3:
        raise TooFewNodes("betweenness needs at least 3 nodes")
    cb = betweenness(net.successors, net.node_list)
    relaying_alters = [a for a in net.alters if cb[a] != 0.0]
    assert not relaying_alters, f"alters cannot relay paths: {relaying_alters[:3]}"
    total = sum(cb[e] for e in net.egos)
    egos = sorted(net.egos)
    if total == 0:
        return {e: 0.0 for e in egos}, True
    return {e: 100.0 * cb[e] / total for e in egos}, False


@dataclass
class EgoSummary:
    ego: PersonId
    neighbor_count: int = 0
    neighborhood_density: float | None = None
    neighborhood_avg_distance: float | None = None
    two_step_reach: int = 0
    two_step_reach_normalized: float | None = None
    reach_efficiency: float | None = None
    betweenness_normalized: float | None = None
    flags: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


EGO_MEASURES = (
    "neighborhood_density",
    "neighborhood_avg_distance",
    "two_step_reach",
    "reach_efficiency",
    "betweenness_normalized",
)


def ego_summaries(net: CommunityNetwork, egos: Sequence[PersonId] | None = None) -> dict[PersonId, EgoSummary]:
    """Ego measures for ``egos`` (default: all egos), keyed in the requested order."""
    egos = sorted(net.egos) if egos is None else list(egos)
    for e in egos:
        _check_ego(net, e)
    shares: dict[PersonId, float] = {}
    share_flag = None
    try:
        shares, all_zero = ego_betweenness_normalized(net)
        if all_zero:
            share_flag = "degenerate: no ego relays any shortest path"
    except TooFewNodes as exc:
        share_flag = f"TooFewNodes: {exc}"

    out = {}
    for e in egos:
        s = EgoSummary(ego=e, neighbor_count=len(net.neighbors(e)))
        reach = two_step_reach(net, e)
        s.two_step_reach = reach.count
        s.two_step_reach_normalized = reach.normalized
        if reach.normalized is None:
            s.flags["two_step_reach_normalized"] = "NoAlters: network has no alters"
        for name, fn in (
            ("neighborhood_density", neighborhood_density),
            ("neighborhood_avg_distance", neighborhood_avg_distance),
        ):
            try:
                setattr(s, name, fn(net, e))
            except TooFewNeighbors as exc:
                setattr(s, name, 0.0)
                s.flags[name] = f"TooFewNeighbors: {exc}"
        try:
            s.reach_efficiency = reach_efficiency(net, e)
        except IsolatedEgo as exc:
            s.flags["reach_efficiency"] = f"IsolatedEgo: {exc}"
        s.betweenness_normalized = shares.get(e, 0.0 if share_flag else None)
        if share_flag:
            s.flags["betweenness_normalized"] = share_flag
        out[e] = s
    return out


@dataclass
class BrokerageProfile:
    ego: PersonId
    grouping_key: str
    coordinator: int = 0
    consultant: int = 0
    gatekeeper: int = 0
    representative: int = 0
    liaison: int = 0

    @property
    def total(self) -> int:
        return sum(getattr(self, r) for r in ROLES)

    @property
    def dominant_role(self) -> str | None:
        if not self.total:
            return None
        return max(ROLES, key=lambda r: (getattr(self, r), -ROLES.index(r)))

    def to_dict(self) -> dict[str, Any]:
        return dict(asdict(self), total=self.total)


def classify_role(source_group: str, broker_group: str, sink_group: str) -> str:
    if source_group == broker_group == sink_group:
        return "coordinator"
    if source_group == sink_group:
        return "consultant"
    if source_group == broker_group:
        return "gatekeeper"
    if broker_group == sink_group:
        return "representative"
    return "liaison"


def brokerage_roles(
    net: CommunityNetwork, grouping: Mapping[PersonId, str], grouping_key: str = "custom"
) -> dict[PersonId, BrokerageProfile]:
    """Count open two-paths s->b->t (no s->t tie) through every ego b by role."""
    missing = [v for v in net.node_list if v not in grouping]
    if missing:
        logger.warning("%d node(s) without a group, assigned to 'unassigned'", len(missing))
    group = {v: grouping.get(v, "unassigned") for v in net.node_list}
    profiles = {}
    for b in sorted(net.egos):
        prof = BrokerageProfile(ego=b, grouping_key=grouping_key)
        for s in net.predecessors[b]:
            for t in net.successors[b]:
                if s == t or net.has_edge(s, t):
                    continue
                role = classify_role(group[s], group[b], group[t])
                setattr(prof, role, getattr(prof, role) + 1)
        profiles[b] = prof
    return profiles


def grouping_by_projects(net: CommunityNetwork, precedence: Iterable[str] = ()) -> dict[PersonId, str]:
    """One project per node: first in ``precedence``, else alphabetical; "none" if no project."""
    rank = {p: i for i, p in enumerate(precedence)}
    out = {}
    for v, a in net.nodes.items():
        if a.projects:
            out[v] = min(a.projects, key=lambda p: (rank.get(p, len(rank)), p))
        else:
            out[v] = "none"
    return out


def grouping_for(net: CommunityNetwork, key: str, precedence: Iterable[str] = ()) -> dict[PersonId, str]:
    """Resolve ``projects``, ``gender`` or ``tag:<prefix>`` to a node grouping."""
    if key == "projects":
        return grouping_by_projects(net, precedence)
    return attribute_values(net, key)


__all__ = [
    "ROLES",
    "BrokerageProfile",
    "EgoSummary",
    "Reach",
    "brokerage_roles",
    "classify_role",
    "ego_betweenness_normalized",
    "ego_summaries",
    "grouping_by_projects",
    "grouping_for",
    "neighborhood_avg_distance",
    "neighborhood_density",
    "reach_efficiency",
    "two_step_reach",
]
