"""Community network data model and derived views.

A :class:`CommunityNetwork` is a directed graph whose nodes are split into
egos (respondents) and alters (people mentioned by respondents who did not
answer themselves). Alters only ever receive ties.
"""

from __future__ import annotations

import logging
from collections import defaultdict, deque
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Mapping

from .errors import (
    ConflictError,
    DuplicateRespondentId,
    EmptyLabelSet,
    EmptyResult,
    InvalidNetwork,
    SelfLoop,
)

logger = logging.getLogger(__name__)

PersonId = str

LABEL_FLAGS = ("family", "friend", "coworker", "other", "from_project", "pre_existing")
SOCIAL_LABELS = ("family", "friend", "coworker", "other")

CONFLICT_POLICIES = ("reject", "keep-pre-existing")


@dataclass(frozen=True)
class TieLabels:
    """Relationship flags carried by one directed edge."""

    family: bool = False
    friend: bool = False
    coworker: bool = False
    other: bool = False
    from_project: bool = False
    pre_existing: bool = False

    @classmethod
    def of(cls, *names: str) -> "TieLabels":
        unknown = set(names) - set(LABEL_FLAGS)
        if unknown:
            raise ValueError(f"unknown tie labels: {sorted(unknown)}")
        return cls(**{name: True for name in names})

    def __or__(self, other: "TieLabels") -> "TieLabels":
        return TieLabels(**{f: getattr(self, f) or getattr(other, f) for f in LABEL_FLAGS})

    def __bool__(self) -> bool:
        return any(getattr(self, f) for f in LABEL_FLAGS)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(f for f in LABEL_FLAGS if getattr(self, f))

    @property
    def conflicting(self) -> bool:
        return self.from_project and self.pre_existing


@dataclass(frozen=True)
class PersonAttributes:
    gender: str = ""
    projects: frozenset[str] = frozenset()
    role_tags: frozenset[str] = frozenset()
    is_respondent: bool = False

    def __post_init__(self):
        # accept any iterable, store frozensets so instances stay hashable
        object.__setattr__(self, "projects", frozenset(self.projects))
        object.__setattr__(self, "role_tags", frozenset(self.role_tags))


@dataclass(frozen=True, eq=False)
class CommunityNetwork:
    """Directed ego/alter network.

    Treat instances as immutable: every derivation returns a new network.
    Adjacency indexes are built lazily and cached.
    """

    nodes: Mapping[PersonId, PersonAttributes]
    egos: frozenset[PersonId]
    alters: frozenset[PersonId]
    edges: Mapping[tuple[PersonId, PersonId], TieLabels]

    def __post_init__(self):
        object.__setattr__(self, "nodes", dict(sorted(self.nodes.items())))
        object.__setattr__(self, "egos", frozenset(self.egos))
        object.__setattr__(self, "alters", frozenset(self.alters))
        object.__setattr__(self, "edges", dict(sorted(self.edges.items())))
        self._validate()

    def _validate(self) -> None:
        if self.egos & self.alters:
            raise InvalidNetwork(f"nodes both ego and alter: {sorted(self.egos & self.alters)[:5]}")
        if (self.egos | self.alters) != set(self.nodes):
            raise InvalidNetwork("ego and alter sets do not cover the node set")
        for node, attrs in self.nodes.items():
            if attrs.is_respondent != (node in self.egos):
                raise InvalidNetwork(f"is_respondent flag of {node!r} disagrees with its role")
        for (s, t), labels in self.edges.items():
            if s == t:
                raise SelfLoop(f"self-loop on {s!r}")
            if s not in self.nodes or t not in self.nodes:
                raise InvalidNetwork(f"edge {s!r}->{t!r} references an unknown node")
            if not labels:
                raise EmptyLabelSet(f"edge {s!r}->{t!r} has no labels")
            if s in self.alters:
                raise InvalidNetwork(f"alter {s!r} has an outgoing edge")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CommunityNetwork):
            return NotImplemented
        return (
            self.nodes == other.nodes
            and self.egos == other.egos
            and self.alters == other.alters
            and self.edges == other.edges
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return (
            f"CommunityNetwork(egos={len(self.egos)}, alters={len(self.alters)}, "
            f"edges={len(self.edges)})"
        )

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def node_list(self) -> tuple[PersonId, ...]:
        """Nodes in canonical (sorted) order."""
        return tuple(self.nodes)

    @cached_property
    def successors(self) -> dict[PersonId, tuple[PersonId, ...]]:
        out: dict[PersonId, list[PersonId]] = {v: [] for v in self.nodes}
        for s, t in self.edges:
            out[s].append(t)
        return {v: tuple(ts) for v, ts in out.items()}

    @cached_property
    def predecessors(self) -> dict[PersonId, tuple[PersonId, ...]]:
        inc: dict[PersonId, list[PersonId]] = {v: [] for v in self.nodes}
        for s, t in self.edges:
            inc[t].append(s)
        return {v: tuple(sorted(ss)) for v, ss in inc.items()}

    def neighbors(self, node: PersonId) -> frozenset[PersonId]:
        """In- and out-neighbours of ``node``."""
        return frozenset(self.successors[node]) | frozenset(self.predecessors[node])

    def has_edge(self, source: PersonId, target: PersonId) -> bool:
        return (source, target) in self.edges


def build_network(
    respondents: Iterable[tuple[PersonId, PersonAttributes]],
    ties: Iterable[tuple[PersonId, PersonId, TieLabels]],
    conflict: str = "reject",
) -> CommunityNetwork:
    """Assemble a network from respondent records and their mentioned ties.

    Duplicate ties are merged by label union. Targets that are not
    respondents become alters with default attributes.
    """
    if conflict not in CONFLICT_POLICIES:
        raise ValueError(f"unknown conflict policy {conflict!r}")
    nodes: dict[PersonId, PersonAttributes] = {}
    for pid, attrs in respondents:
        if pid in nodes:
            raise DuplicateRespondentId(f"respondent id {pid!r} appears twice")
        nodes[pid] = replace(attrs, is_respondent=True)
    egos = frozenset(nodes)

    edges: dict[tuple[PersonId, PersonId], TieLabels] = {}
    alters: set[PersonId] = set()
    for source, target, labels in ties:
        if source == target:
            raise SelfLoop(f"tie {source!r}->{target!r} is a self-loop")
        if not labels:
            raise EmptyLabelSet(f"tie {source!r}->{target!r} has no labels")
        if source not in egos:
            raise InvalidNetwork(f"tie source {source!r} is not a respondent")
        if target not in egos:
            alters.add(target)
        key = (source, target)
        edges[key] = edges[key] | labels if key in edges else labels

    for key, labels in edges.items():
        if labels.conflicting:
            if conflict == "reject":
                raise ConflictError(
                    f"tie {key[0]!r}->{key[1]!r} is both from_project and pre_existing"
                )
            edges[key] = replace(labels, from_project=False)

    for alter in alters:
        nodes[alter] = PersonAttributes()
    return CommunityNetwork(nodes=nodes, egos=egos, alters=frozenset(alters), edges=edges)


def whole_view(net: CommunityNetwork) -> CommunityNetwork:
    """Subgraph induced on the egos."""
    return CommunityNetwork(
        nodes={v: a for v, a in net.nodes.items() if v in net.egos},
        egos=net.egos,
        alters=frozenset(),
        edges={(s, t): lab for (s, t), lab in net.edges.items() if t in net.egos},
    )


@dataclass(frozen=True)
class CounterfactualPolicy:
    """Edges carrying any flag in ``remove_flags`` are dropped."""

    remove_flags: frozenset[str] = frozenset({"from_project"})

    def __post_init__(self):
        object.__setattr__(self, "remove_flags", frozenset(self.remove_flags))
        unknown = self.remove_flags - set(LABEL_FLAGS)
        if unknown:
            raise ValueError(f"unknown label flags in policy: {sorted(unknown)}")

    def removes(self, labels: TieLabels) -> bool:
        return any(getattr(labels, f) for f in self.remove_flags)


DEFAULT_COUNTERFACTUAL = CounterfactualPolicy()


def counterfactual_view(
    net: CommunityNetwork, policy: CounterfactualPolicy = DEFAULT_COUNTERFACTUAL
) -> CommunityNetwork:
    """Drop policy-matching edges; the node set (and any new isolates) is kept."""
    return CommunityNetwork(
        nodes=net.nodes,
        egos=net.egos,
        alters=net.alters,
        edges={k: lab for k, lab in net.edges.items() if not policy.removes(lab)},
    )


@dataclass(frozen=True)
class KeepLargest:
    pass


@dataclass(frozen=True)
class MinSize:
    k: int


PrunePolicy = KeepLargest | MinSize


def parse_prune_policy(text: str) -> PrunePolicy | None:
    """Parse ``largest``, ``min:k`` or ``none``."""
    text = text.strip().lower()
    if text == "none":
        return None
    if text == "largest":
        return KeepLargest()
    if text.startswith("min:"):
        k = int(text[4:])
        if k < 1:
            raise ValueError("min:k needs k >= 1")
        return MinSize(k)
    raise ValueError(f"unknown prune policy {text!r}")


@dataclass(frozen=True)
class PruneReport:
    removed_components: tuple[tuple[int, tuple[PersonId, ...]], ...] = ()
    removed_node_count: int = 0
    removed_edge_count: int = 0


def weak_components(net: CommunityNetwork) -> list[tuple[PersonId, ...]]:
    """Weakly connected components, each sorted, ordered by their smallest id."""
    adj = undirected_projection(net).adj
    seen: set[PersonId] = set()
    comps = []
    for start in net.node_list:
        if start in seen:
            continue
        seen.add(start)
        comp = [start]
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
                    queue.append(w)
        comps.append(tuple(sorted(comp)))
    return comps


def prune_components(
    net: CommunityNetwork, policy: PrunePolicy
) -> tuple[CommunityNetwork, PruneReport]:
    comps = weak_components(net)
    if isinstance(policy, KeepLargest):
        # max size, ties to the component holding the smallest id
        best = min(comps, key=lambda c: (-len(c), c[0])) if comps else ()
        keep = [c for c in comps if c is best]
    elif isinstance(policy, MinSize):
        keep = [c for c in comps if len(c) >= policy.k]
    else:
        raise TypeError(f"unknown prune policy {policy!r}")
    kept_nodes = {v for c in keep for v in c}
    if net.n and not kept_nodes:
        raise EmptyResult(f"prune policy {policy} removes every node")

    removed = sorted(
        ((len(c), c) for c in comps if c[0] not in kept_nodes),
        key=lambda item: (-item[0], item[1]),
    )
    pruned = CommunityNetwork(
        nodes={v: a for v, a in net.nodes.items() if v in kept_nodes},
        egos=net.egos & kept_nodes,
        alters=net.alters & kept_nodes,
        edges={k: lab for k, lab in net.edges.items() if k[0] in kept_nodes},
    )
    report = PruneReport(
        removed_components=tuple(removed),
        removed_node_count=net.n - pruned.n,
        removed_edge_count=net.m - pruned.m,
    )
    if removed:
        logger.info(
            "pruned %d components (%d nodes, %d edges)",
            len(removed), report.removed_node_count, report.removed_edge_count,
        )
    return pruned, report


@dataclass(frozen=True, eq=False)
class SimpleGraph:
    """Undirected simple graph as a sorted node tuple plus neighbour sets."""

    nodes: tuple[PersonId, ...]
    adj: Mapping[PersonId, frozenset[PersonId]] = field(default_factory=dict)

    @property
    def edge_count(self) -> int:
        return sum(len(ns) for ns in self.adj.values()) // 2

    def edges(self) -> list[tuple[PersonId, PersonId]]:
        return sorted((u, v) for u in self.nodes for v in self.adj[u] if u < v)

    def degree(self, v: PersonId) -> int:
        return len(self.adj[v])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SimpleGraph):
            return NotImplemented
        return self.nodes == other.nodes and dict(self.adj) == dict(other.adj)

    __hash__ = None  # type: ignore[assignment]


def undirected_projection(net: CommunityNetwork) -> SimpleGraph:
    adj: dict[PersonId, set[PersonId]] = defaultdict(set)
    for s, t in net.edges:
        adj[s].add(t)
        adj[t].add(s)
    return SimpleGraph(
        nodes=net.node_list,
        adj={v: frozenset(adj.get(v, ())) for v in net.node_list},
    )


def label_counts(net: CommunityNetwork) -> dict[str, int]:
    """Number of edges carrying each label flag."""
    return {f: sum(1 for lab in net.edges.values() if getattr(lab, f)) for f in LABEL_FLAGS}


__all__ = [
    "LABEL_FLAGS",
    "SOCIAL_LABELS",
    "CommunityNetwork",
    "CounterfactualPolicy",
    "KeepLargest",
    "MinSize",
    "PersonAttributes",
    "PersonId",
    "PruneReport",
    "SimpleGraph",
    "TieLabels",
    "build_network",
    "counterfactual_view",
    "label_counts",
    "parse_prune_policy",
    "prune_components",
    "undirected_projection",
    "weak_components",
    "whole_view",
]
