"""Alter mediation of ego pairs (2-ELDA).

Every unordered ego pair gets exactly one class, by precedence:

* ``direct``: a tie in either direction;
* ``ego_mediated``: some third ego is tied (either direction) to both;
* ``alter_mediated``: both egos point to a common alter;
* ``disconnected``: none of the above.

The aggregate ratio is the share of alter-mediated pairs among all pairs;
R(a) counts the alter-mediated pairs that alter ``a`` mediates.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, field
from itertools import combinations
from typing import Any, Iterator

from .errors import EgoSetMismatch, NotAnEgo, SamePair, TooFewEgos
from .network import CommunityNetwork, PersonId

DIRECT = "direct"
EGO_MEDIATED = "ego_mediated"
ALTER_MEDIATED = "alter_mediated"
DISCONNECTED = "disconnected"
PAIR_CLASSES = (DIRECT, EGO_MEDIATED, ALTER_MEDIATED, DISCONNECTED)


@dataclass(frozen=True)
class PairClass:
    pair: tuple[PersonId, PersonId]
    kind: str
    mediators: tuple[PersonId, ...] = ()


class _Index:
    """Per-ego ego-neighbour sets and out-alter sets, plus the inverted alter lists."""

    def __init__(self, net: CommunityNetwork):
        self.net = net
        self.ego_nbrs: dict[PersonId, set[PersonId]] = {e: set() for e in net.egos}
        self.out_alters: dict[PersonId, set[PersonId]] = {e: set() for e in net.egos}
        self.mentioned_by: dict[PersonId, list[PersonId]] = defaultdict(list)
        for s, t in net.edges:
            if t in net.egos:
                self.ego_nbrs[s].add(t)
                self.ego_nbrs[t].add(s)
            else:
                self.out_alters[s].add(t)
                self.mentioned_by[t].append(s)

    def classify(self, e1: PersonId, e2: PersonId) -> PairClass:
        pair = (e1, e2) if e1 < e2 else (e2, e1)
        if e2 in self.ego_nbrs[e1]:
            return PairClass(pair, DIRECT)
        if self.ego_nbrs[e1] & self.ego_nbrs[e2]:
            return PairClass(pair, EGO_MEDIATED)
        shared = self.out_alters[e1] & self.out_alters[e2]
        if shared:
            return PairClass(pair, ALTER_MEDIATED, tuple(sorted(shared)))
        return PairClass(pair, DISCONNECTED)

    def alter_pairs(self) -> dict[tuple[PersonId, PersonId], list[PersonId]]:
        """Alter-qualifying pairs (not direct, not ego-mediated) with their mediators."""
        candidates: dict[tuple[PersonId, PersonId], list[PersonId]] = defaultdict(list)
        for a in sorted(self.mentioned_by):
            for e1, e2 in combinations(sorted(self.mentioned_by[a]), 2):
                candidates[(e1, e2)].append(a)
        return {
            p: alters for p, alters in candidates.items()
            if p[1] not in self.ego_nbrs[p[0]] and not (self.ego_nbrs[p[0]] & self.ego_nbrs[p[1]])
        }


def _require_egos(net: CommunityNetwork) -> None:
    if len(net.egos) < 2:
        raise TooFewEgos(f"need at least 2 egos, got {len(net.egos)}")


def classify_pair(net: CommunityNetwork, e1: PersonId, e2: PersonId) -> PairClass:
    for e in (e1, e2):
        if e not in net.egos:
            raise NotAnEgo(f"{e!r} is not an ego")
    if e1 == e2:
        raise SamePair(f"pair ({e1!r}, {e2!r}) repeats one ego")
    return _Index(net).classify(e1, e2)


def iter_pairs(net: CommunityNetwork) -> Iterator[PairClass]:
    """Every unordered ego pair in canonical order with its class."""
    idx = _Index(net)
    for e1, e2 in combinations(sorted(net.egos), 2):
        yield idx.classify(e1, e2)


@dataclass
class EldaSummary:
    ego_count: int
    total_pairs: int
    direct: int
    ego_mediated: int
    alter_mediated_distinct: int
    alter_mediated_triplets: int
    disconnected: int
    elda_ratio: float
    triplet_ratio: float
    involved_alters: int
    involved_egos: int

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def _summary_and_scores(net: CommunityNetwork) -> tuple[EldaSummary, Counter]:
    _require_egos(net)
    idx = _Index(net)
    n_e = len(net.egos)
    total = n_e * (n_e - 1) // 2

    direct_pairs = {(min(s, t), max(s, t)) for s, t in net.edges if t in net.egos}
    bridged = set()
    for e3 in net.egos:
        nbrs = sorted(idx.ego_nbrs[e3])
        bridged.update(combinations(nbrs, 2))
    bridged -= direct_pairs

    alter_pairs = idx.alter_pairs()
    scores = Counter()
    egos_seen = set()
    for (e1, e2), alters in alter_pairs.items():
        scores.update(alters)
        egos_seen.update((e1, e2))
    triplets = sum(scores.values())
    distinct = len(alter_pairs)
    summary = EldaSummary(
        ego_count=n_e,
        total_pairs=total,
        direct=len(direct_pairs),
        ego_mediated=len(bridged),
        alter_mediated_distinct=distinct,
        alter_mediated_triplets=triplets,
        disconnected=total - len(direct_pairs) - len(bridged) - distinct,
        elda_ratio=distinct / total,
        triplet_ratio=triplets / total,
        involved_alters=len(scores),
        involved_egos=len(egos_seen),
    )
    return summary, scores


def elda_summary(net: CommunityNetwork) -> EldaSummary:
    return _summary_and_scores(net)[0]


@dataclass(frozen=True)
class AlterRanking:
    entries: tuple[tuple[PersonId, int], ...]

    def as_dict(self) -> dict[PersonId, int]:
        return dict(self.entries)


def alter_scores(net: CommunityNetwork) -> dict[PersonId, int]:
    """R(a) for every alter, zeros included."""
    _, scores = _summary_and_scores(net)
    return {a: scores.get(a, 0) for a in sorted(net.alters)}


def alter_ranking(net: CommunityNetwork, top_k: int | None = None) -> AlterRanking:
    """Alters by R(a) descending, ties by id; truncated to ``top_k`` when given."""
    ranked = sorted(alter_scores(net).items(), key=lambda item: (-item[1], item[0]))
    if top_k is not None:
        ranked = ranked[:top_k]
    return AlterRanking(tuple(ranked))


@dataclass
class EldaComparison:
    observed: EldaSummary
    counterfactual: EldaSummary
    ranking_deltas: dict[PersonId, tuple[int, int, int]] = field(default_factory=dict)
    changed_pairs: list[tuple[PersonId, PersonId, str, str]] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "observed": self.observed.to_dict(),
            "counterfactual": self.counterfactual.to_dict(),
            "ranking_deltas": {
                a: {"observed": o, "counterfactual": c, "delta": d}
                for a, (o, c, d) in self.ranking_deltas.items()
            },
            "changed_pairs": [list(p) for p in self.changed_pairs],
        }


def elda_compare(net: CommunityNetwork, counterfactual: CommunityNetwork) -> EldaComparison:
    """Run the measure on both views; report R(a) deltas and pairs whose class changed."""
    if net.egos != counterfactual.egos:
        raise EgoSetMismatch("views do not share the same egos")
    obs_summary, obs_scores = _summary_and_scores(net)
    cf_summary, cf_scores = _summary_and_scores(counterfactual)
    deltas = {}
    for a in sorted(set(obs_scores) | set(cf_scores)):
        o, c = obs_scores.get(a, 0), cf_scores.get(a, 0)
        deltas[a] = (o, c, c - o)
    changed = [
        (p.pair[0], p.pair[1], p.kind, q.kind)
        for p, q in zip(iter_pairs(net), iter_pairs(counterfactual))
        if p.kind != q.kind
    ]
    return EldaComparison(obs_summary, cf_summary, deltas, changed)
