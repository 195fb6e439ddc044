"""Seeded synthetic ego/alter networks and the intervention experiment.

Egos form planted clusters. Ordinary alters are mentioned by egos of one
cluster; facilitator alters are mentioned from every cluster. Project ties
are injected between clusters and flagged ``from_project`` so the
counterfactual view removes them.

Randomness comes from numpy's PCG64. A single network draws from
``SeedSequence(seed)``; replication ``i`` of an experiment draws from
``SeedSequence(seed, spawn_key=(i,))`` (what ``SeedSequence(seed).spawn``
yields). Draw order per network: ego genders, ego-ego tie uniforms and
labels (n x n each), ordinary alter mention uniforms, facilitator mention
uniforms, project tie uniforms.
"""

from __future__ import annotations

import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .elda import alter_ranking, elda_summary
from .errors import InvalidConfig
from .network import (
    SOCIAL_LABELS,
    CommunityNetwork,
    PersonAttributes,
    TieLabels,
    counterfactual_view,
    whole_view,
)
from .whole import WholeConfig, whole_report

PROJECT_NAME = "intervention"


@dataclass(frozen=True)
class SynthConfig:
    cluster_sizes: tuple[int, ...] = (15, 15, 15)
    p_intra: float = 0.3
    p_inter: float = 0.01
    alter_fraction: float = 0.5
    facilitator_count: int = 1
    project_tie_rate: float = 0.02
    seed: int = 0
    alter_mention_prob: float = 0.2
    facilitator_mention_prob: float = 0.3

    def __post_init__(self):
        object.__setattr__(self, "cluster_sizes", tuple(int(c) for c in self.cluster_sizes))
        self.validate()

    @property
    def ego_count(self) -> int:
        return sum(self.cluster_sizes)

    @property
    def alter_budget(self) -> int:
        return round(self.alter_fraction * self.ego_count)

    def validate(self) -> None:
        if not self.cluster_sizes or any(c < 1 for c in self.cluster_sizes):
            raise InvalidConfig("cluster_sizes must be a nonempty list of positive integers")
        for name in ("p_intra", "p_inter", "project_tie_rate", "alter_mention_prob", "facilitator_mention_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise InvalidConfig(f"{name}={p} is not a probability")
        if self.alter_fraction < 0:
            raise InvalidConfig("alter_fraction must be >= 0")
        if not 0 <= self.facilitator_count <= self.alter_budget:
            raise InvalidConfig(
                f"facilitator_count={self.facilitator_count} exceeds the alter budget {self.alter_budget}"
            )


def load_config(path: str | Path) -> SynthConfig:
    """Read a flat ``key: value`` YAML file into a :class:`SynthConfig`."""
    data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
    if not isinstance(data, dict):
        raise InvalidConfig(f"{path}: expected a flat key/value mapping")
    known = {f.name for f in fields(SynthConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise InvalidConfig(f"{path}: unknown key(s) {unknown}")
    nested = [k for k, v in data.items() if isinstance(v, dict)]
    if nested:
        raise InvalidConfig(f"{path}: nested values not allowed for {nested}")
    try:
        return SynthConfig(**data)
    except (TypeError, ValueError) as exc:
        raise InvalidConfig(f"{path}: {exc}") from exc


def _rng(seed: int, replication: int | None = None) -> np.random.Generator:
    seq = np.random.SeedSequence(seed) if replication is None else np.random.SeedSequence(seed, spawn_key=(replication,))
    return np.random.Generator(np.random.PCG64(seq))


def generate(config: SynthConfig, rng: np.random.Generator | None = None) -> CommunityNetwork:
    rng = rng or _rng(config.seed)
    n = config.ego_count
    width = len(str(n))
    egos = [f"e{i:0{width}d}" for i in range(n)]
    cluster = np.repeat(np.arange(len(config.cluster_sizes)), config.cluster_sizes)

    female = rng.random(n) < 0.5
    tie_u = rng.random((n, n))
    tie_label = rng.integers(0, len(SOCIAL_LABELS), size=(n, n))
    same = cluster[:, None] == cluster[None, :]
    tie_p = np.where(same, config.p_intra, config.p_inter)
    social = (tie_u < tie_p) & ~np.eye(n, dtype=bool)

    n_fac = config.facilitator_count
    n_ord = config.alter_budget - n_fac
    ord_cluster = np.arange(n_ord) % len(config.cluster_sizes)
    ord_u = rng.random((n, n_ord))
    ord_mention = (ord_u < config.alter_mention_prob) & (cluster[:, None] == ord_cluster[None, :])
    fac_mention = rng.random((n, n_fac)) < config.facilitator_mention_prob

    proj_u = rng.random((n, n))
    project = (proj_u < config.project_tie_rate) & ~same & ~social

    edges: dict[tuple[str, str], TieLabels] = {}
    for i, j in zip(*np.nonzero(social)):
        edges[(egos[i], egos[j])] = TieLabels.of(SOCIAL_LABELS[tie_label[i, j]])
    for i, j in zip(*np.nonzero(project)):
        edges[(egos[i], egos[j])] = TieLabels.of("coworker", "from_project")

    ord_ids = [f"a{k:0{width}d}" for k in range(n_ord)]
    fac_ids = [f"f{k:02d}" for k in range(n_fac)]
    for i, k in zip(*np.nonzero(ord_mention)):
        edges[(egos[i], ord_ids[k])] = TieLabels.of(SOCIAL_LABELS[(i + k) % len(SOCIAL_LABELS)])
    for i, k in zip(*np.nonzero(fac_mention)):
        edges[(egos[i], fac_ids[k])] = TieLabels.of("other")

    in_project = project.any(axis=0) | project.any(axis=1)
    nodes = {}
    for i, e in enumerate(egos):
        nodes[e] = PersonAttributes(
            gender="F" if female[i] else "M",
            projects={PROJECT_NAME} if in_project[i] else (),
            role_tags={f"cluster:{cluster[i]}"},
            is_respondent=True,
        )
    for k, a in enumerate(ord_ids):
        nodes[a] = PersonAttributes(role_tags={f"cluster:{ord_cluster[k]}"})
    for a in fac_ids:
        nodes[a] = PersonAttributes(role_tags={"facilitator"})
    return CommunityNetwork(
        nodes=nodes,
        egos=frozenset(egos),
        alters=frozenset(ord_ids) | frozenset(fac_ids),
        edges=edges,
    )


def facilitators(net: CommunityNetwork) -> frozenset[str]:
    return frozenset(a for a in net.alters if "facilitator" in net.nodes[a].role_tags)


EXPERIMENT_METRICS = (
    "density",
    "fragmentation",
    "betweenness_centralisation",
    "transitivity",
    "degree_centralisation",
    "modularity",
    "average_distance",
    "average_degree",
    "assortativity_cluster",
    "core_periphery",
    "elda_ratio",
)


def _metric_values(net: CommunityNetwork, seed: int) -> dict[str, float | None]:
    report = whole_report(
        whole_view(net),
        WholeConfig(seed=seed, assortativity_keys=("tag:cluster",)),
    )
    return {
        "density": report.density,
        "fragmentation": report.fragmentation,
        "betweenness_centralisation": report.betweenness_centralisation,
        "transitivity": report.transitivity,
        "degree_centralisation": report.degree_centralisation["all"],
        "modularity": report.modularity["score"],
        "average_distance": report.average_distance,
        "average_degree": report.average_degree,
        # heterophilic bridging, operationalised as assortativity by planted cluster
        "assortativity_cluster": report.assortativity["tag:cluster"],
        "core_periphery": report.core_periphery["fit"],
        "elda_ratio": elda_summary(net).elda_ratio,
    }


def run_replication(config: SynthConfig, replication: int) -> dict[str, Any]:
    """One experiment row: metrics on the observed network and its counterfactual."""
    net = generate(config, _rng(config.seed, replication))
    cf = counterfactual_view(net)
    obs_vals = _metric_values(net, config.seed)
    cf_vals = _metric_values(cf, config.seed)
    fac = facilitators(net)
    top3 = [a for a, _ in alter_ranking(cf, top_k=3).entries]
    row: dict[str, Any] = {
        "replication": replication,
        "removed_edges": net.m - cf.m,
        "cf_top3": ";".join(top3),
        "cf_top3_facilitators": sum(1 for a in top3 if a in fac),
    }
    for m in EXPERIMENT_METRICS:
        o, c = obs_vals[m], cf_vals[m]
        row[f"obs_{m}"] = o
        row[f"cf_{m}"] = c
        row[f"delta_{m}"] = None if o is None or c is None else o - c
    return row


@dataclass
class ExperimentRecord:
    config: SynthConfig
    rows: list[dict[str, Any]] = field(default_factory=list)
    medians: dict[str, float | None] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {"config": asdict(self.config), "rows": self.rows, "medians": self.medians}


def intervention_experiment(config: SynthConfig, replications: int, workers: int = 1) -> ExperimentRecord:
    """Replicate generate -> counterfactual -> measures; deltas are observed minus counterfactual."""
    if replications < 1:
        raise InvalidConfig("replications must be >= 1")
    indices = range(replications)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run_replication, [config] * replications, indices))
    else:
        rows = [run_replication(config, i) for i in indices]
    medians = {}
    for m in EXPERIMENT_METRICS:
        values = [r[f"delta_{m}"] for r in rows if r[f"delta_{m}"] is not None]
        medians[m] = statistics.median(values) if values else None
    return ExperimentRecord(config, rows, medians)
