from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from commnet.network import CommunityNetwork, PersonAttributes, TieLabels

FIXTURES = Path(__file__).parent / "fixtures"

# lines collected by the acceptance module, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def make_net(egos, alters=(), edges=(), attrs=None, labels=None) -> CommunityNetwork:
    """Small network from id lists; every edge gets ``labels`` (default friend)."""
    attrs = attrs or {}
    labels = labels or TieLabels.of("friend")
    nodes = {}
    for e in egos:
        nodes[e] = attrs.get(e, PersonAttributes())
        nodes[e] = PersonAttributes(nodes[e].gender, nodes[e].projects, nodes[e].role_tags, True)
    for a in alters:
        base = attrs.get(a, PersonAttributes())
        nodes[a] = PersonAttributes(base.gender, base.projects, base.role_tags, False)
    edge_map = {}
    for e in edges:
        if len(e) == 3:
            s, t, lab = e
            edge_map[(s, t)] = lab
        else:
            edge_map[tuple(e)] = labels
    return CommunityNetwork(nodes=nodes, egos=frozenset(egos), alters=frozenset(alters), edges=edge_map)


def digraph(n: int, edges) -> CommunityNetwork:
    """All-ego network on nodes 0..n-1 (ids zero-padded so sort order is numeric)."""
    ids = [f"v{i:02d}" for i in range(n)]
    return make_net(ids, edges=[(ids[s], ids[t]) for s, t in edges])


def random_ego_alter(rng: np.random.Generator, n_egos: int, n_alters: int, p: float, p_alter: float | None = None,
                     project_rate: float = 0.0) -> CommunityNetwork:
    p_alter = p if p_alter is None else p_alter
    egos = [f"e{i:02d}" for i in range(n_egos)]
    alters = [f"a{i:02d}" for i in range(n_alters)]
    edges = []
    for i, s in enumerate(egos):
        for j, t in enumerate(egos):
            if i != j and rng.random() < p:
                lab = TieLabels.of("friend", "from_project") if rng.random() < project_rate else TieLabels.of("friend")
                edges.append((s, t, lab))
        for a in alters:
            if rng.random() < p_alter:
                edges.append((s, a, TieLabels.of("other")))
    used = {t for _, t, _ in edges}
    return make_net(egos, [a for a in alters if a in used], edges)


@st.composite
def ego_alter_networks(draw, max_egos=10, max_alters=8):
    n_e = draw(st.integers(0, max_egos))
    n_a = draw(st.integers(0, max_alters))
    egos = [f"e{i:02d}" for i in range(n_e)]
    alters = [f"a{i:02d}" for i in range(n_a)]
    ego_pairs = [(s, t) for s in egos for t in egos if s != t]
    alter_pairs = [(s, a) for s in egos for a in alters]
    chosen = draw(st.lists(st.sampled_from(ego_pairs), unique=True)) if ego_pairs else []
    mentions = draw(st.lists(st.sampled_from(alter_pairs), unique=True)) if alter_pairs else []
    flags = draw(st.lists(st.booleans(), min_size=len(chosen), max_size=len(chosen)))
    edges = [
        (s, t, TieLabels.of("friend", "from_project") if f else TieLabels.of("friend"))
        for (s, t), f in zip(chosen, flags)
    ]
    edges += [(s, a, TieLabels.of("other")) for s, a in mentions]
    genders = draw(st.lists(st.sampled_from("FM"), min_size=n_e, max_size=n_e))
    attrs = {e: PersonAttributes(gender=g) for e, g in zip(egos, genders)}
    return make_net(egos, alters, edges, attrs)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES
