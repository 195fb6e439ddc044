import pytest
from hypothesis import given, settings

from commnet.errors import (
    ConflictError,
    DuplicateRespondentId,
    EmptyLabelSet,
    EmptyResult,
    InvalidNetwork,
    SelfLoop,
)
from commnet.network import (
    CounterfactualPolicy,
    KeepLargest,
    MinSize,
    PersonAttributes,
    TieLabels,
    build_network,
    counterfactual_view,
    label_counts,
    parse_prune_policy,
    prune_components,
    undirected_projection,
    weak_components,
    whole_view,
)

from conftest import ego_alter_networks, make_net

F = TieLabels.of("friend")


def resp(*ids):
    return [(i, PersonAttributes()) for i in ids]


def test_build_basic():
    net = build_network(resp("e1", "e2"), [("e1", "e2", F), ("e1", "a", TieLabels.of("family"))])
    assert net.egos == {"e1", "e2"}
    assert net.alters == {"a"}
    assert net.m == 2
    assert not net.nodes["a"].is_respondent


def test_duplicate_ties_merge_labels():
    net = build_network(resp("e1", "e2"), [("e1", "e2", F), ("e1", "e2", TieLabels.of("coworker"))])
    assert net.m == 1
    assert net.edges[("e1", "e2")].names == ("friend", "coworker")


def test_build_rejects_bad_input():
    with pytest.raises(SelfLoop):
        build_network(resp("e1"), [("e1", "e1", F)])
    with pytest.raises(EmptyLabelSet):
        build_network(resp("e1", "e2"), [("e1", "e2", TieLabels())])
    with pytest.raises(DuplicateRespondentId):
        build_network(resp("e1", "e1"), [])
    with pytest.raises(InvalidNetwork):
        build_network(resp("e1"), [("x", "e1", F)])


def test_conflict_policies():
    ties = [("e1", "e2", TieLabels.of("friend", "from_project")), ("e1", "e2", TieLabels.of("pre_existing"))]
    with pytest.raises(ConflictError):
        build_network(resp("e1", "e2"), ties)
    net = build_network(resp("e1", "e2"), ties, conflict="keep-pre-existing")
    labels = net.edges[("e1", "e2")]
    assert labels.pre_existing and not labels.from_project


def test_alter_cannot_have_out_edges():
    with pytest.raises(InvalidNetwork):
        make_net(["e1"], ["a"], [("a", "e1")])


def test_whole_view():
    net = make_net(["e1", "e2"], ["a"], [("e1", "e2"), ("e1", "a")])
    w = whole_view(net)
    assert (w.n, w.m) == (2, 1)
    assert w.alters == frozenset()
    net2 = make_net(["e1", "e2", "e3"], ["a"], [("e1", "a")])
    assert (whole_view(net2).n, whole_view(net2).m) == (3, 0)


def test_counterfactual_view():
    proj = TieLabels.of("friend", "from_project")
    net = make_net(["e1", "e2"], edges=[("e1", "e2", proj), ("e2", "e1", F)])
    cf = counterfactual_view(net)
    assert set(cf.edges) == {("e2", "e1")}
    assert cf.nodes == net.nodes
    plain = make_net(["e1", "e2"], edges=[("e1", "e2")])
    assert counterfactual_view(plain) == plain


def test_custom_counterfactual_policy():
    net = make_net(["e1", "e2"], edges=[("e1", "e2", TieLabels.of("coworker"))])
    cf = counterfactual_view(net, CounterfactualPolicy(frozenset({"coworker"})))
    assert cf.m == 0


@settings(max_examples=100, deadline=None)
@given(ego_alter_networks())
def test_counterfactual_keeps_nodes_and_drops_only_project_ties(net):
    cf = counterfactual_view(net)
    assert cf.nodes == net.nodes
    assert set(cf.edges) <= set(net.edges)
    assert all(not lab.from_project for lab in cf.edges.values())
    assert all(net.edges[k].from_project for k in set(net.edges) - set(cf.edges))


def _two_components():
    big = [f"b{i:02d}" for i in range(10)]
    small = ["s0", "s1", "s2"]
    edges = [(big[i], big[i + 1]) for i in range(9)] + [("s0", "s1"), ("s1", "s2")]
    return make_net(big + small, edges=edges)


def test_prune_keep_largest():
    net = _two_components()
    out, rep = prune_components(net, KeepLargest())
    assert out.n == 10
    assert rep.removed_node_count == 3
    assert rep.removed_edge_count == 2
    assert rep.removed_components == ((3, ("s0", "s1", "s2")),)


def test_prune_min_size_identity():
    net = _two_components()
    out, rep = prune_components(net, MinSize(1))
    assert out == net
    assert rep.removed_node_count == 0


def test_prune_min_size_everything_raises():
    with pytest.raises(EmptyResult):
        prune_components(_two_components(), MinSize(50))


def test_keep_largest_tie_broken_by_smallest_id():
    net = make_net(["x1", "x2", "a1", "a2"], edges=[("x1", "x2"), ("a1", "a2")])
    out, _ = prune_components(net, KeepLargest())
    assert set(out.nodes) == {"a1", "a2"}


@settings(max_examples=100, deadline=None)
@given(ego_alter_networks())
def test_prune_report_matches_difference(net):
    if net.n == 0:
        return
    out, rep = prune_components(net, KeepLargest())
    assert rep.removed_node_count == net.n - out.n
    assert rep.removed_edge_count == net.m - out.m
    assert sum(len(c) for c in weak_components(out)) == out.n


def test_parse_prune_policy():
    assert parse_prune_policy("none") is None
    assert isinstance(parse_prune_policy("largest"), KeepLargest)
    assert parse_prune_policy("min:4") == MinSize(4)
    with pytest.raises(ValueError):
        parse_prune_policy("min:x")


def test_undirected_projection():
    net = make_net(["a", "b", "c"], edges=[("a", "b"), ("b", "a")])
    proj = undirected_projection(net)
    assert proj.edges() == [("a", "b")]
    assert undirected_projection(make_net(["a", "b"])).edge_count == 0
    cyc = undirected_projection(make_net(["a", "b", "c"], edges=[("a", "b"), ("b", "c"), ("c", "a")]))
    assert cyc.edge_count == 3 and all(cyc.degree(v) == 2 for v in cyc.nodes)


def test_label_counts():
    net = make_net(["e1", "e2"], ["a"], [("e1", "e2", TieLabels.of("friend", "from_project")), ("e1", "a")])
    counts = label_counts(net)
    assert counts["friend"] == 2
    assert counts["from_project"] == 1
    assert counts["family"] == 0
