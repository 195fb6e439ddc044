import pytest

from commnet.errors import AliasCycle, ConflictError, EmptyInput, MissingFile, SchemaMismatch
from commnet.ingest import (
    AliasMap,
    IngestConfig,
    IngestPaths,
    alter_id,
    ingest_pipeline,
    normalize_and_alias,
    normalize_name,
    parse_inputs,
    parse_ties,
)
from commnet.network import KeepLargest
from commnet.report import export_edges_csv, export_nodes_csv

RESP_HEADER = "respondent_id,display_name,gender,projects,role_tags\n"
TIE_HEADER = "respondent_id,target_name,labels,from_project,pre_existing\n"


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


@pytest.fixture
def resp_file(tmp_path):
    return write(tmp_path, "r.csv", RESP_HEADER + "e1,Amina,F,,\ne2,Baraka,M,radio,\ne3,Emanuel M.,M,,\n")


def test_parse_well_formed(tmp_path, resp_file):
    ties = write(tmp_path, "t.csv", TIE_HEADER + "e1,Baraka,friend,0,0\ne2,Zawadi,family,0,0\ne3,Amina,other,1,0\n")
    records, diags = parse_ties(ties, {"e1", "e2", "e3"})
    assert len(records) == 3 and diags == []


def test_parse_empty_target_is_skipped(tmp_path):
    ties = write(tmp_path, "t.csv", TIE_HEADER + "e1,,friend,0,0\ne1,Zawadi,friend,0,0\n")
    records, diags = parse_ties(ties, {"e1"})
    assert len(records) == 1
    assert diags[0].line == 2 and diags[0].column == "target_name"


def test_parse_multi_label_cell(tmp_path):
    ties = write(tmp_path, "t.csv", TIE_HEADER + "e1,Zawadi,friend;coworker,0,0\n")
    (rec,), _ = parse_ties(ties, {"e1"})
    labels = rec.tie_labels()
    assert labels.friend and labels.coworker and not labels.family


def test_parse_bad_cells(tmp_path):
    ties = write(tmp_path, "t.csv", TIE_HEADER + "e1,Zawadi,enemy,0,0\nzz,Zawadi,friend,0,0\ne1,Zawadi,friend,yes,0\n")
    records, diags = parse_ties(ties, {"e1"})
    assert records == []
    assert [d.column for d in diags] == ["labels", "respondent_id", "from_project"]


def test_parse_errors(tmp_path, resp_file):
    with pytest.raises(MissingFile, match="nope.csv"):
        parse_inputs(resp_file, tmp_path / "nope.csv")
    with pytest.raises(SchemaMismatch):
        parse_inputs(resp_file, write(tmp_path, "t.csv", "respondent_id,target\ne1,x\n"))
    with pytest.raises(EmptyInput):
        parse_inputs(write(tmp_path, "empty.csv", ""), resp_file)


def test_name_normalization():
    assert normalize_name("Hadija ") == normalize_name("hadija")
    assert alter_id("  Hadija") == alter_id("HADIJA")
    assert normalize_name("Emanuel   M.") == "emanuel m."


def test_alias_retargets_and_counts(tmp_path, resp_file):
    ties = write(tmp_path, "t.csv", TIE_HEADER + "e1,Emanueli,coworker,0,0\ne2,Zawadi,friend,0,0\n")
    aliases = AliasMap()
    aliases.add("Emanueli", "Emanuel M.")
    parsed, _ = parse_inputs(resp_file, ties)
    canonical, report = normalize_and_alias(parsed, aliases)
    assert canonical[0].target == "e3"
    assert report.ties_aliased == 1
    assert report.respondents_with_aliased_tie["coworker"] == 1


def test_no_alias_file_still_normalizes(tmp_path, resp_file):
    ties = write(tmp_path, "t.csv", TIE_HEADER + "e1,Zawadi,friend,0,0\ne2,  zawadi ,friend,0,0\ne3,baraka,friend,0,0\n")
    parsed, _ = parse_inputs(resp_file, ties)
    canonical, report = normalize_and_alias(parsed)
    assert report.ties_aliased == 0
    assert {t.target for t in canonical} == {"alter:zawadi", "e2"}
    assert report.ties_normalized == 2
    assert report.unresolved_names == ["zawadi"]


def test_alias_cycle_detected():
    aliases = AliasMap()
    aliases.add("Adija", "Hadija")
    aliases.add("Hadija", "e4")
    with pytest.raises(AliasCycle):
        aliases.validate()


def test_row_conflict_names_the_line(tmp_path, resp_file):
    ties = write(tmp_path, "t.csv", TIE_HEADER + "e1,Zawadi,friend,0,0\ne1,Baraka,friend,1,1\n")
    parsed, _ = parse_inputs(resp_file, ties)
    with pytest.raises(ConflictError, match="line 3"):
        normalize_and_alias(parsed)
    canonical, report = normalize_and_alias(parsed, conflict="keep-pre-existing")
    assert report.conflicts == [(3, "e1", "e2")]
    assert not canonical[1].labels.from_project


def test_merged_conflict_names_both_lines(tmp_path, resp_file):
    ties = write(tmp_path, "t.csv", TIE_HEADER + "e1,Zawadi,friend,1,0\ne1,zawadi,friend,0,1\n")
    parsed, _ = parse_inputs(resp_file, ties)
    with pytest.raises(ConflictError, match=r"\[2, 3\]"):
        normalize_and_alias(parsed)


def test_pipeline_on_fixture(fixtures_dir):
    paths = IngestPaths(fixtures_dir / "respondents.csv", fixtures_dir / "ties.csv", fixtures_dir / "aliases.csv")
    net, report, prune = ingest_pipeline(paths)
    assert net.egos == {"e1", "e2", "e3", "e4"}
    assert net.alters == {"alter:zawadi"}
    assert set(net.edges) == {
        ("e1", "e2"), ("e1", "e3"), ("e1", "e4"), ("e2", "e1"),
        ("e2", "alter:zawadi"), ("e3", "alter:zawadi"), ("e4", "alter:zawadi"),
    }
    assert net.edges[("e1", "e3")].from_project
    assert report.ties_aliased == 2
    assert prune.removed_node_count == 0
    # counts agree with the emitted network
    for label, count in report.respondents_with_tie.items():
        assert count == len({s for (s, _), lab in net.edges.items() if getattr(lab, label)})


def test_pipeline_prunes(tmp_path, resp_file):
    ties = write(tmp_path, "t.csv", TIE_HEADER + "e1,Baraka,friend,0,0\ne1,Zawadi,friend,0,0\ne3,Juma,friend,0,0\n")
    net, _, prune = ingest_pipeline(IngestPaths(resp_file, ties), IngestConfig(prune=KeepLargest()))
    assert set(net.nodes) == {"e1", "e2", "alter:zawadi"}
    assert prune.removed_node_count == 2


def test_pipeline_is_byte_deterministic(fixtures_dir):
    paths = IngestPaths(fixtures_dir / "respondents.csv", fixtures_dir / "ties.csv", fixtures_dir / "aliases.csv")
    a, _, _ = ingest_pipeline(paths)
    b, _, _ = ingest_pipeline(paths)
    assert export_edges_csv(a) == export_edges_csv(b)
    assert export_nodes_csv(a) == export_nodes_csv(b)
