import csv
import json
import subprocess
import sys
from math import comb

import pytest

from commnet.cli import main, read_network

from conftest import FIXTURES

INGEST = ["ingest", "--respondents", str(FIXTURES / "respondents.csv"), "--ties", str(FIXTURES / "ties.csv"),
          "--aliases", str(FIXTURES / "aliases.csv")]


@pytest.fixture
def ingested(tmp_path):
    out = tmp_path / "net"
    assert main(INGEST + ["--out", str(out)]) == 0
    return out


def data_rows(path):
    return list(csv.reader(line for line in path.read_text().splitlines() if not line.startswith("#")))


def test_ingest_writes_files(ingested):
    for name in ("nodes.csv", "edges.csv", "cleaning_report.csv", "cleaning_report.md", "prune_report.json",
                 "run.json"):
        assert (ingested / name).is_file()
    manifest = json.loads((ingested / "run.json").read_text())
    assert manifest["provenance"]["run_config"]["command"] == "ingest"
    assert read_network(ingested).egos == {"e1", "e2", "e3", "e4"}


def test_missing_ties_file(tmp_path, capsys):
    code = main(["ingest", "--respondents", str(FIXTURES / "respondents.csv"), "--ties",
                 str(tmp_path / "absent.csv"), "--out", str(tmp_path / "o")])
    assert code == 3
    assert "absent.csv" in capsys.readouterr().err


def test_conflict_row_reported(tmp_path, capsys):
    code = main(["ingest", "--respondents", str(FIXTURES / "respondents.csv"), "--ties",
                 str(FIXTURES / "ties_conflict.csv"), "--out", str(tmp_path / "o")])
    assert code == 6
    assert "line 3" in capsys.readouterr().err
    code = main(["ingest", "--respondents", str(FIXTURES / "respondents.csv"), "--ties",
                 str(FIXTURES / "ties_conflict.csv"), "--conflict", "keep-pre-existing", "--out", str(tmp_path / "o")])
    assert code == 0


def test_analyze_whole_counterfactual(ingested, tmp_path):
    out = tmp_path / "an"
    assert main(["analyze", "--input", str(ingested), "--whole", "--counterfactual", "--format", "csv",
                 "--out", str(out)]) == 0
    rows = data_rows(out / "whole.csv")
    assert rows[0][:4] == ["measure", "observed", "counterfactual", "delta"]
    assert len(rows) - 1 == 11
    assert not (out / "ego.csv").exists()


def test_analyze_ego_select(ingested, tmp_path):
    out = tmp_path / "an"
    assert main(["analyze", "--input", str(ingested), "--ego", "--select", "e1,e2", "--out", str(out)]) == 0
    header = (out / "ego.md").read_text().splitlines()[0]
    assert header == "|  | e1 | e2 |"
    assert (out / "brokerage_observed.md").is_file()


def test_analyze_unknown_ego(ingested, tmp_path):
    assert main(["analyze", "--input", str(ingested), "--ego", "--select", "zz", "--out", str(tmp_path / "x")]) == 10


def test_analyze_missing_input(tmp_path):
    assert main(["analyze", "--input", str(tmp_path / "none"), "--out", str(tmp_path / "x")]) == 3


def test_elda_shared_alter_ratio(tmp_path):
    net_dir = tmp_path / "n"
    net_dir.mkdir()
    (net_dir / "edges.csv").write_text(
        "source,target,family,friend,coworker,other,from_project,pre_existing\n"
        "e1,a,0,1,0,0,0,0\ne2,a,0,1,0,0,0,0\n")
    (net_dir / "nodes.csv").write_text("id,role,gender,projects,role_tags\ne1,ego,,,\ne2,ego,,,\na,alter,,,\n")
    out = tmp_path / "el"
    assert main(["elda", "--input", str(net_dir), "--format", "csv", "--out", str(out)]) == 0
    rows = {r[0]: r[1] for r in data_rows(out / "elda.csv")}
    assert rows["elda_ratio"] == "1"


def test_elda_top_k_and_pairs(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("cluster_sizes: [6, 6]\nfacilitator_count: 1\nseed: 3\n")
    net_dir = tmp_path / "n"
    assert main(["synth", "--config", str(cfg), "--out", str(net_dir)]) == 0
    out = tmp_path / "el"
    assert main(["elda", "--input", str(net_dir), "--emit", "ranking", "--top-k", "3", "--format", "csv",
                 "--out", str(out)]) == 0
    assert len(data_rows(out / "ranking_observed.csv")) - 1 <= 3
    assert main(["elda", "--input", str(net_dir), "--emit", "pairs", "--counterfactual", "--out", str(out)]) == 0
    for view in ("observed", "counterfactual"):
        rows = data_rows(out / f"pairs_{view}.csv")[1:]
        assert len(rows) == comb(12, 2)
        assert {r[2] for r in rows} <= {"direct", "ego_mediated", "alter_mediated", "disconnected"}


def test_export_formats(ingested, tmp_path):
    for fmt_name, name in (("graphml", "network.graphml"), ("dot", "network.dot"), ("edge-csv", "edges.csv")):
        out = tmp_path / fmt_name
        assert main(["export", "--input", str(ingested), "--format", fmt_name, "--out", str(out)]) == 0
        assert (out / name).is_file()
        assert (out / "palette.json").is_file()


def test_experiment_outputs(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("cluster_sizes: [6, 6]\nproject_tie_rate: 0.05\nseed: 1\n")
    out = tmp_path / "exp" / "rows.csv"
    assert main(["experiment", "--config", str(cfg), "--reps", "3", "--out", str(out)]) == 0
    assert len(data_rows(out)) == 4
    medians = json.loads((tmp_path / "exp" / "rows_medians.json").read_text())
    assert "betweenness_centralisation" in medians["medians"]


def test_invalid_config_exit_code(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("p_intra: 3\n")
    assert main(["synth", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 11


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["analyze"])
    assert exc.value.code == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "commnet", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("commnet ")
