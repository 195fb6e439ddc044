"""Command-line entry point.

Subcommands: ingest, analyze, elda, export, synth, experiment. Data goes to
files under ``--out``; diagnostics go to stderr. Every output file embeds
the tool version and the resolved run configuration.

Exit codes: 0 ok, 1 other error, 2 usage, 3 missing file, 4 schema
mismatch, 5 empty input, 6 tie conflict, 7 alias cycle, 8 invalid network,
9 measure error, 10 unknown ego / ego set mismatch, 11 invalid config,
12 report error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .ego import brokerage_roles, ego_summaries, grouping_for
from .elda import alter_ranking, elda_summary, iter_pairs
from .errors import CommnetError, MissingFile
from .ingest import IngestConfig, IngestPaths, ingest_pipeline
from .network import CommunityNetwork, counterfactual_view, parse_prune_policy, whole_view
from .report import (
    export_edges_csv,
    export_graph,
    export_nodes_csv,
    import_network,
    render_brokerage,
    render_cleaning_report,
    render_comparison,
    render_ego_table,
    render_elda,
    render_pairs,
    render_ranking,
    render_report,
    suggested_palette,
)
from .synth import generate, intervention_experiment, load_config
from .whole import WholeConfig, whole_report

logger = logging.getLogger("commnet")

EXT = {"markdown": "md", "md": "md", "csv": "csv", "json": "json"}


class Output:
    """Writes files under one directory, stamping each with provenance."""

    def __init__(self, directory: Path, run_config: dict[str, Any]):
        self.dir = directory
        self.run_config = run_config
        self.dir.mkdir(parents=True, exist_ok=True)
        self.stamp = json.dumps({"tool": "commnet", "version": __version__, "run_config": run_config},
                                sort_keys=True)

    def write(self, name: str, text: str) -> Path:
        path = self.dir / name
        suffix = path.suffix
        if suffix == ".json":
            doc = json.loads(text)
            doc["provenance"] = json.loads(self.stamp)
            text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
        elif suffix == ".csv":
            text = f"# {self.stamp}\n" + text
        elif suffix == ".md":
            text = text + f"\n<!-- {self.stamp} -->\n"
        elif suffix in (".graphml", ".dot"):
            marker = ("<!-- ", " -->") if suffix == ".graphml" else ("// ", "")
            text = text + f"{marker[0]}{self.stamp}{marker[1]}\n"
        path.write_text(text, encoding="utf-8", newline="")
        logger.info("wrote %s", path)
        return path

    def manifest(self) -> None:
        self.write("run.json", json.dumps({"kind": "run"}))


def read_network(directory: str | Path) -> CommunityNetwork:
    directory = Path(directory)
    edges, nodes = directory / "edges.csv", directory / "nodes.csv"
    for p in (edges, nodes):
        if not p.is_file():
            raise MissingFile(f"network file not found: {p}")
    return import_network(edges.read_text(encoding="utf-8"), nodes.read_text(encoding="utf-8"))


def write_network(out: Output, net: CommunityNetwork) -> None:
    out.write("nodes.csv", export_nodes_csv(net))
    out.write("edges.csv", export_edges_csv(net))


def _run_config(args: argparse.Namespace) -> dict[str, Any]:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "verbose")}
    return json.loads(json.dumps(cfg, default=str))


def _whole_config(args) -> WholeConfig:
    return WholeConfig(
        seed=args.seed,
        cp_iterations=args.cp_iterations,
        fragmentation_mode=args.fragmentation_mode,
        assortativity_keys=tuple(k for k in args.assortativity_keys.split(",") if k),
    )


def cmd_ingest(args) -> int:
    paths = IngestPaths(Path(args.respondents), Path(args.ties), Path(args.aliases) if args.aliases else None)
    config = IngestConfig(conflict=args.conflict, prune=parse_prune_policy(args.prune))
    net, cleaning, prune = ingest_pipeline(paths, config)
    for d in cleaning.diagnostics:
        print(f"warning: {d}", file=sys.stderr)
    out = Output(Path(args.out), _run_config(args))
    write_network(out, net)
    out.write("cleaning_report.csv", render_cleaning_report(cleaning, "csv"))
    out.write("cleaning_report.md", render_cleaning_report(cleaning, "markdown"))
    out.write("prune_report.json", json.dumps({
        "kind": "prune_report",
        "removed_node_count": prune.removed_node_count,
        "removed_edge_count": prune.removed_edge_count,
        "removed_components": [{"size": s, "nodes": list(ids)} for s, ids in prune.removed_components],
    }))
    out.manifest()
    return 0


def cmd_analyze(args) -> int:
    net = read_network(args.input)
    out = Output(Path(args.out), _run_config(args))
    ext = EXT[args.format]
    both = not (args.whole or args.ego)
    cf = counterfactual_view(net) if args.counterfactual else None

    if args.whole or both:
        config = _whole_config(args)
        observed = whole_report(whole_view(net), config, view_name="observed")
        if cf is not None:
            counter = whole_report(whole_view(cf), config, view_name="counterfactual")
            out.write(f"whole.{ext}", render_comparison(observed, counter, args.format))
        else:
            out.write(f"whole.{ext}", render_report(observed, args.format))

    if args.ego or both:
        egos = [e for e in args.select.split(",") if e] if args.select else sorted(net.egos)
        obs_summary = ego_summaries(net, egos)
        cf_summary = ego_summaries(cf, egos) if cf is not None else None
        out.write(f"ego.{ext}", render_ego_table(egos, obs_summary, cf_summary, args.format))
        precedence = [p for p in args.project_precedence.split(",") if p]
        for view_name, view in (("observed", net), ("counterfactual", cf)):
            if view is None:
                continue
            grouping = grouping_for(view, args.brokerage_grouping, precedence)
            profiles = brokerage_roles(view, grouping, args.brokerage_grouping)
            selected = {e: profiles[e] for e in egos}
            out.write(f"brokerage_{view_name}.{ext}", render_brokerage(selected, args.format))
    out.manifest()
    return 0


def cmd_elda(args) -> int:
    net = read_network(args.input)
    out = Output(Path(args.out), _run_config(args))
    views = {"observed": net}
    if args.counterfactual:
        views["counterfactual"] = counterfactual_view(net)
    ext = EXT[args.format]
    if args.emit == "pairs":
        for name, view in views.items():
            out.write(f"pairs_{name}.csv", render_pairs(iter_pairs(view)))
    elif args.emit == "ranking":
        for name, view in views.items():
            out.write(f"ranking_{name}.{ext}", render_ranking(alter_ranking(view, args.top_k), args.format))
    else:
        summaries = {name: elda_summary(view) for name, view in views.items()}
        rankings = {name: alter_ranking(view, args.top_k) for name, view in views.items()}
        out.write(f"elda.{ext}", render_elda(summaries, rankings, args.format))
    out.manifest()
    return 0


def cmd_export(args) -> int:
    net = read_network(args.input)
    if args.counterfactual:
        net = counterfactual_view(net)
    out = Output(Path(args.out), _run_config(args))
    suffix = {"graphml": "graphml", "dot": "dot", "edge-csv": "csv"}
    if args.format == "edge-csv":
        write_network(out, net)
    else:
        out.write(f"network.{suffix.get(args.format, args.format)}", export_graph(net, args.format))
    out.write("palette.json", json.dumps(suggested_palette(net)))
    out.manifest()
    return 0


def cmd_synth(args) -> int:
    config = load_config(args.config)
    net = generate(config)
    run_config = dict(_run_config(args), synth=asdict(config))
    out = Output(Path(args.out), run_config)
    write_network(out, net)
    out.manifest()
    return 0


def cmd_experiment(args) -> int:
    config = load_config(args.config)
    record = intervention_experiment(config, args.reps, workers=args.workers)
    run_config = dict(_run_config(args), synth=asdict(config))
    out_path = Path(args.out)
    out = Output(out_path.parent if str(out_path.parent) else Path("."), run_config)
    buf = io.StringIO()
    columns = list(record.rows[0])
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in record.rows:
        writer.writerow({k: "" if v is None else v for k, v in row.items()})
    out.write(out_path.name, buf.getvalue())
    out.write(out_path.stem + "_medians.json", json.dumps({"kind": "experiment_medians", "medians": record.medians}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="commnet", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"commnet {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def measures(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--cp-iterations", type=int, default=20)
        p.add_argument("--format", choices=["md", "markdown", "csv", "json"], default="md")

    p = sub.add_parser("ingest", help="parse questionnaire CSVs into a network")
    p.add_argument("--respondents", required=True)
    p.add_argument("--ties", required=True)
    p.add_argument("--aliases")
    p.add_argument("--prune", default="none", help="largest | min:k | none")
    p.add_argument("--conflict", choices=["reject", "keep-pre-existing"], default="reject")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("analyze", help="whole-network and ego-network measures")
    p.add_argument("--input", required=True, help="directory holding nodes.csv and edges.csv")
    p.add_argument("--whole", action="store_true")
    p.add_argument("--ego", action="store_true")
    p.add_argument("--select", default="", help="comma-separated ego ids for the ego table")
    p.add_argument("--counterfactual", action="store_true", help="also analyse the view without project ties")
    p.add_argument("--fragmentation-mode", choices=["undirected", "directed"], default="undirected")
    p.add_argument("--assortativity-keys", default="gender,projects")
    p.add_argument("--brokerage-grouping", default="projects", help="projects | gender | tag:<prefix>")
    p.add_argument("--project-precedence", default="")
    p.add_argument("--out", required=True)
    measures(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("elda", help="alter-mediated ego pairs and alter ranking")
    p.add_argument("--input", required=True)
    p.add_argument("--counterfactual", action="store_true")
    p.add_argument("--top-k", type=int, default=10)
    p.add_argument("--emit", choices=["pairs", "summary", "ranking"], default="summary")
    p.add_argument("--format", choices=["md", "markdown", "csv", "json"], default="md")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_elda)

    p = sub.add_parser("export", help="export a network for external visualisation")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=["graphml", "dot", "edge-csv"], default="graphml")
    p.add_argument("--counterfactual", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("synth", help="generate a synthetic network")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("experiment", help="run the intervention experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--reps", type=int, default=50)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True, help="CSV file for per-replication rows")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except CommnetError as exc:
        print(f"error [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
