"""Comparison tables, ego tables and graph import/export.

Rendering never recomputes measures: every number printed comes from the
reports handed in (the delta column is the only derived value).
"""

from __future__ import annotations

import csv
import io
import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

from .ego import EGO_CONVENTIONS, ROLES, BrokerageProfile, EgoSummary
from .elda import AlterRanking, EldaSummary, PairClass
from .errors import ConventionMismatch, UnknownEgo, UnsupportedFormat
from .ingest import REPORT_TYPES, CleaningReport
from .network import LABEL_FLAGS, CommunityNetwork, PersonAttributes, TieLabels
from .whole import MetricsReport

SCHEMA_VERSION = 1

TEXT_FORMATS = ("markdown", "csv", "json")
GRAPH_FORMATS = ("graphml", "dot", "edge-csv")

EDGE_CSV_COLUMNS = ("source", "target") + LABEL_FLAGS
NODE_CSV_COLUMNS = ("id", "role", "gender", "projects", "role_tags")


def fmt(value: float | int | None) -> str:
    """Four significant digits; ``n/a`` for missing values."""
    if value is None:
        return "n/a"
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    text = f"{value:.4g}"
    return "0" if text == "-0" else text


def _check_format(fmt_name: str, allowed: Sequence[str]) -> str:
    if fmt_name == "md":
        fmt_name = "markdown"
    if fmt_name not in allowed:
        raise UnsupportedFormat(f"format {fmt_name!r} not in {list(allowed)}")
    return fmt_name


def _csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _md_table(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> list[str]:
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    # escape pipes so paired "x | y" cells stay in one column
    lines += ["| " + " | ".join(str(c).replace("|", "\\|") for c in row) + " |" for row in rows]
    return lines


def _json_text(doc: Mapping[str, Any]) -> str:
    return json.dumps(dict(doc, schema_version=SCHEMA_VERSION), indent=2, sort_keys=True) + "\n"


@dataclass(frozen=True)
class MeasureRow:
    key: str
    label: str
    value: float | None
    detail: str = ""


def report_rows(report: MetricsReport) -> list[MeasureRow]:
    """The whole-network row set for one view, in display order."""
    cp = report.core_periphery
    deg = report.degree_centralisation
    mod = report.modularity
    rows = [
        MeasureRow("core_periphery", "Core/periphery", cp.get("fit"), f"{cp.get('iterations')} iterations"),
        MeasureRow("density", "Density", report.density),
        MeasureRow("fragmentation", "Fragmentation", report.fragmentation),
        MeasureRow("betweenness_centralisation", "Betweenness centralisation", report.betweenness_centralisation),
        MeasureRow("transitivity", "Transitivity", report.transitivity),
        MeasureRow(
            "degree_centralisation", "Degree centralisation", deg.get("all"),
            f"out {fmt(deg.get('out'))}, in {fmt(deg.get('in'))}",
        ),
        MeasureRow("modularity", "Modularity score", mod.get("score"), f"{mod.get('community_count')} communities"),
        MeasureRow("average_distance", "Average distance", report.average_distance),
    ]
    rows += [
        MeasureRow(f"assortativity.{key}", f"Assortativity by {key}", value)
        for key, value in report.assortativity.items()
    ]
    rows.append(MeasureRow("average_degree", "Average degree", report.average_degree))
    return rows


@dataclass
class ComparisonTable:
    rows: list[tuple[MeasureRow, MeasureRow, float | None]]
    metadata: dict[str, Any] = field(default_factory=dict)


def build_comparison(observed: MetricsReport, counterfactual: MetricsReport) -> ComparisonTable:
    if observed.conventions != counterfactual.conventions:
        raise ConventionMismatch("reports were computed with different conventions")
    obs_rows = report_rows(observed)
    cf_rows = {r.key: r for r in report_rows(counterfactual)}
    rows = []
    for o in obs_rows:
        c = cf_rows[o.key]
        delta = None if o.value is None or c.value is None else c.value - o.value
        rows.append((o, c, delta))
    metadata = {
        "views": [observed.view_name, counterfactual.view_name],
        "conventions": observed.conventions,
        "flags": {observed.view_name: observed.flags, counterfactual.view_name: counterfactual.flags},
        "sizes": {
            observed.view_name: [observed.node_count, observed.edge_count],
            counterfactual.view_name: [counterfactual.node_count, counterfactual.edge_count],
        },
    }
    return ComparisonTable(rows, metadata)


def _cell(row: MeasureRow) -> str:
    return f"{fmt(row.value)} ({row.detail})" if row.detail else fmt(row.value)


def _footer(conventions: Mapping[str, Any], flags: Mapping[str, Mapping[str, str]]) -> list[str]:
    lines = ["", "Conventions:"]
    lines += [f"- {k}: {v}" for k, v in sorted(conventions.items())]
    flagged = [(view, k, v) for view, fl in flags.items() for k, v in sorted(fl.items())]
    if flagged:
        lines += ["", "Flags:"]
        lines += [f"- [{view}] {k}: {v}" for view, k, v in flagged]
    return lines


def render_comparison(observed: MetricsReport, counterfactual: MetricsReport, format: str = "markdown") -> str:
    fmt_name = _check_format(format, TEXT_FORMATS)
    table = build_comparison(observed, counterfactual)
    obs_name, cf_name = table.metadata["views"]
    if fmt_name == "json":
        return _json_text({
            "kind": "whole_comparison",
            "metadata": table.metadata,
            "rows": [
                {
                    "measure": o.key,
                    obs_name: o.value,
                    cf_name: c.value,
                    "delta": d,
                    "detail": {obs_name: o.detail, cf_name: c.detail},
                }
                for o, c, d in table.rows
            ],
        })
    if fmt_name == "csv":
        return _csv_text(
            ["measure", obs_name, cf_name, "delta", f"{obs_name}_detail", f"{cf_name}_detail"],
            [(o.key, fmt(o.value), fmt(c.value), fmt(d), o.detail, c.detail) for o, c, d in table.rows],
        )
    lines = _md_table(
        ["Measure", obs_name, cf_name, "delta"],
        [(o.label, _cell(o), _cell(c), fmt(d)) for o, c, d in table.rows],
    )
    lines += _footer(table.metadata["conventions"], table.metadata["flags"])
    return "\n".join(lines) + "\n"


def render_report(report: MetricsReport, format: str = "markdown") -> str:
    """Single-view variant of :func:`render_comparison`."""
    fmt_name = _check_format(format, TEXT_FORMATS)
    rows = report_rows(report)
    if fmt_name == "json":
        return _json_text({"kind": "whole_report", "report": report.to_dict()})
    if fmt_name == "csv":
        return _csv_text(["measure", report.view_name, "detail"], [(r.key, fmt(r.value), r.detail) for r in rows])
    lines = _md_table(["Measure", report.view_name], [(r.label, _cell(r)) for r in rows])
    lines += _footer(report.conventions, {report.view_name: report.flags})
    return "\n".join(lines) + "\n"


EGO_ROWS = (
    ("neighborhood_density", "Density"),
    ("neighborhood_avg_distance", "Average distance*"),
    ("two_step_reach", "Two-step reach"),
    ("two_step_reach_normalized", "Two-step reach (per alter)"),
    ("reach_efficiency", "Reach efficiency"),
    ("betweenness_normalized", "Betweenness centrality (normalized)"),
)


def _ego_value(summary: EgoSummary, key: str) -> str:
    text = fmt(getattr(summary, key))
    return text + " (!)" if key in summary.flags else text


def render_ego_table(
    egos: Sequence[str],
    observed: Mapping[str, EgoSummary],
    counterfactual: Mapping[str, EgoSummary] | None = None,
    format: str = "markdown",
) -> str:
    """One column per ego, one row per measure; paired cells read ``observed | counterfactual``."""
    fmt_name = _check_format(format, TEXT_FORMATS)
    views = [observed] if counterfactual is None else [observed, counterfactual]
    for e in egos:
        for view in views:
            if e not in view:
                raise UnknownEgo(f"ego {e!r} missing from a view")

    def cell(e: str, key: str) -> str:
        return " | ".join(_ego_value(view[e], key) for view in views)

    if fmt_name == "json":
        return _json_text({
            "kind": "ego_table",
            "egos": list(egos),
            "conventions": EGO_CONVENTIONS,
            "observed": {e: observed[e].to_dict() for e in egos},
            "counterfactual": None if counterfactual is None else {e: counterfactual[e].to_dict() for e in egos},
        })
    if fmt_name == "csv":
        return _csv_text(["measure", *egos], [(key, *(cell(e, key) for e in egos)) for key, _ in EGO_ROWS])
    lines = _md_table(["", *egos], [(label, *(cell(e, key) for e in egos)) for key, label in EGO_ROWS])
    lines += ["", "Cells read observed | counterfactual." if counterfactual is not None else ""]
    lines += ["(!) value flagged as degenerate, see flags below."]
    lines += [f"* {EGO_CONVENTIONS['neighborhood_avg_distance']}."]
    flags = []
    for i, view in enumerate(views):
        for e in egos:
            for k, v in sorted(view[e].flags.items()):
                flags.append(f"- [{('observed', 'counterfactual')[i]}] {e} {k}: {v}")
    if flags:
        lines += ["", "Flags:", *flags]
    return "\n".join(lines) + "\n"


def render_brokerage(profiles: Mapping[str, BrokerageProfile], format: str = "markdown") -> str:
    fmt_name = _check_format(format, TEXT_FORMATS)
    header = ["ego", *ROLES, "total", "dominant"]
    rows = [
        (p.ego, *(getattr(p, r) for r in ROLES), p.total, p.dominant_role or "")
        for p in profiles.values()
    ]
    if fmt_name == "json":
        return _json_text({"kind": "brokerage", "profiles": [p.to_dict() for p in profiles.values()]})
    if fmt_name == "csv":
        return _csv_text(header, rows)
    return "\n".join(_md_table(header, rows)) + "\n"


def render_elda(
    summaries: Mapping[str, EldaSummary],
    rankings: Mapping[str, AlterRanking],
    format: str = "markdown",
) -> str:
    """Summary counts and top alters, one column per view."""
    fmt_name = _check_format(format, TEXT_FORMATS)
    views = list(summaries)
    if fmt_name == "json":
        return _json_text({
            "kind": "elda",
            "summaries": {v: s.to_dict() for v, s in summaries.items()},
            "rankings": {v: [list(e) for e in r.entries] for v, r in rankings.items()},
        })
    fields = list(next(iter(summaries.values())).to_dict())
    if fmt_name == "csv":
        return _csv_text(["field", *views], [(f, *(fmt(getattr(summaries[v], f)) for v in views)) for f in fields])
    lines = _md_table(["", *views], [(f, *(fmt(getattr(summaries[v], f)) for v in views)) for f in fields])
    for v, r in rankings.items():
        lines += ["", f"Top alters ({v}):", ""]
        lines += _md_table(["rank", "alter", "R(a)"], [(i + 1, a, score) for i, (a, score) in enumerate(r.entries)])
    return "\n".join(lines) + "\n"


def render_ranking(ranking: AlterRanking, format: str = "csv") -> str:
    fmt_name = _check_format(format, TEXT_FORMATS)
    rows = [(i + 1, a, score) for i, (a, score) in enumerate(ranking.entries)]
    if fmt_name == "json":
        return _json_text({"kind": "alter_ranking", "entries": [list(e) for e in ranking.entries]})
    if fmt_name == "csv":
        return _csv_text(["rank", "alter", "score"], rows)
    return "\n".join(_md_table(["rank", "alter", "R(a)"], rows)) + "\n"


def render_pairs(pairs: Iterable[PairClass]) -> str:
    """One CSV record per ego pair; mediators are semicolon-joined."""
    return _csv_text(["ego_1", "ego_2", "class", "mediators"],
                     ((p.pair[0], p.pair[1], p.kind, ";".join(p.mediators)) for p in pairs))


def render_cleaning_report(report: CleaningReport, format: str = "markdown") -> str:
    fmt_name = _check_format(format, TEXT_FORMATS)
    if fmt_name == "json":
        return _json_text({"kind": "cleaning_report", **report.to_dict()})
    rows = []
    for t in REPORT_TYPES:
        n = report.respondents_with_tie[t]
        alias_n = report.respondents_with_aliased_tie[t]
        norm_n = report.respondents_with_normalized_tie[t]
        pct = (lambda k: f"{100.0 * k / n:.1f}%" if n else "n/a")
        rows.append((t, n, alias_n, pct(alias_n), norm_n, pct(norm_n)))
    header = ["relation", "respondents_with_tie", "with_aliased_tie", "aliased_pct",
              "with_normalized_tie", "normalized_pct"]
    if fmt_name == "csv":
        return _csv_text(header, rows)
    lines = _md_table(header, rows)
    lines += [
        "",
        f"Tie rows read: {report.rows_read}; aliased: {report.ties_aliased}; "
        f"normalization-only changes: {report.ties_normalized}.",
        f"Names left unresolved (became alters): {len(report.unresolved_names)}.",
        f"Conflicting from_project/pre_existing ties: {len(report.conflicts)}.",
    ]
    if report.diagnostics:
        lines += ["", "Diagnostics:"] + [f"- {d}" for d in report.diagnostics]
    return "\n".join(lines) + "\n"


def _flag(b: bool) -> str:
    return "1" if b else "0"


def export_edges_csv(net: CommunityNetwork) -> str:
    return _csv_text(
        EDGE_CSV_COLUMNS,
        ((s, t, *(_flag(getattr(lab, f)) for f in LABEL_FLAGS)) for (s, t), lab in net.edges.items()),
    )


def export_nodes_csv(net: CommunityNetwork) -> str:
    return _csv_text(
        NODE_CSV_COLUMNS,
        (
            (v, "ego" if a.is_respondent else "alter", a.gender,
             ";".join(sorted(a.projects)), ";".join(sorted(a.role_tags)))
            for v, a in net.nodes.items()
        ),
    )


def _split(cell: str) -> frozenset[str]:
    return frozenset(p for p in cell.split(";") if p)


def _data_lines(text: str) -> list[str]:
    # provenance comment lines may precede the header
    lines = text.splitlines()
    start = 0
    while start < len(lines) and lines[start].startswith("#"):
        start += 1
    return lines[start:]


def import_network(edges_csv: str, nodes_csv: str | None = None) -> CommunityNetwork:
    """Inverse of :func:`export_edges_csv` (+ :func:`export_nodes_csv`).

    Without a node file, edge sources become egos and the remaining
    endpoints alters, all with empty attributes.
    """
    edges = {}
    for row in csv.DictReader(_data_lines(edges_csv)):
        labels = TieLabels(**{f: row[f].strip() == "1" for f in LABEL_FLAGS})
        edges[(row["source"], row["target"])] = labels
    if nodes_csv is not None:
        nodes = {}
        for row in csv.DictReader(_data_lines(nodes_csv)):
            nodes[row["id"]] = PersonAttributes(
                gender=row["gender"],
                projects=_split(row["projects"]),
                role_tags=_split(row["role_tags"]),
                is_respondent=row["role"] == "ego",
            )
    else:
        sources = {s for s, _ in edges}
        nodes = {v: PersonAttributes(is_respondent=v in sources) for e in edges for v in e}
    egos = frozenset(v for v, a in nodes.items() if a.is_respondent)
    return CommunityNetwork(nodes=nodes, egos=egos, alters=frozenset(nodes) - egos, edges=edges)


def _graphml(net: CommunityNetwork) -> str:
    ns = "http://graphml.graphdrawing.org/xmlns"
    root = ET.Element("graphml", xmlns=ns)
    node_keys = ("role", "gender", "projects", "role_tags")
    for k in node_keys:
        ET.SubElement(root, "key", {"id": k, "for": "node", "attr.name": k, "attr.type": "string"})
    for k in LABEL_FLAGS:
        ET.SubElement(root, "key", {"id": k, "for": "edge", "attr.name": k, "attr.type": "boolean"})
    graph = ET.SubElement(root, "graph", id="G", edgedefault="directed")
    for v, a in net.nodes.items():
        node = ET.SubElement(graph, "node", id=v)
        values = ("ego" if a.is_respondent else "alter", a.gender,
                  ";".join(sorted(a.projects)), ";".join(sorted(a.role_tags)))
        for k, val in zip(node_keys, values):
            ET.SubElement(node, "data", key=k).text = val
    for i, ((s, t), lab) in enumerate(net.edges.items()):
        edge = ET.SubElement(graph, "edge", id=f"e{i}", source=s, target=t)
        for k in LABEL_FLAGS:
            ET.SubElement(edge, "data", key=k).text = "true" if getattr(lab, k) else "false"
    ET.indent(root)
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode") + "\n"


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _dot(net: CommunityNetwork) -> str:
    lines = ["digraph G {"]
    for v, a in net.nodes.items():
        attrs = {
            "role": "ego" if a.is_respondent else "alter",
            "gender": a.gender,
            "projects": ";".join(sorted(a.projects)),
        }
        body = ", ".join(f"{k}={_dot_quote(val)}" for k, val in attrs.items())
        lines.append(f"  {_dot_quote(v)} [{body}];")
    for (s, t), lab in net.edges.items():
        body = ", ".join(f"{f}={'true' if getattr(lab, f) else 'false'}" for f in LABEL_FLAGS)
        lines.append(f"  {_dot_quote(s)} -> {_dot_quote(t)} [{body}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_graph(net: CommunityNetwork, format: str = "graphml") -> str:
    if format == "graphml":
        return _graphml(net)
    if format == "dot":
        return _dot(net)
    if format == "edge-csv":
        return export_edges_csv(net)
    raise UnsupportedFormat(f"graph format {format!r} not in {list(GRAPH_FORMATS)}")


# Okabe-Ito colour-blind safe palette, cycled over sorted category names
_PALETTE = ("#E69F00", "#56B4E9", "#009E73", "#F0E442", "#0072B2", "#D55E00", "#CC79A7", "#999999")


def suggested_palette(net: CommunityNetwork) -> dict[str, dict[str, str]]:
    projects = sorted({p for a in net.nodes.values() for p in a.projects})
    return {
        "projects": {p: _PALETTE[i % len(_PALETTE)] for i, p in enumerate(projects)},
        "role": {"ego": "#0072B2", "alter": "#999999"},
        "edge": {f: _PALETTE[i % len(_PALETTE)] for i, f in enumerate(LABEL_FLAGS)},
    }
