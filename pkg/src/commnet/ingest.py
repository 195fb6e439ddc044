"""Questionnaire CSV ingest: parsing, name reconciliation and network assembly.

File layouts (UTF-8, comma separated, header on the first line):

* respondents: ``respondent_id,display_name,gender,projects,role_tags``
  (``projects`` and ``role_tags`` are semicolon-joined lists)
* ties: ``respondent_id,target_name,labels,from_project,pre_existing``
  (``labels`` is a semicolon-joined subset of family|friend|coworker|other,
  the two flags are 0/1)
* aliases: ``raw_name,canonical_id,note``

Malformed rows are skipped and reported as :class:`Diagnostic` entries.
Alias resolution is table driven only; nothing is guessed.
"""

from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from .errors import AliasCycle, ConflictError, EmptyInput, MissingFile, SchemaMismatch
from .network import (
    CONFLICT_POLICIES,
    LABEL_FLAGS,
    SOCIAL_LABELS,
    CommunityNetwork,
    PersonAttributes,
    PersonId,
    PrunePolicy,
    PruneReport,
    TieLabels,
    build_network,
    prune_components,
)


RESPONDENT_COLUMNS = ("respondent_id", "display_name", "gender", "projects", "role_tags")
TIE_COLUMNS = ("respondent_id", "target_name", "labels", "from_project", "pre_existing")
ALIAS_COLUMNS = ("raw_name", "canonical_id", "note")

ALTER_PREFIX = "alter:"


@dataclass(frozen=True)
class Diagnostic:
    file: str
    line: int
    column: str
    message: str

    def __str__(self) -> str:
        col = f", column {self.column}" if self.column else ""
        return f"{self.file}:{self.line}{col}: {self.message}"


@dataclass(frozen=True)
class RespondentRecord:
    respondent_id: str
    display_name: str
    gender: str = ""
    projects: frozenset[str] = frozenset()
    role_tags: frozenset[str] = frozenset()
    line: int = 0


@dataclass(frozen=True)
class TieRecord:
    respondent_id: str
    target_name: str
    labels: frozenset[str] = frozenset()
    from_project: bool = False
    pre_existing: bool = False
    line: int = 0

    def tie_labels(self) -> TieLabels:
        return TieLabels(
            **{name: True for name in self.labels},
            from_project=self.from_project,
            pre_existing=self.pre_existing,
        )


def normalize_name(raw: str) -> str:
    """Trim, collapse internal whitespace, case-fold."""
    return " ".join(raw.split()).casefold()


def alter_id(name: str) -> PersonId:
    return ALTER_PREFIX + normalize_name(name)


@dataclass
class AliasMap:
    """Normalized raw name -> canonical id, with a provenance note per entry."""

    entries: dict[str, str] = field(default_factory=dict)
    notes: dict[str, str] = field(default_factory=dict)

    def add(self, raw_name: str, canonical_id: str, note: str = "") -> None:
        self.entries[normalize_name(raw_name)] = canonical_id.strip()
        self.notes[normalize_name(raw_name)] = note

    def validate(self) -> None:
        """Canonical targets must not be aliases of something else."""
        for key, target in self.entries.items():
            target_key = normalize_name(target)
            if target_key in self.entries and target_key != key and self.entries[target_key] != target:
                raise AliasCycle(
                    f"alias {key!r} -> {target!r}, but {target!r} is itself aliased "
                    f"to {self.entries[target_key]!r}"
                )

    def lookup(self, name: str) -> str | None:
        return self.entries.get(normalize_name(name))


@dataclass
class ParsedInputs:
    respondents: list[RespondentRecord]
    ties: list[TieRecord]
    aliases: AliasMap | None = None
    ties_name: str = "ties"


def _split_list(cell: str | None) -> frozenset[str]:
    return frozenset(p.strip() for p in (cell or "").split(";") if p.strip())


def _read_rows(path: Path, columns: tuple[str, ...], require_rows: bool):
    """Yield (line number, row dict, field count matches header) per data row."""
    if not path.is_file():
        raise MissingFile(f"input file not found: {path}")
    handle = path.open(newline="", encoding="utf-8-sig")
    with handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None:
            raise EmptyInput(f"{path} is empty")
        header = [h.strip() for h in header]
        missing = [c for c in columns if c not in header]
        if missing:
            raise SchemaMismatch(f"{path}: missing column(s) {missing}; expected {list(columns)}")
        seen_rows = 0
        for fields in reader:
            if not any(f.strip() for f in fields):
                continue
            seen_rows += 1
            yield reader.line_num, dict(zip(header, fields)), len(fields) == len(header)
        if require_rows and not seen_rows:
            raise EmptyInput(f"{path} has a header but no data rows")


_BOOL = {"0": False, "1": True}


def parse_respondents(path: Path) -> tuple[list[RespondentRecord], list[Diagnostic]]:
    records, diags = [], []
    name = path.name
    for line, row, complete in _read_rows(path, RESPONDENT_COLUMNS, require_rows=True):
        if not complete:
            diags.append(Diagnostic(name, line, "", "wrong number of fields"))
            continue
        rid = row["respondent_id"].strip()
        display = row["display_name"].strip()
        if not rid:
            diags.append(Diagnostic(name, line, "respondent_id", "empty respondent_id"))
            continue
        if not display:
            diags.append(Diagnostic(name, line, "display_name", "empty display_name"))
            continue
        records.append(RespondentRecord(
            respondent_id=rid,
            display_name=display,
            gender=row["gender"].strip(),
            projects=_split_list(row["projects"]),
            role_tags=_split_list(row["role_tags"]),
            line=line,
        ))
    return records, diags


def parse_ties(path: Path, respondent_ids: set[str]) -> tuple[list[TieRecord], list[Diagnostic]]:
    records, diags = [], []
    name = path.name
    for line, row, complete in _read_rows(path, TIE_COLUMNS, require_rows=False):
        if not complete:
            diags.append(Diagnostic(name, line, "", "wrong number of fields"))
            continue
        rid = row["respondent_id"].strip()
        target = row["target_name"]
        if not rid:
            diags.append(Diagnostic(name, line, "respondent_id", "empty respondent_id"))
            continue
        if rid not in respondent_ids:
            diags.append(Diagnostic(name, line, "respondent_id", f"unknown respondent {rid!r}"))
            continue
        if not target.strip():
            diags.append(Diagnostic(name, line, "target_name", "empty target_name"))
            continue
        labels = frozenset(p.casefold() for p in _split_list(row["labels"]))
        bad = sorted(labels - set(SOCIAL_LABELS))
        if bad:
            diags.append(Diagnostic(name, line, "labels", f"unknown label(s) {bad}"))
            continue
        flags = {}
        for col in ("from_project", "pre_existing"):
            cell = row[col].strip() or "0"
            if cell not in _BOOL:
                diags.append(Diagnostic(name, line, col, f"expected 0 or 1, got {cell!r}"))
                break
            flags[col] = _BOOL[cell]
        else:
            if not labels and not any(flags.values()):
                diags.append(Diagnostic(name, line, "labels", "tie carries no label"))
                continue
            records.append(TieRecord(rid, target, labels, line=line, **flags))
    return records, diags


def parse_aliases(path: Path) -> tuple[AliasMap, list[Diagnostic]]:
    aliases, diags = AliasMap(), []
    name = path.name
    for line, row, complete in _read_rows(path, ALIAS_COLUMNS, require_rows=False):
        raw, canonical = row.get("raw_name", "").strip(), row.get("canonical_id", "").strip()
        if not complete or not raw or not canonical:
            diags.append(Diagnostic(name, line, "", "alias rows need raw_name and canonical_id"))
            continue
        existing = aliases.lookup(raw)
        if existing is not None and existing != canonical:
            diags.append(Diagnostic(name, line, "raw_name", f"{raw!r} already aliased to {existing!r}"))
            continue
        aliases.add(raw, canonical, row.get("note", "").strip())
    return aliases, diags


def parse_inputs(
    respondents_file, ties_file, alias_file=None
) -> tuple[ParsedInputs, list[Diagnostic]]:
    respondents, diags = parse_respondents(Path(respondents_file))
    ties, tie_diags = parse_ties(Path(ties_file), {r.respondent_id for r in respondents})
    diags += tie_diags
    aliases = None
    if alias_file is not None:
        aliases, alias_diags = parse_aliases(Path(alias_file))
        diags += alias_diags
    return ParsedInputs(respondents, ties, aliases, Path(ties_file).name), diags


REPORT_TYPES = LABEL_FLAGS


@dataclass(frozen=True)
class CanonicalTie:
    source: PersonId
    target: PersonId
    labels: TieLabels
    line: int = 0


@dataclass
class CleaningReport:
    """Per relation type: respondents with at least one tie, and with at least one changed tie."""

    rows_read: int = 0
    respondents_with_tie: dict[str, int] = field(default_factory=dict)
    respondents_with_aliased_tie: dict[str, int] = field(default_factory=dict)
    respondents_with_normalized_tie: dict[str, int] = field(default_factory=dict)
    ties_aliased: int = 0
    ties_normalized: int = 0
    unresolved_names: list[str] = field(default_factory=list)
    conflicts: list[tuple[int, str, str]] = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["diagnostics"] = [str(x) for x in self.diagnostics]
        return d


class _Resolver:
    def __init__(self, respondents: list[RespondentRecord], aliases: AliasMap | None):
        self.ids = {r.respondent_id for r in respondents}
        self.display = {r.respondent_id: r.display_name for r in respondents}
        self.by_name: dict[str, list[str]] = defaultdict(list)
        for r in respondents:
            self.by_name[normalize_name(r.display_name)].append(r.respondent_id)
        self.aliases = aliases or AliasMap()

    def _by_identity(self, name: str) -> PersonId | None:
        stripped = name.strip()
        if stripped in self.ids:
            return stripped
        if stripped.startswith(ALTER_PREFIX):
            return ALTER_PREFIX + normalize_name(stripped[len(ALTER_PREFIX):])
        return None

    def resolve(self, raw: str) -> tuple[PersonId | None, str, str]:
        """Return (canonical id, how it was resolved, problem message).

        ``how`` is one of alias, identity, name or new.
        """
        target = self.aliases.lookup(raw)
        how = "alias" if target is not None else ""
        name = target if target is not None else raw
        known = self._by_identity(name)
        if known is not None:
            return known, how or "identity", ""
        hits = self.by_name.get(normalize_name(name), [])
        if len(hits) > 1:
            return None, how, f"name {raw!r} matches respondents {sorted(hits)}; add an alias"
        if hits:
            return hits[0], how or "name", ""
        return alter_id(name), how or "new", ""


def normalize_and_alias(
    parsed: ParsedInputs, alias_map: AliasMap | None = None, conflict: str = "reject"
) -> tuple[list[CanonicalTie], CleaningReport]:
    if conflict not in CONFLICT_POLICIES:
        raise ValueError(f"unknown conflict policy {conflict!r}")
    aliases = alias_map if alias_map is not None else parsed.aliases
    if aliases is not None:
        aliases.validate()
    resolver = _Resolver(parsed.respondents, aliases)
    report = CleaningReport(rows_read=len(parsed.ties))

    ties: list[CanonicalTie] = []
    first_spelling: dict[PersonId, str] = {}
    aliased_by = defaultdict(set)
    normalized_by = defaultdict(set)
    unresolved = set()
    for rec in parsed.ties:
        target, how, problem = resolver.resolve(rec.target_name)
        if target is None:
            report.diagnostics.append(Diagnostic(parsed.ties_name, rec.line, "target_name", problem))
            continue
        if target == rec.respondent_id:
            report.diagnostics.append(
                Diagnostic(parsed.ties_name, rec.line, "target_name", f"{rec.target_name!r} resolves to the respondent")
            )
            continue
        labels = rec.tie_labels()
        if labels.conflicting:
            if conflict == "reject":
                raise ConflictError(
                    f"{parsed.ties_name} line {rec.line}: tie {rec.respondent_id}->{rec.target_name!r} "
                    "is both from_project and pre_existing"
                )
            report.conflicts.append((rec.line, rec.respondent_id, target))
            labels = TieLabels(**{f: getattr(labels, f) for f in LABEL_FLAGS if f != "from_project"})

        if how == "alias":
            report.ties_aliased += 1
            for t in labels.names:
                aliased_by[t].add(rec.respondent_id)
        elif how in ("name", "new"):
            if how == "new":
                unresolved.add(normalize_name(rec.target_name))
            canonical = resolver.display.get(target) or first_spelling.setdefault(target, rec.target_name)
            if rec.target_name != canonical:
                report.ties_normalized += 1
                for t in labels.names:
                    normalized_by[t].add(rec.respondent_id)
        ties.append(CanonicalTie(rec.respondent_id, target, labels, rec.line))

    # a pair mentioned twice may only become contradictory after merging
    merged: dict[tuple[str, str], list[CanonicalTie]] = defaultdict(list)
    for tie in ties:
        merged[(tie.source, tie.target)].append(tie)
    for (s, t), group in merged.items():
        if any(g.labels.from_project for g in group) and any(g.labels.pre_existing for g in group):
            lines = [g.line for g in group]
            if conflict == "reject":
                raise ConflictError(
                    f"{parsed.ties_name} lines {lines}: merged tie {s}->{t} is both from_project and pre_existing"
                )
            report.conflicts.append((lines[0], s, t))

    with_tie = defaultdict(set)
    for tie in ties:
        for t in tie.labels.names:
            with_tie[t].add(tie.source)
    report.respondents_with_tie = {t: len(with_tie[t]) for t in REPORT_TYPES}
    report.respondents_with_aliased_tie = {t: len(aliased_by[t]) for t in REPORT_TYPES}
    report.respondents_with_normalized_tie = {t: len(normalized_by[t]) for t in REPORT_TYPES}
    report.unresolved_names = sorted(unresolved)
    report.conflicts.sort()
    return ties, report


@dataclass(frozen=True)
class IngestPaths:
    respondents: Path
    ties: Path
    aliases: Path | None = None


@dataclass(frozen=True)
class IngestConfig:
    conflict: str = "reject"
    prune: PrunePolicy | None = None


def ingest_pipeline(
    paths: IngestPaths, config: IngestConfig = IngestConfig()
) -> tuple[CommunityNetwork, CleaningReport, PruneReport]:
    """parse -> normalize/alias -> build -> optional prune."""
    parsed, diags = parse_inputs(paths.respondents, paths.ties, paths.aliases)
    ties, report = normalize_and_alias(parsed, conflict=config.conflict)
    report.diagnostics = diags + report.diagnostics
    respondents = [
        (r.respondent_id, PersonAttributes(r.gender, r.projects, r.role_tags, True))
        for r in parsed.respondents
    ]
    net = build_network(
        respondents, [(t.source, t.target, t.labels) for t in ties], conflict=config.conflict
    )
    prune_report = PruneReport()
    if config.prune is not None:
        net, prune_report = prune_components(net, config.prune)
    return net, report, prune_report
