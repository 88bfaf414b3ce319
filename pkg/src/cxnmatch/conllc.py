"""CoNLL-C construction definitions: parsing, validation, canonical writing.

A definition is ``#key = value`` metadata lines followed by rows of 12
whitespace-separated columns:

    ID UD.FORM LEMMA UPOS FEATS HEAD DEPREL REQUIRED WITHOUT SEM.FEATS ADJACENCY IDENTITY

Underscore means "unconstrained". Files may also present columns 1-7 and
8-12 as two separate blocks with one header line each (the split layout);
rows are then zipped by position. Header lines are recognized and ignored.

Cell micro-syntax (no escaping; cells are whitespace-free, and values
inside WITHOUT/IDENTITY cells must not contain commas):

* FEATS: ``Key=Value|Key=Value``
* HEAD: ``0`` marks the construction-internal head (not the sentence
  root); a row id names the head row; ``_`` leaves the head unconstrained.
* WITHOUT: comma-separated ``[SELF:|CHILDREN:]FIELD=value`` with FIELD one
  of UD.FORM, LEMMA, UPOS, DEPREL, FEATS:<name> (CHILDREN supports
  DEPREL, UPOS, LEMMA only).
* SEM.FEATS: comma-separated ``OntoClass=...`` / ``Aktionsart=...``.
* ADJACENCY: ``_`` = STRICT (token must immediately follow the previous
  expressed row), ``FREE`` = precedence only.
* IDENTITY: comma-separated ``FIELD=row`` or ``LEMMA=relation:row``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .lexicon import TopicError, normalize_topic

__all__ = [
    "STRICT",
    "FREE",
    "SELF",
    "CHILDREN",
    "ROOT",
    "WithoutConstraint",
    "IdentityConstraint",
    "CxnRow",
    "CxnDef",
    "Diagnostic",
    "ConllcError",
    "parse_conllc",
    "parse_conllc_file",
    "validate",
    "render_conllc",
]

STRICT = "STRICT"
FREE = "FREE"
SELF = "SELF"
CHILDREN = "CHILDREN"
#: head_ref value marking the construction-internal head row.
ROOT = "0"

_COLUMNS = (
    "ID", "UD.FORM", "LEMMA", "UPOS", "FEATS", "HEAD", "DEPREL",
    "REQUIRED", "WITHOUT", "SEM.FEATS", "ADJACENCY", "IDENTITY",
)
_HEADER_WORDS = frozenset(_COLUMNS)
_SELF_FIELDS = ("UD.FORM", "LEMMA", "UPOS", "DEPREL")
_CHILD_FIELDS = ("DEPREL", "UPOS", "LEMMA")
_IDENTITY_FIELDS = ("UD.FORM", "LEMMA")
_ROW_ID = re.compile(r"^[A-Za-z][A-Za-z0-9]*$")


class ConllcError(Exception):
    """Fatal CoNLL-C parse error, with row/column context where known."""

    def __init__(self, message: str, row: str | None = None, column: str | None = None):
        self.row = row
        self.column = column
        parts = []
        if row:
            parts.append(f"row {row}")
        if column:
            parts.append(f"column {column}")
        suffix = f" ({', '.join(parts)})" if parts else ""
        super().__init__(message + suffix)


@dataclass(frozen=True)
class WithoutConstraint:
    """An excluded value: on the token itself or on any of its children."""

    scope: str  # SELF | CHILDREN
    field: str  # UD.FORM | LEMMA | UPOS | DEPREL | FEATS:<name>
    value: str

    def text(self) -> str:
        prefix = "CHILDREN:" if self.scope == CHILDREN else ""
        return f"{prefix}{self.field}={self.value}"


@dataclass(frozen=True)
class IdentityConstraint:
    """Field sharing with another row, optionally through a WordNet relation."""

    field: str  # UD.FORM | LEMMA | FEATS:<name>
    relation: str | None  # None = strict equality
    target: str  # row id

    def text(self) -> str:
        rhs = f"{self.relation}:{self.target}" if self.relation else self.target
        return f"{self.field}={rhs}"


@dataclass
class CxnRow:
    """One construction slot: structural, semantic, and relational constraints."""

    id: str
    ud_form: str | None = None
    lemma: str | None = None
    upos: str | None = None
    feats: dict[str, str] = field(default_factory=dict)
    head_ref: str | None = None  # ROOT, a row id, or None (unconstrained)
    deprel: str | None = None
    required: bool = True
    without: tuple[WithoutConstraint, ...] = ()
    sem_feats: dict[str, str] = field(default_factory=dict)
    adjacency: str = STRICT
    identity: tuple[IdentityConstraint, ...] = ()

    @property
    def is_root(self) -> bool:
        return self.head_ref == ROOT


@dataclass
class CxnDef:
    """A parsed construction definition."""

    cxn_id: str = ""
    name: str = ""
    function: str = ""
    rows: list[CxnRow] = field(default_factory=list)

    def row(self, row_id: str) -> CxnRow:
        for r in self.rows:
            if r.id == row_id:
                return r
        raise KeyError(row_id)

    @property
    def root_row(self) -> CxnRow:
        for r in self.rows:
            if r.is_root:
                return r
        raise ValueError("definition has no internal-root row")


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    row: str | None
    column: str | None
    message: str

    def __str__(self) -> str:
        where = f" [row {self.row}" + (f", {self.column}]" if self.column else "]") if self.row else (
            f" [{self.column}]" if self.column else "")
        return f"{self.severity}{where}: {self.message}"


def _parse_feats_cell(text: str, row: str) -> dict[str, str]:
    if text == "_":
        return {}
    feats: dict[str, str] = {}
    for item in text.split("|"):
        key, sep, value = item.partition("=")
        if not sep or not key or not value:
            raise ConllcError(f"malformed FEATS item {item!r}", row, "FEATS")
        if key in feats:
            raise ConllcError(f"duplicate FEATS key {key!r}", row, "FEATS")
        feats[key] = value
    return feats


def _parse_field_spec(spec: str, allowed: tuple[str, ...], row: str, column: str,
                      with_feats: bool = True) -> str:
    if with_feats and spec.startswith("FEATS:"):
        name = spec[len("FEATS:"):]
        if not name:
            raise ConllcError("FEATS constraint needs a feature name", row, column)
        return spec
    if spec not in allowed:
        raise ConllcError(f"unsupported field {spec!r}", row, column)
    return spec


def _parse_without_cell(text: str, row: str) -> tuple[WithoutConstraint, ...]:
    if text == "_":
        return ()
    out = []
    for item in text.split(","):
        scope = SELF
        rest = item
        if item.startswith("CHILDREN:"):
            scope, rest = CHILDREN, item[len("CHILDREN:"):]
        elif item.startswith("SELF:"):
            scope, rest = SELF, item[len("SELF:"):]
        spec, sep, value = rest.partition("=")
        if not sep or not value:
            raise ConllcError(f"malformed WITHOUT constraint {item!r}", row, "WITHOUT")
        if scope == CHILDREN:
            fld = _parse_field_spec(spec, _CHILD_FIELDS, row, "WITHOUT", with_feats=False)
        else:
            fld = _parse_field_spec(spec, _SELF_FIELDS, row, "WITHOUT")
        out.append(WithoutConstraint(scope, fld, value))
    return tuple(sorted(set(out), key=lambda w: (w.scope, w.field, w.value)))


def _parse_sem_cell(text: str, row: str) -> dict[str, str]:
    if text == "_":
        return {}
    sem: dict[str, str] = {}
    for item in text.split(","):
        key, sep, value = item.partition("=")
        if not sep or not value:
            raise ConllcError(f"malformed SEM.FEATS item {item!r}", row, "SEM.FEATS")
        if key not in ("OntoClass", "Aktionsart"):
            raise ConllcError(f"unknown SEM.FEATS key {key!r}", row, "SEM.FEATS")
        if key in sem:
            raise ConllcError(f"duplicate SEM.FEATS key {key!r}", row, "SEM.FEATS")
        sem[key] = value
    return sem


def _parse_adjacency_cell(text: str, row: str) -> str:
    if text == "_":
        return STRICT
    value = text.upper()
    if value not in (STRICT, FREE):
        raise ConllcError(f"unknown ADJACENCY value {text!r}", row, "ADJACENCY")
    return value


def _parse_identity_cell(text: str, row: str) -> tuple[IdentityConstraint, ...]:
    if text == "_":
        return ()
    out = []
    for item in text.split(","):
        spec, sep, rhs = item.partition("=")
        if not sep or not rhs:
            raise ConllcError(f"malformed IDENTITY constraint {item!r}", row, "IDENTITY")
        fld = _parse_field_spec(spec, _IDENTITY_FIELDS, row, "IDENTITY")
        relation: str | None = None
        target = rhs
        if ":" in rhs:
            relation, _, target = rhs.partition(":")
            if not relation or not target:
                raise ConllcError(f"malformed IDENTITY relation {item!r}", row, "IDENTITY")
            if fld != "LEMMA":
                raise ConllcError(
                    f"relation identity requires field LEMMA, not {fld!r}", row, "IDENTITY")
        out.append(IdentityConstraint(fld, relation, target))
    return tuple(sorted(set(out), key=lambda c: (c.field, c.relation or "", c.target)))


def _opt(text: str) -> str | None:
    return None if text == "_" else text


def _make_row(cells: list[str]) -> CxnRow:
    row_id = cells[0]
    if not _ROW_ID.match(row_id):
        raise ConllcError(f"invalid row id {row_id!r}", row_id, "ID")
    if cells[7] not in ("0", "1"):
        raise ConllcError(f"REQUIRED must be 0 or 1, got {cells[7]!r}", row_id, "REQUIRED")
    head = cells[5]
    head_ref: str | None
    if head == "_":
        head_ref = None
    elif head == "0":
        head_ref = ROOT
    else:
        head_ref = head
    return CxnRow(
        id=row_id,
        ud_form=_opt(cells[1]),
        lemma=_opt(cells[2]),
        upos=_opt(cells[3]),
        feats=_parse_feats_cell(cells[4], row_id),
        head_ref=head_ref,
        deprel=_opt(cells[6]),
        required=cells[7] == "1",
        without=_parse_without_cell(cells[8], row_id),
        sem_feats=_parse_sem_cell(cells[9], row_id),
        adjacency=_parse_adjacency_cell(cells[10], row_id),
        identity=_parse_identity_cell(cells[11], row_id),
    )


def _is_header(cells: list[str]) -> bool:
    return all(c in _HEADER_WORDS for c in cells)


_META_KEYS = {"cxn-id": "cxn_id", "cxn": "name", "function": "function"}


def parse_conllc(text: str) -> CxnDef:
    """Parse one CoNLL-C definition and enforce its structural invariants.

    Accepts both the single-block 12-column layout and the split 7+5
    layout. Raises ConllcError on the first fatal problem.
    """
    meta: dict[str, str] = {}
    blocks: list[list[list[str]]] = []
    current: list[list[str]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("#"):
            key, sep, value = line[1:].partition("=")
            if sep:
                key = key.strip()
                if key in _META_KEYS:
                    meta[_META_KEYS[key]] = value.strip()
            continue
        if not line:
            if current:
                blocks.append(current)
                current = []
            continue
        cells = line.split()
        if _is_header(cells):
            if current:
                blocks.append(current)
                current = []
            continue
        current.append(cells)
    if current:
        blocks.append(current)

    if not blocks:
        raise ConllcError("no constraint rows found")
    if all(len(cells) == len(_COLUMNS) for block in blocks for cells in block):
        rows_cells = [cells for block in blocks for cells in block]
    elif len(blocks) == 2 and all(len(c) == 7 for c in blocks[0]) and all(
            len(c) == 5 for c in blocks[1]):
        if len(blocks[0]) != len(blocks[1]):
            raise ConllcError(
                f"split layout blocks disagree: {len(blocks[0])} structural rows "
                f"vs {len(blocks[1])} constraint rows")
        rows_cells = [a + b for a, b in zip(blocks[0], blocks[1])]
    else:
        raise ConllcError("rows must have 12 columns (or 7+5 in the split layout)")

    rows = [_make_row(cells) for cells in rows_cells]
    definition = CxnDef(
        cxn_id=meta.get("cxn_id", ""),
        name=meta.get("name", ""),
        function=meta.get("function", ""),
        rows=rows,
    )
    _check_structure(definition)
    return definition


def parse_conllc_file(path) -> CxnDef:
    with open(path, encoding="utf-8") as handle:
        return parse_conllc(handle.read())


def _check_structure(definition: CxnDef) -> None:
    """Fatal invariants: id uniqueness, root uniqueness, reference resolution."""
    seen: set[str] = set()
    for row in definition.rows:
        if row.id in seen:
            raise ConllcError(f"duplicate row id {row.id!r}", row.id, "ID")
        seen.add(row.id)
    roots = [r for r in definition.rows if r.is_root]
    if len(roots) != 1:
        raise ConllcError(
            f"exactly one row must have HEAD=0, found {len(roots)}",
            roots[1].id if len(roots) > 1 else None, "HEAD")
    for row in definition.rows:
        if row.head_ref not in (None, ROOT):
            if row.head_ref == row.id:
                raise ConllcError("row cannot be its own head", row.id, "HEAD")
            if row.head_ref not in seen:
                raise ConllcError(f"unresolved HEAD reference {row.head_ref!r}", row.id, "HEAD")
        for ident in row.identity:
            if ident.target not in seen:
                raise ConllcError(
                    f"unresolved IDENTITY target {ident.target!r}", row.id, "IDENTITY")


def validate(definition: CxnDef) -> list[Diagnostic]:
    """Check a definition beyond parse-level syntax.

    Returns error and warning diagnostics; an empty list means the
    definition is ready to compile. Deterministic: diagnostics come out
    in row order, column order within a row.
    """
    diags: list[Diagnostic] = []
    ids = [r.id for r in definition.rows]
    seen: set[str] = set()
    for rid in ids:
        if rid in seen:
            diags.append(Diagnostic("error", rid, "ID", f"duplicate row id {rid!r}"))
        seen.add(rid)
    roots = [r.id for r in definition.rows if r.is_root]
    if len(roots) != 1:
        diags.append(Diagnostic(
            "error", None, "HEAD", f"exactly one row must have HEAD=0, found {len(roots)}"))
    if not any(r.required for r in definition.rows):
        diags.append(Diagnostic(
            "warning", None, "REQUIRED", "no required rows: every sentence yields a match"))

    by_id = {r.id: r for r in definition.rows}
    for row in definition.rows:
        if row.head_ref not in (None, ROOT) and (
                row.head_ref not in by_id or row.head_ref == row.id):
            diags.append(Diagnostic(
                "error", row.id, "HEAD", f"unresolvable HEAD reference {row.head_ref!r}"))

    # Head chains must not cycle; unconstrained heads terminate a chain.
    for row in definition.rows:
        seen_chain = {row.id}
        cursor = row
        while cursor.head_ref not in (None, ROOT):
            nxt = by_id.get(cursor.head_ref)
            if nxt is None or nxt.id == cursor.id:
                break
            if nxt.id in seen_chain:
                diags.append(Diagnostic(
                    "error", row.id, "HEAD", "HEAD references form a cycle"))
                break
            seen_chain.add(nxt.id)
            cursor = nxt

    for index, row in enumerate(definition.rows):
        if index == 0 and row.adjacency != STRICT:
            diags.append(Diagnostic(
                "warning", row.id, "ADJACENCY",
                "ADJACENCY on the first row has no effect (no preceding slot)"))
        onto = row.sem_feats.get("OntoClass")
        if onto is not None:
            try:
                normalize_topic(onto, row.upos)
            except TopicError as exc:
                diags.append(Diagnostic("error", row.id, "SEM.FEATS", str(exc)))
        if "Aktionsart" in row.sem_feats:
            diags.append(Diagnostic(
                "warning", row.id, "SEM.FEATS",
                "Aktionsart is parsed but not evaluated (no data source)"))
        for ident in row.identity:
            target = by_id.get(ident.target)
            if target is None:
                diags.append(Diagnostic(
                    "error", row.id, "IDENTITY",
                    f"unresolved IDENTITY target {ident.target!r}"))
            elif target.id == row.id:
                diags.append(Diagnostic(
                    "warning", row.id, "IDENTITY", "IDENTITY target is the row itself"))
            elif not target.required:
                diags.append(Diagnostic(
                    "warning", row.id, "IDENTITY",
                    f"IDENTITY targets optional row {target.id!r}; "
                    "the constraint is skipped when that row is omitted"))
    return diags


def _feats_cell(feats: dict[str, str]) -> str:
    if not feats:
        return "_"
    return "|".join(f"{k}={v}" for k, v in sorted(feats.items(), key=lambda kv: kv[0].lower()))


def _sem_cell(sem: dict[str, str]) -> str:
    parts = [f"{k}={sem[k]}" for k in ("OntoClass", "Aktionsart") if k in sem]
    return ",".join(parts) if parts else "_"


def render_conllc(definition: CxnDef) -> str:
    """Write the canonical single-block 12-column layout.

    ``parse_conllc(render_conllc(d))`` is structurally equal to ``d`` for
    any definition that parses.
    """
    lines = []
    if definition.cxn_id:
        lines.append(f"#cxn-id = {definition.cxn_id}")
    if definition.name:
        lines.append(f"#cxn = {definition.name}")
    if definition.function:
        lines.append(f"#function = {definition.function}")
    if lines:
        lines.append("")
    table = [list(_COLUMNS)]
    for row in definition.rows:
        head = "_" if row.head_ref is None else (ROOT if row.is_root else row.head_ref)
        table.append([
            row.id,
            row.ud_form or "_",
            row.lemma or "_",
            row.upos or "_",
            _feats_cell(row.feats),
            head,
            row.deprel or "_",
            "1" if row.required else "0",
            ",".join(w.text() for w in row.without) or "_",
            _sem_cell(row.sem_feats),
            "_" if row.adjacency == STRICT else row.adjacency,
            ",".join(c.text() for c in row.identity) or "_",
        ])
    widths = [max(len(r[i]) for r in table) for i in range(len(_COLUMNS))]
    for tr in table:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(tr, widths)).rstrip())
    return "\n".join(lines) + "\n"
