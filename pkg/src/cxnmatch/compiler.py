"""Compile construction definitions into executable patterns; emit Grew text.

The compiled Pattern is the single source of truth for both the internal
matcher and the emitted Grew query. Emission is canonical and
deterministic: node clauses in row order named X1..Xn, then precedence
clauses, then edge clauses, then one ``without`` block per exclusion
that needs one. Constraints a Grew pattern cannot carry (OntoClass,
identity links, optionality, a DEPREL test on a row with unconstrained
head, Aktionsart) are surfaced on a trailing ``% unexpressed:`` line
rather than dropped.
"""

from __future__ import annotations

from dataclasses import dataclass

from .conllc import (
    CHILDREN,
    FREE,
    ROOT,
    SELF,
    STRICT,
    CxnDef,
    IdentityConstraint,
    WithoutConstraint,
    validate,
)
from .lexicon import normalize_topic

__all__ = [
    "NodeConstraint",
    "Edge",
    "OrderLink",
    "Pattern",
    "CompileError",
    "compile_cxn",
    "emit_grew",
]


class CompileError(Exception):
    """Raised when a definition fails validation and cannot be compiled."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


@dataclass(frozen=True)
class NodeConstraint:
    """Per-slot tests, in matcher-ready form (topic already qualified)."""

    row_id: str
    ud_form: str | None
    lemma: str | None
    upos: str | None
    feats: tuple[tuple[str, str], ...]
    deprel: str | None  # node-level test, set only when the head is unconstrained
    required: bool
    adjacency: str  # policy of the link to the previous expressed slot
    without: tuple[WithoutConstraint, ...]
    topic: str | None
    aktionsart: str | None
    identity: tuple[IdentityConstraint, ...]


@dataclass(frozen=True)
class Edge:
    head: str
    dependent: str
    deprel: str | None


@dataclass(frozen=True)
class OrderLink:
    left: str
    right: str
    policy: str  # STRICT | FREE


@dataclass(frozen=True)
class Pattern:
    """A validated, executable matching plan."""

    nodes: tuple[NodeConstraint, ...]
    edges: tuple[Edge, ...]
    order: tuple[OrderLink, ...]
    root: str  # row id of the construction-internal head
    cxn_id: str = ""
    name: str = ""

    def node(self, row_id: str) -> NodeConstraint:
        for n in self.nodes:
            if n.row_id == row_id:
                return n
        raise KeyError(row_id)


def compile_cxn(definition: CxnDef) -> Pattern:
    """Compile a definition; refuses on any error-level diagnostic."""
    problems = [d for d in validate(definition) if d.severity == "error"]
    if problems:
        raise CompileError(problems)

    nodes = []
    edges = []
    for row in definition.rows:
        topic = row.sem_feats.get("OntoClass")
        if topic is not None:
            topic = normalize_topic(topic, row.upos)
        head_constrained = row.head_ref is not None and not row.is_root
        nodes.append(
            NodeConstraint(
                row_id=row.id,
                ud_form=row.ud_form,
                lemma=row.lemma,
                upos=row.upos,
                feats=tuple(sorted(row.feats.items(), key=lambda kv: kv[0].lower())),
                deprel=None if (head_constrained or row.is_root) else row.deprel,
                required=row.required,
                adjacency=row.adjacency,
                without=row.without,
                topic=topic,
                aktionsart=row.sem_feats.get("Aktionsart"),
                identity=row.identity,
            )
        )
        if head_constrained:
            edges.append(Edge(head=row.head_ref, dependent=row.id, deprel=row.deprel))

    order = []
    previous = None
    for row in definition.rows:
        if not row.required:
            continue
        if previous is not None:
            order.append(OrderLink(left=previous, right=row.id, policy=row.adjacency))
        previous = row.id

    root = next(r.id for r in definition.rows if r.is_root)
    return Pattern(
        nodes=tuple(nodes),
        edges=tuple(edges),
        order=tuple(order),
        root=root,
        cxn_id=definition.cxn_id,
        name=definition.name,
    )


def _quote(value: str) -> str:
    return "'" + value.replace("'", "\\'") + "'"


def _node_clause(name: str, node: NodeConstraint) -> str:
    parts = []
    if node.ud_form is not None:
        parts.append(f"form={_quote(node.ud_form)}")
    if node.lemma is not None:
        parts.append(f"lemma={_quote(node.lemma)}")
    if node.upos is not None:
        parts.append(f"upos={node.upos}")
    for key, value in node.feats:
        parts.append(f"{key}={value}")
    return f"{name} [{', '.join(parts)}]"


def _without_block(name: str, w: WithoutConstraint, fresh: int) -> tuple[str, int]:
    """Render one exclusion as a Grew without-block; returns (text, next fresh)."""
    if w.scope == CHILDREN:
        if w.field == "DEPREL":
            return f"without {{{name} -[{w.value}]-> X{fresh}}}", fresh + 1
        if w.field == "UPOS":
            return f"without {{{name} -> X{fresh}; X{fresh} [upos={w.value}]}}", fresh + 1
        return f"without {{{name} -> X{fresh}; X{fresh} [lemma={_quote(w.value)}]}}", fresh + 1
    if w.field == "DEPREL":
        return f"without {{X{fresh} -[{w.value}]-> {name}}}", fresh + 1
    if w.field == "UD.FORM":
        return f"without {{{name} [form={_quote(w.value)}]}}", fresh
    if w.field == "LEMMA":
        return f"without {{{name} [lemma={_quote(w.value)}]}}", fresh
    if w.field == "UPOS":
        return f"without {{{name} [upos={w.value}]}}", fresh
    feat = w.field[len("FEATS:"):]
    return f"without {{{name} [{feat}={w.value}]}}", fresh


def emit_grew(pattern: Pattern) -> str:
    """Render the canonical Grew query text for a compiled pattern."""
    names = {node.row_id: f"X{i}" for i, node in enumerate(pattern.nodes, start=1)}

    clauses = [_node_clause(names[n.row_id], n) for n in pattern.nodes]
    for link in pattern.order:
        op = "<" if link.policy == STRICT else "<<"
        clauses.append(f"{names[link.left]} {op} {names[link.right]}")
    for edge in pattern.edges:
        label = f"-[{edge.deprel}]->" if edge.deprel is not None else "->"
        clauses.append(f"{names[edge.head]} {label} {names[edge.dependent]}")

    lines = ["pattern {" + "; ".join(clauses) + "}"]
    fresh = len(pattern.nodes) + 1
    for node in pattern.nodes:
        for w in node.without:
            block, fresh = _without_block(names[node.row_id], w, fresh)
            lines.append(block)

    unexpressed = []
    for node in pattern.nodes:
        name = names[node.row_id]
        if node.topic is not None:
            unexpressed.append(f"{name} OntoClass={node.topic}")
        if node.aktionsart is not None:
            unexpressed.append(f"{name} Aktionsart={node.aktionsart}")
        for ident in node.identity:
            rhs = names[ident.target]
            if ident.relation:
                rhs = f"{ident.relation}:{rhs}"
            unexpressed.append(f"{name} {ident.field}={rhs}")
        if node.deprel is not None:
            unexpressed.append(f"{name} DEPREL={node.deprel}")
        if not node.required:
            unexpressed.append(f"{name} optional")
    if unexpressed:
        lines.append("% unexpressed: " + "; ".join(unexpressed))
    return "\n".join(lines) + "\n"
