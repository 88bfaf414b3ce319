"""Find pattern occurrences in sentences and annotate them into MISC.

Matching semantics, in the order they are checked:

* node tests: FORM/LEMMA/UPOS string equality where constrained; every
  constrained FEATS pair present in the token's feats; a DEPREL test on a
  row whose head is unconstrained applies to the token's own deprel.
* edges: the dependent's head must be the token assigned to the head
  slot, with the edge's deprel when constrained. The internal-root slot's
  own head and deprel are never constrained.
* order: consecutive expressed slots map to tokens in increasing id
  order; a STRICT link needs ids differing by exactly one (so punctuation
  breaks adjacency), FREE only needs the increase. The policy of a link
  is the ADJACENCY value of its later slot.
* WITHOUT: SELF scope excludes a field value on the token itself;
  CHILDREN scope excludes it on any dependent of the token.
* OntoClass (with semantic filtering on): the token's lemma must have the
  slot's topic among its topics; lemmas with no synsets in the topic's
  POS class follow the missing-lemma policy.
* IDENTITY: plain constraints compare the named field of the two tokens
  for equality after NFC (optionally case-folded); relation constraints
  ask the lexicon whether the relation holds between the two lemmas.

Optional slots are filled greedily: only assignments that cannot be
extended by filling one more optional slot are reported.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .compiler import Pattern
from .conllc import CHILDREN, STRICT
from .conllu import Sentence, Token
from .lexicon import Lexicon, normalize_topic, pos_class

__all__ = [
    "FAIL",
    "PASS",
    "Match",
    "MatchOptions",
    "AnnotationError",
    "match_sentence",
    "match_corpus",
    "annotate",
    "normalize_topic",
]

FAIL = "fail"
PASS = "pass"


@dataclass
class MatchOptions:
    """Knobs for the semantic layer.

    missing_lemma_policy decides what an OntoClass test does with a lemma
    that has no synsets: FAIL rejects (the default; the test exists to
    kill false positives), PASS accepts for recall-oriented runs.
    """

    semantic_filtering: bool = True
    missing_lemma_policy: str = FAIL
    identity_case_fold: bool = False


@dataclass
class Match:
    """One injective slot-to-token assignment within a sentence."""

    sentence_ref: int
    assignment: dict[str, int]
    omitted: frozenset[str] = field(default_factory=frozenset)


class AnnotationError(Exception):
    """Raised when an annotation would collide with an existing one."""


def _ident_text(value: str, fold: bool) -> str:
    value = unicodedata.normalize("NFC", value)
    return value.casefold() if fold else value


def _field_value(token: Token, field_name: str) -> str | None:
    if field_name == "UD.FORM":
        return token.form
    if field_name == "LEMMA":
        return token.lemma
    if field_name == "UPOS":
        return token.upos
    if field_name == "DEPREL":
        return token.deprel
    return token.feats.get(field_name[len("FEATS:"):])


def _topic_ok(topic: str, token: Token, lexicon: Lexicon, opts: MatchOptions) -> bool:
    cls = topic.split(".", 1)[0]
    synsets = lexicon.synsets_of(token.lemma, cls)
    if not synsets:
        return opts.missing_lemma_policy == PASS
    return topic in lexicon.topics_of(token.lemma, cls)


def _satisfies_node(node, token: Token, children: dict[int, list[Token]],
                    lexicon: Lexicon, opts: MatchOptions) -> bool:
    if node.ud_form is not None and token.form != node.ud_form:
        return False
    if node.lemma is not None and token.lemma != node.lemma:
        return False
    if node.upos is not None and token.upos != node.upos:
        return False
    for key, value in node.feats:
        if token.feats.get(key) != value:
            return False
    if node.deprel is not None and token.deprel != node.deprel:
        return False
    for w in node.without:
        if w.scope == CHILDREN:
            for child in children.get(token.id, ()):
                if _field_value(child, w.field) == w.value:
                    return False
        else:
            if _field_value(token, w.field) == w.value:
                return False
    if node.topic is not None and opts.semantic_filtering:
        if not _topic_ok(node.topic, token, lexicon, opts):
            return False
    return True


def _identity_ok(constraint, token: Token, target: Token,
                 lexicon: Lexicon, opts: MatchOptions) -> bool:
    if constraint.relation is not None:
        pos1 = pos_class(token.upos)
        pos2 = pos_class(target.upos)
        if pos1 is None or pos2 is None:
            return False
        return lexicon.has_relation(token.lemma, pos1, constraint.relation,
                                    target.lemma, pos2)
    mine = _field_value(token, constraint.field)
    theirs = _field_value(target, constraint.field)
    if mine is None or theirs is None:
        return False
    return _ident_text(mine, opts.identity_case_fold) == _ident_text(
        theirs, opts.identity_case_fold)


def _assignment_order_key(pattern: Pattern, assignment: dict[str, Token]):
    root_token = assignment.get(pattern.root)
    ids = tuple(assignment[n.row_id].id if n.row_id in assignment else 0
                for n in pattern.nodes)
    return (root_token.id if root_token is not None else 0, ids)


def match_sentence(pattern: Pattern, sentence: Sentence, lexicon: Lexicon | None = None,
                   options: MatchOptions | None = None, sentence_ref: int = 0) -> list[Match]:
    """All maximal assignments of the pattern within one sentence.

    Results are ordered by internal-root token id, then by the tuple of
    assigned token ids in slot order (omitted slots sort as zero).
    """
    opts = options or MatchOptions()
    lex = lexicon if lexicon is not None else Lexicon.empty()
    nodes = pattern.nodes
    index_of = {n.row_id: i for i, n in enumerate(nodes)}

    children: dict[int, list[Token]] = {}
    for token in sentence.tokens:
        if token.head:
            children.setdefault(token.head, []).append(token)

    candidates: list[list[Token]] = []
    for node in nodes:
        cands = [t for t in sentence.tokens if _satisfies_node(node, t, children, lex, opts)]
        if node.required and not cands:
            return []
        candidates.append(cands)

    # Edges and identity constraints are checked as soon as both of their
    # endpoints have been decided, i.e. at the later slot's index.
    edges_at: list[list] = [[] for _ in nodes]
    for edge in pattern.edges:
        edges_at[max(index_of[edge.head], index_of[edge.dependent])].append(edge)
    idents_at: list[list] = [[] for _ in nodes]
    for node in nodes:
        for constraint in node.identity:
            later = max(index_of[node.row_id], index_of[constraint.target])
            idents_at[later].append((node.row_id, constraint))

    results: list[dict[str, Token]] = []

    def edges_ok(i: int, assignment: dict[str, Token]) -> bool:
        for edge in edges_at[i]:
            head = assignment.get(edge.head)
            dep = assignment.get(edge.dependent)
            if head is None or dep is None:
                continue
            if dep.head != head.id:
                return False
            if edge.deprel is not None and dep.deprel != edge.deprel:
                return False
        for owner, constraint in idents_at[i]:
            token = assignment.get(owner)
            target = assignment.get(constraint.target)
            if token is None or target is None:
                continue
            if not _identity_ok(constraint, token, target, lex, opts):
                return False
        return True

    def search(i: int, assignment: dict[str, Token], used: set[int],
               prev_id: int | None) -> None:
        if i == len(nodes):
            results.append(dict(assignment))
            return
        node = nodes[i]
        if not node.required:
            if edges_ok(i, assignment):
                search(i + 1, assignment, used, prev_id)
        for token in candidates[i]:
            if token.id in used:
                continue
            if prev_id is not None:
                if node.adjacency == STRICT:
                    if token.id != prev_id + 1:
                        continue
                elif token.id <= prev_id:
                    continue
            assignment[node.row_id] = token
            if edges_ok(i, assignment):
                used.add(token.id)
                search(i + 1, assignment, used, token.id)
                used.discard(token.id)
            del assignment[node.row_id]

    search(0, {}, set(), None)

    # Greedy optional slots: drop any assignment that a strictly larger
    # satisfying assignment extends.
    pairs = [frozenset((rid, t.id) for rid, t in a.items()) for a in results]
    kept = [a for i, a in enumerate(results)
            if not any(j != i and pairs[j] > pairs[i] for j in range(len(results)))]

    kept.sort(key=lambda a: _assignment_order_key(pattern, a))
    all_rows = frozenset(n.row_id for n in nodes)
    return [
        Match(
            sentence_ref=sentence_ref,
            assignment={n.row_id: a[n.row_id].id for n in nodes if n.row_id in a},
            omitted=all_rows - frozenset(a),
        )
        for a in kept
    ]


def match_corpus(pattern: Pattern, sentences: Iterable[Sentence],
                 lexicon: Lexicon | None = None,
                 options: MatchOptions | None = None) -> Iterator[Match]:
    """Concatenated per-sentence matches, in document order."""
    for index, sentence in enumerate(sentences):
        yield from match_sentence(pattern, sentence, lexicon, options, sentence_ref=index)


def _existing_entries(token: Token) -> list[str]:
    value = token.misc.get("Cxn")
    if not value:
        return []
    return value.split(",")


def annotate(sentence: Sentence, match: Match, cxn_id: str, occurrence: int) -> Sentence:
    """Return a copy of the sentence with the match written into MISC.

    Every assigned token gains a ``Cxn=<cxn_id>:<occurrence>:<slot>``
    entry; existing entries are kept, comma-joined. Re-using an occurrence
    number for the same cxn within the sentence is refused.
    """
    if occurrence < 1:
        raise AnnotationError(f"occurrence must be >= 1, got {occurrence}")
    prefix = f"{cxn_id}:{occurrence}:"
    for token in sentence.tokens:
        if any(entry.startswith(prefix) for entry in _existing_entries(token)):
            raise AnnotationError(
                f"occurrence {cxn_id}:{occurrence} already annotated in this sentence")
    by_token = {tid: row_id for row_id, tid in match.assignment.items()}
    copy = sentence.copy()
    for token in copy.tokens:
        row_id = by_token.get(token.id)
        if row_id is None:
            continue
        entry = f"{cxn_id}:{occurrence}:{row_id}"
        entries = _existing_entries(token)
        entries.append(entry)
        token.misc["Cxn"] = ",".join(entries)
    return copy
