"""CoNLL-U reading, writing, and the sentence/token data model.

Multiword-token ranges (``1-2``) and empty nodes (``1.1``) are kept as
opaque rows: they round-trip verbatim but are invisible to everything
that consumes ``Sentence.tokens``.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass, field, replace
from typing import Iterable, TextIO

__all__ = [
    "Token",
    "Sentence",
    "ParseIssue",
    "ConlluError",
    "parse_conllu",
    "parse_conllu_file",
    "serialize_conllu",
]

_RANGE_ID = re.compile(r"^\d+-\d+$")
_EMPTY_ID = re.compile(r"^\d+\.\d+$")


class ConlluError(Exception):
    """Raised when a document cannot be serialized (invariant violation)."""


@dataclass
class ParseIssue:
    """One recoverable parse error; the offending sentence is skipped."""

    line: int
    message: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.message}"


@dataclass
class Token:
    """A syntactic word: one 10-column CoNLL-U row.

    ``xpos`` is None when the column is underscore; ``deps`` is kept as
    opaque text. ``feats`` and ``misc`` preserve insertion order; a MISC
    entry without ``=`` is stored with value None.
    """

    id: int
    form: str
    lemma: str
    upos: str
    xpos: str | None
    feats: dict[str, str]
    head: int
    deprel: str
    deps: str
    misc: dict[str, str | None]

    def copy(self) -> "Token":
        return replace(self, feats=dict(self.feats), misc=dict(self.misc))


@dataclass
class Sentence:
    """One sentence: comment metadata, tokens, and opaque non-word rows.

    ``metadata`` holds ``(key, value)`` pairs from ``# key = value``
    comments; a comment without ``=`` becomes ``(text, None)``.
    ``opaque`` holds ``(row_position, raw_line)`` pairs for range/empty
    rows, where row_position indexes the combined row sequence.
    """

    metadata: list[tuple[str, str | None]] = field(default_factory=list)
    tokens: list[Token] = field(default_factory=list)
    opaque: list[tuple[int, str]] = field(default_factory=list)

    @property
    def sent_id(self) -> str | None:
        for key, value in self.metadata:
            if key == "sent_id":
                return value
        return None

    def meta(self, key: str) -> str | None:
        for k, value in self.metadata:
            if k == key:
                return value
        return None

    def token_by_id(self, tid: int) -> Token:
        return self.tokens[tid - 1]

    def copy(self) -> "Sentence":
        return Sentence(
            metadata=list(self.metadata),
            tokens=[t.copy() for t in self.tokens],
            opaque=list(self.opaque),
        )


def _parse_feats(text: str, line_no: int) -> dict[str, str]:
    if text == "_":
        return {}
    feats: dict[str, str] = {}
    for item in text.split("|"):
        key, sep, value = item.partition("=")
        if not sep or not key or not value:
            raise _RowError(line_no, f"malformed FEATS item {item!r}")
        if key in feats:
            raise _RowError(line_no, f"duplicate FEATS key {key!r}")
        feats[key] = value
    return feats


def _parse_misc(text: str, line_no: int) -> dict[str, str | None]:
    if text == "_":
        return {}
    misc: dict[str, str | None] = {}
    for item in text.split("|"):
        key, sep, value = item.partition("=")
        if not key:
            raise _RowError(line_no, f"malformed MISC item {item!r}")
        if key in misc:
            raise _RowError(line_no, f"duplicate MISC key {key!r}")
        misc[key] = value if sep else None
    return misc


class _RowError(Exception):
    def __init__(self, line: int, message: str):
        super().__init__(message)
        self.line = line
        self.message = message


def _parse_token(fields: list[str], line_no: int) -> Token:
    try:
        tid = int(fields[0])
    except ValueError:
        raise _RowError(line_no, f"non-integer token id {fields[0]!r}")
    if tid < 1:
        raise _RowError(line_no, f"token id must be >= 1, got {tid}")
    try:
        head = int(fields[6])
    except ValueError:
        raise _RowError(line_no, f"non-integer head {fields[6]!r}")
    if head < 0:
        raise _RowError(line_no, f"head must be >= 0, got {head}")
    if head == tid:
        raise _RowError(line_no, f"token {tid} is its own head")
    return Token(
        id=tid,
        form=fields[1],
        lemma=fields[2],
        upos=fields[3],
        xpos=None if fields[4] == "_" else fields[4],
        feats=_parse_feats(fields[5], line_no),
        head=head,
        deprel=fields[7],
        deps=fields[8],
        misc=_parse_misc(fields[9], line_no),
    )


def _build_sentence(block: list[tuple[int, str]]) -> Sentence:
    """Turn one blank-line-delimited block of (line_no, line) into a Sentence.

    Raises _RowError on the first structural problem; the caller skips the
    whole sentence and records the issue.
    """
    sentence = Sentence()
    position = 0
    for line_no, line in block:
        if line.startswith("#"):
            body = line[1:].strip()
            key, sep, value = body.partition("=")
            if sep:
                sentence.metadata.append((key.strip(), value.strip()))
            else:
                sentence.metadata.append((body, None))
            continue
        fields = line.split("\t")
        if len(fields) != 10:
            raise _RowError(line_no, f"expected 10 tab-separated fields, got {len(fields)}")
        if _RANGE_ID.match(fields[0]) or _EMPTY_ID.match(fields[0]):
            sentence.opaque.append((position, line))
        else:
            sentence.tokens.append(_parse_token(fields, line_no))
        position += 1
    first_line = block[0][0]
    for i, token in enumerate(sentence.tokens, start=1):
        if token.id != i:
            raise _RowError(first_line, f"token ids not consecutive: expected {i}, got {token.id}")
    n = len(sentence.tokens)
    for token in sentence.tokens:
        if token.head > n:
            raise _RowError(first_line, f"token {token.id} has dangling head {token.head}")
    return sentence


def parse_conllu(
    source: str | TextIO | Iterable[str],
    errors: list[ParseIssue] | None = None,
) -> list[Sentence]:
    """Parse a CoNLL-U document into sentences, in document order.

    A structural error (bad field count, non-integer id/head, dangling
    head, ...) is fatal for its sentence only: the sentence is skipped and
    a ParseIssue with the line number is appended to ``errors``. Pass a
    list to observe them; with ``errors=None`` skipped sentences are not
    reported, so callers that must not drop data should always pass one.
    Encoding errors propagate and abort the whole parse.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    sentences: list[Sentence] = []
    block: list[tuple[int, str]] = []

    def flush() -> None:
        if not block:
            return
        try:
            sentences.append(_build_sentence(block))
        except _RowError as exc:
            if errors is not None:
                errors.append(ParseIssue(exc.line, exc.message))
        block.clear()

    for line_no, raw in enumerate(source, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if line.strip() == "":
            flush()
        else:
            block.append((line_no, line))
    flush()
    return sentences


def parse_conllu_file(path, errors: list[ParseIssue] | None = None) -> list[Sentence]:
    with open(path, encoding="utf-8") as handle:
        return parse_conllu(handle, errors)


def _feats_text(feats: dict[str, str]) -> str:
    if not feats:
        return "_"
    items = sorted(feats.items(), key=lambda kv: kv[0].lower())
    return "|".join(f"{k}={v}" for k, v in items)


def _misc_text(misc: dict[str, str | None]) -> str:
    if not misc:
        return "_"
    return "|".join(k if v is None else f"{k}={v}" for k, v in misc.items())


def _check_sentence(sentence: Sentence, index: int) -> None:
    if not sentence.tokens and not sentence.opaque and not sentence.metadata:
        raise ConlluError(f"sentence {index}: refusing to serialize an empty sentence")
    n = len(sentence.tokens)
    for i, token in enumerate(sentence.tokens, start=1):
        if token.id != i:
            raise ConlluError(f"sentence {index}: token ids not consecutive at {token.id}")
        if token.head < 0 or token.head > n:
            raise ConlluError(f"sentence {index}: token {token.id} head {token.head} out of range")
        if token.head == token.id:
            raise ConlluError(f"sentence {index}: token {token.id} is its own head")
    rows = len(sentence.tokens) + len(sentence.opaque)
    positions = [p for p, _ in sentence.opaque]
    if len(set(positions)) != len(positions) or any(p < 0 or p >= rows for p in positions):
        raise ConlluError(f"sentence {index}: inconsistent opaque row positions")


def serialize_conllu(sentences: Iterable[Sentence]) -> str:
    """Render sentences back to CoNLL-U text.

    FEATS keys are emitted in case-insensitive sorted order (the CoNLL-U
    convention), so byte-identity with the input is not guaranteed;
    re-parsing yields a structurally equal document. Invariant violations
    raise ConlluError instead of producing a broken file.
    """
    out: list[str] = []
    for index, sentence in enumerate(sentences):
        _check_sentence(sentence, index)
        for key, value in sentence.metadata:
            out.append(f"# {key}" if value is None else f"# {key} = {value}")
        opaque = dict(sentence.opaque)
        rows = len(sentence.tokens) + len(sentence.opaque)
        tokens = iter(sentence.tokens)
        for position in range(rows):
            if position in opaque:
                out.append(opaque[position])
                continue
            t = next(tokens)
            out.append(
                "\t".join(
                    (
                        str(t.id),
                        t.form,
                        t.lemma,
                        t.upos,
                        t.xpos if t.xpos is not None else "_",
                        _feats_text(t.feats),
                        str(t.head),
                        t.deprel,
                        t.deps,
                        _misc_text(t.misc),
                    )
                )
            )
        out.append("")
    return "\n".join(out) + "\n" if out else ""
