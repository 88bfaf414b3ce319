"""Lemma/synset/topic lexicon with typed synset-pair relations.

The on-disk contract is a pair of TSV files:

* sense rows:    ``lemma<TAB>pos(n|v)<TAB>synset-id<TAB>topic``
* relation rows: ``synset-id<TAB>relation-name<TAB>synset-id``

Topics are the Princeton lexicographer-file names, restricted to the 26
noun and 15 verb classes. ``antonym`` and ``similar`` edges are closed
under symmetry at load time; any other relation name is directed.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field

__all__ = [
    "NOUN_TOPICS",
    "VERB_TOPICS",
    "ALL_TOPICS",
    "SYMMETRIC_RELATIONS",
    "Lexicon",
    "LexiconError",
    "TopicError",
    "normalize_lemma",
    "pos_class",
    "normalize_topic",
    "load_lexicon",
    "convert_omw",
]

NOUN_TOPICS = frozenset(
    "noun." + name
    for name in (
        "Tops", "act", "animal", "artifact", "attribute", "body", "cognition",
        "communication", "event", "feeling", "food", "group", "location",
        "motive", "object", "person", "phenomenon", "plant", "possession",
        "process", "quantity", "relation", "shape", "state", "substance", "time",
    )
)

VERB_TOPICS = frozenset(
    "verb." + name
    for name in (
        "body", "change", "cognition", "communication", "competition",
        "consumption", "contact", "creation", "emotion", "motion",
        "perception", "possession", "social", "stative", "weather",
    )
)

ALL_TOPICS = NOUN_TOPICS | VERB_TOPICS

SYMMETRIC_RELATIONS = frozenset({"antonym", "similar"})

# Princeton lexicographer file numbers, for the OMW converter.
LEXFILE_NAMES = {
    0: "adj.all", 1: "adj.pert", 2: "adv.all", 3: "noun.Tops", 4: "noun.act",
    5: "noun.animal", 6: "noun.artifact", 7: "noun.attribute", 8: "noun.body",
    9: "noun.cognition", 10: "noun.communication", 11: "noun.event",
    12: "noun.feeling", 13: "noun.food", 14: "noun.group", 15: "noun.location",
    16: "noun.motive", 17: "noun.object", 18: "noun.person",
    19: "noun.phenomenon", 20: "noun.plant", 21: "noun.possession",
    22: "noun.process", 23: "noun.quantity", 24: "noun.relation",
    25: "noun.shape", 26: "noun.state", 27: "noun.substance", 28: "noun.time",
    29: "verb.body", 30: "verb.change", 31: "verb.cognition",
    32: "verb.communication", 33: "verb.competition", 34: "verb.consumption",
    35: "verb.contact", 36: "verb.creation", 37: "verb.emotion",
    38: "verb.motion", 39: "verb.perception", 40: "verb.possession",
    41: "verb.social", 42: "verb.stative", 43: "verb.weather", 44: "adj.ppl",
}

_POS_NAMES = {"n": "noun", "v": "verb", "noun": "noun", "verb": "verb"}
_UPOS_CLASS = {"NOUN": "noun", "PROPN": "noun", "VERB": "verb"}


class LexiconError(Exception):
    """Raised for malformed or inconsistent lexicon data."""


class TopicError(ValueError):
    """Raised for topic values outside the closed inventory."""


def normalize_lemma(lemma: str) -> str:
    """NFC + lowercase, underscores mapped to spaces (multiword lemmas)."""
    return unicodedata.normalize("NFC", lemma).lower().replace("_", " ")


def pos_class(upos: str | None) -> str | None:
    """Map a UD POS tag to a topic class: NOUN/PROPN -> noun, VERB -> verb."""
    if upos is None:
        return None
    return _UPOS_CLASS.get(upos)


def normalize_topic(value: str, upos: str | None = None) -> str:
    """Resolve a bare or qualified OntoClass value to an inventory topic.

    Bare values ("feeling") are qualified from ``upos``; qualified values
    ("noun.feeling") are checked against ``upos`` when one is given.
    Raises TopicError for unknown topics and for POS tags that have no
    topic inventory.
    """
    if "." in value:
        cls = value.split(".", 1)[0]
        if upos is not None:
            expected = pos_class(upos)
            if expected is None:
                raise TopicError(f"no topic inventory for UPOS {upos!r}")
            if expected != cls:
                raise TopicError(f"topic {value!r} does not fit UPOS {upos!r}")
        topic = value
    else:
        if upos is None:
            raise TopicError(f"bare topic {value!r} needs a row UPOS to be qualified")
        cls = pos_class(upos)
        if cls is None:
            raise TopicError(f"no topic inventory for UPOS {upos!r}")
        topic = f"{cls}.{value}"
    if topic not in ALL_TOPICS:
        raise TopicError(f"unknown topic {topic!r}")
    return topic


@dataclass
class Lexicon:
    """Immutable-after-load sense/topic/relation tables."""

    senses: dict[tuple[str, str], frozenset[str]] = field(default_factory=dict)
    topics: dict[str, str] = field(default_factory=dict)
    relations: dict[tuple[str, str], frozenset[str]] = field(default_factory=dict)
    sense_count: int = 0
    relation_count: int = 0

    @classmethod
    def empty(cls) -> "Lexicon":
        return cls()

    @classmethod
    def from_rows(
        cls,
        sense_rows: list[tuple[str, str, str, str]],
        relation_rows: list[tuple[str, str, str]] = (),
    ) -> "Lexicon":
        """Build and validate a lexicon from (lemma, pos, synset, topic) and
        (synset, relation, synset) tuples. Symmetric relations are closed."""
        senses: dict[tuple[str, str], set[str]] = {}
        topics: dict[str, str] = {}
        for lemma, pos, synset, topic in sense_rows:
            pos_name = _POS_NAMES.get(pos)
            if pos_name is None:
                raise LexiconError(f"unknown POS {pos!r} for lemma {lemma!r}")
            if topic not in ALL_TOPICS:
                raise LexiconError(f"unknown topic {topic!r} for synset {synset!r}")
            if not topic.startswith(pos_name + "."):
                raise LexiconError(
                    f"topic {topic!r} does not match POS {pos_name!r} (synset {synset!r})")
            if not synset:
                raise LexiconError(f"empty synset id for lemma {lemma!r}")
            known = topics.get(synset)
            if known is not None and known != topic:
                raise LexiconError(
                    f"synset {synset!r} assigned two topics: {known!r} and {topic!r}")
            topics[synset] = topic
            senses.setdefault((normalize_lemma(lemma), pos_name), set()).add(synset)
        if not senses:
            raise LexiconError("empty lexicon: no sense rows")

        relations: dict[tuple[str, str], set[str]] = {}
        count = 0
        for src, name, dst in relation_rows:
            if not name:
                raise LexiconError("empty relation name")
            for synset in (src, dst):
                if synset not in topics:
                    raise LexiconError(f"relation references unknown synset {synset!r}")
            bucket = relations.setdefault((src, name), set())
            if dst not in bucket:
                bucket.add(dst)
                count += 1
            if name in SYMMETRIC_RELATIONS:
                relations.setdefault((dst, name), set()).add(src)
        return cls(
            senses={k: frozenset(v) for k, v in senses.items()},
            topics=topics,
            relations={k: frozenset(v) for k, v in relations.items()},
            sense_count=sum(len(v) for v in senses.values()),
            relation_count=count,
        )

    @property
    def synset_count(self) -> int:
        return len(self.topics)

    def synsets_of(self, lemma: str, pos: str) -> frozenset[str]:
        """All synsets of a lemma in one POS class; exact lookup after
        lemma normalization."""
        pos_name = _POS_NAMES.get(pos)
        if pos_name is None:
            return frozenset()
        return self.senses.get((normalize_lemma(lemma), pos_name), frozenset())

    def topics_of(self, lemma: str, pos: str) -> frozenset[str]:
        return frozenset(self.topics[s] for s in self.synsets_of(lemma, pos))

    def related(self, synset: str, relation: str) -> frozenset[str]:
        return self.relations.get((synset, relation), frozenset())

    def has_relation(self, lemma1: str, pos1: str, relation: str,
                     lemma2: str, pos2: str) -> bool:
        """Any-sense test: some synset of lemma1 bears ``relation`` to some
        synset of lemma2."""
        targets = self.synsets_of(lemma2, pos2)
        if not targets:
            return False
        for synset in self.synsets_of(lemma1, pos1):
            if self.related(synset, relation) & targets:
                return True
        return False


def _read_tsv(path, n_columns: int, what: str):
    rows = []
    with open(path, encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            cells = line.split("\t")
            if len(cells) != n_columns:
                raise LexiconError(
                    f"{path}:{line_no}: expected {n_columns} tab-separated "
                    f"{what} columns, got {len(cells)}")
            rows.append((line_no, cells))
    return rows


def load_lexicon(sense_path, relation_path=None) -> Lexicon:
    """Load the sense TSV and optional relation TSV into a validated Lexicon.

    Duplicate rows are deduplicated. Any malformed row, unknown topic, or
    relation to an unknown synset is fatal, with its line number.
    """
    sense_rows = []
    for line_no, cells in _read_tsv(sense_path, 4, "sense"):
        lemma, pos, synset, topic = cells
        if pos not in _POS_NAMES:
            raise LexiconError(f"{sense_path}:{line_no}: unknown POS {pos!r}")
        if topic not in ALL_TOPICS:
            raise LexiconError(f"{sense_path}:{line_no}: unknown topic {topic!r}")
        sense_rows.append((lemma, pos, synset, topic))
    relation_rows = []
    known = {synset for _, _, synset, _ in sense_rows}
    if relation_path is not None:
        for line_no, cells in _read_tsv(relation_path, 3, "relation"):
            src, name, dst = cells
            for synset in (src, dst):
                if synset not in known:
                    raise LexiconError(
                        f"{relation_path}:{line_no}: relation references "
                        f"unknown synset {synset!r}")
            relation_rows.append((src, name, dst))
    try:
        return Lexicon.from_rows(sense_rows, relation_rows)
    except LexiconError as exc:
        raise LexiconError(f"{sense_path}: {exc}") from None


@dataclass
class ConvertStats:
    senses_written: int = 0
    skipped_no_lexname: int = 0
    skipped_pos: int = 0
    relations_written: int = 0


def _load_lexname_index(path) -> dict[str, str]:
    """Read a synset -> lexname map; the lexname may be a name or the
    two-digit Princeton lexfile number."""
    index: dict[str, str] = {}
    for line_no, cells in _read_tsv(path, 2, "lexname-index"):
        synset, lexname = cells
        if lexname.isdigit():
            resolved = LEXFILE_NAMES.get(int(lexname))
            if resolved is None:
                raise LexiconError(f"{path}:{line_no}: unknown lexfile number {lexname!r}")
            lexname = resolved
        index[synset] = lexname
    return index


def convert_omw(omw_tab_path, lexname_index_path, out_sense_path,
                relation_tab_path=None, out_relation_path=None) -> ConvertStats:
    """Best-effort converter from an OMW 1.4 tab file to the sense TSV.

    The OMW file contributes ``<synset> <lang:>lemma <form>`` rows; the
    lexname index supplies synset topics. Only noun/verb synsets that have
    a topic are written. When a relation tab file is given, rows whose
    endpoints survive the sense conversion are copied to the relation TSV.
    """
    stats = ConvertStats()
    lexnames = _load_lexname_index(lexname_index_path)
    entries: set[tuple[str, str, str, str]] = set()
    with open(omw_tab_path, encoding="utf-8") as handle:
        for raw in handle:
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            cells = line.split("\t")
            if len(cells) < 3:
                continue
            synset, rel, value = cells[0], cells[1], cells[2]
            if rel != "lemma" and not rel.endswith(":lemma"):
                continue
            pos_suffix = synset.rsplit("-", 1)[-1]
            if pos_suffix not in ("n", "v"):
                stats.skipped_pos += 1
                continue
            topic = lexnames.get(synset)
            if topic is None or topic not in ALL_TOPICS:
                stats.skipped_no_lexname += 1
                continue
            entries.add((normalize_lemma(value), pos_suffix, synset, topic))
    with open(out_sense_path, "w", encoding="utf-8") as out:
        for lemma, pos, synset, topic in sorted(entries):
            out.write(f"{lemma}\t{pos}\t{synset}\t{topic}\n")
    stats.senses_written = len(entries)

    if relation_tab_path is not None and out_relation_path is not None:
        known = {synset for _, _, synset, _ in entries}
        kept: set[tuple[str, str, str]] = set()
        for _, cells in _read_tsv(relation_tab_path, 3, "relation"):
            src, name, dst = cells
            if src in known and dst in known:
                kept.add((src, name, dst))
        with open(out_relation_path, "w", encoding="utf-8") as out:
            for src, name, dst in sorted(kept):
                out.write(f"{src}\t{name}\t{dst}\n")
        stats.relations_written = len(kept)
    return stats
