"""Treebank frequency lists and topic-coverage statistics.

Reproduces the coverage methodology: count noun/verb lemma frequencies
across treebanks, keep lemmas strictly above a threshold, then bucket
lemmas and their summed form counts by how many distinct topics the
lexicon assigns them (k = 0 means untagged).
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from .conllu import Sentence
from .lexicon import Lexicon, normalize_lemma

__all__ = [
    "FreqEntry",
    "CoverageReport",
    "frequency_list",
    "coverage_report",
    "render_report",
]

_UPOS_TO_POS = {"NOUN": "noun", "VERB": "verb"}


@dataclass(frozen=True)
class FreqEntry:
    lemma: str
    pos: str  # noun | verb
    freq: int


@dataclass
class CoverageReport:
    """Per-topic counts and by-topic-count distributions.

    ``by_topic_count_*`` map "noun"/"verb"/"total" to {k: (count, pct)};
    ``per_topic`` maps a topic to (lemma_count, form_count); ``untagged``
    is the k=0 bucket per POS.
    """

    threshold: int | None = None
    per_topic: dict[str, tuple[int, int]] = field(default_factory=dict)
    by_topic_count_lemmas: dict[str, dict[int, tuple[int, float]]] = field(default_factory=dict)
    by_topic_count_forms: dict[str, dict[int, tuple[int, float]]] = field(default_factory=dict)
    untagged: dict[str, tuple[int, int]] = field(default_factory=dict)


def frequency_list(sentences: Iterable[Sentence], pos_set: set[str] = frozenset({"noun", "verb"}),
                   min_freq: int = 5) -> list[FreqEntry]:
    """Lemma frequencies over NOUN/VERB tokens, strictly above min_freq.

    PROPN is excluded; lemmas are normalized exactly like lexicon lookups
    so that "tagged" means the same thing here and in matching. Sorted by
    descending frequency, then lemma.
    """
    counts: Counter[tuple[str, str]] = Counter()
    for sentence in sentences:
        for token in sentence.tokens:
            pos = _UPOS_TO_POS.get(token.upos)
            if pos is None or pos not in pos_set:
                continue
            counts[(normalize_lemma(token.lemma), pos)] += 1
    entries = [
        FreqEntry(lemma=lemma, pos=pos, freq=freq)
        for (lemma, pos), freq in counts.items()
        if freq > min_freq
    ]
    entries.sort(key=lambda e: (-e.freq, e.lemma, e.pos))
    return entries


def _distribution(weights: dict[int, int]) -> dict[int, tuple[int, float]]:
    total = sum(weights.values())
    out = {}
    for k in sorted(weights):
        count = weights[k]
        pct = (count / total * 100.0) if total else 0.0
        out[k] = (count, pct)
    return out


def coverage_report(entries: list[FreqEntry], lexicon: Lexicon,
                    threshold: int | None = None) -> CoverageReport:
    """Bucket thresholded lemmas (and their form counts) by topic count."""
    lemma_buckets: dict[str, Counter[int]] = {}
    form_buckets: dict[str, Counter[int]] = {}
    per_topic_lemmas: Counter[str] = Counter()
    per_topic_forms: Counter[str] = Counter()
    untagged: dict[str, list[int]] = {}

    for entry in entries:
        topics = lexicon.topics_of(entry.lemma, entry.pos)
        k = len(topics)
        lemma_buckets.setdefault(entry.pos, Counter())[k] += 1
        form_buckets.setdefault(entry.pos, Counter())[k] += entry.freq
        for topic in topics:
            per_topic_lemmas[topic] += 1
            per_topic_forms[topic] += entry.freq
        if k == 0:
            bucket = untagged.setdefault(entry.pos, [0, 0])
            bucket[0] += 1
            bucket[1] += entry.freq

    report = CoverageReport(threshold=threshold)
    total_lemmas: Counter[int] = Counter()
    total_forms: Counter[int] = Counter()
    for pos in sorted(lemma_buckets):
        report.by_topic_count_lemmas[pos] = _distribution(dict(lemma_buckets[pos]))
        report.by_topic_count_forms[pos] = _distribution(dict(form_buckets[pos]))
        total_lemmas.update(lemma_buckets[pos])
        total_forms.update(form_buckets[pos])
    if lemma_buckets:
        report.by_topic_count_lemmas["total"] = _distribution(dict(total_lemmas))
        report.by_topic_count_forms["total"] = _distribution(dict(total_forms))
    report.per_topic = {
        topic: (per_topic_lemmas[topic], per_topic_forms[topic])
        for topic in sorted(per_topic_lemmas)
    }
    report.untagged = {pos: (c[0], c[1]) for pos, c in sorted(untagged.items())}
    return report


def _k_columns(report: CoverageReport) -> list[int]:
    max_k = 0
    for dist in report.by_topic_count_lemmas.values():
        if dist:
            max_k = max(max_k, max(dist))
    return list(range(max_k + 1))


def _pos_rows(section: dict[str, dict[int, tuple[int, float]]]) -> list[str]:
    rows = [pos for pos in ("noun", "verb") if pos in section]
    rows.extend(pos for pos in sorted(section) if pos not in ("noun", "verb", "total"))
    if "total" in section:
        rows.append("total")
    return rows


def _render_table(report: CoverageReport) -> str:
    ks = _k_columns(report)
    lines = []
    if report.threshold is not None:
        lines.append(f"# coverage report (frequency > {report.threshold})")
        lines.append("")
    for title, section in (("lemmas by number of topics", report.by_topic_count_lemmas),
                           ("forms by number of topics", report.by_topic_count_forms)):
        lines.append(f"## {title}")
        lines.append("\t".join(["pos"] + [str(k) for k in ks] + ["total"]))
        for pos in _pos_rows(section):
            dist = section[pos]
            cells = [pos]
            row_total = sum(count for count, _ in dist.values())
            for k in ks:
                count, pct = dist.get(k, (0, 0.0))
                cells.append(f"{count} ({pct:.1f}%)")
            cells.append(f"{row_total} (100.0%)" if row_total else "0 (0.0%)")
            lines.append("\t".join(cells))
        lines.append("")
    lines.append("## per-topic counts")
    lines.append("\t".join(["topic", "lemmas", "forms"]))
    ordered = sorted(report.per_topic.items(),
                     key=lambda kv: (kv[0].split(".", 1)[0], -kv[1][0], kv[0]))
    for topic, (lemmas, forms) in ordered:
        lines.append(f"{topic}\t{lemmas}\t{forms}")
    return "\n".join(lines) + "\n"


def _render_tsv(report: CoverageReport) -> str:
    lines = []
    if report.threshold is not None:
        lines.append(f"threshold\t{report.threshold}")
    for name, section in (("lemmas_by_k", report.by_topic_count_lemmas),
                          ("forms_by_k", report.by_topic_count_forms)):
        for pos in _pos_rows(section):
            for k, (count, pct) in section[pos].items():
                lines.append(f"{name}\t{pos}\t{k}\t{count}\t{pct:.1f}")
    for topic, (lemmas, forms) in report.per_topic.items():
        lines.append(f"per_topic\t{topic}\t{lemmas}\t{forms}")
    for pos, (lemmas, forms) in report.untagged.items():
        lines.append(f"untagged\t{pos}\t{lemmas}\t{forms}")
    return "\n".join(lines) + "\n" if lines else ""


def _render_json(report: CoverageReport) -> str:
    payload = {
        "threshold": report.threshold,
        "lemmas_by_topic_count": {
            pos: {str(k): [count, round(pct, 1)] for k, (count, pct) in dist.items()}
            for pos, dist in report.by_topic_count_lemmas.items()
        },
        "forms_by_topic_count": {
            pos: {str(k): [count, round(pct, 1)] for k, (count, pct) in dist.items()}
            for pos, dist in report.by_topic_count_forms.items()
        },
        "per_topic": {t: list(v) for t, v in report.per_topic.items()},
        "untagged": {pos: list(v) for pos, v in report.untagged.items()},
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def render_report(report: CoverageReport, fmt: str = "table") -> str:
    """Render a report as "table" (appendix-style), "tsv", or "json"."""
    if fmt == "table":
        return _render_table(report)
    if fmt == "tsv":
        return _render_tsv(report)
    if fmt == "json":
        return _render_json(report)
    raise ValueError(f"unknown report format {fmt!r}")
