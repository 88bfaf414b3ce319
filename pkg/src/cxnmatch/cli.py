"""Command-line surface: validate, compile, match, coverage, convert-lexicon.

Exit codes: 0 success, 1 domain error (validation failed, compile
refused), 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import conllc, conllu, coverage, lexicon, matcher
from .compiler import CompileError, compile_cxn, emit_grew

__all__ = ["main", "run"]


def _write_output(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _expand_cxn_paths(paths: list[str]) -> list[Path]:
    out: list[Path] = []
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            out.extend(sorted(p.glob("*.conllc")))
        else:
            out.append(p)
    return out


def _load_treebanks(paths: list[str]) -> list[conllu.Sentence]:
    sentences: list[conllu.Sentence] = []
    for path in paths:
        issues: list[conllu.ParseIssue] = []
        sentences.extend(conllu.parse_conllu_file(path, issues))
        for issue in issues:
            print(f"{path}:{issue}", file=sys.stderr)
    return sentences


def _load_lexicon(args) -> lexicon.Lexicon:
    return lexicon.load_lexicon(args.lexicon, getattr(args, "relations", None))


def cmd_validate(args) -> int:
    status = 0
    for path in _expand_cxn_paths(args.cxn):
        try:
            definition = conllc.parse_conllc_file(path)
        except conllc.ConllcError as exc:
            print(f"{path}: error: {exc}", file=sys.stderr)
            status = max(status, 1)
            continue
        for diag in conllc.validate(definition):
            print(f"{path}: {diag}", file=sys.stderr)
            if diag.severity == "error":
                status = max(status, 1)
    return status


def cmd_compile(args) -> int:
    definition = conllc.parse_conllc_file(args.cxn)
    pattern = compile_cxn(definition)
    _write_output(emit_grew(pattern), args.output)
    return 0


def _match_line(sentence: conllu.Sentence, index: int, cxn_id: str,
                match: matcher.Match) -> str:
    sid = sentence.sent_id or str(index)
    pairs = " ".join(
        f"{row_id}={sentence.token_by_id(tid).form}"
        for row_id, tid in match.assignment.items()
    )
    return f"{sid}\t{cxn_id}\t{pairs}"


def cmd_match(args) -> int:
    if args.lexicon is None and not args.no_sem:
        print("match: a lexicon is required unless --no-sem is given", file=sys.stderr)
        return 2
    definition = conllc.parse_conllc_file(args.cxn)
    pattern = compile_cxn(definition)
    lex = _load_lexicon(args) if args.lexicon else lexicon.Lexicon.empty()
    opts = matcher.MatchOptions(
        semantic_filtering=not args.no_sem,
        missing_lemma_policy=args.sem_missing,
        identity_case_fold=args.identity_case_fold,
    )
    sentences = _load_treebanks(args.treebank)
    cxn_id = pattern.cxn_id or "cxn"

    lines = []
    report_rows = []
    annotated: list[conllu.Sentence] = []
    for index, sentence in enumerate(sentences):
        matches = matcher.match_sentence(pattern, sentence, lex, opts, sentence_ref=index)
        current = sentence
        for occurrence, match in enumerate(matches, start=1):
            lines.append(_match_line(sentence, index, cxn_id, match))
            if args.annotate:
                current = matcher.annotate(current, match, cxn_id, occurrence)
            if args.report:
                sid = sentence.sent_id or str(index)
                for row_id, tid in match.assignment.items():
                    report_rows.append(
                        f"{sid}\t{cxn_id}\t{occurrence}\t{row_id}\t{tid}"
                        f"\t{sentence.token_by_id(tid).form}")
        annotated.append(current)

    _write_output("".join(line + "\n" for line in lines), args.output)
    if args.annotate:
        Path(args.annotate).write_text(conllu.serialize_conllu(annotated), encoding="utf-8")
    if args.report:
        header = "sent_id\tcxn_id\toccurrence\trow\ttoken_id\tform\n"
        Path(args.report).write_text(
            header + "".join(row + "\n" for row in report_rows), encoding="utf-8")
    return 0


def cmd_coverage(args) -> int:
    if not args.treebank:
        print("coverage: at least one treebank file is required", file=sys.stderr)
        return 2
    lex = _load_lexicon(args)
    pos_set = {p.strip() for p in args.pos.split(",") if p.strip()}
    unknown = pos_set - {"noun", "verb"}
    if unknown:
        print(f"coverage: unknown POS {sorted(unknown)}", file=sys.stderr)
        return 2
    sentences = _load_treebanks(args.treebank)
    entries = coverage.frequency_list(sentences, pos_set, args.min_freq)
    report = coverage.coverage_report(entries, lex, threshold=args.min_freq)
    _write_output(coverage.render_report(report, args.format), args.output)
    return 0


def cmd_convert_lexicon(args) -> int:
    stats = lexicon.convert_omw(
        args.omw_tab, args.lexnames, args.out_senses,
        relation_tab_path=args.relation_tab, out_relation_path=args.out_relations)
    print(
        f"senses written: {stats.senses_written}; "
        f"skipped (no lexname): {stats.skipped_no_lexname}; "
        f"skipped (POS): {stats.skipped_pos}; "
        f"relations written: {stats.relations_written}",
        file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cxnmatch",
        description="Construction pattern engine for CoNLL-U treebanks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check CoNLL-C files and print diagnostics")
    p.add_argument("cxn", nargs="+", help="CoNLL-C files or directories of *.conllc")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compile", help="compile a CoNLL-C file and print its Grew query")
    p.add_argument("cxn", help="CoNLL-C file")
    p.add_argument("--grew", action="store_true", default=True,
                   help="emit Grew query text (the default and only output)")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("match", help="match one construction against treebanks")
    p.add_argument("--cxn", required=True, help="CoNLL-C file")
    p.add_argument("--treebank", nargs="+", required=True, help="CoNLL-U files")
    p.add_argument("--lexicon", default=None, help="sense TSV")
    p.add_argument("--relations", default=None, help="relation TSV")
    p.add_argument("--no-sem", action="store_true", help="disable OntoClass filtering")
    p.add_argument("--sem-missing", choices=[matcher.FAIL, matcher.PASS],
                   default=matcher.FAIL,
                   help="what an OntoClass test does with lemmas absent from the lexicon")
    p.add_argument("--identity-case-fold", action="store_true",
                   help="case-fold IDENTITY equality comparisons")
    p.add_argument("--annotate", default=None, metavar="OUT.conllu",
                   help="write the corpus with Cxn MISC annotations")
    p.add_argument("--report", default=None, metavar="OUT.tsv",
                   help="write one TSV row per matched slot")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("coverage", help="topic-coverage report over treebanks")
    p.add_argument("--treebank", nargs="+", required=True, help="CoNLL-U files")
    p.add_argument("--lexicon", required=True, help="sense TSV")
    p.add_argument("--relations", default=None, help="relation TSV (unused for coverage)")
    p.add_argument("--min-freq", type=int, default=5,
                   help="keep lemmas with frequency strictly above this (default 5)")
    p.add_argument("--pos", default="noun,verb", help="comma-separated POS classes")
    p.add_argument("--format", choices=["table", "tsv", "json"], default="table")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("convert-lexicon",
                       help="convert OMW tab data + a lexname index to the sense TSV")
    p.add_argument("--omw-tab", required=True, help="OMW 1.4 tab-format file")
    p.add_argument("--lexnames", required=True,
                   help="TSV mapping synset id to lexname (name or lexfile number)")
    p.add_argument("--out-senses", required=True)
    p.add_argument("--relation-tab", default=None,
                   help="relation TSV to filter against the converted synsets")
    p.add_argument("--out-relations", default=None)
    p.set_defaults(func=cmd_convert_lexicon)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (conllc.ConllcError, CompileError, conllu.ConlluError,
            matcher.AnnotationError) as exc:
        print(f"cxnmatch: {exc}", file=sys.stderr)
        return 1
    except lexicon.LexiconError as exc:
        print(f"cxnmatch: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"cxnmatch: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    raise SystemExit(main())
