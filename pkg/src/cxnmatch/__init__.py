"""Construction pattern engine for CoNLL-U treebanks.

Parses CoNLL-C construction definitions, compiles them to dependency
patterns (with canonical Grew query emission), matches them in CoNLL-U
corpora under structural, semantic, and inter-slot relational
constraints, and computes lexicon coverage statistics.
"""

from .compiler import CompileError, Edge, NodeConstraint, OrderLink, Pattern, compile_cxn, emit_grew
from .conllc import (
    CxnDef,
    CxnRow,
    ConllcError,
    Diagnostic,
    IdentityConstraint,
    WithoutConstraint,
    parse_conllc,
    parse_conllc_file,
    render_conllc,
    validate,
)
from .conllu import (
    ConlluError,
    ParseIssue,
    Sentence,
    Token,
    parse_conllu,
    parse_conllu_file,
    serialize_conllu,
)
from .coverage import CoverageReport, FreqEntry, coverage_report, frequency_list, render_report
from .lexicon import (
    Lexicon,
    LexiconError,
    TopicError,
    convert_omw,
    load_lexicon,
    normalize_topic,
)
from .matcher import AnnotationError, Match, MatchOptions, annotate, match_corpus, match_sentence

__version__ = "0.1.0"
