"""Lexicon-based autotagger.

Builds a surface-form -> tag-frequency lexicon from manually annotated
sentences and uses it to pre-fill suggestions on untagged text, the way an
annotation tool's autotag list pre-fills the annotator's screen. Lookup is
exact and case-sensitive; there is no stemming and no context model, so
suggestions are deterministic and high precision by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable

from .corpus import CorpusStore, Sentence, SentenceStatus
from .tagset import (
    Provenance,
    Tagset,
    UnknownTag,
    assignment_from_convention,
    parse_tag,
)


class PolicyMode(str, Enum):
    UNAMBIGUOUS_ONLY = "unambiguous_only"
    MOST_FREQUENT = "most_frequent"


@dataclass
class AutotagPolicy:
    mode: PolicyMode = PolicyMode.UNAMBIGUOUS_ONLY
    min_count: int = 1

    def __post_init__(self):
        self.mode = PolicyMode(self.mode)
        if self.min_count < 1:
            raise ValueError("min_count must be >= 1")


@dataclass
class AutotagLexicon:
    """surface form -> {full convention string -> count}."""

    tagset: Tagset
    entries: dict[str, dict[str, int]] = field(default_factory=dict)
    source_note: str = ""

    def add(self, surface: str, convention: str, count: int = 1) -> None:
        parse_tag(convention, self.tagset)  # reject tags the tagset can't carry
        if count < 1:
            raise ValueError(f"count for {surface!r}/{convention!r} must be >= 1")
        dist = self.entries.setdefault(surface, {})
        dist[convention] = dist.get(convention, 0) + count


class InvalidTagInInput(ValueError):
    def __init__(self, sentence_id: str, index: int, convention: str):
        super().__init__(
            f"sentence {sentence_id!r} token {index}: stored tag "
            f"{convention!r} does not parse against the tagset")
        self.sentence_id = sentence_id
        self.index = index
        self.convention = convention


class NoSuggestion(ValueError):
    def __init__(self, sentence_id: str, index: int, reason: str):
        super().__init__(f"sentence {sentence_id!r} token {index}: {reason}")
        self.sentence_id = sentence_id
        self.index = index


class LexiconFormatError(ValueError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line


def build_lexicon(sentences: Iterable[Sentence], tagset: Tagset,
                  source_note: str = "built from manual annotation") -> AutotagLexicon:
    """Count manual tag occurrences per surface form.

    Only manual-provenance tags count: feeding the autotagger's own output
    back in would just amplify its past guesses.
    """
    lex = AutotagLexicon(tagset=tagset, source_note=source_note)
    for sent in sentences:
        for idx, tok in enumerate(sent.tokens):
            if tok.tag is None or tok.tag.provenance != Provenance.MANUAL:
                continue
            try:
                parse_tag(tok.tag.convention, tagset)
            except UnknownTag:
                raise InvalidTagInInput(sent.id, idx, tok.tag.convention)
            dist = lex.entries.setdefault(tok.surface, {})
            dist[tok.tag.convention] = dist.get(tok.tag.convention, 0) + 1
    return lex


def suggest(lexicon: AutotagLexicon, surface: str,
            policy: AutotagPolicy) -> str | None:
    """Pick the convention to suggest for a surface form, or None.

    unambiguous_only suggests only when exactly one tag clears min_count;
    most_frequent takes the highest count, breaking ties by lexicographic
    order of the convention string.
    """
    dist = lexicon.entries.get(surface)
    if not dist:
        return None
    eligible = {conv: n for conv, n in dist.items() if n >= policy.min_count}
    if not eligible:
        return None
    if policy.mode == PolicyMode.UNAMBIGUOUS_ONLY:
        if len(eligible) == 1:
            return next(iter(eligible))
        return None
    return min(eligible.items(), key=lambda kv: (-kv[1], kv[0]))[0]


def autotag_sentence(sentence: Sentence, lexicon: AutotagLexicon,
                     policy: AutotagPolicy | None = None) -> Sentence:
    """Refresh suggestions on every non-manual token.

    Manual tags are never touched. Non-manual tokens end up suggested
    exactly when the policy yields a suggestion, so running twice with the
    same lexicon and policy is a no-op the second time.
    """
    policy = policy or AutotagPolicy()
    suggested = 0
    for tok in sentence.tokens:
        if tok.tag is not None and tok.tag.provenance == Provenance.MANUAL:
            continue
        conv = suggest(lexicon, tok.surface, policy)
        if conv is None:
            tok.tag = None
        else:
            tok.tag = assignment_from_convention(conv, lexicon.tagset, Provenance.AUTO)
            suggested += 1
    if sentence.status == SentenceStatus.RAW and suggested:
        sentence.status = SentenceStatus.AUTOTAGGED
    return sentence


def autotag_document(store: CorpusStore, doc_id: str, lexicon: AutotagLexicon,
                     policy: AutotagPolicy | None = None) -> int:
    """Autotag every sentence of a document.

    Returns the number of tokens carrying a suggestion afterwards.
    """
    policy = policy or AutotagPolicy()
    with store.lock:
        doc = store.document(doc_id)
        for sent in doc.sentences:
            autotag_sentence(sent, lexicon, policy)
        return _suggestion_count(doc.sentences)


def _suggestion_count(sentences: Iterable[Sentence]) -> int:
    return sum(1 for s in sentences for t in s.tokens
               if t.tag is not None and t.tag.provenance != Provenance.MANUAL)


def confirm_suggestion(store: CorpusStore, sentence_id: str, token_index: int):
    """Promote an auto suggestion to a manual tag.

    Confirmed tags then count toward future lexicon builds, closing the
    human-in-the-loop cycle.
    """
    with store.lock:
        sent = store.sentence(sentence_id)
        if not 0 <= token_index < len(sent.tokens):
            from .corpus import IndexOutOfRange

            raise IndexOutOfRange(sentence_id, token_index, len(sent.tokens))
        tok = sent.tokens[token_index]
        if tok.tag is None:
            raise NoSuggestion(sentence_id, token_index, "token is untagged")
        if tok.tag.provenance == Provenance.MANUAL:
            raise NoSuggestion(sentence_id, token_index, "tag is already manual")
        tok.tag = replace(tok.tag, provenance=Provenance.MANUAL)
        store.refresh_status(sent)
        return tok


def confirm_all(store: CorpusStore, sentence_id: str) -> int:
    """Confirm every suggestion in a sentence; returns how many flipped."""
    with store.lock:
        sent = store.sentence(sentence_id)
        flipped = 0
        for tok in sent.tokens:
            if tok.tag is not None and tok.tag.provenance != Provenance.MANUAL:
                tok.tag = replace(tok.tag, provenance=Provenance.MANUAL)
                flipped += 1
        if flipped:
            store.refresh_status(sent)
        return flipped


def dump_lexicon(lexicon: AutotagLexicon) -> str:
    """Serialize as TSV `surface<TAB>convention<TAB>count`, sorted for diffs."""
    lines = []
    for surface in sorted(lexicon.entries):
        for conv in sorted(lexicon.entries[surface]):
            lines.append(f"{surface}\t{conv}\t{lexicon.entries[surface][conv]}")
    return "\n".join(lines) + ("\n" if lines else "")


def load_lexicon(text: str, tagset: Tagset,
                 source_note: str = "loaded from TSV") -> AutotagLexicon:
    lex = AutotagLexicon(tagset=tagset, source_note=source_note)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise LexiconFormatError(lineno, f"expected 3 fields, got {len(parts)}")
        surface, conv, count_s = parts
        try:
            count = int(count_s)
        except ValueError:
            raise LexiconFormatError(lineno, f"count {count_s!r} is not an integer")
        if count < 1:
            raise LexiconFormatError(lineno, f"count must be >= 1, got {count}")
        try:
            lex.add(surface, conv, count)
        except UnknownTag:
            raise LexiconFormatError(lineno, f"unknown tag {conv!r}")
    return lex
