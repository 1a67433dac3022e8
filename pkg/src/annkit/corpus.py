"""Corpus store: subcorpus taxonomy, documents, sentences, tokens, stats.

The corpus is organized as three subcorpora (indirect written, direct
written, spoken), each with its own branch enumeration. Documents hold
ordered sentences; every sentence gets a corpus-wide unique ID of the form
``<doc_id>.<4-digit ordinal>``. Tokens keep character spans into their
sentence so the original text is always reconstructible.
"""

from __future__ import annotations

import threading
import unicodedata
from dataclasses import dataclass, field
from enum import Enum

from .tagset import Provenance, TagAssignment, Tagset, make_assignment

DANDA = "।"
DOUBLE_DANDA = "॥"

SENTENCE_ORDINAL_WIDTH = 4


class Mode(str, Enum):
    INDIRECT_WRITTEN = "indirect_written"
    DIRECT_WRITTEN = "direct_written"
    SPOKEN = "spoken"


INDIRECT_SOURCES = ("magazine", "book")
INDIRECT_GENRES = ("prose", "drama", "poetry", "nonfiction")
DIRECT_CHANNELS = ("cmc_synchronous", "cmc_asynchronous",
                   "non_cmc_personal", "non_cmc_public")
SPOKEN_DOMAINS = ("personal", "public")


class InvalidSubcorpus(ValueError):
    pass


class DuplicateDocument(ValueError):
    def __init__(self, doc_id: str):
        super().__init__(f"document {doc_id!r} already exists")
        self.doc_id = doc_id


class UnknownDocument(LookupError):
    def __init__(self, doc_id: str):
        super().__init__(f"unknown document {doc_id!r}")
        self.doc_id = doc_id


class UnknownSentence(LookupError):
    def __init__(self, sentence_id: str):
        super().__init__(f"unknown sentence {sentence_id!r}")
        self.sentence_id = sentence_id


class IndexOutOfRange(IndexError):
    def __init__(self, sentence_id: str, index: int, count: int):
        super().__init__(
            f"token index {index} out of range for sentence {sentence_id!r} "
            f"({count} tokens)")
        self.sentence_id = sentence_id
        self.index = index


class EncodingError(ValueError):
    def __init__(self, offset: int):
        super().__init__(f"undecodable byte at offset {offset}")
        self.offset = offset


@dataclass(frozen=True)
class SubcorpusPath:
    """Position in the subcorpus taxonomy.

    indirect_written carries (source, genre); direct_written carries
    (channel,); spoken carries (domain,).
    """

    mode: Mode
    parts: tuple[str, ...]

    def __post_init__(self):
        mode, parts = self.mode, self.parts
        if mode == Mode.INDIRECT_WRITTEN:
            ok = (len(parts) == 2 and parts[0] in INDIRECT_SOURCES
                  and parts[1] in INDIRECT_GENRES)
        elif mode == Mode.DIRECT_WRITTEN:
            ok = len(parts) == 1 and parts[0] in DIRECT_CHANNELS
        elif mode == Mode.SPOKEN:
            ok = len(parts) == 1 and parts[0] in SPOKEN_DOMAINS
        else:
            ok = False
        if not ok:
            raise InvalidSubcorpus(f"illegal branch {parts!r} under mode {mode.value!r}")

    @classmethod
    def indirect(cls, source: str, genre: str) -> SubcorpusPath:
        return cls(Mode.INDIRECT_WRITTEN, (source, genre))

    @classmethod
    def direct(cls, channel: str) -> SubcorpusPath:
        return cls(Mode.DIRECT_WRITTEN, (channel,))

    @classmethod
    def spoken(cls, domain: str) -> SubcorpusPath:
        return cls(Mode.SPOKEN, (domain,))

    @classmethod
    def parse(cls, text: str) -> SubcorpusPath:
        segs = [s for s in text.strip().strip("/").split("/") if s]
        if not segs:
            raise InvalidSubcorpus("empty subcorpus path")
        try:
            mode = Mode(segs[0])
        except ValueError:
            raise InvalidSubcorpus(f"unknown mode {segs[0]!r}")
        return cls(mode, tuple(segs[1:]))

    def __str__(self) -> str:
        return "/".join((self.mode.value,) + self.parts)


class SentenceStatus(str, Enum):
    RAW = "raw"
    AUTOTAGGED = "autotagged"
    IN_PROGRESS = "in_progress"
    COMPLETE = "complete"


@dataclass
class Token:
    surface: str
    span: tuple[int, int]
    tag: TagAssignment | None = None

    def to_dict(self) -> dict:
        return {
            "surface": self.surface,
            "span": list(self.span),
            "tag": self.tag.to_dict() if self.tag else None,
        }


@dataclass
class Sentence:
    id: str
    text: str
    tokens: list[Token]
    status: SentenceStatus = SentenceStatus.RAW

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "text": self.text,
            "status": self.status.value,
            "tokens": [t.to_dict() for t in self.tokens],
        }


@dataclass
class Document:
    doc_id: str
    subcorpus: SubcorpusPath
    sentences: list[Sentence] = field(default_factory=list)
    metadata_ref: str | None = None

    def token_count(self) -> int:
        return sum(len(s.tokens) for s in self.sentences)


@dataclass
class SubcorpusCount:
    word_count: int = 0
    sentence_count: int = 0

    def to_dict(self) -> dict:
        return {"word_count": self.word_count, "sentence_count": self.sentence_count}


@dataclass
class CorpusStats:
    word_count: int = 0
    sentence_count: int = 0
    per_subcorpus: dict[str, SubcorpusCount] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "word_count": self.word_count,
            "sentence_count": self.sentence_count,
            "per_subcorpus": {k: v.to_dict() for k, v in sorted(self.per_subcorpus.items())},
        }


def is_punct_char(ch: str) -> bool:
    # Dandas are category Po anyway, but keep them explicit: they are the
    # sentence punctuation this corpus actually contains.
    return ch in (DANDA, DOUBLE_DANDA) or unicodedata.category(ch).startswith("P")


def is_punct_token(surface: str) -> bool:
    return bool(surface) and all(is_punct_char(c) for c in surface)


def tokenize(text: str) -> list[Token]:
    """Split a sentence into tokens with character spans.

    Splits on Unicode whitespace; within each non-space run, maximal runs
    of punctuation become their own tokens, so "əre!" yields "əre", "!".
    """
    tokens: list[Token] = []
    i, n = 0, len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        start = i
        punct = is_punct_char(text[i])
        while i < n and not text[i].isspace() and is_punct_char(text[i]) == punct:
            i += 1
        tokens.append(Token(surface=text[start:i], span=(start, i)))
    return tokens


def detokenize(sentence: Sentence) -> str:
    """Rebuild the sentence text from token spans; must equal sentence.text."""
    out: list[str] = []
    pos = 0
    for tok in sentence.tokens:
        start, end = tok.span
        out.append(sentence.text[pos:start])
        out.append(tok.surface)
        pos = end
    out.append(sentence.text[pos:])
    return "".join(out)


def split_sentences(text: str, splitter: str = "newline") -> list[str]:
    """Split raw text into sentence strings.

    "newline": one sentence per non-blank line. "danda": split after each
    danda/double danda, keeping the danda with its sentence; whitespace
    runs inside a sentence collapse to single spaces.
    """
    if splitter == "newline":
        return [line.strip() for line in text.splitlines() if line.strip()]
    if splitter == "danda":
        sentences: list[str] = []
        buf: list[str] = []
        for ch in text:
            buf.append(ch)
            if ch in (DANDA, DOUBLE_DANDA):
                chunk = " ".join("".join(buf).split())
                if chunk:
                    sentences.append(chunk)
                buf = []
        tail = " ".join("".join(buf).split())
        if tail:
            sentences.append(tail)
        return sentences
    raise ValueError(f"unknown sentence splitter {splitter!r}")


def sentence_id(doc_id: str, ordinal: int) -> str:
    return f"{doc_id}.{ordinal:0{SENTENCE_ORDINAL_WIDTH}d}"


class CorpusStore:
    """In-memory corpus with per-document mutation ordering.

    All mutations take the store lock, so concurrent writers to the same
    document are applied in a total order and readers see consistent
    snapshots.
    """

    def __init__(self, tagset: Tagset):
        self.tagset = tagset
        self.documents: dict[str, Document] = {}
        self._sentence_index: dict[str, tuple[str, int]] = {}
        self.lock = threading.RLock()

    # -- document lifecycle

    def ingest_document(self, raw: str | bytes, doc_id: str,
                        subcorpus: SubcorpusPath,
                        splitter: str = "newline") -> Document:
        if isinstance(raw, bytes):
            try:
                raw = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise EncodingError(exc.start) from exc
        with self.lock:
            if doc_id in self.documents:
                raise DuplicateDocument(doc_id)
            doc = Document(doc_id=doc_id, subcorpus=subcorpus)
            for ordinal, text in enumerate(split_sentences(raw, splitter), start=1):
                doc.sentences.append(Sentence(
                    id=sentence_id(doc_id, ordinal),
                    text=text,
                    tokens=tokenize(text),
                ))
            self._register(doc)
            return doc

    def add_document(self, doc: Document) -> Document:
        """Adopt an externally built document (CSV import, TSV load)."""
        with self.lock:
            if doc.doc_id in self.documents:
                raise DuplicateDocument(doc.doc_id)
            for sent in doc.sentences:
                if sent.id in self._sentence_index:
                    raise DuplicateDocument(
                        f"sentence id {sent.id!r} already present in corpus")
            self._register(doc)
            return doc

    def _register(self, doc: Document) -> None:
        self.documents[doc.doc_id] = doc
        for idx, sent in enumerate(doc.sentences):
            self._sentence_index[sent.id] = (doc.doc_id, idx)

    def document(self, doc_id: str) -> Document:
        doc = self.documents.get(doc_id)
        if doc is None:
            raise UnknownDocument(doc_id)
        return doc

    def sentence(self, sentence_id: str) -> Sentence:
        loc = self._sentence_index.get(sentence_id)
        if loc is None:
            raise UnknownSentence(sentence_id)
        doc_id, idx = loc
        return self.documents[doc_id].sentences[idx]

    def document_of(self, sentence_id: str) -> Document:
        loc = self._sentence_index.get(sentence_id)
        if loc is None:
            raise UnknownSentence(sentence_id)
        return self.documents[loc[0]]

    # -- tagging

    def set_tag(self, sentence_id: str, token_index: int, leaf_label: str,
                provenance: Provenance = Provenance.MANUAL) -> Sentence:
        """Tag one token, deriving the full convention from the leaf label."""
        with self.lock:
            sent = self.sentence(sentence_id)
            if not 0 <= token_index < len(sent.tokens):
                raise IndexOutOfRange(sentence_id, token_index, len(sent.tokens))
            assignment = make_assignment(leaf_label, self.tagset, provenance)
            sent.tokens[token_index].tag = assignment
            self.refresh_status(sent)
            return sent

    def clear_tag(self, sentence_id: str, token_index: int) -> Sentence:
        """Explicitly remove a token's tag (the only way status can regress)."""
        with self.lock:
            sent = self.sentence(sentence_id)
            if not 0 <= token_index < len(sent.tokens):
                raise IndexOutOfRange(sentence_id, token_index, len(sent.tokens))
            sent.tokens[token_index].tag = None
            self.refresh_status(sent)
            return sent

    def refresh_status(self, sent: Sentence) -> None:
        """Recompute status after a human-side mutation.

        All tokens manually tagged -> complete; any tag present (or an
        engaged sentence losing tags) -> in_progress; no tags at all ->
        raw. Only the autotagger sets `autotagged`.
        """
        tags = [t.tag for t in sent.tokens]
        if tags and all(t is not None and t.provenance == Provenance.MANUAL for t in tags):
            sent.status = SentenceStatus.COMPLETE
        elif any(t is not None for t in tags):
            sent.status = SentenceStatus.IN_PROGRESS
        else:
            sent.status = SentenceStatus.RAW

    # -- statistics

    def compute_stats(self) -> CorpusStats:
        with self.lock:
            stats = CorpusStats()
            for doc in self.documents.values():
                line = stats.per_subcorpus.setdefault(
                    doc.subcorpus.mode.value, SubcorpusCount())
                for sent in doc.sentences:
                    stats.sentence_count += 1
                    line.sentence_count += 1
                    words = sum(1 for t in sent.tokens if _is_word(t))
                    stats.word_count += words
                    line.word_count += words
            return stats


def _is_word(token: Token) -> bool:
    if token.tag is not None and token.tag.convention == "RD__PUNC":
        return False
    return not is_punct_token(token.surface)


def document_stats(doc: Document) -> CorpusStats:
    """Stats of a single document, same counting rules as the whole corpus."""
    stats = CorpusStats()
    line = stats.per_subcorpus.setdefault(doc.subcorpus.mode.value, SubcorpusCount())
    for sent in doc.sentences:
        stats.sentence_count += 1
        line.sentence_count += 1
        words = sum(1 for t in sent.tokens if _is_word(t))
        stats.word_count += words
        line.word_count += words
    return stats
