"""Canonical TSV persistence, XML export, and legacy CSV import.

The TSV layout is the corpus's on-disk form: plain text, diffable, and
uniform. A document is a header block followed by one block per sentence,
blocks separated by a single blank line:

    #doc <doc_id>
    #subcorpus <mode/branch...>
    #meta <record_id>           (only when the document is catalogued)

    #sid <sentence_id>
    #text <original sentence text>
    surface<TAB>convention-or-dash<TAB>provenance-or-dash
    ...

``#text`` preserves the original spacing so token spans survive the trip;
a file without it still imports (text is rebuilt with single spaces).

XML is the interchange form: deterministic output, one ``<w>`` element per
token, metadata records embedded under ``<meta>``. The element grammar is
described by the bundled ``corpus.xsd`` and enforced by
:func:`validate_corpus_xml`.
"""

from __future__ import annotations

import csv
import io
import re
import warnings
import xml.etree.ElementTree as ET
from pathlib import Path

from .corpus import (
    Document,
    CorpusStore,
    Sentence,
    SentenceStatus,
    SubcorpusPath,
    Token,
    sentence_id as make_sentence_id,
)
from .metadata import MetadataStore, record_to_dict
from .tagset import Provenance, Tagset, UnknownTag, assignment_from_convention, make_assignment

UNTAGGED = "-"


class ParseError(ValueError):
    def __init__(self, line_number: int, reason: str):
        super().__init__(f"line {line_number}: {reason}")
        self.line_number = line_number
        self.reason = reason


class MisalignedTags(ValueError):
    def __init__(self, row: int, tokens: int, tags: int):
        super().__init__(f"row {row}: {tags} tags for {tokens} tokens")
        self.row = row


# ---------------------------------------------------------------- TSV

def export_tsv(document: Document) -> str:
    header = [f"#doc {document.doc_id}", f"#subcorpus {document.subcorpus}"]
    if document.metadata_ref:
        header.append(f"#meta {document.metadata_ref}")
    blocks = ["\n".join(header)]
    for sent in document.sentences:
        lines = [f"#sid {sent.id}", f"#text {sent.text}"]
        for tok in sent.tokens:
            if tok.tag is None:
                lines.append(f"{tok.surface}\t{UNTAGGED}\t{UNTAGGED}")
            else:
                lines.append(f"{tok.surface}\t{tok.tag.convention}\t{tok.tag.provenance.value}")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def _infer_status(tokens: list[Token]) -> SentenceStatus:
    tags = [t.tag for t in tokens]
    if not tags or all(t is None for t in tags):
        return SentenceStatus.RAW
    if all(t is not None and t.provenance == Provenance.MANUAL for t in tags):
        return SentenceStatus.COMPLETE
    if any(t is not None and t.provenance == Provenance.MANUAL for t in tags):
        return SentenceStatus.IN_PROGRESS
    return SentenceStatus.AUTOTAGGED


def _align_spans(text: str, surfaces: list[str], lineno: int) -> list[tuple[int, int]]:
    spans = []
    pos = 0
    for surface in surfaces:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        end = pos + len(surface)
        if text[pos:end] != surface:
            raise ParseError(lineno, f"token {surface!r} does not align with #text")
        spans.append((pos, end))
        pos = end
    if text[pos:].strip():
        raise ParseError(lineno, "#text has content beyond the last token")
    return spans


def import_tsv(text: str, tagset: Tagset) -> Document:
    """Parse one canonical TSV document; inverse of export_tsv."""
    doc_id = None
    subcorpus = None
    metadata_ref = None
    sentences: list[Sentence] = []

    # split into blocks of (lineno, line) separated by blank lines
    blocks: list[list[tuple[int, str]]] = []
    current: list[tuple[int, str]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            if current:
                blocks.append(current)
                current = []
            continue
        current.append((lineno, line))
    if current:
        blocks.append(current)
    if not blocks:
        raise ParseError(1, "empty document")

    for lineno, line in blocks[0]:
        if line.startswith("#doc "):
            doc_id = line[5:].strip()
        elif line.startswith("#subcorpus "):
            subcorpus = SubcorpusPath.parse(line[11:])
        elif line.startswith("#meta "):
            metadata_ref = line[6:].strip()
        else:
            raise ParseError(lineno, f"unexpected line in header block: {line!r}")
    if doc_id is None:
        raise ParseError(blocks[0][0][0], "missing #doc header")
    if subcorpus is None:
        raise ParseError(blocks[0][0][0], "missing #subcorpus header")

    for block in blocks[1:]:
        first_lineno, first_line = block[0]
        if not first_line.startswith("#sid "):
            raise ParseError(first_lineno, "sentence block must start with #sid")
        sid = first_line[5:].strip()
        stored_text: str | None = None
        rows: list[tuple[int, str, str, str]] = []
        for lineno, line in block[1:]:
            if line.startswith("#text ") or line == "#text":
                if stored_text is not None:
                    raise ParseError(lineno, "duplicate #text line")
                if rows:
                    raise ParseError(lineno, "#text must precede token lines")
                stored_text = line[6:] if len(line) > 6 else ""
                continue
            if line.startswith("#"):
                raise ParseError(lineno, f"unexpected directive {line.split()[0]!r}")
            parts = line.split("\t")
            if len(parts) != 3:
                raise ParseError(lineno, f"expected 3 tab-separated fields, got {len(parts)}")
            rows.append((lineno, parts[0], parts[1], parts[2]))

        surfaces = []
        for lineno, surface, conv, prov in rows:
            if not surface or any(c.isspace() for c in surface):
                raise ParseError(lineno, f"bad token surface {surface!r}")
            surfaces.append(surface)

        if stored_text is not None:
            sent_text = stored_text
            spans = _align_spans(sent_text, surfaces, first_lineno)
        else:
            sent_text = " ".join(surfaces)
            spans, pos = [], 0
            for surface in surfaces:
                spans.append((pos, pos + len(surface)))
                pos += len(surface) + 1

        tokens: list[Token] = []
        for (lineno, surface, conv, prov), span in zip(rows, spans):
            if conv == UNTAGGED and prov == UNTAGGED:
                tokens.append(Token(surface=surface, span=span))
                continue
            if conv == UNTAGGED or prov == UNTAGGED:
                raise ParseError(lineno, "tag and provenance must be set together")
            try:
                provenance = Provenance(prov)
            except ValueError:
                raise ParseError(lineno, f"unknown provenance {prov!r}")
            try:
                tag = assignment_from_convention(conv, tagset, provenance)
            except UnknownTag:
                raise UnknownTag(conv, line=lineno)
            tokens.append(Token(surface=surface, span=span, tag=tag))

        sentences.append(Sentence(id=sid, text=sent_text, tokens=tokens,
                                  status=_infer_status(tokens)))

    return Document(doc_id=doc_id, subcorpus=subcorpus, sentences=sentences,
                    metadata_ref=metadata_ref)


def save_corpus(store: CorpusStore, root) -> None:
    """One directory per subcorpus mode, one TSV file per document."""
    root = Path(root)
    with store.lock:
        for doc in store.documents.values():
            mode_dir = root / doc.subcorpus.mode.value
            mode_dir.mkdir(parents=True, exist_ok=True)
            (mode_dir / f"{doc.doc_id}.tsv").write_text(
                export_tsv(doc), encoding="utf-8")


def load_corpus(root, tagset: Tagset) -> CorpusStore:
    root = Path(root)
    store = CorpusStore(tagset)
    from .corpus import Mode

    for mode in Mode:
        mode_dir = root / mode.value
        if not mode_dir.is_dir():
            continue
        for path in sorted(mode_dir.glob("*.tsv")):
            doc = import_tsv(path.read_text(encoding="utf-8"), tagset)
            store.add_document(doc)
    return store


# ---------------------------------------------------------------- XML

# One canonical element order shared by all record kinds, so a single
# schema sequence covers every record.
_RECORD_FIELD_ORDER = (
    "title", "author", "publication", "publication_date", "page_range",
    "channel", "source_name", "writer", "posted_date", "url",
    "record_date", "record_time", "place", "recorded_by",
    "original_format", "original_encoding", "current_format",
    "current_encoding", "device", "context_description",
    "duration_seconds", "transfer_software",
    "entry_date", "entered_by",
    "subcorpus", "summary", "structure_note", "access_software_note",
)


def _record_element(record) -> ET.Element:
    data = record_to_dict(record)
    el = ET.Element("record", {"kind": data.pop("kind"), "id": data.pop("record_id")})
    for name in _RECORD_FIELD_ORDER:
        value = data.get(name)
        if value is None or name not in data:
            continue
        child = ET.SubElement(el, name)
        child.text = str(value)
    for theme in data.get("themes") or []:
        ET.SubElement(el, "theme").text = theme
    for group in ("participants", "bystanders"):
        tag = group[:-1]
        for p in data.get(group) or []:
            attrs = {"pseudonym": p["pseudonym"], "role": p["role"]}
            if p.get("age_band"):
                attrs["age_band"] = p["age_band"]
            if p.get("gender"):
                attrs["gender"] = p["gender"]
            ET.SubElement(el, tag, attrs)
    for sid in data.get("sentence_ids") or []:
        ET.SubElement(el, "sentence-ref", {"id": sid})
    return el


def export_xml(store: CorpusStore, metadata: MetadataStore | None = None) -> str:
    """Deterministic XML rendering of the whole corpus.

    Subcorpora sort by path, documents by id; records attach to the
    subcorpus their documents belong to.
    """
    with store.lock:
        root = ET.Element("corpus")
        by_branch: dict[str, list[Document]] = {}
        for doc in store.documents.values():
            by_branch.setdefault(str(doc.subcorpus), []).append(doc)

        record_branch: dict[str, str] = {}
        if metadata is not None:
            for doc in store.documents.values():
                if doc.metadata_ref and metadata.get(doc.metadata_ref) is not None:
                    record_branch[doc.metadata_ref] = str(doc.subcorpus)
            for rec in metadata.descriptive_records():
                record_branch[rec.record_id] = rec.subcorpus
            for branch in record_branch.values():
                by_branch.setdefault(branch, [])

        for branch in sorted(by_branch):
            sub_el = ET.SubElement(root, "subcorpus", {"path": branch})
            if metadata is not None:
                rec_ids = sorted(rid for rid, b in record_branch.items() if b == branch)
                if rec_ids:
                    meta_el = ET.SubElement(sub_el, "meta")
                    for rid in rec_ids:
                        meta_el.append(_record_element(metadata.get(rid)))
            for doc in sorted(by_branch[branch], key=lambda d: d.doc_id):
                doc_attrs = {"id": doc.doc_id}
                if doc.metadata_ref:
                    doc_attrs["meta"] = doc.metadata_ref
                doc_el = ET.SubElement(sub_el, "document", doc_attrs)
                for sent in doc.sentences:
                    s_el = ET.SubElement(doc_el, "s", {"id": sent.id})
                    for tok in sent.tokens:
                        if tok.tag is None:
                            w_el = ET.SubElement(s_el, "w")
                        else:
                            w_el = ET.SubElement(s_el, "w", {
                                "tag": tok.tag.convention,
                                "prov": tok.tag.provenance.value,
                            })
                        w_el.text = tok.surface

        ET.indent(root, space="  ")
        body = ET.tostring(root, encoding="unicode")
        return '<?xml version="1.0" encoding="UTF-8"?>\n' + body + "\n"


_W_ATTRS = {"tag", "prov"}
_RECORD_KINDS = {"written", "cmc", "recording", "descriptive"}
_PARTICIPANT_ATTRS = {"pseudonym", "role", "age_band", "gender"}


def validate_corpus_xml(xml_text: str, tagset: Tagset | None = None) -> list[str]:
    """Structural check of an export against the shipped element grammar.

    Mirrors data/corpus.xsd; returns problem descriptions, empty if valid.
    """
    problems: list[str] = []
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        return [f"not well-formed: {exc}"]

    def check_attrs(el, required, optional, where):
        keys = set(el.attrib)
        for a in required:
            if a not in keys:
                problems.append(f"{where}: missing attribute {a!r}")
        extra = keys - set(required) - set(optional)
        if extra:
            problems.append(f"{where}: unexpected attributes {sorted(extra)}")

    if root.tag != "corpus":
        return [f"root element is {root.tag!r}, expected 'corpus'"]
    for sub in root:
        if sub.tag != "subcorpus":
            problems.append(f"corpus child {sub.tag!r} is not 'subcorpus'")
            continue
        check_attrs(sub, ["path"], [], "subcorpus")
        where = f"subcorpus {sub.get('path')!r}"
        children = list(sub)
        if children and children[0].tag == "meta":
            for rec in children[0]:
                problems.extend(_check_record(rec, where))
            children = children[1:]
        for doc in children:
            if doc.tag != "document":
                problems.append(f"{where}: child {doc.tag!r} out of place")
                continue
            check_attrs(doc, ["id"], ["meta"], f"document in {where}")
            for s in doc:
                if s.tag != "s":
                    problems.append(f"document {doc.get('id')!r}: child {s.tag!r} is not 's'")
                    continue
                check_attrs(s, ["id"], [], "s")
                for w in s:
                    if w.tag != "w":
                        problems.append(f"s {s.get('id')!r}: child {w.tag!r} is not 'w'")
                        continue
                    check_attrs(w, [], _W_ATTRS, "w")
                    if ("tag" in w.attrib) != ("prov" in w.attrib):
                        problems.append(
                            f"s {s.get('id')!r}: w must carry tag and prov together")
                    if tagset is not None and "tag" in w.attrib:
                        if w.get("tag") not in tagset.by_convention:
                            problems.append(f"unknown tag {w.get('tag')!r} in s {s.get('id')!r}")
                    if not (w.text or "").strip():
                        problems.append(f"s {s.get('id')!r}: empty w element")
    return problems


def _check_record(rec, where) -> list[str]:
    problems = []
    if rec.tag != "record":
        return [f"{where}: meta child {rec.tag!r} is not 'record'"]
    if rec.get("kind") not in _RECORD_KINDS:
        problems.append(f"{where}: record kind {rec.get('kind')!r} unknown")
    if not rec.get("id"):
        problems.append(f"{where}: record without id")
    order = {name: i for i, name in enumerate(_RECORD_FIELD_ORDER)}
    last = -1
    seen: set[str] = set()
    for child in rec:
        if child.tag in order:
            if child.tag in seen:
                problems.append(f"{where}: record field {child.tag!r} repeated")
            seen.add(child.tag)
            if order[child.tag] < last:
                problems.append(f"{where}: record field {child.tag!r} out of order")
            last = max(last, order[child.tag])
        elif child.tag == "theme":
            pass
        elif child.tag in ("participant", "bystander"):
            extra = set(child.attrib) - _PARTICIPANT_ATTRS
            if extra or "pseudonym" not in child.attrib or "role" not in child.attrib:
                problems.append(f"{where}: bad {child.tag} attributes {sorted(child.attrib)}")
        elif child.tag == "sentence-ref":
            if "id" not in child.attrib:
                problems.append(f"{where}: sentence-ref without id")
        else:
            problems.append(f"{where}: unknown record child {child.tag!r}")
    return problems


# ---------------------------------------------------------------- legacy CSV

def import_legacy_csv(csv_text: str, doc_id: str, subcorpus: SubcorpusPath,
                      tagset: Tagset, store: CorpusStore | None = None) -> Document:
    """Import one legacy per-source spreadsheet export.

    Expects header ``sentence_id,text`` with an optional ``tags`` column of
    space-separated leaf labels aligned to whitespace tokens. Supplied
    sentence IDs are kept (namespaced under doc_id) when unique; otherwise
    all IDs are regenerated and a warning is emitted.
    """
    reader = csv.reader(io.StringIO(csv_text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError(1, "empty CSV file")
    header = [h.strip().lower() for h in header]
    if header not in (["sentence_id", "text"], ["sentence_id", "text", "tags"]):
        raise ParseError(1, f"bad CSV header {header!r}")
    has_tags = len(header) == 3

    parsed: list[tuple[str, str, list[str]]] = []
    for row_no, row in enumerate(reader, start=2):
        if not row or not any(cell.strip() for cell in row):
            continue
        if len(row) < 2 or (has_tags and len(row) > 3) or (not has_tags and len(row) > 2):
            raise ParseError(row_no, f"expected {len(header)} columns, got {len(row)}")
        sid = row[0].strip()
        text = " ".join(row[1].split())
        labels = row[2].split() if has_tags and len(row) == 3 else []
        parsed.append((sid, text, labels))
        if labels:
            n_tokens = len(text.split())
            if len(labels) != n_tokens:
                raise MisalignedTags(row_no, n_tokens, len(labels))

    ids = [sid if sid.startswith(f"{doc_id}.") else f"{doc_id}.{sid}"
           for sid, _, _ in parsed]
    taken = set(store._sentence_index) if store is not None else set()
    unique = (len(set(ids)) == len(ids) and all(sid for sid, _, _ in parsed)
              and not taken.intersection(ids))
    if not unique:
        warnings.warn(f"supplied sentence IDs in {doc_id!r} are not unique; regenerating")
        ids = [make_sentence_id(doc_id, i) for i in range(1, len(parsed) + 1)]

    doc = Document(doc_id=doc_id, subcorpus=subcorpus)
    for sid, (_, text, labels) in zip(ids, parsed):
        tokens = [Token(surface=m.group(), span=(m.start(), m.end()))
                  for m in re.finditer(r"\S+", text)]
        for tok, label in zip(tokens, labels):
            tok.tag = make_assignment(label, tagset, Provenance.MANUAL)
        doc.sentences.append(Sentence(id=sid, text=text, tokens=tokens,
                                      status=_infer_status(tokens)))
    if store is not None:
        store.add_document(doc)
    return doc
