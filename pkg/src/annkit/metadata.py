"""Metadata catalog: per-source records, descriptive records, general meta.

Each subcorpus keeps two kinds of metadata side by side: a cataloguing
store of per-source records (who wrote it, where it came from, when it
entered the corpus) and one descriptive record summarizing the subcorpus.
A corpus-level general record ties together store locations, statistics,
and file links, and is always rebuilt from the corpus, never hand-edited.

Records serialize to JSON with a top-level ``kind`` discriminator; dates
are ISO-8601 strings.
"""

from __future__ import annotations

import json
import uuid
from dataclasses import asdict, dataclass, field
from datetime import date
from pathlib import Path

from .corpus import CorpusStats, CorpusStore
from .tagset import Finding

KINDS = ("written", "cmc", "recording", "descriptive")

CMC_CHANNELS = ("cmc_synchronous", "cmc_asynchronous",
                "non_cmc_personal", "non_cmc_public")


class MissingField(ValueError):
    """Raised with *every* absent required field, not just the first."""

    def __init__(self, fields: tuple[str, ...]):
        super().__init__(f"missing required field(s): {', '.join(fields)}")
        self.fields = fields


class InvalidValue(ValueError):
    def __init__(self, name: str, reason: str):
        super().__init__(f"invalid value for {name!r}: {reason}")
        self.name = name
        self.reason = reason


class CatalogInvalid(ValueError):
    def __init__(self, findings: list[Finding]):
        super().__init__("catalog has errors: "
                         + "; ".join(f.message for f in findings if f.is_error))
        self.findings = findings


@dataclass
class Participant:
    pseudonym: str
    role: str
    age_band: str | None = None
    gender: str | None = None


@dataclass
class WrittenSourceMeta:
    record_id: str
    title: str
    author: str
    publication: str
    publication_date: str
    entry_date: str
    entered_by: str
    page_range: str | None = None  # optional for whole-work sources
    sentence_ids: list[str] = field(default_factory=list)
    subcorpus: str | None = None

    kind = "written"


@dataclass
class CmcMeta:
    record_id: str
    channel: str
    posted_date: str
    source_name: str | None = None
    writer: str | None = None
    entry_date: str | None = None
    url: str | None = None
    participants: list[Participant] = field(default_factory=list)
    sentence_ids: list[str] = field(default_factory=list)
    subcorpus: str | None = None

    kind = "cmc"


@dataclass
class RecordingMeta:
    record_id: str
    record_date: str
    record_time: str
    place: str
    recorded_by: str
    original_format: str
    original_encoding: str
    current_format: str
    current_encoding: str
    device: str
    context_description: str
    duration_seconds: float
    participants: list[Participant]
    transfer_software: str | None = None  # "if any"
    bystanders: list[Participant] = field(default_factory=list)
    sentence_ids: list[str] = field(default_factory=list)
    subcorpus: str | None = None

    kind = "recording"


@dataclass
class DescriptiveMeta:
    record_id: str
    subcorpus: str
    summary: str
    structure_note: str
    access_software_note: str
    themes: list[str] = field(default_factory=list)

    kind = "descriptive"


MetadataRecord = WrittenSourceMeta | CmcMeta | RecordingMeta | DescriptiveMeta

_RECORD_CLASSES = {
    "written": WrittenSourceMeta,
    "cmc": CmcMeta,
    "recording": RecordingMeta,
    "descriptive": DescriptiveMeta,
}

# Unconditionally required fields per kind; CMC adds channel-dependent ones.
_REQUIRED = {
    "written": ("title", "author", "publication", "publication_date",
                "entry_date", "entered_by"),
    "cmc": ("channel", "posted_date"),
    "recording": ("record_date", "record_time", "place", "recorded_by",
                  "original_format", "original_encoding", "current_format",
                  "current_encoding", "device", "context_description",
                  "duration_seconds", "participants"),
    "descriptive": ("subcorpus", "summary", "structure_note",
                    "access_software_note"),
}

_DATE_FIELDS = ("publication_date", "entry_date", "posted_date", "record_date")


def required_fields(kind: str, fields_map: dict | None = None) -> tuple[str, ...]:
    """Required field names for a kind, given the (possibly partial) input."""
    req = _REQUIRED[kind]
    if kind == "cmc":
        channel = (fields_map or {}).get("channel")
        if channel == "cmc_asynchronous":
            req = req + ("source_name", "writer", "entry_date", "url")
        else:
            # synchronous CMC and non-CMC: only the date and the participants
            req = req + ("participants",)
    return req


def _coerce_participants(name: str, value) -> list[Participant]:
    out: list[Participant] = []
    if not isinstance(value, (list, tuple)):
        raise InvalidValue(name, "expected a list of participant descriptors")
    for item in value:
        if isinstance(item, Participant):
            out.append(item)
        elif isinstance(item, dict):
            try:
                out.append(Participant(**item))
            except TypeError as exc:
                raise InvalidValue(name, str(exc))
        else:
            raise InvalidValue(name, f"cannot read participant {item!r}")
    return out


def _check_date(name: str, value) -> None:
    try:
        date.fromisoformat(str(value))
    except ValueError:
        raise InvalidValue(name, f"{value!r} is not an ISO-8601 date")


def create_record(kind: str, fields_map: dict, record_id: str | None = None):
    """Validate a field map and build the typed record.

    Every absent required field is reported at once; unknown keys are
    rejected so typos cannot silently drop metadata.
    """
    if kind not in _RECORD_CLASSES:
        raise InvalidValue("kind", f"{kind!r} is not one of {KINDS}")
    cls = _RECORD_CLASSES[kind]
    allowed = {f.name for f in cls.__dataclass_fields__.values()} - {"record_id"}

    for key in fields_map:
        if key not in allowed:
            raise InvalidValue(key, f"unknown field for kind {kind!r}")

    missing = tuple(name for name in required_fields(kind, fields_map)
                    if name not in fields_map or fields_map[name] in (None, "", []))
    if missing:
        raise MissingField(missing)

    data = dict(fields_map)
    if kind == "cmc" and data.get("channel") not in CMC_CHANNELS:
        raise InvalidValue("channel", f"{data.get('channel')!r} is not one of {CMC_CHANNELS}")
    for name in _DATE_FIELDS:
        if data.get(name):
            _check_date(name, data[name])
    for name in ("participants", "bystanders"):
        if name in data and name in allowed and data[name] is not None:
            data[name] = _coerce_participants(name, data[name])
    if kind == "recording":
        try:
            data["duration_seconds"] = float(data["duration_seconds"])
        except (TypeError, ValueError):
            raise InvalidValue("duration_seconds", "must be a number")
        if data["duration_seconds"] <= 0:
            raise InvalidValue("duration_seconds", "must be > 0")
        if not data["participants"]:
            raise MissingField(("participants",))
    if "sentence_ids" in data and data["sentence_ids"] is not None:
        data["sentence_ids"] = [str(s) for s in data["sentence_ids"]]

    rid = record_id or f"{kind}-{uuid.uuid4().hex[:8]}"
    return cls(record_id=rid, **data)


def record_to_dict(record) -> dict:
    data = asdict(record)
    return {"kind": record.kind, **data}


def record_from_dict(data: dict):
    data = dict(data)
    kind = data.pop("kind", None)
    if kind not in _RECORD_CLASSES:
        raise InvalidValue("kind", f"{kind!r} is not one of {KINDS}")
    record_id = data.pop("record_id", None)
    return create_record(kind, data, record_id=record_id)


class MetadataStore:
    """Flat record registry with JSON persistence per subcorpus branch."""

    def __init__(self):
        self.records: dict[str, MetadataRecord] = {}

    def add(self, record) -> MetadataRecord:
        if record.record_id in self.records:
            raise InvalidValue("record_id", f"{record.record_id!r} already exists")
        self.records[record.record_id] = record
        return record

    def create(self, kind: str, fields_map: dict, record_id: str | None = None):
        return self.add(create_record(kind, fields_map, record_id=record_id))

    def get(self, record_id: str):
        return self.records.get(record_id)

    def catalog_records(self) -> list[MetadataRecord]:
        return [r for r in self.records.values() if r.kind != "descriptive"]

    def descriptive_records(self) -> list[DescriptiveMeta]:
        return [r for r in self.records.values() if r.kind == "descriptive"]

    # -- persistence: two files per subcorpus branch (catalog + descriptive)

    def save(self, root, corpus: CorpusStore | None = None) -> None:
        meta_dir = Path(root) / "meta"
        meta_dir.mkdir(parents=True, exist_ok=True)
        by_branch: dict[str, list] = {}
        for record in self.catalog_records():
            branch = self._branch_of(record, corpus)
            by_branch.setdefault(branch, []).append(record)
        for branch, records in sorted(by_branch.items()):
            path = meta_dir / f"{_slug(branch)}.catalog.json"
            payload = [record_to_dict(r) for r in
                       sorted(records, key=lambda r: r.record_id)]
            path.write_text(json.dumps(payload, ensure_ascii=False, indent=2) + "\n",
                            encoding="utf-8")
        for record in sorted(self.descriptive_records(), key=lambda r: r.record_id):
            path = meta_dir / f"{_slug(record.subcorpus)}.descriptive.json"
            path.write_text(json.dumps(record_to_dict(record), ensure_ascii=False,
                                       indent=2) + "\n", encoding="utf-8")

    def _branch_of(self, record, corpus: CorpusStore | None) -> str:
        if corpus is not None:
            for doc in corpus.documents.values():
                if doc.metadata_ref == record.record_id:
                    return str(doc.subcorpus)
        return record.subcorpus or "unassigned"

    @classmethod
    def load(cls, root) -> MetadataStore:
        store = cls()
        meta_dir = Path(root) / "meta"
        if not meta_dir.is_dir():
            return store
        for path in sorted(meta_dir.glob("*.json")):
            payload = json.loads(path.read_text(encoding="utf-8"))
            records = payload if isinstance(payload, list) else [payload]
            for data in records:
                store.add(record_from_dict(data))
        return store


def _slug(branch: str) -> str:
    return branch.replace("/", "__")


def validate_catalog(corpus: CorpusStore, records: MetadataStore | list) -> list[Finding]:
    """Cross-check corpus and catalog.

    Flags documents without a cataloguing record, sentence references that
    resolve nowhere, and asynchronous CMC records without a source URL.
    Descriptive coverage problems are warnings: they don't make the
    catalog unusable, just incomplete.
    """
    if isinstance(records, MetadataStore):
        all_records = list(records.records.values())
    else:
        all_records = list(records)
    by_id = {r.record_id: r for r in all_records}
    findings: list[Finding] = []

    for doc_id, doc in sorted(corpus.documents.items()):
        ref = doc.metadata_ref
        if ref is None or ref not in by_id or by_id[ref].kind == "descriptive":
            findings.append(Finding(
                "error", "MissingCatalogRecord",
                f"document {doc_id!r} has no cataloguing record"))

    known_sids = set(corpus._sentence_index)
    for record in all_records:
        for sid in getattr(record, "sentence_ids", []) or []:
            if sid not in known_sids:
                findings.append(Finding(
                    "error", "DanglingSentenceRef",
                    f"record {record.record_id!r} references unknown sentence {sid!r}"))
        if record.kind == "cmc" and record.channel == "cmc_asynchronous" and not record.url:
            findings.append(Finding(
                "error", "MissingUrl",
                f"asynchronous CMC record {record.record_id!r} has no url"))

    branches = {str(doc.subcorpus) for doc in corpus.documents.values()}
    descriptive_by_branch: dict[str, int] = {}
    for record in all_records:
        if record.kind == "descriptive":
            descriptive_by_branch[record.subcorpus] = \
                descriptive_by_branch.get(record.subcorpus, 0) + 1
    for branch in sorted(branches):
        n = descriptive_by_branch.get(branch, 0)
        if n == 0:
            findings.append(Finding(
                "warning", "MissingDescriptiveRecord",
                f"subcorpus {branch!r} has documents but no descriptive record"))
        elif n > 1:
            findings.append(Finding(
                "warning", "DuplicateDescriptiveRecord",
                f"subcorpus {branch!r} has {n} descriptive records"))
    return findings


@dataclass
class GeneralMeta:
    """Corpus-level access record: locations, statistics, file links."""

    locations: dict[str, str] = field(default_factory=dict)
    stats: CorpusStats = field(default_factory=CorpusStats)
    links: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "locations": dict(sorted(self.locations.items())),
            "stats": self.stats.to_dict(),
            "links": list(self.links),
        }


def build_general_meta(corpus: CorpusStore,
                       records: MetadataStore | list) -> GeneralMeta:
    """Derive the general metadata record from a validated catalog."""
    findings = validate_catalog(corpus, records)
    if any(f.is_error for f in findings):
        raise CatalogInvalid(findings)
    meta = GeneralMeta(stats=corpus.compute_stats())
    for doc in corpus.documents.values():
        branch = str(doc.subcorpus)
        meta.locations[branch] = f"{doc.subcorpus.mode.value}/"
        meta.links.append(f"{doc.subcorpus.mode.value}/{doc.doc_id}.tsv")
    meta.links.sort()
    return meta


def write_general_meta(meta: GeneralMeta, root) -> Path:
    path = Path(root) / "corpus-meta.json"
    path.write_text(json.dumps(meta.to_dict(), ensure_ascii=False, indent=2) + "\n",
                    encoding="utf-8")
    return path
