import json

import pytest

from annkit.corpus import SubcorpusPath
from annkit.metadata import (
    CatalogInvalid,
    InvalidValue,
    MetadataStore,
    MissingField,
    Participant,
    build_general_meta,
    create_record,
    record_from_dict,
    record_to_dict,
    required_fields,
    validate_catalog,
    write_general_meta,
)

BOOK_PROSE = SubcorpusPath.indirect("book", "prose")

WRITTEN_FIELDS = {
    "title": "cəcəri",
    "author": "R. Prasad",
    "publication": "Magadhbhumi",
    "publication_date": "1998-04-01",
    "entry_date": "2011-06-15",
    "entered_by": "bl",
}

ASYNC_CMC_FIELDS = {
    "channel": "cmc_asynchronous",
    "source_name": "magahi-blog",
    "writer": "anon-writer",
    "posted_date": "2010-02-11",
    "entry_date": "2011-01-30",
    "url": "http://example.org/post/11",
}

SYNC_CMC_FIELDS = {
    "channel": "cmc_synchronous",
    "posted_date": "2011-03-02",
    "participants": [{"pseudonym": "A", "role": "chatter"}],
}

RECORDING_FIELDS = {
    "record_date": "2011-02-20",
    "record_time": "17:30",
    "place": "Gaya",
    "recorded_by": "da",
    "original_format": "wav",
    "original_encoding": "pcm16",
    "current_format": "flac",
    "current_encoding": "flac-8",
    "device": "Zoom H2",
    "context_description": "evening conversation at home",
    "duration_seconds": 1820,
    "participants": [{"pseudonym": "M1", "role": "speaker", "age_band": "40-50"}],
}

DESCRIPTIVE_FIELDS = {
    "subcorpus": "indirect_written/book/prose",
    "summary": "short stories from printed collections",
    "structure_note": "one file per story",
    "access_software_note": "any UTF-8 text editor",
}


class TestCreateRecord:
    def test_written_record_valid(self):
        rec = create_record("written", WRITTEN_FIELDS)
        assert rec.kind == "written"
        assert rec.title == "cəcəri"
        assert rec.record_id.startswith("written-")

    @pytest.mark.parametrize("missing", sorted(WRITTEN_FIELDS))
    def test_written_required_fields(self, missing):
        fields = {k: v for k, v in WRITTEN_FIELDS.items() if k != missing}
        with pytest.raises(MissingField) as exc:
            create_record("written", fields)
        assert missing in exc.value.fields

    def test_page_range_optional(self):
        rec = create_record("written", {**WRITTEN_FIELDS, "page_range": "12-19"})
        assert rec.page_range == "12-19"

    @pytest.mark.parametrize("missing", sorted(ASYNC_CMC_FIELDS))
    def test_async_cmc_required_fields(self, missing):
        fields = {k: v for k, v in ASYNC_CMC_FIELDS.items() if k != missing}
        with pytest.raises((MissingField, InvalidValue)):
            create_record("cmc", fields)

    def test_sync_cmc_needs_only_date_and_participants(self):
        rec = create_record("cmc", SYNC_CMC_FIELDS)
        assert rec.url is None
        assert rec.participants[0].pseudonym == "A"

    @pytest.mark.parametrize("missing", ["posted_date", "participants"])
    def test_sync_cmc_required_fields(self, missing):
        fields = {k: v for k, v in SYNC_CMC_FIELDS.items() if k != missing}
        with pytest.raises(MissingField) as exc:
            create_record("cmc", fields)
        assert missing in exc.value.fields

    def test_non_cmc_personal_uses_participant_rule(self):
        assert "participants" in required_fields("cmc", {"channel": "non_cmc_personal"})
        assert "url" not in required_fields("cmc", {"channel": "non_cmc_personal"})

    @pytest.mark.parametrize("missing", sorted(RECORDING_FIELDS))
    def test_recording_required_fields(self, missing):
        fields = {k: v for k, v in RECORDING_FIELDS.items() if k != missing}
        with pytest.raises(MissingField) as exc:
            create_record("recording", fields)
        assert missing in exc.value.fields

    @pytest.mark.parametrize("missing", sorted(DESCRIPTIVE_FIELDS))
    def test_descriptive_required_fields(self, missing):
        fields = {k: v for k, v in DESCRIPTIVE_FIELDS.items() if k != missing}
        with pytest.raises(MissingField) as exc:
            create_record("descriptive", fields)
        assert missing in exc.value.fields

    def test_missing_field_error_lists_all_absent(self):
        with pytest.raises(MissingField) as exc:
            create_record("written", {"title": "x"})
        assert set(exc.value.fields) == {
            "author", "publication", "publication_date", "entry_date", "entered_by"}

    def test_negative_duration_rejected(self):
        with pytest.raises(InvalidValue) as exc:
            create_record("recording", {**RECORDING_FIELDS, "duration_seconds": -5})
        assert exc.value.name == "duration_seconds"

    def test_unknown_key_rejected(self):
        with pytest.raises(InvalidValue):
            create_record("written", {**WRITTEN_FIELDS, "colour": "red"})

    def test_bad_date_rejected(self):
        with pytest.raises(InvalidValue) as exc:
            create_record("written", {**WRITTEN_FIELDS, "publication_date": "April 98"})
        assert exc.value.name == "publication_date"

    def test_transfer_software_optional(self):
        rec = create_record("recording", RECORDING_FIELDS)
        assert rec.transfer_software is None

    def test_roundtrip_through_dict(self):
        rec = create_record("recording", RECORDING_FIELDS, record_id="rec-7")
        again = record_from_dict(record_to_dict(rec))
        assert again == rec
        assert isinstance(again.participants[0], Participant)


def catalogued_fixture(store):
    """Corpus of two documents, fully catalogued."""
    store.ingest_document("həm ge\nka ho\n", "story01", BOOK_PROSE)
    store.ingest_document("ũhã ja\n", "talk01", SubcorpusPath.spoken("personal"))
    meta = MetadataStore()
    meta.create("written", {**WRITTEN_FIELDS,
                            "sentence_ids": ["story01.0001", "story01.0002"]},
                record_id="w1")
    meta.create("recording", {**RECORDING_FIELDS, "sentence_ids": ["talk01.0001"]},
                record_id="r1")
    meta.create("descriptive", DESCRIPTIVE_FIELDS, record_id="dw")
    meta.create("descriptive", {**DESCRIPTIVE_FIELDS, "subcorpus": "spoken/personal",
                                "summary": "home conversations"}, record_id="ds")
    store.documents["story01"].metadata_ref = "w1"
    store.documents["talk01"].metadata_ref = "r1"
    return meta


class TestValidateCatalog:
    def test_fully_catalogued_corpus_is_clean(self, store):
        meta = catalogued_fixture(store)
        assert validate_catalog(store, meta) == []

    def test_document_without_record_flagged(self, store):
        store.ingest_document("ek\n", "d1", BOOK_PROSE)
        findings = validate_catalog(store, MetadataStore())
        assert any(f.code == "MissingCatalogRecord" for f in findings)

    def test_dangling_sentence_ref_flagged(self, store):
        meta = catalogued_fixture(store)
        meta.get("w1").sentence_ids.append("story01.9999")
        findings = validate_catalog(store, meta)
        assert [f.code for f in findings] == ["DanglingSentenceRef"]
        assert findings[0].is_error

    def test_async_cmc_without_url_flagged(self, store):
        meta = MetadataStore()
        rec = meta.create("cmc", ASYNC_CMC_FIELDS, record_id="c1")
        rec.url = None  # simulate legacy data that skipped the field
        findings = validate_catalog(store, meta)
        assert any(f.code == "MissingUrl" for f in findings)

    def test_missing_descriptive_record_is_warning(self, store):
        meta = catalogued_fixture(store)
        del meta.records["ds"]
        findings = validate_catalog(store, meta)
        assert [f.code for f in findings] == ["MissingDescriptiveRecord"]
        assert not findings[0].is_error


class TestGeneralMeta:
    def test_stats_passthrough(self, store):
        meta = catalogued_fixture(store)
        gm = build_general_meta(store, meta)
        stats = store.compute_stats()
        assert gm.stats.word_count == stats.word_count == 6
        assert gm.stats.sentence_count == stats.sentence_count == 3

    def test_empty_corpus(self, store):
        gm = build_general_meta(store, MetadataStore())
        assert gm.locations == {}
        assert gm.links == []
        assert (gm.stats.word_count, gm.stats.sentence_count) == (0, 0)

    def test_locations_cover_each_branch(self, store):
        meta = catalogued_fixture(store)
        gm = build_general_meta(store, meta)
        assert len(gm.locations) == 2
        assert gm.locations["indirect_written/book/prose"] == "indirect_written/"
        assert gm.links == ["indirect_written/story01.tsv", "spoken/talk01.tsv"]

    def test_invalid_catalog_blocks_build(self, store):
        store.ingest_document("ek\n", "d1", BOOK_PROSE)
        with pytest.raises(CatalogInvalid) as exc:
            build_general_meta(store, MetadataStore())
        assert any(f.code == "MissingCatalogRecord" for f in exc.value.findings)

    def test_rebuild_tracks_corpus_mutations(self, store):
        meta = catalogued_fixture(store)
        first = build_general_meta(store, meta)
        store.ingest_document("nəya bat\n", "story02", BOOK_PROSE)
        meta.create("written", {**WRITTEN_FIELDS, "title": "second"}, record_id="w2")
        store.documents["story02"].metadata_ref = "w2"
        second = build_general_meta(store, meta)
        assert second.stats.word_count == first.stats.word_count + 2
        assert second.stats.sentence_count == first.stats.sentence_count + 1

    def test_written_to_corpus_root(self, store, tmp_path):
        meta = catalogued_fixture(store)
        gm = build_general_meta(store, meta)
        path = write_general_meta(gm, tmp_path)
        data = json.loads(path.read_text(encoding="utf-8"))
        assert path.name == "corpus-meta.json"
        assert data["stats"]["word_count"] == 6


class TestStorePersistence:
    def test_two_files_per_branch(self, store, tmp_path):
        meta = catalogued_fixture(store)
        meta.save(tmp_path, corpus=store)
        names = sorted(p.name for p in (tmp_path / "meta").iterdir())
        assert names == [
            "indirect_written__book__prose.catalog.json",
            "indirect_written__book__prose.descriptive.json",
            "spoken__personal.catalog.json",
            "spoken__personal.descriptive.json",
        ]

    def test_reload_roundtrip(self, store, tmp_path):
        meta = catalogued_fixture(store)
        meta.save(tmp_path, corpus=store)
        again = MetadataStore.load(tmp_path)
        assert set(again.records) == set(meta.records)
        assert again.get("w1") == meta.get("w1")
        assert again.get("r1") == meta.get("r1")

    def test_kind_discriminator_in_files(self, store, tmp_path):
        meta = catalogued_fixture(store)
        meta.save(tmp_path, corpus=store)
        payload = json.loads(
            (tmp_path / "meta" / "spoken__personal.catalog.json").read_text("utf-8"))
        assert payload[0]["kind"] == "recording"
