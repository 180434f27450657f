import json

import pytest

from lurelab.model import DocumentLocation, DocumentType, MotiveId
from lurelab.registry import (
    DocumentRecord,
    DocumentRegistry,
    MalformedHashError,
    RegistryConflictError,
    SnapshotFormatError,
    canonical_location_bytes,
    compute_loc_hash,
    make_record,
)

# Golden SHA-256 vectors computed with coreutils sha256sum over the exact
# canonical byte strings, pinned before the hash routine was written.
GOLDEN = [
    (
        DocumentLocation(path="/share/docs/a.docx", host="fs-01"),
        b'{"path":"/share/docs/a.docx","host":"fs-01"}',
        "628daf1b268d976160af04b1011737b613c39995b268696eea2c43cda91a2fe6",
    ),
    (
        DocumentLocation(path="/a", host="h1"),
        b'{"path":"/a","host":"h1"}',
        "f4f738d6e9453600859af7ef6067a875a605c5c4f9e04d4232949ff8c4639f46",
    ),
    (
        DocumentLocation(path="/a", host="h2"),
        b'{"path":"/a","host":"h2"}',
        "f1edc1e35e1d7daa7a61a85b276b20c4e0d21f2e80827827979150d680f783fe",
    ),
    (
        DocumentLocation(
            path="/srv/shares/env-1/IT Asset Inventory01.docx",
            host="deception-env-1",
        ),
        b'{"path":"/srv/shares/env-1/IT Asset Inventory01.docx","host":"deception-env-1"}',
        "768e32e162e30aadd8d2aaf7e851a26855834be0f522759abc1af1221921ad1c",
    ),
    (
        DocumentLocation(path='/tmp/we"ird.docx', host="h"),
        b'{"path":"/tmp/we\\"ird.docx","host":"h"}',
        "76731d7c9191688fd7b019e5679fb8998cc3fc0512e1a1a9243b67f9299e90cb",
    ),
]


class TestLocationHash:
    @pytest.mark.parametrize("location,canonical,digest", GOLDEN)
    def test_golden_vectors(self, location, canonical, digest):
        assert canonical_location_bytes(location) == canonical
        assert compute_loc_hash(location) == digest

    def test_path_key_comes_first(self):
        raw = canonical_location_bytes(DocumentLocation(path="/a", host="h")).decode()
        assert raw.index('"path"') < raw.index('"host"')
        assert " " not in raw

    def test_host_distinguishes_identical_paths(self):
        a = compute_loc_hash(DocumentLocation(path="/a", host="h1"))
        b = compute_loc_hash(DocumentLocation(path="/a", host="h2"))
        assert a != b

    def test_non_ascii_paths_hash_over_utf8(self):
        location = DocumentLocation(path="/docs/Prüfbericht.docx", host="h")
        raw = canonical_location_bytes(location)
        assert "Prüfbericht".encode("utf-8") in raw
        assert len(compute_loc_hash(location)) == 64


def _record(path="/srv/env-1/General Ledger01.docx", host="deception-env-1"):
    return make_record(
        DocumentLocation(path=path, host=host),
        1,
        MotiveId.PROFIT,
        "General Ledger",
    )


class TestDocumentRecord:
    def test_make_record_fields(self):
        record = _record()
        assert record.loc_hash == compute_loc_hash(
            DocumentLocation(path="/srv/env-1/General Ledger01.docx", host="deception-env-1")
        )
        assert record.deception_host == 1
        assert record.motives == {MotiveId.PROFIT: 1.0}
        assert record.doc_type is DocumentType.FINANCIAL
        assert record.motive is MotiveId.PROFIT

    def test_snapshot_field_names(self):
        data = _record().to_dict()
        assert set(data) == {"loc_hash", "deception_host", "motives", "subject", "type"}
        assert data["motives"] == {"profit": 1.0}
        assert data["type"] == "financial"

    def test_rejects_bad_hash(self):
        with pytest.raises(ValueError):
            DocumentRecord(
                loc_hash="zz",
                deception_host=1,
                motives={MotiveId.PROFIT: 1.0},
                subject="General Ledger",
                doc_type=DocumentType.FINANCIAL,
            )

    def test_rejects_type_motive_mismatch(self):
        with pytest.raises(ValueError):
            DocumentRecord(
                loc_hash="0" * 64,
                deception_host=1,
                motives={MotiveId.PROFIT: 1.0},
                subject="Employee Records",
                doc_type=DocumentType.HR,
            )

    def test_rejects_weightless_motive(self):
        with pytest.raises(ValueError):
            DocumentRecord(
                loc_hash="0" * 64,
                deception_host=1,
                motives={MotiveId.PROFIT: 0.5},
                subject="General Ledger",
                doc_type=DocumentType.FINANCIAL,
            )


class TestRegistry:
    def test_register_and_lookup(self):
        registry = DocumentRegistry()
        record = _record()
        registry.register(record)
        assert registry.lookup(record.loc_hash) == record

    def test_unknown_hash_is_none(self):
        registry = DocumentRegistry()
        assert registry.lookup("a" * 64) is None

    def test_malformed_hash_rejected(self):
        registry = DocumentRegistry()
        with pytest.raises(MalformedHashError):
            registry.lookup("not-a-hash")

    def test_duplicate_registration_conflicts(self):
        registry = DocumentRegistry()
        registry.register(_record())
        with pytest.raises(RegistryConflictError):
            registry.register(_record())

    def test_snapshot_round_trip(self, tmp_path):
        registry = DocumentRegistry()
        registry.register(_record())
        registry.register(_record(path="/srv/env-1/Budgets01.docx"))
        path = tmp_path / "registry.json"
        registry.save_snapshot(path)

        data = json.loads(path.read_text())
        assert data["version"] == 1
        assert len(data["records"]) == 2

        loaded = DocumentRegistry.load_snapshot(path)
        assert loaded.equals(registry)

    def test_snapshot_rejects_corrupt_file(self, tmp_path):
        path = tmp_path / "registry.json"
        path.write_text("{not json")
        with pytest.raises(SnapshotFormatError):
            DocumentRegistry.load_snapshot(path)

    def test_snapshot_rejects_unknown_version(self, tmp_path):
        path = tmp_path / "registry.json"
        path.write_text(json.dumps({"version": 99, "records": []}))
        with pytest.raises(SnapshotFormatError):
            DocumentRegistry.load_snapshot(path)
