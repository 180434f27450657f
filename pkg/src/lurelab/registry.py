"""Decoy metadata store keyed by the canonical location hash.

The hash contract is byte-exact: SHA-256 over the UTF-8 encoding of
`{"path":"<path>","host":"<host>"}` with that key order, no whitespace, and
standard JSON string escaping. Any independent implementation following the
same contract resolves the same files.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import threading
from dataclasses import dataclass
from typing import Iterator, Mapping

from .model import DocumentLocation, DocumentType, MotiveId, type_for_motive

SNAPSHOT_VERSION = 1

_HASH_RE = re.compile(r"^[0-9a-f]{64}$")


class RegistryConflictError(Exception):
    """A record with this location hash is already registered."""


class MalformedHashError(ValueError):
    """Input is not a 64-character lowercase hex digest."""


class SnapshotFormatError(Exception):
    """Snapshot file is corrupt or has an unsupported version."""


def canonical_location_bytes(location: DocumentLocation) -> bytes:
    """The exact byte string the location hash is computed over."""
    return json.dumps(
        {"path": location.path, "host": location.host},
        separators=(",", ":"),
        ensure_ascii=False,
    ).encode("utf-8")


def compute_loc_hash(location: DocumentLocation) -> str:
    """SHA-256 digest of the canonical location encoding, lowercase hex."""
    return hashlib.sha256(canonical_location_bytes(location)).hexdigest()


@dataclass(frozen=True)
class DocumentRecord:
    """Registered attributes of one deployed decoy."""

    loc_hash: str
    deception_host: int
    motives: Mapping[MotiveId, float]
    subject: str
    doc_type: DocumentType

    def __post_init__(self) -> None:
        if not _HASH_RE.match(self.loc_hash):
            raise MalformedHashError(f"bad loc_hash: {self.loc_hash!r}")
        if self.deception_host < 1:
            raise ValueError("deception_host must be >= 1")
        motives = {MotiveId(m): float(w) for m, w in self.motives.items()}
        # One motive per document, full weight; the map shape leaves room for
        # weighted multi-motive assignments later.
        if len(motives) != 1 or next(iter(motives.values())) != 1.0:
            raise ValueError("motives must hold exactly one entry with weight 1.0")
        object.__setattr__(self, "motives", motives)
        if not self.subject:
            raise ValueError("subject must be non-empty")
        if type_for_motive(self.motive) is not DocumentType(self.doc_type):
            raise ValueError(
                f"doc_type {self.doc_type.value!r} contradicts motive {self.motive.value!r}"
            )

    @property
    def motive(self) -> MotiveId:
        return next(iter(self.motives))

    def to_dict(self) -> dict:
        return {
            "loc_hash": self.loc_hash,
            "deception_host": self.deception_host,
            "motives": {m.value: w for m, w in self.motives.items()},
            "subject": self.subject,
            "type": self.doc_type.value,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "DocumentRecord":
        return cls(
            loc_hash=data["loc_hash"],
            deception_host=data["deception_host"],
            motives={MotiveId(m): w for m, w in data["motives"].items()},
            subject=data["subject"],
            doc_type=DocumentType(data["type"]),
        )


def make_record(
    location: DocumentLocation, env_index: int, motive: MotiveId, subject: str
) -> DocumentRecord:
    """Build the registry record for a decoy at its deployed location."""
    motive = MotiveId(motive)
    return DocumentRecord(
        loc_hash=compute_loc_hash(location),
        deception_host=env_index,
        motives={motive: 1.0},
        subject=subject,
        doc_type=type_for_motive(motive),
    )


class DocumentRegistry:
    """In-memory record store with JSON snapshot persistence.

    Single writer, many readers: mutation is serialized behind a lock, reads
    are plain dict lookups.
    """

    def __init__(self) -> None:
        self._records: dict[str, DocumentRecord] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._records)

    def register(self, record: DocumentRecord) -> None:
        with self._lock:
            if record.loc_hash in self._records:
                raise RegistryConflictError(
                    f"record already registered for {record.loc_hash}"
                )
            self._records[record.loc_hash] = record

    def lookup(self, loc_hash: str) -> DocumentRecord | None:
        """Resolve a hash to its record; unknown hashes are expected noise."""
        if not isinstance(loc_hash, str) or not _HASH_RE.match(loc_hash):
            raise MalformedHashError(f"bad loc_hash: {loc_hash!r}")
        return self._records.get(loc_hash)

    def records(self) -> Iterator[DocumentRecord]:
        return iter(list(self._records.values()))

    def save_snapshot(self, path: str | os.PathLike) -> None:
        with self._lock:
            payload = {
                "version": SNAPSHOT_VERSION,
                "records": [r.to_dict() for r in self._records.values()],
            }
        tmp = f"{path}.tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, separators=(",", ":"), sort_keys=True)
        os.replace(tmp, path)

    @classmethod
    def load_snapshot(cls, path: str | os.PathLike) -> "DocumentRegistry":
        try:
            with open(path, encoding="utf-8") as fh:
                payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SnapshotFormatError(f"corrupt snapshot {path}: {exc}") from exc
        if not isinstance(payload, dict) or payload.get("version") != SNAPSHOT_VERSION:
            raise SnapshotFormatError(
                f"unsupported snapshot version in {path}: {payload.get('version')!r}"
            )
        registry = cls()
        try:
            for raw in payload["records"]:
                registry.register(DocumentRecord.from_dict(raw))
        except (KeyError, TypeError, ValueError) as exc:
            raise SnapshotFormatError(f"corrupt snapshot {path}: {exc}") from exc
        return registry

    def equals(self, other: "DocumentRegistry") -> bool:
        return self._records == other._records
