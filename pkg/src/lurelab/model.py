"""Shared domain vocabulary: motives, document types, and campaign value types.

Everything here is an immutable value with a stable lowercase string form,
so any of it can appear in file formats and API payloads unchanged.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Mapping, Sequence


class MotiveId(str, Enum):
    """The closed set of attacker motives the engine can discriminate."""

    PROFIT = "profit"
    IDEOLOGICAL = "ideological"
    GEOPOLITICAL = "geopolitical"
    SATISFACTION = "satisfaction"
    DISCONTENT = "discontent"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


class DocumentType(str, Enum):
    """The closed set of decoy document categories planted on a fileshare."""

    FINANCIAL = "financial"
    HR = "hr"
    OPERATIONAL = "operational"
    IT = "it"
    LEGAL = "legal"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


# Default motive-to-document-type assignment. Each motive owns exactly one
# type and vice versa; the elimination loop depends on this being a bijection.
MOTIVE_TYPE_MAP: Mapping[MotiveId, DocumentType] = {
    MotiveId.PROFIT: DocumentType.FINANCIAL,
    MotiveId.IDEOLOGICAL: DocumentType.HR,
    MotiveId.GEOPOLITICAL: DocumentType.OPERATIONAL,
    MotiveId.SATISFACTION: DocumentType.IT,
    MotiveId.DISCONTENT: DocumentType.LEGAL,
}

_TYPE_MOTIVE_MAP: Mapping[DocumentType, MotiveId] = {
    t: m for m, t in MOTIVE_TYPE_MAP.items()
}

ALL_MOTIVES: tuple[MotiveId, ...] = tuple(MOTIVE_TYPE_MAP)

DOC_OPEN = "doc_open"


def type_for_motive(motive: MotiveId) -> DocumentType:
    """Document type an attacker with this motive is assumed to hunt for."""
    return MOTIVE_TYPE_MAP[MotiveId(motive)]


def motive_for_type(doc_type: DocumentType) -> MotiveId:
    """Inverse of :func:`type_for_motive`."""
    return _TYPE_MOTIVE_MAP[DocumentType(doc_type)]


def format_timestamp(ts: datetime) -> str:
    """Render a UTC instant as an RFC 3339 string with a Z suffix."""
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    ts = ts.astimezone(timezone.utc)
    return ts.isoformat(timespec="microseconds").replace("+00:00", "Z")


def parse_timestamp(raw: str) -> datetime:
    """Parse an RFC 3339 timestamp; naive inputs are rejected."""
    if not isinstance(raw, str) or not raw:
        raise ValueError("timestamp must be a non-empty string")
    text = raw[:-1] + "+00:00" if raw.endswith(("Z", "z")) else raw
    try:
        parsed = datetime.fromisoformat(text)
    except ValueError as exc:
        raise ValueError(f"unparseable timestamp {raw!r}") from exc
    if parsed.tzinfo is None:
        raise ValueError(f"timestamp {raw!r} lacks a UTC offset")
    return parsed.astimezone(timezone.utc)


@dataclass(frozen=True)
class DocumentLocation:
    """Where a document lives: absolute path on a named host."""

    path: str
    host: str

    def __post_init__(self) -> None:
        if not self.path or not self.path.startswith("/"):
            raise ValueError(f"path must be non-empty and absolute: {self.path!r}")
        if not self.host:
            raise ValueError("host must be non-empty")

    def to_dict(self) -> dict:
        return {"path": self.path, "host": self.host}

    @classmethod
    def from_dict(cls, data: Mapping) -> "DocumentLocation":
        return cls(path=data["path"], host=data["host"])


@dataclass(frozen=True)
class AccessEvent:
    """One observed document-open on a deception host."""

    campaign_id: str
    env_index: int
    location: DocumentLocation
    timestamp: datetime
    kind: str = DOC_OPEN

    def __post_init__(self) -> None:
        if self.env_index < 1:
            raise ValueError("env_index must be >= 1")
        if self.timestamp.tzinfo is None:
            raise ValueError("timestamp must carry a UTC offset")

    def to_dict(self) -> dict:
        return {
            "campaign_id": self.campaign_id,
            "env_index": self.env_index,
            "path": self.location.path,
            "host": self.location.host,
            "timestamp": format_timestamp(self.timestamp),
            "kind": self.kind,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "AccessEvent":
        return cls(
            campaign_id=data["campaign_id"],
            env_index=data["env_index"],
            location=DocumentLocation(path=data["path"], host=data["host"]),
            timestamp=parse_timestamp(data["timestamp"]),
            kind=data["kind"],
        )


# Per-environment aggregate: every active motive maps to its score.
ScoreBoard = dict[MotiveId, int]


@dataclass(frozen=True)
class EliminationResult:
    """Outcome of closing one environment: the scoreboard and the cut motive."""

    scoreboard: Mapping[MotiveId, int]
    eliminated: MotiveId
    remaining: tuple[MotiveId, ...]

    def __post_init__(self) -> None:
        if self.eliminated in self.remaining:
            raise ValueError("eliminated motive must not remain active")
        if len(self.remaining) != len(self.scoreboard) - 1:
            raise ValueError("remaining must shrink the scoreboard by exactly one")
        if any(score < 0 for score in self.scoreboard.values()):
            raise ValueError("scores must be non-negative")

    def to_dict(self) -> dict:
        return {
            "scoreboard": {m.value: s for m, s in self.scoreboard.items()},
            "eliminated": self.eliminated.value,
            "remaining": [m.value for m in self.remaining],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "EliminationResult":
        return cls(
            scoreboard={MotiveId(m): s for m, s in data["scoreboard"].items()},
            eliminated=MotiveId(data["eliminated"]),
            remaining=tuple(MotiveId(m) for m in data["remaining"]),
        )


@dataclass(frozen=True)
class OrgProfile:
    """Victim-organisation background woven into generated decoys."""

    company_name: str = "Jacob & Co Ltd"
    description: str = "a hedge fund based in Gibraltar and Panama"

    def __post_init__(self) -> None:
        if not self.company_name or not self.description:
            raise ValueError("company_name and description must be non-empty")

    def to_dict(self) -> dict:
        return {"company_name": self.company_name, "description": self.description}

    @classmethod
    def from_dict(cls, data: Mapping) -> "OrgProfile":
        return cls(company_name=data["company_name"], description=data["description"])


class GeneratorMode(str, Enum):
    REMOTE_LLM = "remote-llm"
    DETERMINISTIC = "deterministic-template"


class CampaignStatus(str, Enum):
    RUNNING = "running"
    FINISHED = "finished"
    # Idle abandonment with an empty access log ends the campaign without a
    # usable prediction.
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class CampaignConfig:
    """Everything needed to run one campaign reproducibly."""

    root_dir: str
    accesses_per_env: int = 6
    docs_per_type: int = 10
    initial_motives: tuple[MotiveId, ...] = ALL_MOTIVES
    org_profile: OrgProfile = field(default_factory=OrgProfile)
    generator_mode: GeneratorMode = GeneratorMode.DETERMINISTIC
    seed: int = 0
    file_extension: str = ".docx"
    persist_state: bool = True
    idle_timeout_s: float | None = None

    def __post_init__(self) -> None:
        if not self.root_dir:
            raise ValueError("root_dir must be set")
        if self.accesses_per_env < 2:
            raise ValueError("accesses_per_env must be >= 2")
        if self.docs_per_type < 1:
            raise ValueError("docs_per_type must be >= 1")
        # The last environment pairs two motives; it must still offer
        # enough documents to reach the access quota.
        if self.docs_per_type * 2 < self.accesses_per_env:
            raise ValueError(
                "docs_per_type too small: a two-motive environment could not "
                f"reach {self.accesses_per_env} distinct accesses"
            )
        motives = tuple(MotiveId(m) for m in self.initial_motives)
        if len(motives) < 2:
            raise ValueError("at least two initial motives are required")
        if len(set(motives)) != len(motives):
            raise ValueError("initial motives must be distinct")
        object.__setattr__(self, "initial_motives", motives)
        object.__setattr__(self, "generator_mode", GeneratorMode(self.generator_mode))
        if not -(2**63) <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")
        if self.idle_timeout_s is not None and self.idle_timeout_s <= 0:
            raise ValueError("idle_timeout_s must be positive when set")

    def to_dict(self) -> dict:
        return {
            "root_dir": self.root_dir,
            "accesses_per_env": self.accesses_per_env,
            "docs_per_type": self.docs_per_type,
            "initial_motives": [m.value for m in self.initial_motives],
            "org_profile": self.org_profile.to_dict(),
            "generator_mode": self.generator_mode.value,
            "seed": self.seed,
            "file_extension": self.file_extension,
            "persist_state": self.persist_state,
            "idle_timeout_s": self.idle_timeout_s,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "CampaignConfig":
        known = {
            "root_dir": data["root_dir"],
            "accesses_per_env": data.get("accesses_per_env", 6),
            "docs_per_type": data.get("docs_per_type", 10),
            "initial_motives": tuple(
                MotiveId(m) for m in data.get("initial_motives", ALL_MOTIVES)
            ),
            "org_profile": OrgProfile.from_dict(data["org_profile"])
            if "org_profile" in data
            else OrgProfile(),
            "generator_mode": GeneratorMode(
                data.get("generator_mode", GeneratorMode.DETERMINISTIC)
            ),
            "seed": data.get("seed", 0),
            "file_extension": data.get("file_extension", ".docx"),
            "persist_state": data.get("persist_state", True),
            "idle_timeout_s": data.get("idle_timeout_s"),
        }
        return cls(**known)

    def campaign_id(self) -> str:
        """Stable identifier derived from the canonical config encoding.

        Two campaigns built from equal configs share an id, which is what
        lets an exported event stream replay into a fresh campaign.
        """
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return "c-" + hashlib.sha256(canon.encode("utf-8")).hexdigest()[:12]


def motive_list(values: Sequence[str | MotiveId]) -> tuple[MotiveId, ...]:
    """Coerce a sequence of motive names, preserving order."""
    return tuple(MotiveId(v) for v in values)
