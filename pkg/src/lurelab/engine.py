"""Campaign state machine.

One engine owns one engagement: it provisions each deception environment on
the simulated fileshare root, consumes document-open events in arrival
order, finalizes an environment once its access quota is reached (score,
eliminate, regenerate), and terminates when a single motive survives.

All mutation flows through one lock; arrival order at the engine defines
access order. Campaign and registry state are written back to disk after
every transition so a crashed process can be replayed or inspected.
"""

from __future__ import annotations

import json
import os
import queue
import threading
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Mapping

from .docgen import TextBackend, generate_environment_set, make_backend
from .model import (
    DOC_OPEN,
    AccessEvent,
    CampaignConfig,
    CampaignStatus,
    DocumentLocation,
    EliminationResult,
    MotiveId,
    format_timestamp,
)
from .registry import (
    DocumentRegistry,
    compute_loc_hash,
    make_record,
)
from .scoring import TieBreakRule, rank_and_eliminate, score_environment

STATE_VERSION = 1
STATE_FILE = "campaign.json"
REGISTRY_FILE = "registry.json"


class StaleEventError(Exception):
    """Event targets a finalized environment or a campaign already over."""


class UnknownEnvironmentError(ValueError):
    """Event references an environment index this campaign never had."""


class CampaignMismatchError(ValueError):
    """Event belongs to a different campaign."""


class ProvisioningError(Exception):
    """The next environment could not be generated or deployed."""


class EnvStatus(str, Enum):
    ACTIVE = "active"
    FINALIZED = "finalized"


class TransitionOutcome(str, Enum):
    RECORDED = "recorded"
    DUPLICATE_IGNORED = "duplicate_ignored"
    UNKNOWN_FILE_IGNORED = "unknown_file_ignored"
    ENVIRONMENT_FINALIZED = "environment_finalized"
    CAMPAIGN_FINISHED = "campaign_finished"
    # Idle abandonment with an empty log; no prediction possible.
    CAMPAIGN_INCONCLUSIVE = "campaign_inconclusive"


@dataclass(frozen=True)
class Transition:
    seq: int
    outcome: TransitionOutcome
    env_index: int
    position: int | None = None
    name: str | None = None
    elimination: EliminationResult | None = None
    prediction: MotiveId | None = None

    def __post_init__(self) -> None:
        if self.outcome is TransitionOutcome.CAMPAIGN_FINISHED and not self.prediction:
            raise ValueError("a finished campaign must carry its predicted motive")

    def to_dict(self) -> dict:
        return {
            "seq": self.seq,
            "outcome": self.outcome.value,
            "env_index": self.env_index,
            "position": self.position,
            "name": self.name,
            "elimination": self.elimination.to_dict() if self.elimination else None,
            "prediction": self.prediction.value if self.prediction else None,
        }


@dataclass
class AccessEntry:
    position: int
    name: str
    loc_hash: str
    timestamp: str

    def to_dict(self) -> dict:
        return {
            "position": self.position,
            "name": self.name,
            "loc_hash": self.loc_hash,
            "timestamp": self.timestamp,
        }


@dataclass
class EnvironmentState:
    index: int
    active_motives: tuple[MotiveId, ...]
    directory: str
    host_name: str
    files: tuple[str, ...]
    hash_to_name: dict[str, str]
    access_log: list[str] = field(default_factory=list)
    access_entries: list[AccessEntry] = field(default_factory=list)
    status: EnvStatus = EnvStatus.ACTIVE
    elimination: EliminationResult | None = None

    def snapshot(self) -> dict:
        return {
            "index": self.index,
            "host_name": self.host_name,
            "directory": self.directory,
            "status": self.status.value,
            "active_motives": [m.value for m in self.active_motives],
            "files": sorted(self.files),
            "access_log": [entry.to_dict() for entry in self.access_entries],
            "scoreboard": (
                {m.value: s for m, s in self.elimination.scoreboard.items()}
                if self.elimination
                else None
            ),
            "eliminated": self.elimination.eliminated.value if self.elimination else None,
            "remaining": (
                [m.value for m in self.elimination.remaining]
                if self.elimination
                else None
            ),
        }


def host_name_for(index: int) -> str:
    return f"deception-env-{index}"


class CampaignEngine:
    """Single-writer orchestrator for one deception campaign."""

    def __init__(self, config: CampaignConfig, backend: TextBackend | None = None):
        self.config = config
        self.campaign_id = config.campaign_id()
        self.registry = DocumentRegistry()
        self.environments: list[EnvironmentState] = []
        self.status = CampaignStatus.RUNNING
        self.prediction: MotiveId | None = None
        self._active_motives: tuple[MotiveId, ...] = config.initial_motives
        self._backend = backend
        self._root = Path(config.root_dir).resolve()
        self._rule = TieBreakRule()
        self._lock = threading.RLock()
        self._transitions: list[Transition] = []
        self._seq = 0
        self._subscribers: list[queue.Queue] = []
        self._last_activity = time.monotonic()

    # -- lifecycle -----------------------------------------------------

    @classmethod
    def start_campaign(
        cls, config: CampaignConfig, backend: TextBackend | None = None
    ) -> "CampaignEngine":
        engine = cls(config, backend)
        engine._provision(1, engine._active_motives)
        engine._persist()
        return engine

    @property
    def active_motives(self) -> tuple[MotiveId, ...]:
        return self._active_motives

    @property
    def active_environment(self) -> EnvironmentState:
        return self.environments[-1]

    def _get_backend(self) -> TextBackend:
        if self._backend is None:
            self._backend = make_backend(self.config)
        return self._backend

    def _provision(self, index: int, motives: tuple[MotiveId, ...]) -> EnvironmentState:
        try:
            documents = generate_environment_set(motives, self.config, self._get_backend())
        except Exception as exc:
            raise ProvisioningError(f"generation failed for env {index}: {exc}") from exc
        env_dir = self._root / f"env-{index}"
        host = host_name_for(index)
        try:
            env_dir.mkdir(parents=True, exist_ok=True)
            for doc in documents:
                (env_dir / doc.file_name).write_text(doc.body, encoding="utf-8")
        except OSError as exc:
            raise ProvisioningError(f"cannot deploy env {index} under {env_dir}: {exc}") from exc
        # Files are fully on disk before anything is registered, so a deploy
        # failure never leaves partial registry entries behind.
        hash_to_name: dict[str, str] = {}
        for doc in documents:
            location = DocumentLocation(path=str(env_dir / doc.file_name), host=host)
            record = make_record(
                location, index, _motive_of(doc.doc_type, motives), doc.subject
            )
            self.registry.register(record)
            hash_to_name[record.loc_hash] = doc.file_name
        env = EnvironmentState(
            index=index,
            active_motives=motives,
            directory=str(env_dir),
            host_name=host,
            files=tuple(doc.file_name for doc in documents),
            hash_to_name=hash_to_name,
        )
        self.environments.append(env)
        return env

    # -- event handling ------------------------------------------------

    def handle_access(self, event: AccessEvent) -> Transition:
        with self._lock:
            self._last_activity = time.monotonic()
            if event.campaign_id != self.campaign_id:
                raise CampaignMismatchError(
                    f"event for campaign {event.campaign_id!r}, this is {self.campaign_id!r}"
                )
            if self.status is not CampaignStatus.RUNNING:
                raise StaleEventError(f"campaign is {self.status.value}")
            if not 1 <= event.env_index <= len(self.environments):
                raise UnknownEnvironmentError(
                    f"no environment {event.env_index} in this campaign"
                )
            env = self.active_environment
            if event.env_index != env.index:
                raise StaleEventError(
                    f"environment {event.env_index} is already finalized"
                )
            if event.kind != DOC_OPEN:
                raise ValueError(f"unsupported event kind: {event.kind!r}")

            loc_hash = compute_loc_hash(event.location)
            record = self.registry.lookup(loc_hash)
            if record is None:
                return self._commit(
                    Transition(
                        seq=self._next_seq(),
                        outcome=TransitionOutcome.UNKNOWN_FILE_IGNORED,
                        env_index=env.index,
                    )
                )
            if record.deception_host != env.index:
                raise StaleEventError(
                    f"document belongs to finalized environment {record.deception_host}"
                )
            if loc_hash in env.access_log:
                return self._commit(
                    Transition(
                        seq=self._next_seq(),
                        outcome=TransitionOutcome.DUPLICATE_IGNORED,
                        env_index=env.index,
                        name=env.hash_to_name[loc_hash],
                    )
                )

            if len(env.access_log) < self.config.accesses_per_env:
                env.access_log.append(loc_hash)
                env.access_entries.append(
                    AccessEntry(
                        position=len(env.access_log),
                        name=env.hash_to_name[loc_hash],
                        loc_hash=loc_hash,
                        timestamp=format_timestamp(event.timestamp),
                    )
                )
            if len(env.access_log) == self.config.accesses_per_env:
                return self._finalize_active(env)
            return self._commit(
                Transition(
                    seq=self._next_seq(),
                    outcome=TransitionOutcome.RECORDED,
                    env_index=env.index,
                    position=len(env.access_log),
                    name=env.hash_to_name[loc_hash],
                )
            )

    def _finalize_active(self, env: EnvironmentState) -> Transition:
        board = score_environment(
            env.access_log, self.registry, self.config.accesses_per_env, env.active_motives
        )
        elimination = rank_and_eliminate(board, env.access_log, self.registry, self._rule)
        remaining = elimination.remaining
        if len(remaining) > 1:
            # Provision before committing: a deploy failure leaves the
            # environment active, and the next distinct access (or an idle
            # finalize) retries this whole block.
            self._provision(env.index + 1, remaining)
            env.status = EnvStatus.FINALIZED
            env.elimination = elimination
            self._active_motives = remaining
            return self._commit(
                Transition(
                    seq=self._next_seq(),
                    outcome=TransitionOutcome.ENVIRONMENT_FINALIZED,
                    env_index=env.index,
                    position=len(env.access_log),
                    elimination=elimination,
                )
            )
        env.status = EnvStatus.FINALIZED
        env.elimination = elimination
        self._active_motives = remaining
        self.status = CampaignStatus.FINISHED
        self.prediction = remaining[0]
        return self._commit(
            Transition(
                seq=self._next_seq(),
                outcome=TransitionOutcome.CAMPAIGN_FINISHED,
                env_index=env.index,
                position=len(env.access_log),
                elimination=elimination,
                prediction=self.prediction,
            )
        )

    def finalize_idle(self) -> Transition:
        """Close out an abandoned environment.

        A partial log of at least one access still orders observed interest,
        so the environment is finalized from what was seen; an untouched
        environment ends the whole campaign without a prediction.
        """
        with self._lock:
            if self.status is not CampaignStatus.RUNNING:
                raise StaleEventError(f"campaign is {self.status.value}")
            env = self.active_environment
            if env.access_log:
                return self._finalize_active(env)
            self.status = CampaignStatus.INCONCLUSIVE
            return self._commit(
                Transition(
                    seq=self._next_seq(),
                    outcome=TransitionOutcome.CAMPAIGN_INCONCLUSIVE,
                    env_index=env.index,
                )
            )

    def seconds_since_last_event(self) -> float:
        return time.monotonic() - self._last_activity

    def predict(self) -> MotiveId | None:
        """The surviving motive once the campaign finished, else None."""
        return self.prediction if self.status is CampaignStatus.FINISHED else None

    # -- reporting and streaming ----------------------------------------

    def status_snapshot(self) -> dict:
        """Consistent, JSON-plain view of the whole campaign."""
        with self._lock:
            return {
                "campaign_id": self.campaign_id,
                "status": self.status.value,
                "accesses_per_env": self.config.accesses_per_env,
                "active_motives": [m.value for m in self._active_motives],
                "prediction": self.prediction.value if self.prediction else None,
                "transition_count": self._seq,
                "environments": [env.snapshot() for env in self.environments],
            }

    def transitions(self) -> list[Transition]:
        with self._lock:
            return list(self._transitions)

    def subscribe(self, since: int = 0) -> tuple[list[dict], queue.Queue]:
        """History after `since` plus a queue receiving future transitions."""
        with self._lock:
            history = [t.to_dict() for t in self._transitions if t.seq > since]
            channel: queue.Queue = queue.Queue()
            self._subscribers.append(channel)
            return history, channel

    def unsubscribe(self, channel: queue.Queue) -> None:
        with self._lock:
            if channel in self._subscribers:
                self._subscribers.remove(channel)

    def _next_seq(self) -> int:
        self._seq += 1
        return self._seq

    def _commit(self, transition: Transition) -> Transition:
        self._transitions.append(transition)
        payload = transition.to_dict()
        for channel in self._subscribers:
            channel.put(payload)
        self._persist()
        return transition

    # -- persistence -----------------------------------------------------

    def _persist(self) -> None:
        if not self.config.persist_state:
            return
        state = {
            "version": STATE_VERSION,
            "campaign": {
                "id": self.campaign_id,
                "status": self.status.value,
                "prediction": self.prediction.value if self.prediction else None,
                "active_motives": [m.value for m in self._active_motives],
                "transition_seq": self._seq,
                "config": self.config.to_dict(),
                "environments": [
                    {
                        "index": env.index,
                        "host_name": env.host_name,
                        "directory": env.directory,
                        "status": env.status.value,
                        "active_motives": [m.value for m in env.active_motives],
                        "files": [[n, h] for h, n in _ordered_files(env)],
                        "access_log": [e.to_dict() for e in env.access_entries],
                        "elimination": env.elimination.to_dict()
                        if env.elimination
                        else None,
                    }
                    for env in self.environments
                ],
            },
        }
        self._root.mkdir(parents=True, exist_ok=True)
        tmp = self._root / (STATE_FILE + ".tmp")
        tmp.write_text(json.dumps(state, sort_keys=True), encoding="utf-8")
        os.replace(tmp, self._root / STATE_FILE)
        self.registry.save_snapshot(self._root / REGISTRY_FILE)

    @classmethod
    def load(cls, root_dir: str | os.PathLike, backend: TextBackend | None = None) -> "CampaignEngine":
        """Rebuild an engine from its persisted state and registry files."""
        root = Path(root_dir)
        raw = json.loads((root / STATE_FILE).read_text(encoding="utf-8"))
        if raw.get("version") != STATE_VERSION:
            raise ValueError(f"unsupported campaign state version: {raw.get('version')!r}")
        data = raw["campaign"]
        config = CampaignConfig.from_dict(data["config"])
        engine = cls(config, backend)
        engine.registry = DocumentRegistry.load_snapshot(root / REGISTRY_FILE)
        engine.status = CampaignStatus(data["status"])
        engine.prediction = (
            MotiveId(data["prediction"]) if data.get("prediction") else None
        )
        engine._active_motives = tuple(MotiveId(m) for m in data["active_motives"])
        engine._seq = data["transition_seq"]
        for env_data in data["environments"]:
            env = EnvironmentState(
                index=env_data["index"],
                active_motives=tuple(MotiveId(m) for m in env_data["active_motives"]),
                directory=env_data["directory"],
                host_name=env_data["host_name"],
                files=tuple(n for n, _ in env_data["files"]),
                hash_to_name={h: n for n, h in env_data["files"]},
                access_log=[e["loc_hash"] for e in env_data["access_log"]],
                access_entries=[
                    AccessEntry(
                        position=e["position"],
                        name=e["name"],
                        loc_hash=e["loc_hash"],
                        timestamp=e["timestamp"],
                    )
                    for e in env_data["access_log"]
                ],
                status=EnvStatus(env_data["status"]),
                elimination=EliminationResult.from_dict(env_data["elimination"])
                if env_data["elimination"]
                else None,
            )
            engine.environments.append(env)
        return engine


def _motive_of(doc_type, motives: tuple[MotiveId, ...]) -> MotiveId:
    from .model import motive_for_type

    motive = motive_for_type(doc_type)
    if motive not in motives:
        raise ProvisioningError(
            f"generated a {doc_type.value} document outside the active motive set"
        )
    return motive


def _ordered_files(env: EnvironmentState) -> list[tuple[str, str]]:
    name_to_hash = {n: h for h, n in env.hash_to_name.items()}
    return [(name_to_hash[name], name) for name in env.files]


def canonical_report(snapshot: Mapping) -> str:
    """Stable JSON encoding of a status snapshot, for comparison and export."""
    return json.dumps(snapshot, sort_keys=True, indent=2) + "\n"
