"""Telemetry boundary: wire-event validation and ordered delivery.

Sensors report document opens as JSON objects, one per line in replay
files or one per HTTP POST. Parsing is strict about the required keys and
their types; delivery filters anything that is not a document open
(sensors emit broad telemetry) and isolates per-event failures so one bad
line never stops a replay.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import IO, Iterable, Mapping

from .engine import CampaignEngine, Transition, TransitionOutcome
from .model import DOC_OPEN, AccessEvent, DocumentLocation, parse_timestamp


class EventValidationError(ValueError):
    """The wire object is not a well-formed event."""


_REQUIRED: dict[str, type] = {
    "campaign_id": str,
    "env_index": int,
    "path": str,
    "host": str,
    "timestamp": str,
    "kind": str,
}


def parse_event(obj: object) -> AccessEvent:
    """Validate one wire object and build the internal event.

    Unknown extra keys are ignored; every required key must be present with
    the right type. The kind is not restricted here, wrong-kind events are
    dropped later with an acknowledgement rather than rejected.
    """
    if not isinstance(obj, Mapping):
        raise EventValidationError(f"event must be a JSON object, got {type(obj).__name__}")
    missing = [key for key in _REQUIRED if key not in obj]
    if missing:
        raise EventValidationError(f"missing field(s): {', '.join(missing)}")
    for key, expected in _REQUIRED.items():
        value = obj[key]
        # bool is an int subclass; an env_index of true is still malformed.
        if not isinstance(value, expected) or isinstance(value, bool):
            raise EventValidationError(
                f"field {key!r} must be {expected.__name__}, got {type(value).__name__}"
            )
    if obj["env_index"] < 1:
        raise EventValidationError("field 'env_index' must be >= 1")
    try:
        timestamp = parse_timestamp(obj["timestamp"])
    except ValueError as exc:
        raise EventValidationError(f"field 'timestamp': {exc}") from exc
    try:
        location = DocumentLocation(path=obj["path"], host=obj["host"])
        return AccessEvent(
            campaign_id=obj["campaign_id"],
            env_index=obj["env_index"],
            location=location,
            timestamp=timestamp,
            kind=obj["kind"],
        )
    except ValueError as exc:
        raise EventValidationError(str(exc)) from exc


def serialize_event(event: AccessEvent) -> dict:
    return event.to_dict()


def event_json_line(event: AccessEvent) -> str:
    return json.dumps(serialize_event(event), sort_keys=True)


@dataclass
class IngestSummary:
    recorded: int = 0
    duplicates: int = 0
    unknown: int = 0
    filtered: int = 0
    errors: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    def total(self) -> int:
        return self.recorded + self.duplicates + self.unknown + self.filtered + self.errors


# A finalization is triggered by a recorded access, so it counts as one.
_OUTCOME_FIELD = {
    TransitionOutcome.RECORDED: "recorded",
    TransitionOutcome.ENVIRONMENT_FINALIZED: "recorded",
    TransitionOutcome.CAMPAIGN_FINISHED: "recorded",
    TransitionOutcome.DUPLICATE_IGNORED: "duplicates",
    TransitionOutcome.UNKNOWN_FILE_IGNORED: "unknown",
}


def record_outcome(summary: IngestSummary, transition: Transition) -> None:
    field = _OUTCOME_FIELD.get(transition.outcome)
    if field is None:
        raise RuntimeError(f"unexpected transition outcome {transition.outcome!r}")
    setattr(summary, field, getattr(summary, field) + 1)


def feed_event(
    engine: CampaignEngine, event: AccessEvent, summary: IngestSummary
) -> Transition | None:
    """Deliver one event, folding the outcome into the running summary.

    Engine rejections (stale environment, finished campaign, foreign
    campaign id) propagate; batch callers absorb them as errors so a
    replay can drain its source.
    """
    if event.kind != DOC_OPEN:
        summary.filtered += 1
        return None
    transition = engine.handle_access(event)
    record_outcome(summary, transition)
    return transition


def feed_events(
    engine: CampaignEngine, events: Iterable[AccessEvent]
) -> IngestSummary:
    summary = IngestSummary()
    for event in events:
        try:
            feed_event(engine, event, summary)
        except Exception:
            summary.errors += 1
    return summary


def replay_lines(engine: CampaignEngine, lines: Iterable[str]) -> IngestSummary:
    """Feed newline-delimited JSON events in order, isolating bad lines."""
    summary = IngestSummary()
    for line in lines:
        line = line.strip()
        if not line:
            continue
        try:
            event = parse_event(json.loads(line))
            feed_event(engine, event, summary)
        except Exception:
            summary.errors += 1
    return summary


def replay_file(engine: CampaignEngine, path: str | Path | IO[str]) -> IngestSummary:
    """Replay an exported event file into the engine, in file order."""
    if hasattr(path, "read"):
        return replay_lines(engine, path)  # type: ignore[arg-type]
    with open(path, "r", encoding="utf-8") as handle:
        return replay_lines(engine, handle)
