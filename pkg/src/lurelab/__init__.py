"""Decoy-document campaign toolkit.

Generates believable corporate fileshares, watches the order in which an
intruder opens them, and narrows a candidate-motive set one environment at
a time until a single predicted motive remains.
"""

from .docgen import (
    DeterministicBackend,
    GeneratedDocument,
    GenerationError,
    RemoteBackend,
    SUBJECTS,
    build_prompt,
    generate_environment_set,
    infer_type,
    make_backend,
)
from .engine import (
    CampaignEngine,
    ProvisioningError,
    StaleEventError,
    Transition,
    TransitionOutcome,
)
from .gateway import ServerSettings, create_app, default_settings
from .ingest import (
    EventValidationError,
    IngestSummary,
    event_json_line,
    feed_events,
    parse_event,
    replay_file,
    serialize_event,
)
from .model import (
    ALL_MOTIVES,
    AccessEvent,
    CampaignConfig,
    CampaignStatus,
    DocumentLocation,
    DocumentType,
    EliminationResult,
    GeneratorMode,
    MotiveId,
    OrgProfile,
    motive_for_type,
    type_for_motive,
)
from .registry import DocumentRecord, DocumentRegistry, compute_loc_hash, make_record
from .scoring import position_score, rank_and_eliminate, score_environment
from .simulate import Persona, Transcript, evaluate, next_choice, run_exercise

__version__ = "0.1.0"

__all__ = [
    "ALL_MOTIVES",
    "AccessEvent",
    "CampaignConfig",
    "CampaignEngine",
    "CampaignStatus",
    "DeterministicBackend",
    "DocumentLocation",
    "DocumentRecord",
    "DocumentRegistry",
    "DocumentType",
    "EliminationResult",
    "EventValidationError",
    "GeneratedDocument",
    "GenerationError",
    "GeneratorMode",
    "IngestSummary",
    "MotiveId",
    "OrgProfile",
    "Persona",
    "ProvisioningError",
    "RemoteBackend",
    "SUBJECTS",
    "ServerSettings",
    "StaleEventError",
    "Transcript",
    "Transition",
    "TransitionOutcome",
    "build_prompt",
    "compute_loc_hash",
    "create_app",
    "default_settings",
    "evaluate",
    "event_json_line",
    "feed_events",
    "generate_environment_set",
    "infer_type",
    "make_backend",
    "make_record",
    "motive_for_type",
    "next_choice",
    "parse_event",
    "position_score",
    "rank_and_eliminate",
    "replay_file",
    "run_exercise",
    "score_environment",
    "serialize_event",
    "type_for_motive",
    "__version__",
]
