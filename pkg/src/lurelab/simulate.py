"""Scripted attacker personas and Monte Carlo accuracy evaluation.

A persona explores each fileshare the way the exercise roles did: it hunts
documents matching its motive, with an epsilon chance per open of drifting
to something unrelated. Exercises drive the engine directly (headless);
the same transcript shape also backs event export for replays.
"""

from __future__ import annotations

import random
import shutil
import tempfile
from dataclasses import dataclass, replace
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

from .docgen import TextBackend, infer_type
from .engine import CampaignEngine
from .ingest import event_json_line
from .model import (
    AccessEvent,
    CampaignConfig,
    CampaignStatus,
    DocumentLocation,
    DocumentType,
    EliminationResult,
    MotiveId,
    type_for_motive,
)

EXERCISE_EPOCH = datetime(2024, 1, 1, tzinfo=timezone.utc)


@dataclass(frozen=True)
class Persona:
    """An attacker profile: what it wants and how noisily it behaves."""

    motive: MotiveId
    epsilon: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must be within [0, 1], got {self.epsilon}")

    def state(self) -> "PersonaState":
        return PersonaState(persona=self, rng=random.Random(self.seed))


@dataclass
class PersonaState:
    persona: Persona
    rng: random.Random


class VisibleDocument(NamedTuple):
    location: DocumentLocation
    doc_type: DocumentType


def next_choice(state: PersonaState, visible: Sequence[VisibleDocument]) -> VisibleDocument:
    """Pick the persona's next document among the unvisited listing.

    With probability 1 - epsilon the persona stays on documents of its
    preferred type while any remain; otherwise it wanders uniformly.
    """
    if not visible:
        raise ValueError("no unvisited documents to choose from")
    preferred_type = type_for_motive(state.persona.motive)
    preferred = [doc for doc in visible if doc.doc_type == preferred_type]
    wander = state.rng.random() < state.persona.epsilon
    pool = visible if wander or not preferred else preferred
    return state.rng.choice(pool)


@dataclass(frozen=True)
class Transcript:
    """Everything one exercise produced, in order."""

    campaign_id: str
    persona: Persona
    accesses: tuple[AccessEvent, ...]
    eliminations: tuple[EliminationResult, ...]
    prediction: MotiveId | None
    correct: bool

    def export_events(self) -> str:
        """The access sequence as newline-delimited JSON, replay-ready."""
        return "".join(event_json_line(event) + "\n" for event in self.accesses)

    def write_events(self, path: str | Path) -> None:
        Path(path).write_text(self.export_events(), encoding="utf-8")

    def to_dict(self) -> dict:
        return {
            "campaign_id": self.campaign_id,
            "persona": {
                "motive": self.persona.motive.value,
                "epsilon": self.persona.epsilon,
                "seed": self.persona.seed,
            },
            "accesses": [event.to_dict() for event in self.accesses],
            "eliminations": [e.to_dict() for e in self.eliminations],
            "prediction": self.prediction.value if self.prediction else None,
            "correct": self.correct,
        }


def run_exercise_on(
    engine: CampaignEngine,
    persona: Persona,
    base_time: datetime = EXERCISE_EPOCH,
) -> Transcript:
    """Drive an already-started engine with one persona until it finishes.

    Document-open timestamps tick one second apart from a fixed base so a
    transcript is reproducible byte for byte.
    """
    state = persona.state()
    accesses: list[AccessEvent] = []
    # One elimination per environment; anything past this bound is a bug.
    cap = engine.config.accesses_per_env * max(len(engine.active_motives), 1)
    while engine.status is CampaignStatus.RUNNING:
        if len(accesses) > cap:
            raise RuntimeError("exercise exceeded its access budget without finishing")
        env = engine.active_environment
        visited = {env.hash_to_name[h] for h in env.access_log}
        visible = [
            VisibleDocument(
                location=DocumentLocation(
                    path=str(Path(env.directory) / name), host=env.host_name
                ),
                doc_type=infer_type(name),
            )
            for name in env.files
            if name not in visited
        ]
        choice = next_choice(state, visible)
        event = AccessEvent(
            campaign_id=engine.campaign_id,
            env_index=env.index,
            location=choice.location,
            timestamp=base_time + timedelta(seconds=len(accesses)),
        )
        engine.handle_access(event)
        accesses.append(event)
    eliminations = tuple(
        env.elimination for env in engine.environments if env.elimination is not None
    )
    prediction = engine.predict()
    return Transcript(
        campaign_id=engine.campaign_id,
        persona=persona,
        accesses=tuple(accesses),
        eliminations=eliminations,
        prediction=prediction,
        correct=prediction == persona.motive,
    )


def run_exercise(
    config: CampaignConfig,
    persona: Persona,
    backend: TextBackend | None = None,
    base_time: datetime = EXERCISE_EPOCH,
) -> Transcript:
    """Start a fresh campaign under `config` and play it out headless."""
    engine = CampaignEngine.start_campaign(config, backend)
    return run_exercise_on(engine, persona, base_time)


def evaluate(
    config: CampaignConfig,
    motives: Iterable[MotiveId],
    epsilons: Iterable[float],
    trials: int,
    seed: int = 0,
) -> dict:
    """Monte Carlo prediction-accuracy table over (motive, epsilon) cells.

    Every trial runs a full campaign in its own scratch directory with
    persistence off; the trial's persona seed is derived from (seed,
    motive, epsilon, trial) so the whole table is reproducible.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    motive_list = list(motives)
    epsilon_list = list(epsilons)
    cells = []
    scratch = Path(tempfile.mkdtemp(prefix="lurelab-eval-"))
    try:
        for epsilon in epsilon_list:
            for motive in motive_list:
                correct = 0
                confusion: dict[str, int] = {}
                for trial in range(trials):
                    trial_seed = random.Random(
                        f"{seed}|{motive.value}|{epsilon!r}|{trial}"
                    ).getrandbits(63)
                    root = scratch / f"{motive.value}-{epsilon}-{trial}"
                    trial_config = replace(
                        config, root_dir=str(root), persist_state=False
                    )
                    persona = Persona(motive=motive, epsilon=epsilon, seed=trial_seed)
                    transcript = run_exercise(trial_config, persona)
                    predicted = transcript.prediction.value if transcript.prediction else "none"
                    confusion[predicted] = confusion.get(predicted, 0) + 1
                    if transcript.correct:
                        correct += 1
                    shutil.rmtree(root, ignore_errors=True)
                cells.append(
                    {
                        "motive": motive.value,
                        "epsilon": epsilon,
                        "trials": trials,
                        "correct": correct,
                        "accuracy": correct / trials,
                        "confusion": dict(sorted(confusion.items())),
                    }
                )
    finally:
        shutil.rmtree(scratch, ignore_errors=True)
    return {
        "seed": seed,
        "trials": trials,
        "epsilons": epsilon_list,
        "motives": [m.value for m in motive_list],
        "cells": cells,
    }


def format_accuracy_table(table: dict) -> str:
    """Aligned text rendering of an evaluate() result."""
    width = max(len("motive"), *(len(m) for m in table["motives"]))
    header = "motive".ljust(width) + "".join(
        f"  eps={epsilon:g}".rjust(12) for epsilon in table["epsilons"]
    )
    by_key = {(cell["motive"], cell["epsilon"]): cell for cell in table["cells"]}
    lines = [header]
    for motive in table["motives"]:
        row = motive.ljust(width)
        for epsilon in table["epsilons"]:
            cell = by_key[(motive, epsilon)]
            row += f"{cell['accuracy']:12.3f}"
        lines.append(row)
    lines.append(f"trials per cell: {table['trials']}, seed: {table['seed']}")
    return "\n".join(lines)
