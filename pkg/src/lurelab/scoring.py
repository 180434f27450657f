"""Behavioural analysis of one environment's access order.

The earlier a document is opened, the more its motive scores: position p of
N earns round(100 * (N - p) / (N - 1)) points, a straight line from 100 for
the first open down to 0 for the last. With the default six accesses that is
the 100/80/60/40/20/0 ladder. After aggregation the lowest-scoring motive is
eliminated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .model import EliminationResult, MotiveId, ScoreBoard
from .registry import DocumentRegistry

# Tied minima: drop the motive whose first access came latest (never accessed
# counts as latest of all); still tied, take the greatest canonical name.
LATEST_ACCESS_THEN_LEXICOGRAPHIC = "latest-first-access, then lexicographic"


class UnresolvedAccessError(Exception):
    """An access-log hash has no registry record; campaign state is corrupt."""


@dataclass(frozen=True)
class TieBreakRule:
    policy: str = LATEST_ACCESS_THEN_LEXICOGRAPHIC

    def __post_init__(self) -> None:
        if self.policy != LATEST_ACCESS_THEN_LEXICOGRAPHIC:
            raise ValueError(f"unknown tie-break policy: {self.policy!r}")


def position_score(position: int, n_accesses: int) -> int:
    """Score for the document opened at `position` of `n_accesses`.

    Exact integer arithmetic with half-up rounding, so every implementation
    of the formula lands on the same ladder.
    """
    if n_accesses < 2:
        raise ValueError("n_accesses must be >= 2")
    if not 1 <= position <= n_accesses:
        raise ValueError(f"position {position} out of range 1..{n_accesses}")
    return (200 * (n_accesses - position) + (n_accesses - 1)) // (2 * (n_accesses - 1))


def score_environment(
    log: Sequence[str],
    registry: DocumentRegistry,
    n_accesses: int,
    active_motives: Sequence[MotiveId],
) -> ScoreBoard:
    """Aggregate positional scores per motive for one environment.

    Every distinct access contributes its position score to the motive of the
    opened document; active motives that were never touched score zero.
    """
    if len(log) > n_accesses:
        raise ValueError("access log longer than the per-environment quota")
    if len(set(log)) != len(log):
        raise ValueError("access log must hold distinct location hashes")
    board: ScoreBoard = {MotiveId(m): 0 for m in active_motives}
    for position, loc_hash in enumerate(log, start=1):
        record = registry.lookup(loc_hash)
        if record is None:
            raise UnresolvedAccessError(f"no record for logged hash {loc_hash}")
        if record.motive not in board:
            raise UnresolvedAccessError(
                f"logged document maps to inactive motive {record.motive.value}"
            )
        board[record.motive] += position_score(position, n_accesses)
    return board


def _first_access_position(
    motive: MotiveId, log: Sequence[str], registry: DocumentRegistry
) -> int:
    for position, loc_hash in enumerate(log, start=1):
        record = registry.lookup(loc_hash)
        if record is not None and record.motive is motive:
            return position
    return len(log) + 1  # later than any real access


def rank_and_eliminate(
    board: ScoreBoard,
    log: Sequence[str],
    registry: DocumentRegistry,
    rule: TieBreakRule = TieBreakRule(),
) -> EliminationResult:
    """Remove the lowest-scoring motive from the board.

    The surviving motive order matches the board's key order, which carries
    the campaign's original motive ordering through every environment.
    """
    if len(board) < 2:
        raise ValueError("need at least two active motives to eliminate one")
    lowest = min(board.values())
    tied = [m for m, score in board.items() if score == lowest]
    if len(tied) == 1:
        eliminated = tied[0]
    else:
        eliminated = max(
            tied,
            key=lambda m: (_first_access_position(m, log, registry), m.value),
        )
    remaining = tuple(m for m in board if m is not eliminated)
    return EliminationResult(
        scoreboard=dict(board), eliminated=eliminated, remaining=remaining
    )
