"""Bulletin board: publication, tally with bootstrap subtraction, audit.

A published board is immutable; anyone can re-derive the results from it and
compare the entry count against the public signings count to expose surplus
votes.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Any

from .errors import (
    ConfigError,
    MissingVotesError,
    PublicationError,
    TallyInconsistencyError,
)
from .machine import BoardSubmission
from .model import Board, BoardEntry, ElectionConfig, Pairing, Results

VERDICT_CLEAN = "clean"
VERDICT_SURPLUS = "surplus_detected"


@dataclass(frozen=True)
class AuditReport:
    expected_entries: int
    actual_entries: int
    surplus: int
    winner_before: str
    winner_after: str
    adjustment: int
    tie_flag: bool
    verdict: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "expected_entries": self.expected_entries,
            "actual_entries": self.actual_entries,
            "surplus": self.surplus,
            "winner_before": self.winner_before,
            "winner_after": self.winner_after,
            "adjustment": self.adjustment,
            "tie_flag": self.tie_flag,
            "verdict": self.verdict,
        }


@dataclass(frozen=True)
class RepairInstruction:
    """Board correction ordered by the court: insert a pairing or move an id."""

    action: str  # "insert" | "move"
    pairing: Pairing

    def to_dict(self) -> dict[str, Any]:
        return {
            "action": self.action,
            "pairing": {"choice": self.pairing.choice, "id": self.pairing.id},
        }


def publish(submission: BoardSubmission) -> Board:
    """Validate and sort the day's entries into the published board.

    Rejects duplicate (choice, id) pairs, any id listed under two choices,
    and a voter-name list whose length disagrees with the signings count.
    """
    config = submission.config
    seen_pairs: set[tuple[str, str]] = set()
    choice_by_id: dict[str, str] = {}
    for entry in submission.entries:
        if entry.choice not in config.candidates:
            raise PublicationError(f"entry names unknown choice {entry.choice!r}")
        pair = (entry.choice, entry.id)
        if pair in seen_pairs:
            raise PublicationError(f"duplicate pairing {pair!r}")
        seen_pairs.add(pair)
        prior = choice_by_id.get(entry.id)
        if prior is not None and prior != entry.choice:
            raise PublicationError(
                f"id {entry.id} appears under both {prior!r} and {entry.choice!r}"
            )
        choice_by_id[entry.id] = entry.choice
    if submission.voter_names is not None and len(submission.voter_names) != submission.signings_count:
        raise PublicationError(
            f"{len(submission.voter_names)} voter names for {submission.signings_count} signings"
        )
    ordered = sorted(
        submission.entries, key=lambda e: (config.ballot_index(e.choice), e.id)
    )
    return Board(
        title=config.title,
        date=config.date,
        precinct=config.precinct,
        candidates=config.candidates,
        entries=tuple(ordered),
        signings_count=submission.signings_count,
        voter_names=submission.voter_names,
    )


def tally(board: Board, config: ElectionConfig) -> Results:
    """Per-candidate published counts and finals with the bootstrap removed."""
    if tuple(board.candidates) != tuple(config.candidates):
        raise ConfigError("board and config disagree on the candidate list")
    counts = Counter(e.choice for e in board.entries)
    published = {c: counts.get(c, 0) for c in config.candidates}
    bootstrap = config.bootstrap_per_candidate
    final = {c: n - bootstrap for c, n in published.items()}
    negatives = {c: n for c, n in final.items() if n < 0}
    if negatives:
        raise TallyInconsistencyError(
            f"counts below the bootstrap baseline: {negatives}"
        )
    return Results(published_count=published, final_count=final)


def lookup(board: Board, id: str) -> str | None:
    """The unique choice paired with the id on the board, if any."""
    return board.choice_of(id)


def _winner(final: dict[str, int], candidates: tuple[str, ...]) -> tuple[str, bool]:
    top = max(final.values())
    leaders = [c for c in candidates if final[c] == top]
    return leaders[0], len(leaders) > 1


def audit_counts(board: Board, config: ElectionConfig) -> AuditReport:
    """Compare entries against signings*k + m*B; charge any surplus to the winner."""
    expected = (
        board.signings_count * config.selections_per_voter
        + len(config.candidates) * config.bootstrap_per_candidate
    )
    actual = len(board.entries)
    surplus = actual - expected
    if surplus < 0:
        raise MissingVotesError(expected, actual)
    results = tally(board, config)
    winner_before, tie_before = _winner(results.final_count, config.candidates)
    if surplus > 0:
        adjusted = dict(results.final_count)
        adjusted[winner_before] -= surplus
        winner_after, tie_after = _winner(adjusted, config.candidates)
        return AuditReport(
            expected_entries=expected,
            actual_entries=actual,
            surplus=surplus,
            winner_before=winner_before,
            winner_after=winner_after,
            adjustment=surplus,
            tie_flag=tie_before or tie_after,
            verdict=VERDICT_SURPLUS,
        )
    return AuditReport(
        expected_entries=expected,
        actual_entries=actual,
        surplus=0,
        winner_before=winner_before,
        winner_after=winner_before,
        adjustment=0,
        tie_flag=tie_before,
        verdict=VERDICT_CLEAN,
    )


def adjusted_results(results: Results, report: AuditReport) -> Results:
    """Results after the audit's surplus correction has been applied."""
    if report.adjustment == 0:
        return Results(
            published_count=dict(results.published_count),
            final_count=dict(results.final_count),
            surplus=report.surplus,
        )
    final = dict(results.final_count)
    final[report.winner_before] -= report.adjustment
    return Results(
        published_count=dict(results.published_count),
        final_count=final,
        surplus=report.surplus,
        adjusted=(report.winner_before, report.adjustment),
    )


def apply_repair(board: Board, repair: RepairInstruction) -> Board:
    """New board with the court-ordered pairing inserted or moved back."""
    pairing = repair.pairing
    if repair.action == "insert":
        entries = list(board.entries) + [BoardEntry(pairing.choice, pairing.id)]
    elif repair.action == "move":
        entries = []
        moved = False
        for e in board.entries:
            if e.id == pairing.id:
                entries.append(BoardEntry(pairing.choice, pairing.id, origin=e.origin))
                moved = True
            else:
                entries.append(e)
        if not moved:
            entries.append(BoardEntry(pairing.choice, pairing.id))
    else:
        raise ConfigError(f"unknown repair action {repair.action!r}")
    index = {c: i for i, c in enumerate(board.candidates)}
    ordered = sorted(entries, key=lambda e: (index[e.choice], e.id))
    return Board(
        title=board.title,
        date=board.date,
        precinct=board.precinct,
        candidates=board.candidates,
        entries=tuple(ordered),
        signings_count=board.signings_count,
        voter_names=board.voter_names,
    )
