"""Deterministic election simulation with adversarial machine behaviors.

A scenario runs the whole day end to end: bootstrap, authority intake,
voter sessions, publication, tally, authority end-of-day check, count audit,
receipt cross-checks, all against ground truth that the trace records, so every
claimed detection property can be measured.  Equal (config, seed) gives a
byte-identical serialized trace.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Mapping, Sequence

from . import crypto
from .authority import CheckReport, destroy, end_of_day_check, receive_batch
from .board import (
    VERDICT_SURPLUS,
    AuditReport,
    adjusted_results,
    audit_counts,
    publish,
    tally,
)
from .errors import (
    AuthenticityError,
    BatchCountMismatchError,
    ConfigError,
    DecryptionError,
    MissingVotesError,
    PublicationError,
    TallyInconsistencyError,
)
from .machine import MachineBehavior, start_of_day
from .model import (
    Board,
    BoardEntry,
    ElectionConfig,
    Receipt,
    Results,
    entries_to_internal_dicts,
)
from .verification import (
    STATUS_CONFIRMED,
    PairingStatus,
    check_receipt_against_board,
    verify_receipt_signature,
)

POLARITY_NEGATIVE = "did_not_vote_for"

FULL_BOOTSTRAP_WARNING = (
    "full bootstrap mode: the batch custodian can single out the real votes "
    "on the board, so ballot secrecy shifts onto the authority"
)


def derive_rng(seed: int, label: str) -> random.Random:
    """Independent, reproducible stream for (seed, label)."""
    digest = hashlib.sha256(f"{seed}:{label}".encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


@dataclass(frozen=True)
class ScenarioConfig:
    election: ElectionConfig
    num_voters: int
    voter_choice_distribution: dict[str, float]
    behavior: MachineBehavior
    collect_receipts: bool = True
    coercer_knows_order: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.num_voters < 0:
            raise ConfigError("num_voters must be non-negative")
        if self.num_voters > self.election.registered_voters:
            raise ConfigError("num_voters exceeds registered_voters")
        weights = self.voter_choice_distribution
        unknown = set(weights) - set(self.election.candidates)
        if unknown:
            raise ConfigError(f"weights name unknown candidates: {sorted(unknown)}")
        if any(w < 0 for w in weights.values()):
            raise ConfigError("choice weights must be non-negative")
        if not any(w > 0 for w in weights.values()):
            raise ConfigError("at least one choice weight must be positive")

    def to_dict(self) -> dict[str, Any]:
        return {
            "election": self.election.to_dict(),
            "num_voters": self.num_voters,
            "voter_choice_distribution": dict(self.voter_choice_distribution),
            "behavior": self.behavior.to_dict(),
            "collect_receipts": self.collect_receipts,
            "coercer_knows_order": self.coercer_knows_order,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ScenarioConfig":
        try:
            return cls(
                election=ElectionConfig.from_dict(data["election"]),
                num_voters=int(data["num_voters"]),
                voter_choice_distribution={
                    c: float(w) for c, w in data["voter_choice_distribution"].items()
                },
                behavior=MachineBehavior.from_dict(data.get("behavior", {"kind": "honest"})),
                collect_receipts=bool(data.get("collect_receipts", True)),
                coercer_knows_order=bool(data.get("coercer_knows_order", True)),
                seed=int(data.get("seed", 0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad scenario config: {exc}") from exc


@dataclass(frozen=True)
class DetectionEvent:
    kind: str
    detail: dict[str, Any]

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "detail": self.detail}


@dataclass(frozen=True)
class CoercionStatement:
    """voter_index provably did not vote for choice: the id paired with that
    choice already appeared on the receipt at evidence_index."""

    voter_index: int
    choice: str
    evidence_index: int
    polarity: str = POLARITY_NEGATIVE

    def __post_init__(self):
        # The analyzer can only ever rule choices out, never confirm one.
        if self.polarity != POLARITY_NEGATIVE:
            raise ConfigError(f"unsupported polarity {self.polarity!r}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "voter_index": self.voter_index,
            "choice": self.choice,
            "polarity": self.polarity,
            "evidence_index": self.evidence_index,
        }


@dataclass(frozen=True)
class CoercionInference:
    statements: tuple[CoercionStatement, ...]

    def to_dict(self) -> dict[str, Any]:
        return {"statements": [s.to_dict() for s in self.statements]}


@dataclass
class VoterRecord:
    index: int
    selections: tuple[str, ...]
    assigned_ids: tuple[str, ...]
    receipt: Receipt
    statuses: list[PairingStatus] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "selections": list(self.selections),
            "assigned_ids": list(self.assigned_ids),
            "receipt": self.receipt.to_dict(),
            "statuses": [s.to_dict() for s in self.statuses],
        }


@dataclass
class SimulationTrace:
    scenario: ScenarioConfig
    machine_public: crypto.PublicKey
    authority_public: crypto.PublicKey
    authority_secret: crypto.SecretKey
    bootstrap_ciphertext: crypto.Ciphertext
    voters: list[VoterRecord]
    internal_entries: tuple[BoardEntry, ...]
    signings_count: int
    board: Board | None
    results: Results | None
    adjusted: Results | None
    authority_batch: dict[str, Any]
    authority_check: CheckReport | None
    audit: AuditReport | None
    coercion: CoercionInference | None
    detections: list[DetectionEvent]
    warnings: list[str]

    def ground_truth_counts(self) -> dict[str, int]:
        counts = {c: 0 for c in self.scenario.election.candidates}
        for voter in self.voters:
            for choice in voter.selections:
                counts[choice] += 1
        return counts

    def to_dict(self) -> dict[str, Any]:
        return {
            "scenario": self.scenario.to_dict(),
            "keys": {
                "machine_public": {"scheme": self.machine_public.scheme, "key": self.machine_public.hex()},
                "authority_public": {"scheme": self.authority_public.scheme, "key": self.authority_public.hex()},
                "authority_secret": {"scheme": self.authority_secret.scheme, "key": self.authority_secret.hex()},
            },
            "bootstrap_ciphertext": {
                "scheme": self.bootstrap_ciphertext.scheme,
                "data": self.bootstrap_ciphertext.hex(),
            },
            "voters": [v.to_dict() for v in self.voters],
            "internal_entries": entries_to_internal_dicts(self.internal_entries),
            "signings_count": self.signings_count,
            "board": self.board.to_dict() if self.board else None,
            "results": self.results.to_dict() if self.results else None,
            "adjusted_results": self.adjusted.to_dict() if self.adjusted else None,
            "authority_batch": self.authority_batch,
            "authority_check": self.authority_check.to_dict() if self.authority_check else None,
            "audit": self.audit.to_dict() if self.audit else None,
            "coercion": self.coercion.to_dict() if self.coercion else None,
            "detections": [d.to_dict() for d in self.detections],
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _sample_selections(
    rng: random.Random, candidates: Sequence[str], weights: Mapping[str, float], k: int
) -> list[str]:
    """k distinct weighted draws; falls back to uniform if the remaining mass is zero."""
    pool = list(candidates)
    mass = [float(weights.get(c, 0.0)) for c in pool]
    picked: list[str] = []
    for _ in range(k):
        total = sum(mass)
        if total > 0:
            r = rng.random() * total
            idx = len(pool) - 1
            acc = 0.0
            for i, w in enumerate(mass):
                acc += w
                if r < acc:
                    idx = i
                    break
        else:
            idx = rng.randrange(len(pool))
        picked.append(pool.pop(idx))
        mass.pop(idx)
    return picked


def run_scenario(config: ScenarioConfig) -> SimulationTrace:
    """Execute one full election day; module errors become detection events."""
    seed = config.seed
    election = config.election
    machine_keys = crypto.keygen(derive_rng(seed, "machine-keys"), "ed25519")
    authority_keys = crypto.keygen(derive_rng(seed, "authority-keys"), "x25519-aesgcm")

    detections: list[DetectionEvent] = []
    warnings: list[str] = []
    if election.full_bootstrap_mode:
        warnings.append(FULL_BOOTSTRAP_WARNING)

    machine, ciphertext = start_of_day(
        election,
        machine_keys,
        authority_keys.public,
        config.behavior,
        rng=derive_rng(seed, "machine"),
        transport_rng=derive_rng(seed, "transport"),
    )

    record = None
    try:
        record = receive_batch(ciphertext, machine_keys.public, authority_keys.secret, election)
        authority_batch: dict[str, Any] = {
            "accepted": True,
            "entry_count": len(record.entries),
            "deltas": None,
            "error": None,
        }
    except BatchCountMismatchError as exc:
        authority_batch = {
            "accepted": False,
            "entry_count": None,
            "deltas": dict(exc.deltas),
            "error": "count_mismatch",
        }
        detections.append(DetectionEvent("bootstrap_count_mismatch", {"deltas": dict(exc.deltas)}))
    except (DecryptionError, AuthenticityError, ConfigError) as exc:
        authority_batch = {
            "accepted": False,
            "entry_count": None,
            "deltas": None,
            "error": type(exc).__name__,
        }
        detections.append(DetectionEvent("bootstrap_batch_invalid", {"error": str(exc)}))

    voter_rng = derive_rng(seed, "voters")
    voters: list[VoterRecord] = []
    for index in range(config.num_voters):
        session = machine.begin_session()
        selections = _sample_selections(
            voter_rng, election.candidates, config.voter_choice_distribution,
            election.selections_per_voter,
        )
        machine.make_choice(session, selections)
        receipt = machine.validate(session)
        voters.append(
            VoterRecord(
                index=index,
                selections=session.selections or (),
                assigned_ids=tuple(session.assigned_ids),
                receipt=receipt,
            )
        )

    submission = machine.close_of_day()

    board: Board | None = None
    results: Results | None = None
    adjusted: Results | None = None
    audit: AuditReport | None = None
    check: CheckReport | None = None
    try:
        board = publish(submission)
    except PublicationError as exc:
        detections.append(DetectionEvent("publication_rejected", {"error": str(exc)}))

    if board is not None:
        try:
            results = tally(board, election)
        except TallyInconsistencyError as exc:
            detections.append(DetectionEvent("tally_inconsistency", {"error": str(exc)}))

        if record is not None:
            check = end_of_day_check(record, board)
            if check.verdict != "clean":
                detections.append(
                    DetectionEvent(
                        "bootstrap_entries_altered",
                        {"missing": [list(m) for m in check.missing],
                         "moved": [list(m) for m in check.moved]},
                    )
                )
            destroy(record)

        try:
            audit = audit_counts(board, election)
            if audit.verdict == VERDICT_SURPLUS:
                detections.append(
                    DetectionEvent(
                        "surplus_detected",
                        {"surplus": audit.surplus, "winner_before": audit.winner_before},
                    )
                )
            if results is not None:
                adjusted = adjusted_results(results, audit)
        except MissingVotesError as exc:
            detections.append(
                DetectionEvent("missing_votes", {"expected": exc.expected, "actual": exc.actual})
            )
        except TallyInconsistencyError:
            pass  # already recorded by the tally step

        for voter in voters:
            if not verify_receipt_signature(voter.receipt, machine_keys.public):
                detections.append(
                    DetectionEvent("receipt_signature_invalid", {"voter": voter.index})
                )
            voter.statuses = check_receipt_against_board(voter.receipt, board)
            bad = [s for s in voter.statuses if s.status != STATUS_CONFIRMED]
            if bad:
                detections.append(
                    DetectionEvent(
                        "receipt_discrepancy",
                        {"voter": voter.index, "pairings": [s.to_dict() for s in bad]},
                    )
                )

    coercion: CoercionInference | None = None
    if config.collect_receipts and config.coercer_knows_order and voters:
        coercion = coercion_infer([v.receipt for v in voters], election.candidates)

    return SimulationTrace(
        scenario=config,
        machine_public=machine_keys.public,
        authority_public=authority_keys.public,
        authority_secret=authority_keys.secret,
        bootstrap_ciphertext=ciphertext,
        voters=voters,
        internal_entries=submission.entries,
        signings_count=submission.signings_count,
        board=board,
        results=results,
        adjusted=adjusted,
        authority_batch=authority_batch,
        authority_check=check,
        audit=audit,
        coercion=coercion,
        detections=detections,
        warnings=warnings,
    )


def coercion_infer(
    receipts: Sequence[Receipt], ballot_order: Sequence[str]
) -> CoercionInference:
    """What a collector of all receipts in casting order can rule out.

    If the id paired with choice c on receipt j already appeared on an earlier
    receipt, that pairing is borrowed, so voter j did not vote for c.  Only
    negative statements are ever produced.
    """
    order = list(ballot_order)
    first_seen: dict[str, int] = {}
    statements: list[CoercionStatement] = []
    for j, receipt in enumerate(receipts):
        labels = [p.choice for p in receipt.body.pairings]
        if labels != order:
            raise ConfigError(f"receipt {j} does not list choices in ballot order")
        for pairing in receipt.body.pairings:
            earlier = first_seen.get(pairing.id)
            if earlier is not None:
                statements.append(
                    CoercionStatement(
                        voter_index=j, choice=pairing.choice, evidence_index=earlier
                    )
                )
        for pairing in receipt.body.pairings:
            first_seen.setdefault(pairing.id, j)
    return CoercionInference(tuple(statements))


@dataclass(frozen=True)
class DetectionReport:
    behavior: str
    attack: bool
    detected: bool
    verdict: str
    expected_surplus: int | None
    events: tuple[DetectionEvent, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "behavior": self.behavior,
            "attack": self.attack,
            "detected": self.detected,
            "verdict": self.verdict,
            "expected_surplus": self.expected_surplus,
            "events": [e.to_dict() for e in self.events],
        }


def evaluate_detection(trace: SimulationTrace) -> DetectionReport:
    """Did the protocol's checks catch what the machine actually did?"""
    behavior = trace.scenario.behavior
    events = tuple(trace.detections)
    expected_surplus = None
    if behavior.kind == "honest":
        verdict = "clean" if not events else "unexpected_detection"
        return DetectionReport("honest", False, bool(events), verdict, None, events)
    if behavior.kind == "skewed_bootstrap":
        detected = trace.authority_batch.get("error") == "count_mismatch"
    elif behavior.kind == "inject_fraud":
        expected_surplus = behavior.fraud_count
        detected = trace.audit is not None and trace.audit.surplus == behavior.fraud_count
    elif behavior.kind == "bet_attack":
        victim = trace.voters[0] if trace.voters else None
        detected = victim is not None and any(
            s.status != STATUS_CONFIRMED for s in victim.statuses
        )
    else:  # pragma: no cover - behavior kinds are validated upstream
        detected = bool(events)
    verdict = "detected" if detected else "undetected"
    return DetectionReport(behavior.kind, True, detected, verdict, expected_surplus, events)


def detection_rate(config: ScenarioConfig, seeds: Iterable[int]) -> float:
    """Fraction of seeds on which the configured attack is detected."""
    total = 0
    hits = 0
    for seed in seeds:
        total += 1
        trace = run_scenario(replace(config, seed=seed))
        if evaluate_detection(trace).detected:
            hits += 1
    if total == 0:
        raise ConfigError("no seeds given")
    return hits / total
