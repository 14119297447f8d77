"""The in-booth voting machine state machine.

Day lifecycle: :func:`start_of_day` generates and transmits the bootstrap
batch, then one strictly sequential session per voter (id display, choice,
receipt display, cancel/validate), then :meth:`VotingMachine.close_of_day`
hands the recorded entries to the bulletin board.

Dishonest variants are injected through :class:`MachineBehavior` so the
simulator can exercise every attack the protocol claims to detect.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Any, Iterable, Mapping

from . import crypto
from .errors import BootstrapProblemError, ConfigError, SessionStateError
from .model import (
    ORIGIN_BOOTSTRAP,
    ORIGIN_FRAUDULENT,
    ORIGIN_REAL,
    BoardEntry,
    ElectionConfig,
    Pairing,
    Receipt,
    ReceiptBody,
    canonical_receipt_bytes,
    generate_id,
)

HONEST = "honest"
SKEWED_BOOTSTRAP = "skewed_bootstrap"
INJECT_FRAUD = "inject_fraud"
BET_ATTACK = "bet_attack"

PHASE_CHOICE_PENDING = "choice_pending"
PHASE_RECEIPT_DISPLAYED = "receipt_displayed"


@dataclass(frozen=True)
class MachineBehavior:
    """Exactly one variant: honest, skewed_bootstrap, inject_fraud or bet_attack."""

    kind: str = HONEST
    bootstrap_counts: dict[str, int] | None = None  # skewed_bootstrap
    fraud_count: int = 0                            # inject_fraud
    fraud_choice: str | None = None                 # inject_fraud beneficiary
    bet_choice: str | None = None                   # bet_attack target

    def __post_init__(self):
        if self.kind == HONEST:
            pass
        elif self.kind == SKEWED_BOOTSTRAP:
            if not self.bootstrap_counts:
                raise ConfigError("skewed_bootstrap needs per-candidate counts")
        elif self.kind == INJECT_FRAUD:
            if self.fraud_count < 1:
                raise ConfigError("inject_fraud needs a positive count")
        elif self.kind == BET_ATTACK:
            if not self.bet_choice:
                raise ConfigError("bet_attack needs a target choice")
        else:
            raise ConfigError(f"unknown behavior {self.kind!r}")

    @classmethod
    def honest(cls) -> "MachineBehavior":
        return cls()

    @classmethod
    def skewed(cls, counts: Mapping[str, int]) -> "MachineBehavior":
        return cls(kind=SKEWED_BOOTSTRAP, bootstrap_counts=dict(counts))

    @classmethod
    def inject_fraud(cls, count: int, choice: str | None = None) -> "MachineBehavior":
        return cls(kind=INJECT_FRAUD, fraud_count=count, fraud_choice=choice)

    @classmethod
    def bet(cls, target: str) -> "MachineBehavior":
        return cls(kind=BET_ATTACK, bet_choice=target)

    def to_dict(self) -> dict[str, Any]:
        if self.kind == SKEWED_BOOTSTRAP:
            return {"kind": self.kind, "counts": dict(self.bootstrap_counts or {})}
        if self.kind == INJECT_FRAUD:
            return {"kind": self.kind, "count": self.fraud_count, "choice": self.fraud_choice}
        if self.kind == BET_ATTACK:
            return {"kind": self.kind, "target": self.bet_choice}
        return {"kind": self.kind}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "MachineBehavior":
        kind = data.get("kind", HONEST)
        if kind == SKEWED_BOOTSTRAP:
            return cls.skewed({c: int(n) for c, n in data["counts"].items()})
        if kind == INJECT_FRAUD:
            return cls.inject_fraud(int(data["count"]), data.get("choice"))
        if kind == BET_ATTACK:
            return cls.bet(data["target"])
        if kind == HONEST:
            return cls.honest()
        raise ConfigError(f"unknown behavior {kind!r}")


@dataclass
class Session:
    assigned_ids: list[str]
    phase: str = PHASE_CHOICE_PENDING
    selections: tuple[str, ...] | None = None
    draft: ReceiptBody | None = None
    victim: bool = False  # bet-attack target session
    closed: bool = False


@dataclass(frozen=True)
class BootstrapBatch:
    entries: tuple[tuple[str, str], ...]  # (choice, id) in generation order
    signature: crypto.Signature


@dataclass(frozen=True)
class BoardSubmission:
    config: ElectionConfig
    entries: tuple[BoardEntry, ...]
    signings_count: int
    voter_names: tuple[str, ...] | None = None


def canonical_batch_bytes(entries: Iterable[tuple[str, str]]) -> bytes:
    """Signature input for a bootstrap batch: label<TAB>digits lines."""
    return "\n".join(f"{choice}\t{id}" for choice, id in entries).encode("utf-8")


def encode_batch_envelope(batch: BootstrapBatch) -> bytes:
    """Transmission plaintext: canonical batch text plus detached signature."""
    payload = canonical_batch_bytes(batch.entries).decode("utf-8")
    return json.dumps(
        {
            "payload": payload,
            "scheme": batch.signature.scheme,
            "signature": batch.signature.hex(),
        }
    ).encode("utf-8")


def decode_batch_envelope(plaintext: bytes) -> BootstrapBatch:
    try:
        data = json.loads(plaintext.decode("utf-8"))
        payload = data["payload"]
        signature = crypto.Signature(data["scheme"], bytes.fromhex(data["signature"]))
        entries = []
        if payload:
            for line in payload.split("\n"):
                choice, id = line.split("\t")
                entries.append((choice, id))
    except (ValueError, KeyError, UnicodeDecodeError) as exc:
        raise ConfigError(f"malformed bootstrap envelope: {exc}") from exc
    return BootstrapBatch(tuple(entries), signature)


class VotingMachine:
    """One physical booth; one session at a time, confined to one thread."""

    def __init__(
        self,
        config: ElectionConfig,
        keys: crypto.KeyPair,
        authority_pub: crypto.PublicKey,
        behavior: MachineBehavior | None = None,
        rng: random.Random | None = None,
    ):
        self.config = config
        self.keys = keys
        self.authority_pub = authority_pub
        self.behavior = behavior or MachineBehavior.honest()
        self.rng = rng or random.Random()
        self.issued_ids: set[str] = set()
        self.recorded: list[BoardEntry] = []
        self.signings = 0
        self._active: Session | None = None
        self._bet_pending = self.behavior.kind == BET_ATTACK
        # Pairings that have appeared on a validated receipt; the borrow pool
        # in full_bootstrap_mode excludes these so no pairing repeats.
        self._receipted: set[tuple[str, str]] = set()
        self._by_choice: dict[str, list[BoardEntry]] = {c: [] for c in config.candidates}
        # full_bootstrap_mode borrow pool: entries not yet on any validated receipt
        self._unreceipted: dict[str, list[BoardEntry]] = {c: [] for c in config.candidates}
        self._validate_behavior()

    def _validate_behavior(self) -> None:
        known = set(self.config.candidates)
        b = self.behavior
        if b.kind == SKEWED_BOOTSTRAP:
            counts = b.bootstrap_counts or {}
            unknown = set(counts) - known
            if unknown:
                raise ConfigError(f"skewed counts name unknown candidates: {sorted(unknown)}")
            if any(n < 0 for n in counts.values()):
                raise ConfigError("skewed counts must be non-negative")
        if b.kind == INJECT_FRAUD and b.fraud_choice is not None and b.fraud_choice not in known:
            raise ConfigError(f"unknown fraud choice {b.fraud_choice!r}")
        if b.kind == BET_ATTACK and b.bet_choice not in known:
            raise ConfigError(f"unknown bet target {b.bet_choice!r}")

    def _fresh_id(self) -> str:
        id = generate_id(self.rng, self.issued_ids)
        self.issued_ids.add(id)
        return id

    def _record(self, entry: BoardEntry) -> None:
        self.recorded.append(entry)
        self._by_choice[entry.choice].append(entry)
        self._unreceipted[entry.choice].append(entry)

    # -- day lifecycle -------------------------------------------------

    def generate_bootstrap(self) -> BootstrapBatch:
        counts: dict[str, int] = {
            c: self.config.bootstrap_per_candidate for c in self.config.candidates
        }
        if self.behavior.kind == SKEWED_BOOTSTRAP:
            counts.update(self.behavior.bootstrap_counts or {})
        entries: list[tuple[str, str]] = []
        for choice in self.config.candidates:
            for _ in range(counts[choice]):
                entries.append((choice, self._fresh_id()))
        for choice, id in entries:
            self._record(BoardEntry(choice, id, origin=ORIGIN_BOOTSTRAP))
        signature = crypto.sign(self.keys.secret, canonical_batch_bytes(entries))
        return BootstrapBatch(tuple(entries), signature)

    def begin_session(self) -> Session:
        """Assign and display k fresh ids (or a reused one under bet_attack)."""
        if self._active is not None:
            raise SessionStateError("a session is already in progress")
        k = self.config.selections_per_voter
        victim = False
        if self._bet_pending:
            target = self.behavior.bet_choice
            pool = self._by_choice[target]
            if not pool:
                raise SessionStateError(f"no recorded entry to reuse for bet target {target!r}")
            assigned = [self.rng.choice(pool).id]
            assigned.extend(self._fresh_id() for _ in range(k - 1))
            victim = True
            self._bet_pending = False
        else:
            assigned = [self._fresh_id() for _ in range(k)]
        session = Session(assigned_ids=assigned, victim=victim)
        self._active = session
        return session

    def _borrow(self, choice: str, exclude: set[str]) -> str:
        """Uniform draw from the recorded entries for the choice.

        With replacement across receipts, except in full_bootstrap_mode where
        only pairings never seen on a validated receipt qualify.  ``exclude``
        keeps an id from appearing twice on one draft (only reachable via the
        bet attack's reused id).
        """
        pool = (
            self._unreceipted[choice]
            if self.config.full_bootstrap_mode
            else self._by_choice[choice]
        )
        if not pool:
            raise BootstrapProblemError(choice)
        for _ in range(8):  # exclusion hits are rare; rejection stays uniform
            entry = self.rng.choice(pool)
            if entry.id not in exclude:
                return entry.id
        narrowed = [e for e in pool if e.id not in exclude]
        if not narrowed:
            raise BootstrapProblemError(choice)
        return self.rng.choice(narrowed).id

    def make_choice(self, session: Session, selections: Iterable[str]) -> ReceiptBody:
        """Build the draft receipt: own ids for the selections, borrowed ids elsewhere."""
        self._require_active(session, PHASE_CHOICE_PENDING)
        chosen = {selections} if isinstance(selections, str) else set(selections)
        k = self.config.selections_per_voter
        if len(chosen) != k:
            raise ConfigError(f"exactly {k} selection(s) required, got {len(chosen)}")
        unknown = chosen - set(self.config.candidates)
        if unknown:
            raise ConfigError(f"unknown selections: {sorted(unknown)}")

        ordered = [c for c in self.config.candidates if c in chosen]
        own = dict(zip(ordered, session.assigned_ids))
        used = set(session.assigned_ids)
        pairings: list[Pairing] = []
        for choice in self.config.candidates:
            if choice in own:
                pairings.append(Pairing(choice, own[choice]))
            else:
                borrowed = self._borrow(choice, exclude=used)
                used.add(borrowed)
                pairings.append(Pairing(choice, borrowed))

        draft = ReceiptBody(
            title=self.config.title,
            date=self.config.date,
            precinct=self.config.precinct,
            pairings=tuple(pairings),
        )
        session.draft = draft
        session.selections = tuple(ordered)
        session.phase = PHASE_RECEIPT_DISPLAYED
        return draft

    def cancel(self, session: Session) -> Session:
        """Destroy the displayed draft; the assigned ids stay for a re-choice."""
        self._require_active(session, PHASE_RECEIPT_DISPLAYED)
        session.draft = None
        session.selections = None
        session.phase = PHASE_CHOICE_PENDING
        return session

    def validate(self, session: Session) -> Receipt:
        """Record the vote, sign the receipt, count the signing, close the session."""
        self._require_active(session, PHASE_RECEIPT_DISPLAYED)
        assert session.draft is not None and session.selections is not None
        for choice, assigned in zip(session.selections, session.assigned_ids):
            recorded_id = self._fresh_id() if session.victim else assigned
            self._record(BoardEntry(choice, recorded_id, origin=ORIGIN_REAL))
        self.signings += 1
        for p in session.draft.pairings:
            if (p.choice, p.id) not in self._receipted:
                self._receipted.add((p.choice, p.id))
                pool = self._unreceipted[p.choice]
                for i, entry in enumerate(pool):
                    if entry.id == p.id:
                        pool[i] = pool[-1]
                        pool.pop()
                        break
        receipt = Receipt(
            body=session.draft,
            signature=crypto.sign(self.keys.secret, canonical_receipt_bytes(session.draft)),
        )
        session.closed = True
        self._active = None
        return receipt

    def abandon(self, session: Session) -> None:
        """Voter left without validating: ids are dropped, nothing is counted."""
        if self._active is not session:
            raise SessionStateError("session is not active")
        session.closed = True
        self._active = None

    def close_of_day(self) -> BoardSubmission:
        if self._active is not None:
            raise SessionStateError("a session is still in progress")
        if self.behavior.kind == INJECT_FRAUD:
            choice = self.behavior.fraud_choice or self.config.candidates[0]
            for _ in range(self.behavior.fraud_count):
                self._record(BoardEntry(choice, self._fresh_id(), origin=ORIGIN_FRAUDULENT))
        return BoardSubmission(
            config=self.config,
            entries=tuple(self.recorded),
            signings_count=self.signings,
        )

    def _require_active(self, session: Session, phase: str) -> None:
        if self._active is not session:
            raise SessionStateError("session is not active")
        if session.phase != phase:
            raise SessionStateError(f"expected phase {phase!r}, session is in {session.phase!r}")


def start_of_day(
    config: ElectionConfig,
    keys: crypto.KeyPair,
    authority_pub: crypto.PublicKey,
    behavior: MachineBehavior | None = None,
    rng: random.Random | None = None,
    transport_rng: random.Random | None = None,
) -> tuple[VotingMachine, crypto.Ciphertext]:
    """Initialize the machine, generate/record the bootstrap votes and return
    the signed, authority-encrypted batch, which is the only external copy."""
    machine = VotingMachine(config, keys, authority_pub, behavior, rng)
    batch = machine.generate_bootstrap()
    ciphertext = crypto.encrypt_to(authority_pub, encode_batch_envelope(batch), transport_rng)
    return machine, ciphertext
