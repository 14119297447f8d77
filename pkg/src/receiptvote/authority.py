"""Trusted authority: bootstrap batch custody.

The authority decrypts the machine's batch, verifies the signature, checks
the per-candidate counts, confirms at end of day that every batch entry is on
the board, and then destroys its record.  It never sees a real voter's entry
other than through the public board, and it must stay distinct from the
complaint court.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any

from . import crypto
from .errors import AuthenticityError, BatchCountMismatchError, RecordDestroyedError
from .machine import canonical_batch_bytes, decode_batch_envelope
from .model import Board, ElectionConfig


@dataclass
class BootstrapRecord:
    entries: tuple[tuple[str, str], ...]
    verified_at: datetime
    destroyed: bool = False
    checked: bool = field(default=False, repr=False)

    def to_dict(self) -> dict[str, Any]:
        return {
            "entries": [] if self.destroyed else [list(e) for e in self.entries],
            "verified_at": self.verified_at.isoformat(),
            "destroyed": self.destroyed,
        }


@dataclass(frozen=True)
class CheckReport:
    missing: tuple[tuple[str, str], ...]
    moved: tuple[tuple[str, str, str], ...]  # (id, expected_choice, found_choice)
    verdict: str  # "clean" | "mismatch"

    def to_dict(self) -> dict[str, Any]:
        return {
            "missing": [list(m) for m in self.missing],
            "moved": [list(m) for m in self.moved],
            "verdict": self.verdict,
        }


def receive_batch(
    ciphertext: crypto.Ciphertext,
    machine_pub: crypto.PublicKey,
    authority_secret: crypto.SecretKey,
    config: ElectionConfig,
) -> BootstrapRecord:
    """Decrypt, authenticate and count-check the machine's bootstrap batch.

    Raises DecryptionError on tampering, AuthenticityError on a bad machine
    signature and BatchCountMismatchError (with per-candidate deltas) when the
    counts are not exactly bootstrap_per_candidate everywhere (the skew attack).
    """
    plaintext = crypto.decrypt(authority_secret, ciphertext)
    batch = decode_batch_envelope(plaintext)
    if not crypto.verify(machine_pub, canonical_batch_bytes(batch.entries), batch.signature):
        raise AuthenticityError("bootstrap batch signature does not verify")

    expected = config.bootstrap_per_candidate
    counts = {c: 0 for c in config.candidates}
    for choice, _ in batch.entries:
        if choice not in counts:
            raise BatchCountMismatchError({choice: +1})
        counts[choice] += 1
    deltas = {c: counts[c] - expected for c in config.candidates}
    if any(deltas.values()):
        raise BatchCountMismatchError(deltas)

    return BootstrapRecord(entries=batch.entries, verified_at=datetime.now(timezone.utc))


def end_of_day_check(record: BootstrapRecord, board: Board) -> CheckReport:
    """Confirm every batch entry appears on the board under its choice."""
    if record.destroyed:
        raise RecordDestroyedError("bootstrap record has been destroyed")
    missing: list[tuple[str, str]] = []
    moved: list[tuple[str, str, str]] = []
    for choice, id in record.entries:
        found = board.choice_of(id)
        if found is None:
            missing.append((choice, id))
        elif found != choice:
            moved.append((id, choice, found))
    record.checked = True
    verdict = "clean" if not missing and not moved else "mismatch"
    return CheckReport(tuple(missing), tuple(moved), verdict)


def destroy(record: BootstrapRecord) -> bool:
    """Clear the record after checking; any later use errors."""
    if record.destroyed:
        raise RecordDestroyedError("record already destroyed")
    record.entries = ()
    record.destroyed = True
    return True
