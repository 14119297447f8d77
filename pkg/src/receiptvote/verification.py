"""Voter-side verification and court complaint adjudication.

Everything is a pure function of (receipt, board, machine public key): the
court has no channel carrying who the plaintiff is or which pairing on the
receipt is the plaintiff's own vote.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from . import crypto
from .board import RepairInstruction, lookup
from .errors import ConfigError
from .model import Board, Pairing, Receipt, canonical_receipt_bytes

STATUS_CONFIRMED = "confirmed"
STATUS_MISSING = "missing"
STATUS_WRONG_CHOICE = "wrong_choice"

RULING_CORRECTION = "correction_ordered"
RULING_INVALID_RECEIPT = "dismissed_invalid_receipt"
RULING_BOARD_CONSISTENT = "dismissed_board_consistent"


@dataclass(frozen=True)
class PairingStatus:
    pairing: Pairing
    status: str
    found: str | None = None  # the choice the id was found under, for wrong_choice

    def to_dict(self) -> dict[str, Any]:
        return {
            "choice": self.pairing.choice,
            "id": self.pairing.id,
            "status": self.status,
            "found": self.found,
        }


@dataclass(frozen=True)
class ComplaintOutcome:
    receipt_authentic: bool
    disputed: Pairing
    board_state: PairingStatus
    ruling: str
    repair: RepairInstruction | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "receipt_authentic": self.receipt_authentic,
            "disputed": {"choice": self.disputed.choice, "id": self.disputed.id},
            "board_state": self.board_state.to_dict(),
            "ruling": self.ruling,
            "repair": self.repair.to_dict() if self.repair else None,
        }


def verify_receipt_signature(receipt: Receipt, machine_pub: crypto.PublicKey) -> bool:
    return crypto.verify(
        machine_pub, canonical_receipt_bytes(receipt.body), receipt.signature
    )


def _pairing_status(pairing: Pairing, board: Board) -> PairingStatus:
    found = lookup(board, pairing.id)
    if found is None:
        return PairingStatus(pairing, STATUS_MISSING)
    if found == pairing.choice:
        return PairingStatus(pairing, STATUS_CONFIRMED)
    return PairingStatus(pairing, STATUS_WRONG_CHOICE, found=found)


def check_receipt_against_board(receipt: Receipt, board: Board) -> list[PairingStatus]:
    """One status per pairing: confirmed, missing, or found under another choice."""
    return [_pairing_status(p, board) for p in receipt.body.pairings]


def file_complaint(
    receipt: Receipt,
    pairing_index: int,
    board: Board,
    machine_pub: crypto.PublicKey,
) -> ComplaintOutcome:
    """Adjudicate one disputed pairing.

    Authenticity is checked first; an authentic receipt whose pairing is
    absent or misfiled yields a correction order with the repair the board
    must apply.  Whether the pairing is the plaintiff's own vote is not an
    input and cannot influence the ruling.
    """
    if not 0 <= pairing_index < len(receipt.body.pairings):
        raise ConfigError(f"pairing index {pairing_index} out of range")
    disputed = receipt.body.pairings[pairing_index]
    state = _pairing_status(disputed, board)
    authentic = verify_receipt_signature(receipt, machine_pub)
    if not authentic:
        return ComplaintOutcome(False, disputed, state, RULING_INVALID_RECEIPT)
    if state.status == STATUS_CONFIRMED:
        return ComplaintOutcome(True, disputed, state, RULING_BOARD_CONSISTENT)
    action = "insert" if state.status == STATUS_MISSING else "move"
    return ComplaintOutcome(
        True, disputed, state, RULING_CORRECTION, repair=RepairInstruction(action, disputed)
    )
