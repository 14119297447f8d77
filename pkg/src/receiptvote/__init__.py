"""Receipt-based verifiable voting.

Every voter gets a printed receipt pairing each candidate with a valid
anonymous id (only one of which is hers) so she can verify her vote on the
public board while nobody else can tell which pairing is hers.  The package
implements the machine, board, trusted-authority and court-side checks plus a
deterministic adversarial simulator, wrapped by a FastAPI service and a CLI.
"""

from .board import AuditReport, RepairInstruction, apply_repair, audit_counts, lookup, publish, tally
from .crypto import Ciphertext, KeyPair, PublicKey, SecretKey, Signature
from .errors import ProtocolError
from .machine import BoardSubmission, MachineBehavior, Session, VotingMachine, start_of_day
from .model import (
    Board,
    BoardEntry,
    ElectionConfig,
    Pairing,
    Receipt,
    ReceiptBody,
    Results,
    canonical_receipt_bytes,
    generate_id,
    render_board_text,
    render_receipt_text,
)
from .sim import (
    CoercionInference,
    DetectionReport,
    ScenarioConfig,
    SimulationTrace,
    coercion_infer,
    detection_rate,
    evaluate_detection,
    run_scenario,
)
from .verification import (
    ComplaintOutcome,
    PairingStatus,
    check_receipt_against_board,
    file_complaint,
    verify_receipt_signature,
)

__version__ = "0.1.0"

__all__ = [
    "AuditReport",
    "Board",
    "BoardEntry",
    "BoardSubmission",
    "Ciphertext",
    "CoercionInference",
    "ComplaintOutcome",
    "DetectionReport",
    "ElectionConfig",
    "KeyPair",
    "MachineBehavior",
    "Pairing",
    "PairingStatus",
    "ProtocolError",
    "PublicKey",
    "Receipt",
    "ReceiptBody",
    "RepairInstruction",
    "Results",
    "ScenarioConfig",
    "SecretKey",
    "Session",
    "Signature",
    "SimulationTrace",
    "VotingMachine",
    "apply_repair",
    "audit_counts",
    "canonical_receipt_bytes",
    "check_receipt_against_board",
    "coercion_infer",
    "detection_rate",
    "evaluate_detection",
    "file_complaint",
    "generate_id",
    "lookup",
    "publish",
    "render_board_text",
    "render_receipt_text",
    "run_scenario",
    "start_of_day",
    "tally",
    "verify_receipt_signature",
]
