"""Service handlers: one function per endpoint, shared by HTTP and the CLI.

Each handler maps a request model to a response model and raises
:class:`ServiceError` with a stable code on failure, so the CLI can translate
outcomes into exit codes without caring whether it ran in-process or remote.
"""

from __future__ import annotations

from dataclasses import replace

from .. import __version__
from ..authority import end_of_day_check, receive_batch
from ..board import adjusted_results, audit_counts, tally
from ..errors import (
    AuthenticityError,
    BatchCountMismatchError,
    ConfigError,
    DecryptionError,
    MissingVotesError,
    ProtocolError,
    SchemeMismatchError,
    TallyInconsistencyError,
)
from ..model import render_board_text, render_receipt_text
from ..sim import coercion_infer, evaluate_detection, run_scenario
from ..verification import (
    STATUS_CONFIRMED,
    check_receipt_against_board,
    file_complaint,
    verify_receipt_signature,
)
from . import schemas

CODE_BAD_REQUEST = "bad_request"
CODE_MISSING_VOTES = "missing_votes"
CODE_TALLY_INCONSISTENCY = "tally_inconsistency"


class ServiceError(Exception):
    def __init__(self, code: str, message: str, http_status: int = 422):
        super().__init__(message)
        self.code = code
        self.message = message
        self.http_status = http_status


def health() -> schemas.HealthResponse:
    return schemas.HealthResponse(status="ok", version=__version__)


def run(request: schemas.RunRequest) -> schemas.RunResponse:
    try:
        config = request.config.to_core()
        if request.seed is not None:
            config = replace(config, seed=request.seed)
    except (ConfigError, ValueError) as exc:
        raise ServiceError(CODE_BAD_REQUEST, str(exc)) from exc

    trace = run_scenario(config)
    detection = evaluate_detection(trace)

    board_text = None
    display = trace.adjusted or trace.results
    if trace.board is not None and display is not None:
        board_text = render_board_text(trace.board, display)

    receipts = [
        schemas.ReceiptArtifact(
            index=voter.index,
            receipt=voter.receipt.to_dict(),
            text=render_receipt_text(voter.receipt),
        )
        for voter in trace.voters
    ]

    return schemas.RunResponse(
        clean=not trace.detections,
        election=config.election.to_dict(),
        board=trace.board.to_dict() if trace.board else None,
        board_text=board_text,
        results=trace.results.to_dict() if trace.results else None,
        adjusted_results=trace.adjusted.to_dict() if trace.adjusted else None,
        receipts=receipts,
        reports=schemas.RunReports(
            authority_batch=trace.authority_batch,
            authority_check=trace.authority_check.to_dict() if trace.authority_check else None,
            audit=trace.audit.to_dict() if trace.audit else None,
            detection=detection.to_dict(),
            coercion=trace.coercion.to_dict() if trace.coercion else None,
        ),
        keys={
            "machine_public": {"scheme": trace.machine_public.scheme, "key": trace.machine_public.hex()},
            "authority_public": {"scheme": trace.authority_public.scheme, "key": trace.authority_public.hex()},
            "authority_secret": {"scheme": trace.authority_secret.scheme, "key": trace.authority_secret.hex()},
        },
        bootstrap_ciphertext=schemas.CiphertextModel(
            scheme=trace.bootstrap_ciphertext.scheme,
            data=trace.bootstrap_ciphertext.hex(),
        ),
        trace=trace.to_dict(),
    )


def verify_receipt(request: schemas.VerifyReceiptRequest) -> schemas.VerifyReceiptResponse:
    try:
        receipt = request.receipt.to_core(scheme=request.machine_public_key.scheme)
        board = request.board.to_core()
        machine_pub = request.machine_public_key.to_public()
    except (ConfigError, ValueError) as exc:
        raise ServiceError(CODE_BAD_REQUEST, str(exc)) from exc
    signature_valid = verify_receipt_signature(receipt, machine_pub)
    statuses = check_receipt_against_board(receipt, board)
    return schemas.VerifyReceiptResponse(
        signature_valid=signature_valid,
        statuses=[schemas.PairingStatusModel(**s.to_dict()) for s in statuses],
        all_confirmed=all(s.status == STATUS_CONFIRMED for s in statuses),
    )


def audit(request: schemas.AuditRequest) -> schemas.AuditResponse:
    try:
        board = request.board.to_core()
        config = request.config.to_core()
    except (ConfigError, ValueError) as exc:
        raise ServiceError(CODE_BAD_REQUEST, str(exc)) from exc
    try:
        report = audit_counts(board, config)
        results = tally(board, config)
    except MissingVotesError as exc:
        raise ServiceError(CODE_MISSING_VOTES, str(exc)) from exc
    except TallyInconsistencyError as exc:
        raise ServiceError(CODE_TALLY_INCONSISTENCY, str(exc)) from exc
    except ConfigError as exc:
        raise ServiceError(CODE_BAD_REQUEST, str(exc)) from exc
    adjusted = adjusted_results(results, report) if report.adjustment else None
    return schemas.AuditResponse(
        report=schemas.AuditReportModel(**report.to_dict()),
        results=results.to_dict(),
        adjusted_results=adjusted.to_dict() if adjusted else None,
    )


def authority_check(request: schemas.AuthorityCheckRequest) -> schemas.AuthorityCheckResponse:
    try:
        ciphertext = request.ciphertext.to_core()
        machine_pub = request.machine_public_key.to_public()
        secret = request.authority_secret_key.to_secret()
        config = request.config.to_core()
        board = request.board.to_core() if request.board is not None else None
    except (ConfigError, ValueError) as exc:
        raise ServiceError(CODE_BAD_REQUEST, str(exc)) from exc

    record = None
    try:
        record = receive_batch(ciphertext, machine_pub, secret, config)
        batch = {
            "accepted": True,
            "entry_count": len(record.entries),
            "deltas": None,
            "error": None,
        }
    except BatchCountMismatchError as exc:
        batch = {"accepted": False, "entry_count": None, "deltas": dict(exc.deltas), "error": "count_mismatch"}
    except AuthenticityError:
        batch = {"accepted": False, "entry_count": None, "deltas": None, "error": "authenticity"}
    except (DecryptionError, SchemeMismatchError):
        batch = {"accepted": False, "entry_count": None, "deltas": None, "error": "decryption"}
    except ConfigError:
        batch = {"accepted": False, "entry_count": None, "deltas": None, "error": "malformed"}

    check = None
    if record is not None and board is not None:
        check = end_of_day_check(record, board).to_dict()
    return schemas.AuthorityCheckResponse(batch=batch, check=check)


def coercion(request: schemas.CoercionRequest) -> schemas.CoercionResponse:
    try:
        receipts = [r.to_core(scheme="ed25519") for r in request.receipts]
        if not receipts:
            return schemas.CoercionResponse(statements=[])
        ballot_order = request.ballot_order or [p.choice for p in receipts[0].body.pairings]
        inference = coercion_infer(receipts, ballot_order)
    except (ConfigError, ValueError) as exc:
        raise ServiceError(CODE_BAD_REQUEST, str(exc)) from exc
    return schemas.CoercionResponse(statements=[s.to_dict() for s in inference.statements])


def complaint(request: schemas.ComplaintRequest) -> schemas.ComplaintResponse:
    try:
        receipt = request.receipt.to_core(scheme=request.machine_public_key.scheme)
        board = request.board.to_core()
        machine_pub = request.machine_public_key.to_public()
        outcome = file_complaint(receipt, request.pairing_index, board, machine_pub)
    except (ConfigError, ValueError) as exc:
        raise ServiceError(CODE_BAD_REQUEST, str(exc)) from exc
    data = outcome.to_dict()
    return schemas.ComplaintResponse(
        receipt_authentic=data["receipt_authentic"],
        disputed=schemas.PairingModel(**data["disputed"]),
        board_state=schemas.PairingStatusModel(**data["board_state"]),
        ruling=data["ruling"],
        repair=data["repair"],
    )


def render_board(request: schemas.RenderBoardRequest) -> schemas.RenderBoardResponse:
    try:
        board = request.board.to_core()
        config = request.config.to_core()
        results = tally(board, config)
    except TallyInconsistencyError as exc:
        raise ServiceError(CODE_TALLY_INCONSISTENCY, str(exc)) from exc
    except (ConfigError, ValueError, ProtocolError) as exc:
        raise ServiceError(CODE_BAD_REQUEST, str(exc)) from exc
    return schemas.RenderBoardResponse(text=render_board_text(board, results))
