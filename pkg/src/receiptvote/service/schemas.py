"""Pydantic request/response models for the service boundary.

These mirror the package's JSON wire formats; ``to_core`` converters funnel
through the library's own parsers so validation lives in one place.
"""

from __future__ import annotations

from typing import Any

from pydantic import BaseModel

from .. import crypto
from ..machine import MachineBehavior
from ..model import Board, ElectionConfig, Receipt
from ..sim import ScenarioConfig


class KeyModel(BaseModel):
    scheme: str
    key: str  # lowercase hex

    def to_public(self) -> crypto.PublicKey:
        return crypto.PublicKey(self.scheme, bytes.fromhex(self.key))

    def to_secret(self) -> crypto.SecretKey:
        return crypto.SecretKey(self.scheme, bytes.fromhex(self.key))

    @classmethod
    def from_public(cls, key: crypto.PublicKey) -> "KeyModel":
        return cls(scheme=key.scheme, key=key.hex())


class CiphertextModel(BaseModel):
    scheme: str
    data: str  # lowercase hex

    def to_core(self) -> crypto.Ciphertext:
        return crypto.Ciphertext(self.scheme, bytes.fromhex(self.data))


class PairingModel(BaseModel):
    choice: str
    id: str


class ElectionConfigModel(BaseModel):
    title: str
    date: str
    precinct: str
    candidates: list[str]
    selections_per_voter: int = 1
    bootstrap_per_candidate: int
    registered_voters: int
    full_bootstrap_mode: bool = False

    def to_core(self) -> ElectionConfig:
        return ElectionConfig.from_dict(self.model_dump())


class BehaviorModel(BaseModel):
    kind: str = "honest"
    counts: dict[str, int] | None = None   # skewed_bootstrap
    count: int | None = None               # inject_fraud
    choice: str | None = None              # inject_fraud beneficiary
    target: str | None = None              # bet_attack

    def to_core(self) -> MachineBehavior:
        return MachineBehavior.from_dict(self.model_dump())


class ScenarioConfigModel(BaseModel):
    election: ElectionConfigModel
    num_voters: int
    voter_choice_distribution: dict[str, float]
    behavior: BehaviorModel = BehaviorModel()
    collect_receipts: bool = True
    coercer_knows_order: bool = True
    seed: int = 0

    def to_core(self) -> ScenarioConfig:
        return ScenarioConfig.from_dict(self.model_dump())


class ReceiptModel(BaseModel):
    title: str
    date: str
    precinct: str
    pairings: list[PairingModel]
    signature: str

    def to_core(self, scheme: str) -> Receipt:
        return Receipt.from_dict(self.model_dump(), scheme=scheme)


class BoardModel(BaseModel):
    title: str
    date: str
    precinct: str
    candidates: list[str]
    entries: list[PairingModel]
    signings_count: int
    voter_names: list[str] | None = None

    def to_core(self) -> Board:
        return Board.from_dict(self.model_dump())


class PairingStatusModel(BaseModel):
    choice: str
    id: str
    status: str
    found: str | None = None


class AuditReportModel(BaseModel):
    expected_entries: int
    actual_entries: int
    surplus: int
    winner_before: str
    winner_after: str
    adjustment: int
    tie_flag: bool
    verdict: str


# -- requests / responses ------------------------------------------------


class HealthResponse(BaseModel):
    status: str
    version: str


class RunRequest(BaseModel):
    config: ScenarioConfigModel
    seed: int | None = None  # overrides the config's seed when set


class ReceiptArtifact(BaseModel):
    index: int
    receipt: dict[str, Any]
    text: str


class RunReports(BaseModel):
    authority_batch: dict[str, Any]
    authority_check: dict[str, Any] | None
    audit: dict[str, Any] | None
    detection: dict[str, Any]
    coercion: dict[str, Any] | None


class RunResponse(BaseModel):
    clean: bool
    election: dict[str, Any]
    board: dict[str, Any] | None
    board_text: str | None
    results: dict[str, Any] | None
    adjusted_results: dict[str, Any] | None
    receipts: list[ReceiptArtifact]
    reports: RunReports
    keys: dict[str, dict[str, str]]
    bootstrap_ciphertext: CiphertextModel
    trace: dict[str, Any]


class VerifyReceiptRequest(BaseModel):
    receipt: ReceiptModel
    board: BoardModel
    machine_public_key: KeyModel


class VerifyReceiptResponse(BaseModel):
    signature_valid: bool
    statuses: list[PairingStatusModel]
    all_confirmed: bool


class AuditRequest(BaseModel):
    board: BoardModel
    config: ElectionConfigModel


class AuditResponse(BaseModel):
    report: AuditReportModel
    results: dict[str, Any]
    adjusted_results: dict[str, Any] | None


class AuthorityCheckRequest(BaseModel):
    ciphertext: CiphertextModel
    machine_public_key: KeyModel
    authority_secret_key: KeyModel
    config: ElectionConfigModel
    board: BoardModel | None = None


class AuthorityCheckResponse(BaseModel):
    batch: dict[str, Any]
    check: dict[str, Any] | None


class CoercionRequest(BaseModel):
    receipts: list[ReceiptModel]  # casting order
    ballot_order: list[str] | None = None


class CoercionResponse(BaseModel):
    statements: list[dict[str, Any]]


class ComplaintRequest(BaseModel):
    receipt: ReceiptModel
    pairing_index: int
    board: BoardModel
    machine_public_key: KeyModel


class ComplaintResponse(BaseModel):
    receipt_authentic: bool
    disputed: PairingModel
    board_state: PairingStatusModel
    ruling: str
    repair: dict[str, Any] | None


class RenderBoardRequest(BaseModel):
    board: BoardModel
    config: ElectionConfigModel


class RenderBoardResponse(BaseModel):
    text: str
