"""Core domain types: election config, voter ids, receipts, the board.

Everything here is an immutable value.  The canonical byte encoding that
signatures cover and the human-readable receipt/board renderings live here so
that every module agrees on them bit for bit.
"""

from __future__ import annotations

import base64
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Mapping

from .crypto import Signature
from .errors import ConfigError, IdSpaceExhaustedError

ID_DIGITS = 13
ID_SPACE = 10**ID_DIGITS

SIGNATURE_WRAP = 15  # display chars per line on a printed receipt

ORIGIN_REAL = "real"
ORIGIN_BOOTSTRAP = "bootstrap"
ORIGIN_FRAUDULENT = "fraudulent"
_ORIGINS = (ORIGIN_REAL, ORIGIN_BOOTSTRAP, ORIGIN_FRAUDULENT)


def is_valid_id(text: str) -> bool:
    return len(text) == ID_DIGITS and text.isdigit()


def require_valid_id(text: str) -> str:
    if not is_valid_id(text):
        raise ConfigError(f"not a {ID_DIGITS}-digit voter id: {text!r}")
    return text


def generate_id(rng: random.Random, issued: set[str]) -> str:
    """Draw a fresh 13-digit id, uniform over values not yet issued.

    Collisions are resolved by re-drawing; the caller is responsible for
    adding the returned id to ``issued``.
    """
    if len(issued) >= ID_SPACE:
        raise IdSpaceExhaustedError("all ids issued")
    while True:
        candidate = f"{rng.randrange(ID_SPACE):0{ID_DIGITS}d}"
        if candidate not in issued:
            return candidate


@dataclass(frozen=True)
class ElectionConfig:
    title: str
    date: str
    precinct: str
    candidates: tuple[str, ...]
    bootstrap_per_candidate: int
    registered_voters: int
    selections_per_voter: int = 1
    full_bootstrap_mode: bool = False

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(self.candidates))
        if not self.candidates:
            raise ConfigError("candidates must be non-empty")
        if len(set(self.candidates)) != len(self.candidates):
            raise ConfigError("candidate labels must be unique")
        # Single-line fields keep the canonical signing encoding injective.
        for name, value in (("title", self.title), ("date", self.date), ("precinct", self.precinct)):
            if "\n" in value:
                raise ConfigError(f"{name} must be a single line")
        for label in self.candidates:
            if not label or "\n" in label or "\t" in label:
                raise ConfigError(f"bad candidate label {label!r}")
        if self.selections_per_voter < 1:
            raise ConfigError("selections_per_voter must be positive")
        if self.selections_per_voter >= len(self.candidates):
            raise ConfigError("selections_per_voter must be below the candidate count")
        if self.bootstrap_per_candidate < 0:
            raise ConfigError("bootstrap_per_candidate must be non-negative")
        if self.registered_voters < 1:
            raise ConfigError("registered_voters must be positive")
        if self.full_bootstrap_mode and self.bootstrap_per_candidate != self.registered_voters:
            raise ConfigError(
                "full_bootstrap_mode requires one bootstrap vote per registered voter"
            )

    def ballot_index(self, choice: str) -> int:
        try:
            return self.candidates.index(choice)
        except ValueError:
            raise ConfigError(f"unknown choice {choice!r}") from None

    def to_dict(self) -> dict[str, Any]:
        return {
            "title": self.title,
            "date": self.date,
            "precinct": self.precinct,
            "candidates": list(self.candidates),
            "selections_per_voter": self.selections_per_voter,
            "bootstrap_per_candidate": self.bootstrap_per_candidate,
            "registered_voters": self.registered_voters,
            "full_bootstrap_mode": self.full_bootstrap_mode,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ElectionConfig":
        try:
            return cls(
                title=data["title"],
                date=data["date"],
                precinct=data["precinct"],
                candidates=tuple(data["candidates"]),
                bootstrap_per_candidate=int(data["bootstrap_per_candidate"]),
                registered_voters=int(data["registered_voters"]),
                selections_per_voter=int(data.get("selections_per_voter", 1)),
                full_bootstrap_mode=bool(data.get("full_bootstrap_mode", False)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad election config: {exc}") from exc


@dataclass(frozen=True)
class Pairing:
    choice: str
    id: str


@dataclass(frozen=True)
class ReceiptBody:
    title: str
    date: str
    precinct: str
    pairings: tuple[Pairing, ...]

    def __post_init__(self):
        object.__setattr__(self, "pairings", tuple(self.pairings))


@dataclass(frozen=True)
class Receipt:
    body: ReceiptBody
    signature: Signature

    def to_dict(self) -> dict[str, Any]:
        return {
            "title": self.body.title,
            "date": self.body.date,
            "precinct": self.body.precinct,
            "pairings": [{"choice": p.choice, "id": p.id} for p in self.body.pairings],
            "signature": self.signature.hex(),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], scheme: str = "ed25519") -> "Receipt":
        try:
            body = ReceiptBody(
                title=data["title"],
                date=data["date"],
                precinct=data["precinct"],
                pairings=tuple(
                    Pairing(p["choice"], require_valid_id(p["id"])) for p in data["pairings"]
                ),
            )
            signature = Signature(scheme, bytes.fromhex(data["signature"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad receipt: {exc}") from exc
        return cls(body, signature)


@dataclass(frozen=True)
class BoardEntry:
    choice: str
    id: str
    # Internal provenance tag for ground-truth testing; never published and
    # excluded from equality so published JSON round-trips to an equal value.
    origin: str = field(default=ORIGIN_REAL, compare=False)

    def __post_init__(self):
        if self.origin not in _ORIGINS:
            raise ConfigError(f"unknown origin {self.origin!r}")


@dataclass(frozen=True)
class Board:
    title: str
    date: str
    precinct: str
    candidates: tuple[str, ...]
    entries: tuple[BoardEntry, ...]
    signings_count: int
    voter_names: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(self.candidates))
        object.__setattr__(self, "entries", tuple(self.entries))
        if self.voter_names is not None:
            object.__setattr__(self, "voter_names", tuple(self.voter_names))

    @cached_property
    def _choice_by_id(self) -> dict[str, str]:
        return {e.id: e.choice for e in self.entries}

    def choice_of(self, id: str) -> str | None:
        return self._choice_by_id.get(id)

    def to_dict(self) -> dict[str, Any]:
        """Published form: origin tags stripped."""
        return {
            "title": self.title,
            "date": self.date,
            "precinct": self.precinct,
            "candidates": list(self.candidates),
            "entries": [{"choice": e.choice, "id": e.id} for e in self.entries],
            "signings_count": self.signings_count,
            "voter_names": list(self.voter_names) if self.voter_names is not None else None,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Board":
        try:
            return cls(
                title=data["title"],
                date=data["date"],
                precinct=data["precinct"],
                candidates=tuple(data["candidates"]),
                entries=tuple(
                    BoardEntry(e["choice"], require_valid_id(e["id"]))
                    for e in data["entries"]
                ),
                signings_count=int(data["signings_count"]),
                voter_names=(
                    tuple(data["voter_names"])
                    if data.get("voter_names") is not None
                    else None
                ),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad board: {exc}") from exc


@dataclass(frozen=True)
class Results:
    published_count: dict[str, int]
    final_count: dict[str, int]
    surplus: int = 0
    adjusted: tuple[str, int] | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "published_count": dict(self.published_count),
            "final_count": dict(self.final_count),
            "surplus": self.surplus,
            "adjusted": (
                {"choice": self.adjusted[0], "amount": self.adjusted[1]}
                if self.adjusted
                else None
            ),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Results":
        adjusted = data.get("adjusted")
        return cls(
            published_count={c: int(n) for c, n in data["published_count"].items()},
            final_count={c: int(n) for c, n in data["final_count"].items()},
            surplus=int(data.get("surplus", 0)),
            adjusted=(adjusted["choice"], int(adjusted["amount"])) if adjusted else None,
        )


def canonical_receipt_bytes(body: ReceiptBody) -> bytes:
    """Deterministic byte encoding of a receipt body; the signature input.

    Header lines, then one ``label<TAB>digits`` line per pairing in ballot
    order, newline-joined, UTF-8.
    """
    lines = [body.title, body.date, body.precinct]
    lines.extend(f"{p.choice}\t{p.id}" for p in body.pairings)
    return "\n".join(lines).encode("utf-8")


def signature_display_lines(signature: Signature) -> list[str]:
    """Uppercase unpadded base32 of the signature, wrapped at 15 chars."""
    encoded = base64.b32encode(signature.data).decode("ascii").rstrip("=")
    return [encoded[i : i + SIGNATURE_WRAP] for i in range(0, len(encoded), SIGNATURE_WRAP)]


def render_receipt_text(receipt: Receipt) -> str:
    """Fixed-layout printable receipt (header, pairing rows, signature block)."""
    body = receipt.body
    lines = [body.title, body.date, body.precinct, ""]
    lines.extend(f"{p.choice}  {p.id}" for p in body.pairings)
    lines.extend(["", "Signature:"])
    lines.extend(signature_display_lines(receipt.signature))
    return "\n".join(lines) + "\n"


def render_board_text(board: Board, results: Results) -> str:
    """Results-page layout: header, Votes grouped per candidate, final counts."""
    lines = [board.title, board.date, board.precinct, "", "Votes:", ""]
    for choice in board.candidates:
        ids = sorted(e.id for e in board.entries if e.choice == choice)
        lines.extend(f"{choice}  {id}" for id in ids)
    lines.extend(["", "Results:", ""])
    for choice in board.candidates:
        lines.append(f"{choice}  {results.final_count.get(choice, 0)}")
    return "\n".join(lines) + "\n"


def entries_to_internal_dicts(entries: Iterable[BoardEntry]) -> list[dict[str, str]]:
    """Origin-tagged entry list for the simulator's internal trace only."""
    return [{"choice": e.choice, "id": e.id, "origin": e.origin} for e in entries]
