"""Exception hierarchy shared by all protocol modules."""

from __future__ import annotations


class ProtocolError(Exception):
    """Base class for all domain errors raised by this package."""


class ConfigError(ProtocolError):
    """Invalid election or scenario configuration."""


class IdSpaceExhaustedError(ProtocolError):
    """Every 13-digit identifier has been issued (practically unreachable)."""


class SchemeMismatchError(ProtocolError):
    """Key handed to an operation of a different crypto scheme."""


class AuthenticityError(ProtocolError):
    """A signature that must be valid failed verification."""


class DecryptionError(ProtocolError):
    """Ciphertext could not be decrypted or failed its integrity check."""


class SessionStateError(ProtocolError):
    """Machine session operation invoked in the wrong phase."""


class BootstrapProblemError(ProtocolError):
    """No prior entry exists for a non-selected choice, so no id can be borrowed.

    Happens when bootstrap_per_candidate is 0 and a choice has received no
    votes yet; the receipt cannot be completed.
    """

    def __init__(self, choice: str):
        super().__init__(f"no recorded entry to borrow for choice {choice!r}")
        self.choice = choice


class PublicationError(ProtocolError):
    """Submission rejected by the bulletin board."""


class TallyInconsistencyError(ProtocolError):
    """A candidate's published count is below the bootstrap count."""


class MissingVotesError(ProtocolError):
    """Board holds fewer entries than signings plus bootstrap predict."""

    def __init__(self, expected: int, actual: int):
        super().__init__(f"expected {expected} board entries, found {actual}")
        self.expected = expected
        self.actual = actual


class BatchCountMismatchError(ProtocolError):
    """Bootstrap batch counts differ from the configured per-candidate number.

    ``deltas`` maps each candidate to actual minus expected count.
    """

    def __init__(self, deltas: dict[str, int]):
        named = ", ".join(f"{c}:{d:+d}" for c, d in deltas.items() if d != 0)
        super().__init__(f"bootstrap counts off: {named}")
        self.deltas = deltas


class RecordDestroyedError(ProtocolError):
    """Operation attempted on a destroyed bootstrap record."""
