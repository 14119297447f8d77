"""Shared fixtures: the worked four-candidate example and machine helpers."""

from __future__ import annotations

import random

import pytest

from receiptvote import crypto
from receiptvote.board import publish
from receiptvote.machine import MachineBehavior, start_of_day
from receiptvote.model import ElectionConfig

EX_TITLE = "Presidential Election"
EX_DATE = "November 4, 2008"
EX_PRECINCT = "Foo County, Bar State"

# The worked example: voter's id is assigned to C, the other three ids belong
# to earlier votes for A, B and D.
EX_ASSIGNED_ID = "1597362523648"
EX_PRIOR_IDS = {
    "A": "6597853518467",
    "B": "9431587321355",
    "D": "3943873165496",
}
EX_C_BOOTSTRAP_ID = "1111111111111"  # filler so C also has a prior entry

EX_BOARD_GROUPS = {
    "A": ["5231897463515", "6597853518467", "8795462163516"],
    "B": ["4546138496616", "7894611685366", "9431587321355"],
    "C": ["1597362523648", "2923578356914", "7898756465486"],
    "D": ["3943873165496", "4567315796865", "7986543546933"],
}
EX_RESULTS = {"A": 1863, "B": 536, "C": 2013, "D": 289}


class ScriptedRng(random.Random):
    """random.Random whose next randrange() results can be queued up."""

    def __new__(cls, queued=(), seed=0):
        return super().__new__(cls, seed)

    def __init__(self, queued=(), seed=0):
        super().__init__(seed)
        self.queued = list(queued)

    def randrange(self, *args, **kwargs):
        if self.queued:
            return self.queued.pop(0)
        return super().randrange(*args, **kwargs)


def make_election(
    candidates=("A", "B", "C", "D"),
    bootstrap=10,
    registered=600,
    k=1,
    full=False,
    title=EX_TITLE,
    date=EX_DATE,
    precinct=EX_PRECINCT,
) -> ElectionConfig:
    return ElectionConfig(
        title=title,
        date=date,
        precinct=precinct,
        candidates=tuple(candidates),
        bootstrap_per_candidate=bootstrap,
        registered_voters=registered,
        selections_per_voter=k,
        full_bootstrap_mode=full,
    )


def make_machine(
    election: ElectionConfig | None = None,
    behavior: MachineBehavior | None = None,
    rng: random.Random | None = None,
    scheme: str = "hmac-demo",
    enc_scheme: str = "xor-demo",
    key_seed: int = 1,
):
    """Machine plus its keys and the day's bootstrap ciphertext."""
    election = election or make_election()
    keys = crypto.keygen(random.Random(key_seed), scheme)
    authority = crypto.keygen(random.Random(key_seed + 1), enc_scheme)
    machine, ciphertext = start_of_day(
        election, keys, authority.public, behavior, rng or random.Random(99),
        transport_rng=random.Random(7),
    )
    return machine, ciphertext, keys, authority


def run_example_session(scheme: str = "hmac-demo"):
    """Reproduce the worked example exactly via a scripted id stream.

    Bootstrap (one per candidate in ballot order) takes the three prior ids
    plus a filler for C; the session then assigns the example's own id and
    the voter picks C.  Returns (machine, receipt, keys, election).
    """
    election = make_election(bootstrap=1, registered=200)
    rng = ScriptedRng(
        [
            int(EX_PRIOR_IDS["A"]),
            int(EX_PRIOR_IDS["B"]),
            int(EX_C_BOOTSTRAP_ID),
            int(EX_PRIOR_IDS["D"]),
            int(EX_ASSIGNED_ID),
        ]
    )
    keys = crypto.keygen(random.Random(5), scheme)
    authority = crypto.keygen(random.Random(6), "xor-demo")
    machine, _ = start_of_day(election, keys, authority.public, None, rng)
    session = machine.begin_session()
    machine.make_choice(session, {"C"})
    receipt = machine.validate(session)
    return machine, receipt, keys, election


@pytest.fixture
def example_flow():
    """(receipt, board, machine public key, election) for the worked example."""
    machine, receipt, keys, election = run_example_session()
    board = publish(machine.close_of_day())
    return receipt, board, keys.public, election


def run_honest_day(election: ElectionConfig, choices: list, scheme: str = "hmac-demo"):
    """Drive one machine through an explicit list of selections.

    Each item is a choice label (k=1) or an iterable of labels (k>1).
    Returns (machine, receipts, keys).
    """
    machine, _, keys, _ = make_machine(election, scheme=scheme)
    receipts = []
    for selection in choices:
        chosen = {selection} if isinstance(selection, str) else set(selection)
        session = machine.begin_session()
        machine.make_choice(session, chosen)
        receipts.append(machine.validate(session))
    return machine, receipts, keys
