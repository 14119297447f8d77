"""Core types, id generation, canonical bytes and renderings."""

from __future__ import annotations

import base64
import json
import random
import textwrap
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from receiptvote import model
from receiptvote.board import publish, tally
from receiptvote.crypto import Signature
from receiptvote.errors import ConfigError, IdSpaceExhaustedError
from receiptvote.model import (
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
    signature_display_lines,
)

from conftest import (
    EX_ASSIGNED_ID,
    EX_BOARD_GROUPS,
    EX_PRIOR_IDS,
    EX_RESULTS,
    ScriptedRng,
    make_election,
    make_machine,
    run_example_session,
)

GOLDEN = Path(__file__).parent / "golden"


# -- id generation ---------------------------------------------------------


def test_generate_id_returns_first_draw_verbatim():
    rng = ScriptedRng([int(EX_ASSIGNED_ID)])
    assert generate_id(rng, set()) == EX_ASSIGNED_ID


def test_generate_id_redraws_on_collision():
    first = ScriptedRng([5])
    taken = generate_id(first, set())
    assert taken == "0000000000005"
    rng = ScriptedRng([5, 5, 7])
    assert generate_id(rng, {taken}) == "0000000000007"


def test_generate_id_uniqueness_scan_over_draw_log():
    rng = random.Random(42)
    issued: set[str] = set()
    log = []
    for _ in range(10_000):
        id = generate_id(rng, issued)
        issued.add(id)
        log.append(id)
    # independent brute-force scan of the log
    assert len(set(log)) == 10_000
    assert all(len(id) == 13 and id.isdigit() for id in log)


def test_generate_id_exhaustion_guard(monkeypatch):
    monkeypatch.setattr(model, "ID_SPACE", 2)
    issued = {"0000000000000", "0000000000001"}
    with pytest.raises(IdSpaceExhaustedError):
        generate_id(random.Random(0), issued)


def test_generate_ids_preserve_leading_zeros():
    rng = ScriptedRng([12])
    assert generate_id(rng, set()) == "0000000000012"


# -- election config -------------------------------------------------------


def test_config_rejects_duplicate_candidates():
    with pytest.raises(ConfigError):
        make_election(candidates=("A", "A", "B"))


def test_config_requires_selections_below_candidate_count():
    with pytest.raises(ConfigError):
        make_election(candidates=("A", "B"), k=2)
    with pytest.raises(ConfigError):
        make_election(k=0)


def test_config_requires_single_line_text_fields():
    with pytest.raises(ConfigError):
        make_election(title="Two\nLines")
    with pytest.raises(ConfigError):
        make_election(candidates=("A", "B\tC", "D"))
    with pytest.raises(ConfigError):
        make_election(candidates=("A", "", "B"))


def test_config_full_bootstrap_requires_one_per_registered_voter():
    with pytest.raises(ConfigError):
        make_election(bootstrap=3, registered=10, full=True)
    cfg = make_election(bootstrap=10, registered=10, full=True)
    assert cfg.full_bootstrap_mode


def test_config_json_round_trip():
    cfg = make_election(k=2, candidates=("A", "B", "C"))
    assert ElectionConfig.from_dict(cfg.to_dict()) == cfg
    assert set(cfg.to_dict()) == {
        "title", "date", "precinct", "candidates", "selections_per_voter",
        "bootstrap_per_candidate", "registered_voters", "full_bootstrap_mode",
    }


# -- canonical bytes -------------------------------------------------------


def _example_body() -> ReceiptBody:
    pairings = [
        Pairing("A", EX_PRIOR_IDS["A"]),
        Pairing("B", EX_PRIOR_IDS["B"]),
        Pairing("C", EX_ASSIGNED_ID),
        Pairing("D", EX_PRIOR_IDS["D"]),
    ]
    return ReceiptBody("Presidential Election", "November 4, 2008", "Foo County, Bar State", tuple(pairings))


def test_canonical_bytes_layout_matches_example_header():
    encoded = canonical_receipt_bytes(_example_body())
    assert encoded.startswith(
        b"Presidential Election\nNovember 4, 2008\nFoo County, Bar State\n"
        b"A\t6597853518467\n"
    )
    assert encoded.endswith(b"D\t3943873165496")


def test_canonical_bytes_deterministic_for_equal_bodies():
    assert canonical_receipt_bytes(_example_body()) == canonical_receipt_bytes(_example_body())


def test_canonical_bytes_sensitive_to_pairing_order():
    body = _example_body()
    swapped = ReceiptBody(
        body.title, body.date, body.precinct,
        (body.pairings[1], body.pairings[0]) + body.pairings[2:],
    )
    assert canonical_receipt_bytes(body) != canonical_receipt_bytes(swapped)


_label = st.text(alphabet="ABCDEFGH", min_size=1, max_size=3)
_digits = st.integers(min_value=0, max_value=model.ID_SPACE - 1).map(lambda n: f"{n:013d}")
_line = st.text(alphabet=st.characters(blacklist_characters="\n\t", blacklist_categories=("Cs",)), max_size=20)


@st.composite
def _bodies(draw):
    labels = draw(st.lists(_label, min_size=1, max_size=5, unique=True))
    ids = draw(st.lists(_digits, min_size=len(labels), max_size=len(labels), unique=True))
    return ReceiptBody(
        draw(_line), draw(_line), draw(_line),
        tuple(Pairing(c, i) for c, i in zip(labels, ids)),
    )


@given(_bodies(), _bodies())
@settings(max_examples=60)
def test_canonical_bytes_injective_over_distinct_bodies(a, b):
    if a != b:
        assert canonical_receipt_bytes(a) != canonical_receipt_bytes(b)


# -- receipt rendering -----------------------------------------------------


def test_receipt_render_reproduces_worked_example_rows():
    _, receipt, _, _ = run_example_session()
    text = render_receipt_text(receipt)
    golden = (GOLDEN / "receipt_example_prefix.txt").read_text()
    assert text.startswith(golden)
    lines = text.splitlines()
    assert lines[4:8] == [
        "A  6597853518467",
        "B  9431587321355",
        "C  1597362523648",
        "D  3943873165496",
    ]


def test_receipt_render_single_pairing():
    body = ReceiptBody("T", "D", "P", (Pairing("Yes", "0000000000001"),))
    text = render_receipt_text(Receipt(body, Signature("hmac-demo", b"\x01" * 8)))
    rows = [l for l in text.splitlines() if "  " in l and not l.startswith("Signature")]
    assert rows == ["Yes  0000000000001"]


def test_signature_wrap_matches_textwrap_oracle():
    sig = Signature("hmac-demo", bytes(range(25)))  # 25 bytes -> 40 base32 chars
    encoded = base64.b32encode(sig.data).decode().rstrip("=")
    assert len(encoded) == 40
    assert signature_display_lines(sig) == textwrap.wrap(encoded, 15)
    assert [len(l) for l in signature_display_lines(sig)] == [15, 15, 10]


def test_signature_lines_never_exceed_wrap_width():
    for size in (1, 7, 15, 31, 64):
        lines = signature_display_lines(Signature("hmac-demo", b"\xab" * size))
        assert all(len(l) <= 15 for l in lines)
        assert all(len(l) == 15 for l in lines[:-1])


# -- board rendering -------------------------------------------------------


def _example_board() -> Board:
    entries = tuple(
        BoardEntry(choice, id)
        for choice in "ABCD"
        for id in EX_BOARD_GROUPS[choice]
    )
    return Board(
        title="Presidential Election",
        date="November 4, 2008",
        precinct="Foo County, Bar State",
        candidates=("A", "B", "C", "D"),
        entries=entries,
        signings_count=12,
    )


def test_board_render_matches_golden_layout():
    results = Results(
        published_count={c: n for c, n in EX_RESULTS.items()},
        final_count=dict(EX_RESULTS),
    )
    text = render_board_text(_example_board(), results)
    assert text == (GOLDEN / "board_example.txt").read_text()


def test_board_render_orders_ids_within_group():
    text = render_board_text(
        _example_board(), Results(published_count={}, final_count=dict(EX_RESULTS))
    )
    assert text.index("C  1597362523648") < text.index("C  2923578356914")


def test_board_render_empty_board():
    board = Board("T", "D", "P", ("A", "B"), (), signings_count=0)
    text = render_board_text(board, Results(published_count={}, final_count={}))
    assert "Votes:" in text and "Results:" in text
    assert "A  0" in text and "B  0" in text


def test_board_render_grouping_against_sort_oracle():
    election = make_election(bootstrap=2, registered=200)
    machine, _, _, _ = make_machine(election, rng=random.Random(17))
    for _ in range(100):
        session = machine.begin_session()
        machine.make_choice(session, {machine.rng.choice(election.candidates)})
        machine.validate(session)
    board = publish(machine.close_of_day())
    text = render_board_text(board, tally(board, election))
    votes_section = text.split("Votes:\n\n")[1].split("\n\nResults:")[0]
    rendered_rows = votes_section.splitlines()
    # independent oracle: generic sort of the submission entries
    order = {c: i for i, c in enumerate(election.candidates)}
    expected = [
        f"{e.choice}  {e.id}"
        for e in sorted(board.entries, key=lambda e: (order[e.choice], e.id))
    ]
    assert rendered_rows == expected


# -- serialization round trips and origin hygiene ---------------------------


def test_receipt_json_round_trip():
    _, receipt, _, _ = run_example_session()
    data = json.loads(json.dumps(receipt.to_dict()))
    assert Receipt.from_dict(data, scheme="hmac-demo") == receipt


@given(_bodies())
@settings(max_examples=40)
def test_receipt_round_trip_property(body):
    receipt = Receipt(body, Signature("hmac-demo", b"\x07" * 16))
    assert Receipt.from_dict(receipt.to_dict(), scheme="hmac-demo") == receipt


def test_board_json_round_trip_drops_origin_but_compares_equal(example_flow):
    _, board, _, _ = example_flow
    data = json.loads(json.dumps(board.to_dict()))
    assert Board.from_dict(data) == board


def test_published_serializations_carry_no_origin(example_flow):
    receipt, board, _, _ = example_flow
    assert "origin" not in json.dumps(board.to_dict())
    assert "origin" not in json.dumps(receipt.to_dict())
    results = tally(board, make_election(bootstrap=1, registered=200))
    assert "origin" not in render_board_text(board, results)
    assert "origin" not in render_receipt_text(receipt)


def test_board_round_trip_preserves_empty_voter_names():
    board = Board("T", "D", "P", ("A", "B"), (), signings_count=0, voter_names=())
    assert Board.from_dict(json.loads(json.dumps(board.to_dict()))) == board
    unnamed = Board("T", "D", "P", ("A", "B"), (), signings_count=0)
    assert Board.from_dict(json.loads(json.dumps(unnamed.to_dict()))) == unnamed


def test_board_from_dict_rejects_malformed_ids():
    data = _example_board().to_dict()
    data["entries"][0]["id"] = "123"
    with pytest.raises(ConfigError):
        Board.from_dict(data)


def test_results_round_trip_with_adjustment():
    results = Results(
        published_count={"A": 5}, final_count={"A": 2}, surplus=3, adjusted=("A", 3)
    )
    assert Results.from_dict(json.loads(json.dumps(results.to_dict()))) == results
