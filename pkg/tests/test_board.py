"""Publication rules, tally arithmetic, lookup and the counting audit."""

from __future__ import annotations

import random

import pytest

from receiptvote.board import (
    RepairInstruction,
    adjusted_results,
    apply_repair,
    audit_counts,
    lookup,
    publish,
    tally,
)
from receiptvote.errors import (
    MissingVotesError,
    PublicationError,
    TallyInconsistencyError,
)
from receiptvote.machine import BoardSubmission, MachineBehavior
from receiptvote.model import Board, BoardEntry, Pairing

from conftest import (
    EX_ASSIGNED_ID,
    EX_BOARD_GROUPS,
    EX_RESULTS,
    make_election,
    make_machine,
    run_honest_day,
)


def _submission(election, entries, signings, names=None):
    return BoardSubmission(
        config=election,
        entries=tuple(entries),
        signings_count=signings,
        voter_names=tuple(names) if names else None,
    )


def _example_published() -> tuple[Board, object]:
    election = make_election(bootstrap=1, registered=200)
    entries = [
        BoardEntry(choice, id)
        for choice in "ABCD"
        for id in EX_BOARD_GROUPS[choice]
    ]
    return publish(_submission(election, entries, signings=8)), election


# -- publish ----------------------------------------------------------------


def test_publish_keeps_worked_example_entry_under_c():
    board, _ = _example_published()
    group_c = [e.id for e in board.entries if e.choice == "C"]
    assert EX_ASSIGNED_ID in group_c


def test_publish_rejects_duplicate_pairing():
    election = make_election()
    entries = [BoardEntry("A", "1" * 13), BoardEntry("A", "1" * 13)]
    with pytest.raises(PublicationError):
        publish(_submission(election, entries, 2))


def test_publish_rejects_id_under_two_choices():
    election = make_election()
    entries = [BoardEntry("A", "1" * 13), BoardEntry("B", "1" * 13)]
    with pytest.raises(PublicationError):
        publish(_submission(election, entries, 2))


def test_publish_rejects_unknown_choice():
    election = make_election(candidates=("A", "B"))
    with pytest.raises(PublicationError):
        publish(_submission(election, [BoardEntry("Z", "1" * 13)], 1))


def test_publish_sorts_shuffled_submission_like_generic_sorter():
    election = make_election(bootstrap=2, registered=300)
    machine, receipts, _ = run_honest_day(
        election, [c for c in random.Random(4).choices("ABCD", k=50)]
    )
    submission = machine.close_of_day()
    shuffled = list(submission.entries)
    random.Random(9).shuffle(shuffled)
    board = publish(_submission(election, shuffled, submission.signings_count))
    # independent oracle: a generic sort of the same entries
    order = {c: i for i, c in enumerate(election.candidates)}
    expected = sorted(shuffled, key=lambda e: (order[e.choice], e.id))
    assert list(board.entries) == expected


def test_publish_checks_voter_names_against_signings():
    election = make_election()
    entries = [BoardEntry("A", "1" * 13)]
    with pytest.raises(PublicationError):
        publish(_submission(election, entries, signings=1, names=["Ann", "Bob"]))
    board = publish(_submission(election, entries, signings=1, names=["Ann"]))
    assert board.voter_names == ("Ann",)


# -- tally ------------------------------------------------------------------


def test_tally_subtracts_bootstrap():
    election = make_election(bootstrap=10)
    machine, _, _ = run_honest_day(election, ["A"] * 7 + ["B"] * 3)
    board = publish(machine.close_of_day())
    results = tally(board, election)
    assert results.published_count["A"] == 17
    assert results.final_count["A"] == 7
    assert results.final_count == {"A": 7, "B": 3, "C": 0, "D": 0}


def test_tally_zero_voters_all_zeroes():
    election = make_election(bootstrap=10)
    machine, _, _ = run_honest_day(election, [])
    results = tally(publish(machine.close_of_day()), election)
    assert all(n == 10 for n in results.published_count.values())
    assert all(n == 0 for n in results.final_count.values())


def test_tally_reproduces_worked_results_page():
    # the published page's final counts, reconstructed from an election with
    # exactly that many real votes per candidate
    election = make_election(bootstrap=10, registered=5000)
    choices = [c for c, n in EX_RESULTS.items() for _ in range(n)]
    machine, _, _ = run_honest_day(election, choices)
    board = publish(machine.close_of_day())
    results = tally(board, election)
    assert results.final_count == EX_RESULTS
    assert results.published_count == {c: n + 10 for c, n in EX_RESULTS.items()}


def test_tally_flags_count_below_bootstrap():
    election = make_election(bootstrap=10)
    entries = [BoardEntry("A", f"{i:013d}") for i in range(5)]
    board = publish(_submission(election, entries, signings=0))
    with pytest.raises(TallyInconsistencyError):
        tally(board, election)


# -- lookup -----------------------------------------------------------------


def test_lookup_finds_choice_on_worked_board():
    board, _ = _example_published()
    assert lookup(board, EX_ASSIGNED_ID) == "C"


def test_lookup_unknown_id_absent():
    board, _ = _example_published()
    assert lookup(board, "9" * 13) is None


def test_lookup_agrees_with_ground_truth_for_every_receipt():
    election = make_election(bootstrap=2, registered=300)
    picks = random.Random(77).choices("ABCD", k=80)
    machine, receipts, _ = run_honest_day(election, picks)
    board = publish(machine.close_of_day())
    for receipt in receipts:
        for pairing in receipt.body.pairings:
            assert lookup(board, pairing.id) == pairing.choice


# -- audit ------------------------------------------------------------------


def test_audit_honest_run_is_clean():
    election = make_election(bootstrap=3)
    machine, _, _ = run_honest_day(election, ["A", "B", "C", "A"])
    report = audit_counts(publish(machine.close_of_day()), election)
    assert report.surplus == 0
    assert report.verdict == "clean"
    assert report.expected_entries == report.actual_entries == 4 + 4 * 3


def test_audit_charges_surplus_to_winner():
    election = make_election(bootstrap=2, registered=200)
    choices = ["A"] * 47 + ["B"] * 10 + ["C"] * 5
    machine, _, _, _ = make_machine(election, MachineBehavior.inject_fraud(3, "A"))
    for c in choices:
        session = machine.begin_session()
        machine.make_choice(session, {c})
        machine.validate(session)
    board = publish(machine.close_of_day())
    report = audit_counts(board, election)
    assert report.surplus == 3
    assert report.verdict == "surplus_detected"
    assert report.winner_before == "A"
    results = tally(board, election)
    assert results.final_count["A"] == 50
    fixed = adjusted_results(results, report)
    assert fixed.final_count["A"] == 47
    assert fixed.adjusted == ("A", 3)


def test_audit_missing_entry_raises():
    election = make_election(bootstrap=2)
    machine, _, _ = run_honest_day(election, ["A", "B"])
    board = publish(machine.close_of_day())
    short = Board(
        title=board.title,
        date=board.date,
        precinct=board.precinct,
        candidates=board.candidates,
        entries=board.entries[1:],
        signings_count=board.signings_count,
    )
    with pytest.raises(MissingVotesError) as err:
        audit_counts(short, election)
    assert err.value.expected == err.value.actual + 1


def test_audit_tie_goes_to_ballot_order_and_is_flagged():
    election = make_election(bootstrap=1)
    machine, _, _ = run_honest_day(election, ["A", "B"])
    report = audit_counts(publish(machine.close_of_day()), election)
    assert report.winner_before == "A"
    assert report.tie_flag


def test_audit_report_json_fields():
    election = make_election(bootstrap=1)
    machine, _, _ = run_honest_day(election, ["A"])
    report = audit_counts(publish(machine.close_of_day()), election)
    assert set(report.to_dict()) == {
        "expected_entries", "actual_entries", "surplus", "winner_before",
        "winner_after", "adjustment", "tie_flag", "verdict",
    }


# -- repair -----------------------------------------------------------------


def test_apply_repair_insert_and_move_keep_sorted_order():
    board, election = _example_published()
    inserted = apply_repair(
        board, RepairInstruction("insert", Pairing("B", "0000000000042"))
    )
    assert lookup(inserted, "0000000000042") == "B"
    moved = apply_repair(
        inserted, RepairInstruction("move", Pairing("A", "0000000000042"))
    )
    assert lookup(moved, "0000000000042") == "A"
    order = {c: i for i, c in enumerate(board.candidates)}
    for repaired in (inserted, moved):
        expected = sorted(repaired.entries, key=lambda e: (order[e.choice], e.id))
        assert list(repaired.entries) == expected
