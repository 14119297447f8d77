"""HTTP surface: every endpoint, happy paths and error codes."""

from __future__ import annotations

import copy

import pytest
from fastapi.testclient import TestClient

from receiptvote.service.app import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def scenario_payload(seed=1, num_voters=6, behavior=None, bootstrap=2):
    return {
        "election": {
            "title": "Presidential Election",
            "date": "November 4, 2008",
            "precinct": "Foo County, Bar State",
            "candidates": ["A", "B", "C", "D"],
            "selections_per_voter": 1,
            "bootstrap_per_candidate": bootstrap,
            "registered_voters": 100,
            "full_bootstrap_mode": False,
        },
        "num_voters": num_voters,
        "voter_choice_distribution": {"A": 2, "B": 1, "C": 1, "D": 1},
        "behavior": behavior or {"kind": "honest"},
        "collect_receipts": True,
        "coercer_knows_order": True,
        "seed": seed,
    }


@pytest.fixture(scope="module")
def honest_run(client):
    response = client.post("/scenario/run", json={"config": scenario_payload()})
    assert response.status_code == 200
    return response.json()


def test_health(client):
    data = client.get("/health").json()
    assert data["status"] == "ok"


def test_run_honest_is_clean(client, honest_run):
    assert honest_run["clean"] is True
    assert len(honest_run["receipts"]) == 6
    assert honest_run["board"]["signings_count"] == 6
    assert honest_run["reports"]["detection"]["verdict"] == "clean"
    assert honest_run["board_text"].startswith("Presidential Election")
    assert all("origin" not in e for e in honest_run["board"]["entries"])


def test_run_seed_override_changes_trace(client):
    base = client.post("/scenario/run", json={"config": scenario_payload(seed=1)}).json()
    overridden = client.post(
        "/scenario/run", json={"config": scenario_payload(seed=1), "seed": 2}
    ).json()
    assert base["trace"]["scenario"]["seed"] == 1
    assert overridden["trace"]["scenario"]["seed"] == 2
    assert base["trace"] != overridden["trace"]


def test_run_rejects_bad_config(client):
    payload = scenario_payload()
    payload["num_voters"] = 5000  # above registered_voters
    response = client.post("/scenario/run", json={"config": payload})
    assert response.status_code == 422
    assert response.json()["detail"]["code"] == "bad_request"


def test_run_with_fraud_reports_detection(client):
    payload = scenario_payload(behavior={"kind": "inject_fraud", "count": 2, "choice": "A"})
    data = client.post("/scenario/run", json={"config": payload}).json()
    assert data["clean"] is False
    assert data["reports"]["audit"]["surplus"] == 2
    assert data["adjusted_results"] is not None


def test_verify_receipt_endpoint(client, honest_run):
    request = {
        "receipt": honest_run["receipts"][0]["receipt"],
        "board": honest_run["board"],
        "machine_public_key": honest_run["keys"]["machine_public"],
    }
    data = client.post("/receipt/verify", json=request).json()
    assert data["signature_valid"] is True
    assert data["all_confirmed"] is True
    assert len(data["statuses"]) == 4

    tampered = copy.deepcopy(request)
    tampered["receipt"]["pairings"][0]["id"] = "9999999999999"
    data = client.post("/receipt/verify", json=tampered).json()
    assert data["signature_valid"] is False
    assert data["all_confirmed"] is False


def test_audit_endpoint_clean_and_missing(client, honest_run):
    election = scenario_payload()["election"]
    data = client.post(
        "/board/audit", json={"board": honest_run["board"], "config": election}
    ).json()
    assert data["report"]["verdict"] == "clean"

    short = copy.deepcopy(honest_run["board"])
    short["entries"] = short["entries"][1:]
    response = client.post("/board/audit", json={"board": short, "config": election})
    assert response.status_code == 422
    assert response.json()["detail"]["code"] == "missing_votes"


def test_authority_endpoint_accepts_honest_batch(client, honest_run):
    request = {
        "ciphertext": honest_run["bootstrap_ciphertext"],
        "machine_public_key": honest_run["keys"]["machine_public"],
        "authority_secret_key": honest_run["keys"]["authority_secret"],
        "config": scenario_payload()["election"],
        "board": honest_run["board"],
    }
    data = client.post("/authority/check", json=request).json()
    assert data["batch"]["accepted"] is True
    assert data["batch"]["entry_count"] == 8
    assert data["check"]["verdict"] == "clean"


def test_authority_endpoint_flags_skew(client):
    payload = scenario_payload(
        behavior={"kind": "skewed_bootstrap", "counts": {"A": 1, "B": 3, "C": 2, "D": 2}}
    )
    run = client.post("/scenario/run", json={"config": payload}).json()
    request = {
        "ciphertext": run["bootstrap_ciphertext"],
        "machine_public_key": run["keys"]["machine_public"],
        "authority_secret_key": run["keys"]["authority_secret"],
        "config": payload["election"],
    }
    data = client.post("/authority/check", json=request).json()
    assert data["batch"]["accepted"] is False
    assert data["batch"]["error"] == "count_mismatch"
    assert data["batch"]["deltas"] == {"A": -1, "B": 1, "C": 0, "D": 0}


def test_coercion_endpoint(client, honest_run):
    receipts = [r["receipt"] for r in honest_run["receipts"]]
    data = client.post("/coercion/analyze", json={"receipts": receipts}).json()
    for statement in data["statements"]:
        assert statement["polarity"] == "did_not_vote_for"
        assert statement["evidence_index"] < statement["voter_index"]
    empty = client.post("/coercion/analyze", json={"receipts": []}).json()
    assert empty["statements"] == []


def test_complaint_endpoint_orders_correction(client, honest_run):
    board = copy.deepcopy(honest_run["board"])
    receipt = honest_run["receipts"][0]["receipt"]
    victim = receipt["pairings"][0]
    board["entries"] = [e for e in board["entries"] if e["id"] != victim["id"]]
    data = client.post(
        "/complaint/file",
        json={
            "receipt": receipt,
            "pairing_index": 0,
            "board": board,
            "machine_public_key": honest_run["keys"]["machine_public"],
        },
    ).json()
    assert data["receipt_authentic"] is True
    assert data["ruling"] == "correction_ordered"
    assert data["repair"]["action"] == "insert"


def test_render_endpoint(client, honest_run):
    data = client.post(
        "/board/render",
        json={"board": honest_run["board"], "config": scenario_payload()["election"]},
    ).json()
    assert "Votes:" in data["text"] and "Results:" in data["text"]
