"""Command-line client for the receiptvote service.

Commands run against the in-process service handlers by default; pass
``--server URL`` to talk to a running instance instead.  Exit codes are part
of the contract: 0 clean, 1 usage/malformed input, 2 integrity finding
(surplus, discrepancy, count mismatch, missing votes), 3 authenticity failure
(bad signature or undecryptable batch).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Any

import click
import httpx
from pydantic import BaseModel, ValidationError

from .service import api, schemas

EXIT_CLEAN = 0
EXIT_USAGE = 1
EXIT_FINDING = 2
EXIT_AUTHENTICITY = 3

_ERROR_EXITS = {
    api.CODE_BAD_REQUEST: EXIT_USAGE,
    api.CODE_MISSING_VOTES: EXIT_FINDING,
    api.CODE_TALLY_INCONSISTENCY: EXIT_FINDING,
}


class Client:
    """In-process transport: calls the service handlers directly."""

    def run(self, request: schemas.RunRequest) -> schemas.RunResponse:
        return api.run(request)

    def verify_receipt(self, request: schemas.VerifyReceiptRequest) -> schemas.VerifyReceiptResponse:
        return api.verify_receipt(request)

    def audit(self, request: schemas.AuditRequest) -> schemas.AuditResponse:
        return api.audit(request)

    def authority_check(self, request: schemas.AuthorityCheckRequest) -> schemas.AuthorityCheckResponse:
        return api.authority_check(request)

    def coercion(self, request: schemas.CoercionRequest) -> schemas.CoercionResponse:
        return api.coercion(request)

    def render_board(self, request: schemas.RenderBoardRequest) -> schemas.RenderBoardResponse:
        return api.render_board(request)


class HttpClient(Client):
    """Remote transport: same calls over HTTP."""

    _paths = {
        "run": "/scenario/run",
        "verify_receipt": "/receipt/verify",
        "audit": "/board/audit",
        "authority_check": "/authority/check",
        "coercion": "/coercion/analyze",
        "render_board": "/board/render",
    }
    _responses = {
        "run": schemas.RunResponse,
        "verify_receipt": schemas.VerifyReceiptResponse,
        "audit": schemas.AuditResponse,
        "authority_check": schemas.AuthorityCheckResponse,
        "coercion": schemas.CoercionResponse,
        "render_board": schemas.RenderBoardResponse,
    }

    def __init__(self, base_url: str):
        self.base_url = base_url.rstrip("/")

    def _post(self, name: str, request: BaseModel) -> Any:
        response = httpx.post(
            self.base_url + self._paths[name], json=request.model_dump(), timeout=300.0
        )
        if response.status_code != 200:
            try:
                detail = response.json()["detail"]
                raise api.ServiceError(detail["code"], detail["message"], response.status_code)
            except (KeyError, TypeError, ValueError):
                raise api.ServiceError(
                    api.CODE_BAD_REQUEST, f"server returned {response.status_code}"
                ) from None
        return self._responses[name].model_validate(response.json())

    def run(self, request):
        return self._post("run", request)

    def verify_receipt(self, request):
        return self._post("verify_receipt", request)

    def audit(self, request):
        return self._post("audit", request)

    def authority_check(self, request):
        return self._post("authority_check", request)

    def coercion(self, request):
        return self._post("coercion", request)

    def render_board(self, request):
        return self._post("render_board", request)


def _fail(message: str, code: int = EXIT_USAGE) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _read_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        _fail(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        _fail(f"{path} is not valid JSON: {exc}")


def _write_json(path: Path, data: Any) -> None:
    path.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")


def _parse(model: type[BaseModel], data: Any, source: str) -> Any:
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        _fail(f"{source}: {exc.errors()[0].get('msg', 'invalid')} at {exc.errors()[0].get('loc')}")


def _election_payload(data: Any) -> Any:
    # Accept either a bare election config or a scenario config wrapping one.
    if isinstance(data, dict) and "election" in data:
        return data["election"]
    return data


def _call(fn, *args):
    try:
        return fn(*args)
    except api.ServiceError as exc:
        _fail(exc.message, _ERROR_EXITS.get(exc.code, EXIT_USAGE))
    except httpx.HTTPError as exc:
        _fail(f"server unreachable: {exc}")


@click.group()
@click.option("--server", default=None, metavar="URL", help="Talk to a running service instead of in-process.")
@click.pass_context
def main(ctx: click.Context, server: str | None) -> None:
    """Receipt-based verifiable voting toolkit."""
    ctx.obj = HttpClient(server) if server else Client()


@main.command("run")
@click.option("--config", "config_path", required=True, type=click.Path(), help="Scenario config JSON.")
@click.option("--seed", type=int, default=None, help="Override the config's seed.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False), help="Output directory.")
@click.pass_obj
def cmd_run(client: Client, config_path: str, seed: int | None, out_dir: str) -> None:
    """Run a full simulated election day and write all artifacts."""
    payload = _read_json(config_path)
    config = _parse(schemas.ScenarioConfigModel, payload, config_path)
    response = _call(client.run, schemas.RunRequest(config=config, seed=seed))

    out = Path(out_dir)
    (out / "receipts").mkdir(parents=True, exist_ok=True)
    (out / "reports").mkdir(exist_ok=True)
    (out / "keys").mkdir(exist_ok=True)

    _write_json(out / "election.json", response.election)
    _write_json(out / "trace.json", response.trace)
    _write_json(out / "bootstrap_batch.json", response.bootstrap_ciphertext.model_dump())
    for name, key in response.keys.items():
        _write_json(out / "keys" / f"{name}.json", key)
    if response.board is not None:
        _write_json(out / "board.json", response.board)
    if response.board_text is not None:
        (out / "board.txt").write_text(response.board_text, encoding="utf-8")
    if response.results is not None:
        _write_json(out / "results.json", response.results)
    for artifact in response.receipts:
        stem = f"{artifact.index:04d}"
        _write_json(out / "receipts" / f"{stem}.json", artifact.receipt)
        (out / "receipts" / f"{stem}.txt").write_text(artifact.text, encoding="utf-8")
    reports = response.reports
    _write_json(out / "reports" / "authority_batch.json", reports.authority_batch)
    _write_json(out / "reports" / "detection.json", reports.detection)
    if reports.authority_check is not None:
        _write_json(out / "reports" / "authority_check.json", reports.authority_check)
    if reports.audit is not None:
        _write_json(out / "reports" / "audit.json", reports.audit)
    if reports.coercion is not None:
        _write_json(out / "reports" / "coercion.json", reports.coercion)
    if response.adjusted_results is not None:
        _write_json(out / "reports" / "adjusted_results.json", response.adjusted_results)

    detections = reports.detection.get("events", [])
    if response.clean:
        click.echo(f"clean run: artifacts in {out}")
        sys.exit(EXIT_CLEAN)
    click.echo(f"{len(detections)} detection event(s): artifacts in {out}")
    sys.exit(EXIT_FINDING)


@main.command("verify-receipt")
@click.option("--receipt", "receipt_path", required=True, type=click.Path())
@click.option("--board", "board_path", required=True, type=click.Path())
@click.option("--machine-pub", "machine_pub_path", required=True, type=click.Path())
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="text")
@click.pass_obj
def cmd_verify_receipt(
    client: Client, receipt_path: str, board_path: str, machine_pub_path: str, fmt: str
) -> None:
    """Check a receipt's signature and every pairing against the board."""
    request = schemas.VerifyReceiptRequest(
        receipt=_parse(schemas.ReceiptModel, _read_json(receipt_path), receipt_path),
        board=_parse(schemas.BoardModel, _read_json(board_path), board_path),
        machine_public_key=_parse(schemas.KeyModel, _read_json(machine_pub_path), machine_pub_path),
    )
    response = _call(client.verify_receipt, request)
    if fmt == "json":
        click.echo(json.dumps(response.model_dump(), indent=2))
    else:
        click.echo(f"signature: {'valid' if response.signature_valid else 'INVALID'}")
        for status in response.statuses:
            line = f"{status.choice}  {status.id}  {status.status}"
            if status.found:
                line += f" (found under {status.found})"
            click.echo(line)
    if not response.signature_valid:
        sys.exit(EXIT_AUTHENTICITY)
    sys.exit(EXIT_CLEAN if response.all_confirmed else EXIT_FINDING)


@main.command("audit")
@click.option("--board", "board_path", required=True, type=click.Path())
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="json")
@click.pass_obj
def cmd_audit(client: Client, board_path: str, config_path: str, fmt: str) -> None:
    """Compare board entries against signings and bootstrap; report surplus."""
    request = schemas.AuditRequest(
        board=_parse(schemas.BoardModel, _read_json(board_path), board_path),
        config=_parse(
            schemas.ElectionConfigModel, _election_payload(_read_json(config_path)), config_path
        ),
    )
    response = _call(client.audit, request)
    if fmt == "json":
        click.echo(json.dumps(response.model_dump(), indent=2))
    else:
        r = response.report
        click.echo(f"expected {r.expected_entries}, found {r.actual_entries}: {r.verdict}")
        if r.surplus:
            click.echo(f"surplus {r.surplus} charged to {r.winner_before}")
    sys.exit(EXIT_CLEAN if response.report.verdict == "clean" else EXIT_FINDING)


@main.command("authority-check")
@click.option("--ciphertext", "ciphertext_path", required=True, type=click.Path())
@click.option("--machine-pub", "machine_pub_path", required=True, type=click.Path())
@click.option("--authority-key", "authority_key_path", required=True, type=click.Path())
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--board", "board_path", default=None, type=click.Path())
@click.pass_obj
def cmd_authority_check(
    client: Client,
    ciphertext_path: str,
    machine_pub_path: str,
    authority_key_path: str,
    config_path: str,
    board_path: str | None,
) -> None:
    """Replay the trusted authority: decrypt, verify and count the batch,
    then (with --board) confirm every batch entry is published."""
    request = schemas.AuthorityCheckRequest(
        ciphertext=_parse(schemas.CiphertextModel, _read_json(ciphertext_path), ciphertext_path),
        machine_public_key=_parse(schemas.KeyModel, _read_json(machine_pub_path), machine_pub_path),
        authority_secret_key=_parse(schemas.KeyModel, _read_json(authority_key_path), authority_key_path),
        config=_parse(
            schemas.ElectionConfigModel, _election_payload(_read_json(config_path)), config_path
        ),
        board=_parse(schemas.BoardModel, _read_json(board_path), board_path) if board_path else None,
    )
    response = _call(client.authority_check, request)
    click.echo(json.dumps(response.model_dump(), indent=2))
    error = response.batch.get("error")
    if error == "count_mismatch":
        sys.exit(EXIT_FINDING)
    if error in ("authenticity", "decryption"):
        sys.exit(EXIT_AUTHENTICITY)
    if error is not None:
        sys.exit(EXIT_USAGE)
    if response.check is not None and response.check.get("verdict") != "clean":
        sys.exit(EXIT_FINDING)
    sys.exit(EXIT_CLEAN)


@main.command("coerce")
@click.option("--receipts", "receipts_dir", required=True, type=click.Path(file_okay=False))
@click.option("--order", "order_path", default=None, type=click.Path(),
              help="File listing receipt filenames in casting order; default is sorted order.")
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="text")
@click.pass_obj
def cmd_coerce(client: Client, receipts_dir: str, order_path: str | None, fmt: str) -> None:
    """What a collector of these receipts (in casting order) can infer."""
    directory = Path(receipts_dir)
    if not directory.is_dir():
        _fail(f"{receipts_dir} is not a directory")
    if order_path is not None:
        try:
            names = [line.strip() for line in Path(order_path).read_text(encoding="utf-8").splitlines() if line.strip()]
        except OSError as exc:
            _fail(f"cannot read {order_path}: {exc}")
        paths = [directory / name for name in names]
    else:
        paths = sorted(directory.glob("*.json"))
    receipts = [
        _parse(schemas.ReceiptModel, _read_json(str(p)), str(p)) for p in paths
    ]
    response = _call(client.coercion, schemas.CoercionRequest(receipts=receipts))
    if fmt == "json":
        click.echo(json.dumps(response.model_dump(), indent=2))
    else:
        if not response.statements:
            click.echo("no inferences")
        for s in response.statements:
            click.echo(
                f"receipt {s['voter_index']}: did not vote for {s['choice']} "
                f"(id already on receipt {s['evidence_index']})"
            )
    sys.exit(EXIT_CLEAN)


@main.command("show-board")
@click.option("--board", "board_path", required=True, type=click.Path())
@click.option("--config", "config_path", default=None, type=click.Path(),
              help="Election config; required for text format (results need the bootstrap count).")
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="text")
@click.pass_obj
def cmd_show_board(client: Client, board_path: str, config_path: str | None, fmt: str) -> None:
    """Print a published board as JSON or as the results-page text layout."""
    board_data = _read_json(board_path)
    if fmt == "json":
        click.echo(json.dumps(board_data, indent=2))
        sys.exit(EXIT_CLEAN)
    if config_path is None:
        _fail("--config is required for text format")
    request = schemas.RenderBoardRequest(
        board=_parse(schemas.BoardModel, board_data, board_path),
        config=_parse(
            schemas.ElectionConfigModel, _election_payload(_read_json(config_path)), config_path
        ),
    )
    response = _call(client.render_board, request)
    click.echo(response.text, nl=False)
    sys.exit(EXIT_CLEAN)


@main.command("serve")
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def cmd_serve(host: str, port: int) -> None:
    """Start the HTTP service."""
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
