"""Service endpoints, CLI exit codes, report determinism and schema."""
from __future__ import annotations

import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from crflat.cli import run
from crflat.errors import InconsistencyError, MapParseError, MathDomainError, UsageError
from crflat.service import handlers
from crflat.service.app import app
from crflat.service.models import (
    CheckAutRequest,
    FlatRequest,
    FrameRequest,
    MapDocument,
    NormalizeRequest,
    RankRequest,
)

ROOT = Path(__file__).resolve().parents[1]
FIX = ROOT / "fixtures"

LINEAR = MapDocument(**json.loads((FIX / "linear.map").read_text()))
WHITNEY = MapDocument(**json.loads((FIX / "whitney.map").read_text()))
RANK1 = MapDocument(**json.loads((FIX / "rank1_normalized.map").read_text()))


def test_rank_handler_report():
    resp = handlers.handle_rank(RankRequest(map=WHITNEY, samples=5))
    assert resp.report["verdicts"]["kappa0"] == 1
    assert resp.report["results"]["codimension_bound"]["satisfied"] is True


def test_structured_report_deterministic():
    req = RankRequest(map=WHITNEY, samples=2, seed=5)
    a = handlers.handle_rank(req).report
    b = handlers.handle_rank(req).report
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    # a different seed changes the sampled points, hence the results
    c = handlers.handle_rank(RankRequest(map=WHITNEY, samples=2, seed=6)).report
    assert json.dumps(a, sort_keys=True) != json.dumps(c, sort_keys=True)


def test_reports_match_schema():
    jsonschema = pytest.importorskip("jsonschema")
    schema = json.loads((ROOT / "schema" / "report.schema.json").read_text())
    responses = [
        handlers.handle_rank(RankRequest(map=LINEAR, samples=1)),
        handlers.handle_normalize(NormalizeRequest(map=RANK1, stage="star3")),
        handlers.handle_flat(FlatRequest(map=LINEAR, samples=2)),
        handlers.handle_frame(FrameRequest(map=RANK1, samples=1, order=6)),
        handlers.handle_check_aut(CheckAutRequest(
            automorphism={"kind": "isotropy", "lambda": "2", "a": ["0"], "U": [["1"]]})),
    ]
    for resp in responses:
        jsonschema.validate(
            {"command": resp.command, "exit_code": resp.exit_code, "report": resp.report}, schema
        )


def test_http_endpoints():
    client = TestClient(app)
    assert client.get("/v1/health").json() == {"status": "ok"}
    r = client.post("/v1/rank", json={"map": json.loads(LINEAR.model_dump_json()), "samples": 1})
    assert r.status_code == 200
    assert r.json()["report"]["verdicts"]["kappa0"] == 0
    r2 = client.post("/v1/check-aut", json={
        "automorphism": {"kind": "isotropy", "lambda": "2", "a": ["0"], "U": [["1"]]}})
    assert r2.status_code == 200
    body = r2.json()["report"]["verdicts"]
    assert body["is_su"] is False and body["is_glq"] is True
    bad = client.post("/v1/normalize", json={"map": json.loads(
        MapDocument(model="siegel", n=1, N=2, components=["z1", "0", "w+z1^2"]).model_dump_json())})
    assert bad.status_code in (400, 422)
    assert bad.json()["exit_code"] == 3


def test_cli_exit_codes(tmp_path, capsys):
    assert run(["flat", str(FIX / "linear.map"), "--samples", "4"]) == 0
    capsys.readouterr()
    assert run(["check-aut", str(FIX / "isotropy_lambda2.aut"), "--format", "json"]) == 0
    out = capsys.readouterr().out
    body = json.loads(out)
    assert body["report"]["verdicts"] == {"is_glq": True, "is_su": False}
    with pytest.raises(UsageError):
        run(["rank", str(tmp_path / "missing.map")])
    bad = tmp_path / "bad.map"
    bad.write_text(json.dumps({"model": "siegel", "n": 1, "N": 2, "components": ["z1", "w"]}))
    with pytest.raises(MapParseError):
        run(["rank", str(bad)])
    with pytest.raises(MathDomainError):
        run(["normalize", str(FIX / "nonproper.map"), "--stage", "star2"])


def test_cli_json_byte_identical(capsys):
    assert run(["rank", str(FIX / "whitney.map"), "--samples", "2", "--seed", "3", "--format", "json"]) == 0
    first = capsys.readouterr().out
    assert run(["rank", str(FIX / "whitney.map"), "--samples", "2", "--seed", "3", "--format", "json"]) == 0
    second = capsys.readouterr().out
    assert first == second


def test_exit_code_contract_constants():
    assert UsageError("x").exit_code == 1
    assert MapParseError("x").exit_code == 2
    assert MathDomainError("x").exit_code == 3
    assert InconsistencyError("x").exit_code == 4
