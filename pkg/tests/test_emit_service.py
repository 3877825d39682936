import json

import pytest

from exceptions import IoFailure
from models.certificate import Anchor, Certificate, CheckRecord
from models.report import CheckStatus
from services.emit_service import EmitService

emit = EmitService()
ANCHOR = Anchor(location="Z-coordinates", quote="These satisfy the relations")


def _certificate(*statuses: CheckStatus) -> Certificate:
    checks = tuple(
        CheckRecord(id=f"z-relations/m={i + 2}/quadratic", anchor=ANCHOR, status=status, detail={"m": i + 2})
        for i, status in enumerate(statuses)
    )
    return Certificate(version="1.0.0", suite="z", params={"m": 2}, checks=checks, environment={"engine": "1.0.0"})


def test_json_parses_back():
    certificate = _certificate(CheckStatus.VERIFIED, CheckStatus.CORRECTED)
    assert emit.parse(emit.to_json(certificate)) == certificate


def test_json_keys_are_sorted_inside_detail():
    record = CheckRecord(id="a", anchor=ANCHOR, status=CheckStatus.VERIFIED, detail={"b": 1, "a": 2})
    assert list(record.detail) == ["a", "b"]


def test_large_integers_become_strings():
    record = CheckRecord(id="a", anchor=ANCHOR, status=CheckStatus.VERIFIED, detail={"n": 2**70, "small": 5})
    payload = json.loads(emit.to_json(Certificate(version="1", suite="z", checks=(record,))))
    assert payload["checks"][0]["detail"] == {"n": str(2**70), "small": 5}


def test_duplicate_ids_are_rejected():
    record = CheckRecord(id="a", anchor=ANCHOR, status=CheckStatus.VERIFIED)
    with pytest.raises(ValueError):
        Certificate(version="1", suite="z", checks=(record, record))


def test_text_view():
    text = emit.to_text(_certificate(CheckStatus.VERIFIED, CheckStatus.FAILED))
    lines = text.splitlines()
    assert lines[0].startswith("NodeHilb 1.0.0 suite=z")
    assert lines[1] == "✓ verified  z-relations/m=2/quadratic  [Z-coordinates]"
    assert lines[2].startswith("✗ failed")
    assert lines[-1] == "2 checks: 1 verified, 0 corrected, 1 failed, 0 skipped; overall failed"


def test_emit_writes_file(tmp_path):
    out = tmp_path / "certs" / "z.json"
    certificate = _certificate(CheckStatus.VERIFIED)
    emit.emit(certificate, "json", out)
    assert emit.parse(out.read_text(encoding="utf-8")) == certificate
    assert list(out.parent.iterdir()) == [out]


def test_emit_to_stdout(capsys):
    emit.emit(_certificate(CheckStatus.SKIPPED), "text")
    assert "overall verified" in capsys.readouterr().out


def test_unwritable_target_raises_io_failure(tmp_path):
    with pytest.raises(IoFailure) as info:
        emit.emit(_certificate(CheckStatus.VERIFIED), "json", tmp_path)
    assert info.value.exit_code == 2
    assert not list(tmp_path.parent.glob("*.tmp"))
