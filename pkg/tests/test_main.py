import json

import pytest

from config import settings
from exceptions import UsageError
from main import main, parse_request


def test_parse_request_fields(tmp_path):
    request, debug = parse_request(["verify", "strata", "--n", "3", "--j", "1", "--cache", str(tmp_path), "--debug"])
    assert request.suite == "strata" and request.n == 3 and request.j == 1
    assert debug
    assert request.slow is False


def test_unknown_suite_is_a_usage_error():
    with pytest.raises(UsageError):
        parse_request(["verify", "bogus"])


def test_large_m_needs_override():
    with pytest.raises(UsageError):
        parse_request(["verify", "sigma", "--m", "9"])
    request, _ = parse_request(["verify", "sigma", "--m", "9", "--override", settings.override_token])
    assert request.overridden


def test_wrong_override_token():
    with pytest.raises(UsageError):
        parse_request(["verify", "sigma", "--m", "9", "--override", "please"])


def test_usage_errors_exit_with_three():
    assert main(["verify", "bogus"]) == 3
    assert main(["verify", "sigma", "--m", "9"]) == 3
    assert main(["verify", "sigma", "--jobs", "0"]) == 3


def test_verified_suite_exits_zero(tmp_path, capsys):
    code = main(["verify", "sigma", "--m", "2", "--cache", str(tmp_path / "cache"), "--format", "text"])
    assert code == 0
    assert "overall verified" in capsys.readouterr().out


def test_corrections_exit_one(tmp_path):
    out = tmp_path / "eta.json"
    code = main(["verify", "eta", "--m", "2", "--cache", str(tmp_path / "cache"), "--out", str(out)])
    assert code == 1
    payload = json.loads(out.read_text(encoding="utf-8"))
    assert payload["suite"] == "eta"
    assert any(check["status"] == "corrected" for check in payload["checks"])


def test_io_failure_exit_code(tmp_path):
    code = main(["verify", "sigma", "--m", "1", "--cache", str(tmp_path / "cache"), "--out", str(tmp_path)])
    assert code == 2
