from pathlib import Path

import pytest

from ldtt.callbacks import ReportDocument
from ldtt.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main
from ldtt.config import CONFIG_ENV_VAR

SAMPLES = Path(__file__).resolve().parents[2] / "samples"
IDENTITY = str(SAMPLES / "identity.ldtt")
BROKEN = str(SAMPLES / "broken.ldtt")


@pytest.fixture(autouse=True)
def no_config_env(monkeypatch):
    monkeypatch.delenv(CONFIG_ENV_VAR, raising=False)


def test_check_exit_codes(capsys):
    assert main(["check", IDENTITY]) == EXIT_OK
    assert main(["check", BROKEN]) == EXIT_FAILED
    assert main(["check", IDENTITY, BROKEN]) == EXIT_FAILED
    out = capsys.readouterr().out
    assert "LinearViolation" in out


def test_missing_file(capsys):
    assert main(["check", str(SAMPLES / "nope.ldtt")]) == EXIT_USAGE
    assert "no such file" in capsys.readouterr().err


def test_bad_prime(capsys):
    assert main(["check", "--prime", "4", IDENTITY]) == EXIT_USAGE
    assert "bad configuration" in capsys.readouterr().err


def test_config_file(tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text('{"step_budget": 0}')
    assert main(["check", "--config", str(config), IDENTITY]) == EXIT_USAGE
    config.write_text('{"step_budget": 500}')
    assert main(["check", "--config", str(config), IDENTITY]) == EXIT_OK


def test_json_report(capsys):
    assert main(["check", "--json", BROKEN]) == EXIT_FAILED
    doc = ReportDocument.model_validate_json(capsys.readouterr().out)
    assert doc.command == "check"
    assert not doc.passed
    assert doc.summary == {"rejected": 1}
    assert doc.entries[0].reason == "LinearViolation"
    assert doc.config["prime"] == 2


def test_quiet_prints_nothing(capsys):
    assert main(["check", "-q", IDENTITY]) == EXIT_OK
    assert capsys.readouterr().out == ""


def test_normalize(capsys):
    assert main(["normalize", IDENTITY, "--def", "id"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "x"
    assert main(["normalize", IDENTITY, "--def", "nope"]) == EXIT_FAILED
    assert "UnboundName" in capsys.readouterr().err


def test_interp(tmp_path):
    boxes = str(SAMPLES / "boxes.ldtt")
    basis = str(SAMPLES / "boxes_basis.json")
    assert main(["interp", "-q", boxes, "--basis", basis]) == EXIT_OK
    bad = tmp_path / "basis.json"
    bad.write_text('{"A": {"set": 2, "vec": 1}}')
    assert main(["interp", "-q", boxes, "--basis", str(bad)]) == EXIT_USAGE
    bad.write_text("[1, 2]")
    assert main(["interp", "-q", boxes, "--basis", str(bad)]) == EXIT_USAGE


def test_unknown_suite():
    with pytest.raises(SystemExit) as err:
        main(["model-test", "nope"])
    assert err.value.code == EXIT_USAGE


def test_command_is_required():
    with pytest.raises(SystemExit) as err:
        main([])
    assert err.value.code == EXIT_USAGE
