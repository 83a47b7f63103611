import json

import pytest
from pydantic import ValidationError

from ldtt.config import (CONFIG_ENV_VAR, EqFlags, ReportFormat, RunConfig,
                         load_config)


@pytest.fixture(autouse=True)
def no_env_config(monkeypatch):
    monkeypatch.delenv(CONFIG_ENV_VAR, raising=False)


def test_defaults():
    config = load_config()
    assert config.prime == 2
    assert config.step_budget == 100_000
    assert config.flags == EqFlags()
    assert config.report_format is ReportFormat.TEXT
    assert config.jobs == 1


@pytest.mark.parametrize("prime", [0, 1, 4, 9])
def test_prime_must_be_prime(prime):
    with pytest.raises(ValidationError):
        RunConfig(prime=prime)


def test_budget_must_be_positive():
    with pytest.raises(ValidationError):
        RunConfig(step_budget=0)


def test_file_then_overrides(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(
        json.dumps({
            "prime": 3,
            "jobs": 2,
            "flags": {
                "eta_sigma": True
            }
        }))
    config = load_config(str(path), {"jobs": 4, "step_budget": None})
    assert config.prime == 3
    assert config.jobs == 4
    assert config.step_budget == 100_000
    assert config.flags.eta_sigma


def test_env_var(tmp_path, monkeypatch):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"prime": 5}))
    monkeypatch.setenv(CONFIG_ENV_VAR, str(path))
    assert load_config().prime == 5


def test_missing_file():
    with pytest.raises(ValueError):
        load_config("/nonexistent/ldtt.json")


def test_non_object_file(tmp_path):
    path = tmp_path / "config.json"
    path.write_text("[1, 2]")
    with pytest.raises(TypeError):
        load_config(str(path))


def test_pragmas():
    flags = EqFlags().with_pragma("ua")
    assert flags.ua_rules and not flags.nat_l
    with pytest.raises(ValueError):
        flags.with_pragma("funext")
    assert EqFlags.all_on().eta_sub and EqFlags.all_on().eta_with
    assert EqFlags().with_pragma("eta_with").eta_with
