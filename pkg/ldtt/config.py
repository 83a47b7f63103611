import json
import os
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from ldtt.gf import is_prime

CONFIG_ENV_VAR = "LDTT_CONFIG"

PRAGMAS = {
    "nat_l": "nat_l",
    "eta_sigma": "eta_sigma",
    "eta_sub": "eta_sub",
    "eta_with": "eta_with",
    "ua": "ua_rules",
}


class EqFlags(BaseModel):
    """Switches for the optional equality rules.

    Fixed for a checking unit once its pragmas have been read.
    """
    model_config = ConfigDict(frozen=True)

    nat_l: bool = False
    eta_sigma: bool = False
    eta_sub: bool = False
    eta_with: bool = False
    ua_rules: bool = False

    def with_pragma(self, pragma: str) -> "EqFlags":
        if pragma not in PRAGMAS:
            raise ValueError(f"unknown pragma '{pragma}', expected one of "
                             f"{sorted(PRAGMAS)}.")
        return self.model_copy(update={PRAGMAS[pragma]: True})

    @classmethod
    def all_on(cls) -> "EqFlags":
        return cls(nat_l=True, eta_sigma=True, eta_sub=True, eta_with=True,
                   ua_rules=True)


class ReportFormat(str, Enum):
    TEXT = "text"
    JSON = "json"


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    prime: int = 2
    step_budget: int = 100_000
    flags: EqFlags = Field(default_factory=EqFlags)
    universe_dim_cap: int = 2
    report_format: ReportFormat = ReportFormat.TEXT
    jobs: int = 1
    size_cap: int = 10_000
    dim_cap: int = 64
    seed: int = 0
    verbose: int = 1

    @field_validator("prime")
    @classmethod
    def _prime_is_prime(cls, v: int) -> int:
        if not is_prime(v):
            raise ValueError(f"prime must be a prime number, got {v}")
        return v

    @field_validator("step_budget", "universe_dim_cap", "jobs", "size_cap",
                     "dim_cap")
    @classmethod
    def _positive(cls, v: int) -> int:
        if v <= 0:
            raise ValueError(f"must be positive, got {v}")
        return v

    def updated(self, **overrides: Any) -> "RunConfig":
        values = self.model_dump()
        values.update({k: v for k, v in overrides.items() if v is not None})
        return RunConfig.model_validate(values)


def load_config(path: Optional[str] = None,
                overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Defaults, then the JSON file at ``path`` (or ``$LDTT_CONFIG``),
    then ``overrides``."""
    path = path or os.environ.get(CONFIG_ENV_VAR)
    values: Dict[str, Any] = {}
    if path:
        config_path = Path(path)
        if not config_path.is_file():
            raise ValueError(f"config file {config_path} does not exist.")
        with open(config_path, "r", encoding="utf-8") as f:
            values = json.load(f)
        if not isinstance(values, dict):
            raise TypeError(f"config file {config_path} must hold a JSON "
                            f"object, got {type(values).__name__}.")
    config = RunConfig.model_validate(values)
    return config.updated(**(overrides or {}))
