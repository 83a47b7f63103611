"""The versioned JSON report."""
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ldtt.callbacks.constants import BAD_OUTCOMES, OUTCOMES, SCHEMA_VERSION


class EntryRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    unit: str
    entry: str
    outcome: str
    reason: Optional[str] = None
    message: Optional[str] = None
    location: Optional[str] = None
    trace: List[str] = Field(default_factory=list)
    failures: List[int] = Field(default_factory=list)

    @model_validator(mode="after")
    def _known_outcome(self) -> "EntryRecord":
        if self.outcome not in OUTCOMES:
            raise ValueError(f"unknown outcome '{self.outcome}', expected "
                             f"one of {OUTCOMES}")
        return self


class ReportDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    schema_version: Literal["ldtt.report/1"] = SCHEMA_VERSION
    command: str
    config: Dict[str, Any] = Field(default_factory=dict)
    entries: List[EntryRecord]
    summary: Dict[str, int]
    passed: bool

    @model_validator(mode="after")
    def _consistent(self) -> "ReportDocument":
        bad = any(e.outcome in BAD_OUTCOMES for e in self.entries)
        if self.passed == bad:
            raise ValueError("'passed' disagrees with the entry outcomes")
        if sum(self.summary.values()) != len(self.entries):
            raise ValueError("summary counts do not add up to the entries")
        return self
