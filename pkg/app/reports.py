"""Certificates and run reports shared by the CLI and the HTTP service."""

import hashlib
import json
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field

REPORT_VERSION = "1"

EXIT_CERTIFIED = 0
EXIT_FALSIFIED = 1
EXIT_ERROR = 2


class Certificate(BaseModel):
    """Outcome of one verification; failures carry the first counterexample."""

    name: str
    certified: bool
    error: Optional[str] = None
    details: Dict[str, Any] = Field(default_factory=dict)
    counterexample: Optional[Dict[str, Any]] = None


class RunReport(BaseModel):
    """Machine-readable result of one command."""

    version: str = REPORT_VERSION
    command: str
    inputs: Dict[str, Any] = Field(default_factory=dict)
    outcome: Literal["certified", "falsified", "error"]
    payload: Dict[str, Any] = Field(default_factory=dict)
    certificates: List[Certificate] = Field(default_factory=list)
    wall_time: float = 0.0
    error: Optional[str] = None
    counterexample: Optional[Dict[str, Any]] = None

    @property
    def exit_code(self) -> int:
        return {"certified": EXIT_CERTIFIED, "falsified": EXIT_FALSIFIED}.get(self.outcome, EXIT_ERROR)

    def fingerprint(self) -> str:
        """SHA-256 of the report without timing fields."""
        data = _strip_timings(self.model_dump(mode="json", exclude={"wall_time"}))
        return hashlib.sha256(json.dumps(data, sort_keys=True).encode()).hexdigest()


def _strip_timings(data):
    if isinstance(data, dict):
        return {k: _strip_timings(v) for k, v in data.items() if k != "timings"}
    if isinstance(data, list):
        return [_strip_timings(v) for v in data]
    return data


def build_report(command: str, inputs: Dict[str, Any], certificates: List[Certificate],
                 payload: Optional[Dict[str, Any]] = None, wall_time: float = 0.0) -> RunReport:
    """Aggregate certificates into a report; the first failure becomes the report's counterexample."""
    failed = [c for c in certificates if not c.certified]
    first = failed[0] if failed else None
    return RunReport(
        command=command,
        inputs=inputs,
        outcome="falsified" if failed else "certified",
        payload=payload or {},
        certificates=certificates,
        wall_time=wall_time,
        error=f"{first.name}: {first.error}" if first else None,
        counterexample=first.counterexample if first else None,
    )


def error_report(command: str, inputs: Dict[str, Any], error: str, wall_time: float = 0.0) -> RunReport:
    return RunReport(command=command, inputs=inputs, outcome="error", error=error, wall_time=wall_time)
