"""Verification reports and their JSON schema."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .indexalg import format_rational


def jsonable(obj: Any) -> Any:
    """Convert Fractions, tuples and nested containers into plain JSON values."""
    from fractions import Fraction

    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, dict):
        return {str(k) if not isinstance(k, str) else k: jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(x) for x in obj]
    if hasattr(obj, "to_json"):
        return obj.to_json()
    return obj


@dataclass
class Report:
    claim: str
    parameters: dict
    samples: int = 0
    checks: int = 0
    failures: list = field(default_factory=list)
    skipped: str | None = None

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, ok: bool, **entry) -> bool:
        self.checks += 1
        if not ok:
            self.failures.append(jsonable(entry))
        return ok

    def merge(self, other: "Report") -> "Report":
        self.checks += other.checks
        self.samples += other.samples
        self.failures.extend(other.failures)
        return self

    def to_json(self) -> dict:
        out = {
            "claim": self.claim,
            "parameters": jsonable(self.parameters),
            "samples": self.samples,
            "checks": self.checks,
            "failures": self.failures,
        }
        if self.skipped:
            out["skipped"] = self.skipped
        return out

    def summary(self) -> str:
        params = ",".join(f"{k}={v}" for k, v in self.parameters.items())
        if self.skipped:
            return f"SKIP {self.claim} [{params}] {self.skipped}"
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.claim} [{params}] checks={self.checks} failures={len(self.failures)}"


REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "prolongation-lab verification run",
    "type": "object",
    "required": ["seed", "samples", "status", "failures", "reports"],
    "properties": {
        "seed": {"type": "integer", "minimum": 0},
        "samples": {"type": "integer", "minimum": 0},
        "status": {"enum": ["pass", "fail"]},
        "failures": {"type": "integer", "minimum": 0},
        "reports": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["claim", "parameters", "samples", "failures"],
                "properties": {
                    "claim": {"type": "string"},
                    "parameters": {
                        "type": "object",
                        "properties": {k: {"type": "integer"} for k in ("n", "m", "k", "l")},
                    },
                    "samples": {"type": "integer", "minimum": 0},
                    "checks": {"type": "integer", "minimum": 0},
                    "skipped": {"type": "string"},
                    "failures": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "description": "commutator entries carry pair/expected/got/status",
                        },
                    },
                },
            },
        },
    },
}


def schema_text(fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(REPORT_SCHEMA, indent=2, sort_keys=True)
    lines = [
        "run report",
        "  seed      integer   RNG seed of the run",
        "  samples   integer   random samples per sampled claim",
        "  status    pass|fail",
        "  failures  integer   total failure entries",
        "  reports   list of claim reports:",
        "    claim       string   suite/claim name",
        "    parameters  object   n, m, k, l",
        "    samples     integer",
        "    checks      integer  exact comparisons performed",
        "    skipped     string   reason, when the claim does not apply",
        "    failures    list     counterexamples; commutator entries are",
        "                         {pair, expected, got, status}",
    ]
    return "\n".join(lines)
