"""Check records and byte-stable JSON reports."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

SCHEMA = 1

EXACT_PASS = "EXACT-PASS"
EXACT_FAIL = "EXACT-FAIL"
EVIDENCE = "EVIDENCE"
INCONCLUSIVE = "INCONCLUSIVE"
VERDICTS = (EXACT_PASS, EXACT_FAIL, EVIDENCE, INCONCLUSIVE)

COMPOSITION = "right-to-left: (p*q)(x) = p(q(x))"


def jsonable(value: Any) -> Any:
    """Convert to plain JSON values; rationals become integers or "p/q" strings."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    if isinstance(value, float):
        raise TypeError("reports carry exact values only")
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if hasattr(value, "to_json"):
        return jsonable(value.to_json())
    raise TypeError(f"cannot serialize {type(value).__name__}")


@dataclass
class Check:
    name: str
    claim: str
    verdict: str
    data: dict = field(default_factory=dict)
    trace: Any = None

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict}")

    def to_json(self) -> dict:
        out = {"name": self.name, "claim": self.claim, "verdict": self.verdict,
               "data": jsonable(self.data)}
        if self.trace is not None:
            out["trace"] = jsonable(self.trace)
        return out


def exact(name: str, claim: str, ok: bool, data: dict | None = None, trace: Any = None) -> Check:
    """An exact check; failures must carry a counterexample in ``trace``."""
    if not ok and trace is None:
        trace = {"counterexample": data or {}}
    return Check(name, claim, EXACT_PASS if ok else EXACT_FAIL, data or {}, trace)


@dataclass
class Report:
    command: str
    config: dict
    checks: list[Check] = field(default_factory=list)
    results: dict = field(default_factory=dict)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    @property
    def exit_status(self) -> int:
        return 1 if any(c.verdict == EXACT_FAIL for c in self.checks) else 0

    def counts(self) -> dict[str, int]:
        return {v: sum(1 for c in self.checks if c.verdict == v) for v in VERDICTS}

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "command": self.command,
            "config": jsonable(self.config),
            "composition": COMPOSITION,
            "checks": [c.to_json() for c in self.checks],
            "summary": self.counts(),
            "results": jsonable(self.results),
            "exit_status": self.exit_status,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"
