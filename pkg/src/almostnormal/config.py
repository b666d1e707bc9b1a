"""Run configuration: parsing and validation of the JSON config documents."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Any

from .groups import (FamilyMismatch, GroupFamily, SubgroupSpec, family_from_json,
                     subgroup_from_json)

SYSTEMS = ("odometer", "shift")
DEFAULT_CAP = 100_000


class ConfigError(ValueError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


@dataclass
class ShiftOptions:
    max_period: int = 10
    horizon: int = 5
    h_period: int = 2
    windows: list[int] = field(default_factory=lambda: list(range(6)))
    witness_word: list[int] = field(default_factory=lambda: [0, 1])


@dataclass
class RunConfig:
    name: str
    system: str
    family: GroupFamily | None
    chain: list[SubgroupSpec]
    H: SubgroupSpec | None
    depth: int
    radius: int
    cap: int
    levels: list[int]
    level: int
    seed: int
    gamma: Any
    shift: ShiftOptions
    raw: dict

    def echo(self) -> dict:
        return dict(self.raw)


def parse_levels(value: Any) -> list[int]:
    """``[1, 2, 3]``, ``"1..3"`` or a single integer."""
    if isinstance(value, bool):
        raise ValueError("levels must be integers")
    if isinstance(value, int):
        return [value]
    if isinstance(value, str):
        if ".." in value:
            lo, hi = value.split("..", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(value)]
    if isinstance(value, list) and all(isinstance(v, int) and not isinstance(v, bool) for v in value):
        return list(value)
    raise ValueError(f"cannot read levels from {value!r}")


def _int_field(doc: dict, key: str, default: int | None, violations: list[str], minimum: int,
               message: str) -> int | None:
    value = doc.get(key, default)
    if value is None:
        return None
    if not isinstance(value, int) or isinstance(value, bool):
        violations.append(f"{key} must be an integer")
        return None
    if value < minimum:
        violations.append(message)
        return None
    return value


def parse_config(text: str | dict, overrides: dict | None = None) -> RunConfig:
    """Validate a config document; raise :class:`ConfigError` listing every violation found."""
    violations: list[str] = []
    if isinstance(text, dict):
        doc = dict(text)
    else:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError([f"malformed JSON: {exc.msg} at line {exc.lineno}"]) from None
    if not isinstance(doc, dict):
        raise ConfigError(["config must be a JSON object"])
    for key, value in (overrides or {}).items():
        if value is not None:
            doc[key] = value

    if doc.get("schema") != 1:
        violations.append("schema must be 1")
    system = doc.get("system", "odometer")
    if system not in SYSTEMS:
        violations.append(f"system must be one of {', '.join(SYSTEMS)}")

    family = None
    if "family" not in doc:
        violations.append("family is required")
    else:
        try:
            family = family_from_json(doc["family"])
        except (ValueError, KeyError, TypeError) as exc:
            violations.append(f"family: {exc}")

    depth = _int_field(doc, "depth", 0, violations, 0, "depth ≥ 0")
    radius = _int_field(doc, "radius", 4, violations, 0, "radius ≥ 0")
    cap = _int_field(doc, "cap", DEFAULT_CAP, violations, 1, "cap > 0")
    seed = _int_field(doc, "seed", 0, violations, 0, "seed ≥ 0")

    chain: list[SubgroupSpec] = []
    raw_chain = doc.get("chain", [])
    if system == "odometer" and "chain" not in doc:
        violations.append("chain is required for odometer systems")
    if not isinstance(raw_chain, list):
        violations.append("chain must be a list of subgroup specs")
        raw_chain = []
    if family is not None:
        for i, spec in enumerate(raw_chain, start=1):
            try:
                chain.append(subgroup_from_json(family, spec))
            except (ValueError, KeyError, TypeError, FamilyMismatch) as exc:
                violations.append(f"chain[{i}]: {exc}")
        if len(chain) == len(raw_chain):
            outer = None
            for i, spec in enumerate(chain, start=1):
                if outer is not None and spec.has_oracle and outer.has_oracle:
                    if not all(outer.contains(g) for g in spec.generators):
                        violations.append(f"chain is not nested: level {i} is not inside level {i - 1}")
                if not spec.has_oracle:
                    violations.append(f"chain[{i}] needs a membership oracle")
                outer = spec
    if depth is not None and system == "odometer" and depth > len(raw_chain):
        violations.append(f"depth {depth} exceeds the {len(raw_chain)} chain levels")

    H = None
    if doc.get("H") is not None and family is not None:
        try:
            H = subgroup_from_json(family, doc["H"])
        except (ValueError, KeyError, TypeError, FamilyMismatch) as exc:
            violations.append(f"H: {exc}")

    levels: list[int] = []
    try:
        levels = parse_levels(doc.get("levels", []))
    except ValueError as exc:
        violations.append(f"levels: {exc}")
    if depth is not None and any(not 0 <= i <= depth for i in levels):
        violations.append("levels must lie in 0..depth")
    level = _int_field(doc, "level", 1, violations, 0, "level ≥ 0")
    if level is not None and depth is not None and system == "odometer" and level > depth:
        violations.append("level must not exceed depth")

    gamma = doc.get("gamma", "auto")
    if gamma != "auto" and not isinstance(gamma, list):
        violations.append('gamma must be "auto" or a list of {"name", "subgroup"} candidates')

    shift = ShiftOptions()
    raw_shift = doc.get("shift", {})
    if not isinstance(raw_shift, dict):
        violations.append("shift must be an object")
    else:
        shift = ShiftOptions(
            max_period=raw_shift.get("max_period", shift.max_period),
            horizon=raw_shift.get("horizon", shift.horizon),
            h_period=raw_shift.get("h_period", shift.h_period),
            windows=list(raw_shift.get("windows", shift.windows)),
            witness_word=list(raw_shift.get("witness_word", shift.witness_word)),
        )
        if shift.max_period < 1 or shift.h_period < 1:
            violations.append("shift periods must be ≥ 1")

    if violations:
        raise ConfigError(violations)
    return RunConfig(str(doc.get("name", "")), system, family, chain, H, depth, radius, cap,
                     levels, level, seed, gamma, shift, doc)


def bundled_config_names() -> list[str]:
    return sorted(p.name[:-5] for p in resources.files("almostnormal.configs").iterdir()
                  if p.name.endswith(".json"))


def bundled_config_text(name: str) -> str:
    return resources.files("almostnormal.configs").joinpath(f"{name}.json").read_text()
