"""Update rules and families, plus the JSON interchange format.

File format: {"name": str, "rules": [[[dx, dy], ...], ...]}.  Offsets are
integer pairs, nonzero, unique within a rule.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

Site = tuple[int, int]


class FamilyError(ValueError):
    pass


@dataclass(frozen=True)
class Rule:
    offsets: tuple[Site, ...]

    def __post_init__(self):
        if not self.offsets:
            raise FamilyError("rule must contain at least one offset")
        seen = set()
        for off in self.offsets:
            if len(off) != 2 or not all(isinstance(c, int) for c in off):
                raise FamilyError(f"offset {off!r} is not an integer pair")
            if off == (0, 0):
                raise FamilyError("rule offsets must be nonzero")
            if off in seen:
                raise FamilyError(f"duplicate offset {off} within a rule")
            seen.add(off)

    @classmethod
    def of(cls, *offsets) -> "Rule":
        return cls(tuple((int(x), int(y)) for x, y in offsets))

    def range(self) -> int:
        return max(max(abs(x), abs(y)) for x, y in self.offsets)

    def negated(self) -> "Rule":
        return Rule(tuple((-x, -y) for x, y in self.offsets))


@dataclass(frozen=True)
class UpdateFamily:
    name: str
    rules: tuple[Rule, ...]

    def __post_init__(self):
        if not self.rules:
            raise FamilyError("update family needs at least one rule")

    @classmethod
    def of(cls, name: str, *rules) -> "UpdateFamily":
        return cls(name, tuple(r if isinstance(r, Rule) else Rule.of(*r) for r in rules))

    def range(self) -> int:
        return max(r.range() for r in self.rules)

    def union_offsets(self) -> tuple[Site, ...]:
        seen: dict[Site, None] = {}
        for r in self.rules:
            for off in r.offsets:
                seen.setdefault(off)
        return tuple(seen)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "rules": [[[dx, dy] for dx, dy in r.offsets] for r in self.rules],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "UpdateFamily":
        if not isinstance(obj, dict):
            raise FamilyError("family document must be a JSON object")
        unknown = set(obj) - {"name", "rules"}
        if unknown:
            raise FamilyError(f"unknown fields in family document: {sorted(unknown)}")
        name = obj.get("name")
        rules = obj.get("rules")
        if not isinstance(name, str):
            raise FamilyError("family 'name' must be a string")
        if not isinstance(rules, list) or not rules:
            raise FamilyError("family 'rules' must be a non-empty list")
        parsed = []
        for r in rules:
            if not isinstance(r, list):
                raise FamilyError("each rule must be a list of offsets")
            offsets = []
            for off in r:
                if (
                    not isinstance(off, list)
                    or len(off) != 2
                    or not all(isinstance(c, int) and not isinstance(c, bool) for c in off)
                ):
                    raise FamilyError(f"offset {off!r} must be a pair of integers")
                offsets.append((off[0], off[1]))
            parsed.append(Rule(tuple(offsets)))
        return cls(name, tuple(parsed))


def load_family(path) -> UpdateFamily:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FamilyError(f"malformed family file {path}: {exc}") from exc
    return UpdateFamily.from_json(doc)


def dump_family(family: UpdateFamily, path=None) -> str:
    text = json.dumps(family.to_json(), indent=2)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text
