"""Analyst-defined protection rules over the sensitivity table.

A rule protects a set of nodes from dropping (or climbing) by more than a
threshold; a candidate perturbation survives filtering only if it
violates no rule. Thresholds are strict: "no decrease by 0" blocks every
drop. Removing a protected node itself always violates the rule that
protects it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Mapping

from .errors import IncompleteCacheError
from .sensitivity import DeltaVector, SensitivityTable


class RuleDirection(str, Enum):
    NO_DECREASE = "no_decrease"
    NO_INCREASE = "no_increase"


class ThresholdKind(str, Enum):
    ABSOLUTE_POSITIONS = "abs"
    PERCENT_OF_N = "pct"


@dataclass(frozen=True)
class ConstraintRule:
    id: str
    protected: frozenset[str]
    direction: RuleDirection
    threshold: float
    kind: ThresholdKind = ThresholdKind.ABSOLUTE_POSITIONS

    def __post_init__(self):
        object.__setattr__(self, "protected", frozenset(self.protected))
        object.__setattr__(self, "direction", RuleDirection(self.direction))
        object.__setattr__(self, "kind", ThresholdKind(self.kind))
        if not self.protected:
            raise ValueError("rule must protect at least one node")
        if self.threshold < 0:
            raise ValueError("threshold must be nonnegative")
        if self.kind is ThresholdKind.PERCENT_OF_N and self.threshold > 100:
            raise ValueError("percent threshold must be in [0, 100]")

    def effective_threshold(self, n: int) -> float:
        """Allowed rank movement against a population of n surviving nodes."""
        if self.kind is ThresholdKind.PERCENT_OF_N:
            return math.ceil(self.threshold / 100.0 * n)
        return self.threshold

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "protected": sorted(self.protected),
            "direction": self.direction.value,
            "threshold": self.threshold,
            "kind": self.kind.value,
        }

    @staticmethod
    def from_dict(d: Mapping) -> "ConstraintRule":
        return ConstraintRule(
            id=str(d["id"]),
            protected=frozenset(d["protected"]),
            direction=RuleDirection(d["direction"]),
            threshold=float(d["threshold"]),
            kind=ThresholdKind(d.get("kind", "abs")),
        )


@dataclass(frozen=True)
class RuleSet:
    """Ordered conjunction of rules with unique ids."""

    rules: tuple[ConstraintRule, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        ids = [r.id for r in self.rules]
        if len(set(ids)) != len(ids):
            raise ValueError("rule ids must be unique")

    def __len__(self):
        return len(self.rules)

    def to_list(self) -> list[dict]:
        return [r.to_dict() for r in self.rules]

    @staticmethod
    def from_list(items: list) -> "RuleSet":
        return RuleSet(tuple(ConstraintRule.from_dict(d) for d in items))


def violates(rule: ConstraintRule, d: DeltaVector, n: int) -> bool:
    """Whether the perturbation behind `d` breaks the rule.

    `n` is the surviving-node count the percent threshold is taken
    against. Removing a protected node is itself a violation.
    """
    if d.removed in rule.protected:
        return True
    limit = rule.effective_threshold(n)
    for v in rule.protected:
        delta = d.deltas.get(v)
        if delta is None:
            continue
        if rule.direction is RuleDirection.NO_DECREASE and -delta > limit:
            return True
        if rule.direction is RuleDirection.NO_INCREASE and delta > limit:
            return True
    return False


DeltaSource = Mapping[str, DeltaVector]


def filter_table(
    table: SensitivityTable,
    rules: RuleSet,
    delta_lookup: DeltaSource | Callable[[str], DeltaVector | None],
) -> SensitivityTable:
    """Retain exactly the perturbations that violate no rule.

    `delta_lookup` supplies the cached DeltaVector per candidate node;
    a missing vector aborts with IncompleteCacheError. Record order is
    preserved, and the result is independent of rule order.
    """
    if not rules.rules:
        return table

    def lookup(node: str) -> DeltaVector:
        d = delta_lookup(node) if callable(delta_lookup) else delta_lookup.get(node)
        if d is None:
            raise IncompleteCacheError(node)
        return d

    retained = []
    for record in table.records:
        d = lookup(record.node)
        n = len(d.deltas)
        if not any(violates(rule, d, n) for rule in rules.rules):
            retained.append(record)
    return SensitivityTable(retained, table.fingerprint)
