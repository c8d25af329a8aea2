"""Two-way decision rules and their correctness on labeled data.

A rule is a conjunction of threshold conditions with both a THEN and an ELSE
class, so it is total: every instance gets exactly one of the two outputs.
Thresholds live in raw feature units so the rendered text stays readable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import DataError

COMPARATORS = (">", "<=", "==")


@dataclass(frozen=True, order=True)
class Condition:
    feature_index: int
    comparator: str
    threshold: float

    def __post_init__(self):
        if self.comparator not in COMPARATORS:
            raise ValueError(f"unknown comparator {self.comparator!r}")
        if not np.isfinite(self.threshold):
            raise ValueError("threshold must be finite")
        if self.feature_index < 0:
            raise ValueError("feature_index must be >= 0")

    def holds(self, X: np.ndarray) -> np.ndarray:
        """Vectorized truth value over rows of X (or a single vector)."""
        col = np.atleast_2d(X)[:, self.feature_index]
        if self.comparator == ">":
            return col > self.threshold
        if self.comparator == "<=":
            return col <= self.threshold
        return col == self.threshold

    def render(self, feature_names) -> str:
        name = feature_names[self.feature_index]
        t = self.threshold
        text = format(t, "g")
        if self.comparator == "==":
            return f"{name}={text}"
        return f"{name}{self.comparator}{text}"


@dataclass(frozen=True)
class Rule:
    conditions: tuple[Condition, ...]
    then_class: int
    else_class: int

    def __post_init__(self):
        if not self.conditions:
            raise ValueError("rule needs at least one condition")
        if self.then_class == self.else_class:
            raise ValueError("then_class must differ from else_class")
        if {self.then_class, self.else_class} != {0, 1}:
            raise ValueError("classes must be 0 and 1")

    @property
    def length(self) -> int:
        return len(self.conditions)

    def matches(self, X: np.ndarray) -> np.ndarray:
        """True where all conditions hold."""
        m = self.conditions[0].holds(X)
        for c in self.conditions[1:]:
            m &= c.holds(X)
        return m

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Rule output for each row of X."""
        m = self.matches(X)
        return np.where(m, self.then_class, self.else_class).astype(np.int64)

    def swapped(self) -> "Rule":
        return Rule(self.conditions, self.else_class, self.then_class)

    def render(self, feature_names) -> str:
        conds = " AND ".join(c.render(feature_names) for c in self.conditions)
        return f"IF {conds}, THEN {self.then_class}, ELSE {self.else_class}"


def evaluate_rule(rule: Rule, instance: np.ndarray) -> int:
    instance = np.asarray(instance, dtype=np.float64)
    if not np.all(np.isfinite(instance)):
        raise DataError("instance contains non-finite values")
    return int(rule.apply(instance.reshape(1, -1))[0])


def correctness_labels(rule: Rule, dataset: Dataset) -> np.ndarray:
    """1 where the rule's output equals the true label, else 0."""
    return (rule.apply(dataset.X) == dataset.y).astype(np.int64)


def rule_global_accuracy(rule: Rule, dataset: Dataset) -> float:
    if dataset.n_samples == 0:
        raise DataError("accuracy undefined on empty dataset")
    return float(correctness_labels(rule, dataset).mean())


@dataclass(frozen=True)
class DecisionSet:
    """Ordered rule collection with per-rule training accuracies.

    `flags` carries induction warnings (e.g. fewer rules than requested,
    or a rule at or below chance accuracy on its training fold).
    """

    rules: tuple[Rule, ...]
    global_accuracies: tuple[float, ...]
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.rules) != len(self.global_accuracies):
            raise ValueError("one accuracy per rule required")

    @property
    def k(self) -> int:
        return len(self.rules)

    def render(self, feature_names) -> list[str]:
        return [r.render(feature_names) for r in self.rules]
