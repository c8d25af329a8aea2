"""Per-rule correctness predictors.

For every rule in the decision set, the training fold is relabeled with that
rule's correctness indicator and a light-ridge logistic model is fit on the
standardized feature matrix. At inference each rule yields its raw-feature
output plus a predicted probability of being correct (PRC) for the patient.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, Scaler
from .errors import DataError
from .learners import LinearModel, fit_logistic_l2, predict_proba
from .rules import DecisionSet, Rule, correctness_labels, evaluate_rule

WEIGHT_TRANSFORMS = ("identity", "square", "clip_half")


@dataclass(frozen=True)
class CorrectnessModel:
    rule_index: int
    model: LinearModel | None  # None for degenerate (single-class) folds
    constant_prc: float | None
    train_correctness_rate: float

    @property
    def degenerate(self) -> bool:
        return self.model is None

    def prc(self, x_std: np.ndarray) -> float:
        if self.model is None:
            return self.constant_prc
        return predict_proba(self.model, x_std)


@dataclass(frozen=True)
class RuleAssessment:
    rule_index: int
    rule_output: int
    prc: float
    weight: float


def build_correctness_dataset(rule: Rule, dataset: Dataset,
                              scaler: Scaler) -> tuple[np.ndarray, np.ndarray]:
    """Standardized features paired with the rule's correctness labels."""
    return scaler.transform(dataset.X), correctness_labels(rule, dataset)


def train_correctness_models(decision_set: DecisionSet, dataset: Dataset,
                             scaler: Scaler,
                             l2_strength: float | None = None) -> list[CorrectnessModel]:
    """One predictor per rule. A rule that is right (or wrong) on the whole
    fold gets a constant-PRC model at the Laplace-clipped rate instead of a
    logistic fit on a single-class label vector."""
    n = dataset.n_samples
    if l2_strength is None:
        l2_strength = 1.0 / n
    models = []
    for i, rule in enumerate(decision_set.rules):
        X_std, c = build_correctness_dataset(rule, dataset, scaler)
        rate = float(c.mean())
        if rate == 0.0 or rate == 1.0:
            clipped = min(max(rate, 1.0 / (n + 2)), (n + 1.0) / (n + 2))
            models.append(CorrectnessModel(i, None, clipped, rate))
        else:
            m = fit_logistic_l2(X_std, c.astype(np.float64), l2_strength)
            models.append(CorrectnessModel(i, m, None, rate))
    return models


def weight_from_prc(prc: float, transform: str = "identity") -> float:
    if transform == "identity":
        return prc
    if transform == "square":
        return prc * prc
    if transform == "clip_half":
        return max(prc - 0.5, 0.0)
    raise ValueError(f"unknown weight transform {transform!r}")


def predict_prc(models: list[CorrectnessModel], decision_set: DecisionSet,
                scaler: Scaler, instance: np.ndarray,
                weight_transform: str = "identity") -> list[RuleAssessment]:
    """Assess every rule for one patient: output on raw features, PRC on
    standardized features, weight derived from the PRC."""
    instance = np.asarray(instance, dtype=np.float64)
    if len(models) != decision_set.k:
        raise DataError("one correctness model per rule required")
    x_std = scaler.transform(instance.reshape(1, -1))[0]
    out = []
    for i, rule in enumerate(decision_set.rules):
        output = evaluate_rule(rule, instance)
        prc = models[i].prc(x_std)
        out.append(RuleAssessment(i, output, prc, weight_from_prc(prc, weight_transform)))
    return out
