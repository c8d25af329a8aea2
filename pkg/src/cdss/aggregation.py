"""Voting schemes, score calibration, and per-patient reliability.

Three ways to combine rule outputs into a raw score: plain mean, mean
weighted by each rule's global training accuracy, and mean weighted by the
patient-specific PRC. Reliability contrasts the mean PRC of the rules voting
positive against the rules voting negative and is independent of the scheme.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateWeightsError, MetricError
from .learners import fit_logistic_l2, _stable_sigmoid
from .personalization import CorrectnessModel, RuleAssessment, predict_prc

SCHEMES = ("non_weighted", "weighted", "personalized")


@dataclass(frozen=True)
class VoteBreakdown:
    positive_rules: tuple[int, ...]
    negative_rules: tuple[int, ...]
    mean_prc_positive: float | None
    mean_prc_negative: float | None

    @property
    def unanimous(self) -> bool:
        return not self.positive_rules or not self.negative_rules


def vote_breakdown(assessments: list[RuleAssessment]) -> VoteBreakdown:
    pos = tuple(a.rule_index for a in assessments if a.rule_output == 1)
    neg = tuple(a.rule_index for a in assessments if a.rule_output == 0)
    mp = (float(np.mean([a.prc for a in assessments if a.rule_output == 1]))
          if pos else None)
    mn = (float(np.mean([a.prc for a in assessments if a.rule_output == 0]))
          if neg else None)
    return VoteBreakdown(pos, neg, mp, mn)


def vote_non_weighted(assessments: list[RuleAssessment]) -> float:
    if not assessments:
        raise DegenerateWeightsError("no rules to vote")
    return float(np.mean([a.rule_output for a in assessments]))


def vote_weighted(assessments: list[RuleAssessment],
                  global_accuracies) -> float:
    if not assessments:
        raise DegenerateWeightsError("no rules to vote")
    acc = np.asarray(global_accuracies, dtype=np.float64)
    if len(acc) != len(assessments):
        raise DegenerateWeightsError("one accuracy per rule required")
    if np.any(acc < 0):
        raise DegenerateWeightsError("negative weights")
    total = acc.sum()
    if total <= 0:
        raise DegenerateWeightsError("all-zero weight vector")
    outputs = np.array([a.rule_output for a in assessments], dtype=np.float64)
    return float(outputs @ acc / total)


def vote_personalized(assessments: list[RuleAssessment]) -> float:
    if not assessments:
        raise DegenerateWeightsError("no rules to vote")
    weights = np.array([a.weight for a in assessments], dtype=np.float64)
    total = weights.sum()
    if total <= 0:
        raise DegenerateWeightsError("personalized weights sum to zero")
    outputs = np.array([a.rule_output for a in assessments], dtype=np.float64)
    return float(outputs @ weights / total)


def reliability(assessments: list[RuleAssessment]) -> float:
    """|mean PRC of positive-voting rules - mean PRC of negative-voting rules|.

    With a unanimous vote one side is empty; the absent side's implied
    correctness is taken as the complement, giving |2m - 1| for the mean PRC
    m of the voting side.
    """
    bd = vote_breakdown(assessments)
    if bd.unanimous:
        m = bd.mean_prc_positive if bd.mean_prc_positive is not None else bd.mean_prc_negative
        return abs(2.0 * m - 1.0)
    return abs(bd.mean_prc_positive - bd.mean_prc_negative)


@dataclass(frozen=True)
class Calibrator:
    """Platt-style logistic map from raw scores to probabilities."""

    slope: float
    offset: float

    def __post_init__(self):
        if self.slope <= 0:
            raise MetricError("calibrator slope must be positive")

    def apply(self, raw_score: float) -> float:
        return _stable_sigmoid(self.slope * raw_score + self.offset)


def fit_calibrator(raw_scores, labels) -> Calibrator:
    scores = np.asarray(raw_scores, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    classes = set(np.unique(y).tolist())
    if classes != {0.0, 1.0}:
        raise MetricError("calibration needs both classes present")
    base = float(y.mean())
    if np.ptp(scores) == 0.0:
        # no signal: map the constant score to the base rate
        offset = float(np.log(base / (1.0 - base)) - scores[0])
        return Calibrator(1.0, offset)
    model = fit_logistic_l2(scores.reshape(-1, 1), y, l2_strength=1e-10)
    slope = float(model.weights[0])
    if slope <= 0:
        # anti-correlated scores would invert the ranking; fall back to a
        # near-flat positive map so AUC is preserved
        return Calibrator(1e-12, float(np.log(base / (1.0 - base))))
    return Calibrator(slope, float(model.intercept))


def apply_calibrator(calibrator: Calibrator, raw_score: float) -> float:
    return calibrator.apply(raw_score)


@dataclass(frozen=True)
class PredictionResult:
    assessments: tuple[RuleAssessment, ...]
    raw_score: float
    calibrated_probability: float
    reliability: float
    unanimous: bool
    scheme: str

    def to_api_dict(self, rule_texts: list[str]) -> dict:
        return {
            "rules": [
                {
                    "text": rule_texts[a.rule_index],
                    "output": a.rule_output,
                    "prc": a.prc,
                    "weight": a.weight,
                }
                for a in self.assessments
            ],
            "raw_score": self.raw_score,
            "probability": self.calibrated_probability,
            "reliability": self.reliability,
            "unanimous": self.unanimous,
            "scheme": self.scheme,
        }


def score_assessments(assessments, scheme: str, global_accuracies=None) -> float:
    if scheme == "non_weighted":
        return vote_non_weighted(assessments)
    if scheme == "weighted":
        return vote_weighted(assessments, global_accuracies)
    if scheme == "personalized":
        return vote_personalized(assessments)
    raise MetricError(f"unknown scheme {scheme!r}")


def predict_patient(decision_set, models: list[CorrectnessModel], scaler,
                    calibrator: Calibrator | None, instance,
                    scheme: str = "personalized",
                    weight_transform: str = "identity") -> PredictionResult:
    """Full per-patient bundle: rule outputs, PRCs, outcome, reliability."""
    assessments = predict_prc(models, decision_set, scaler, instance,
                              weight_transform)
    raw = score_assessments(assessments, scheme, decision_set.global_accuracies)
    prob = calibrator.apply(raw) if calibrator is not None else raw
    rel = reliability(assessments)
    return PredictionResult(
        assessments=tuple(assessments),
        raw_score=raw,
        calibrated_probability=prob,
        reliability=rel,
        unanimous=vote_breakdown(assessments).unanimous,
        scheme=scheme,
    )
