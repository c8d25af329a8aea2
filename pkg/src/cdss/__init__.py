"""Personalized decision-set classifier for binary tabular problems.

Induces a small set of two-way decision rules, learns a per-rule correctness
predictor, combines rule outputs by personalized weighted voting, and reports
a per-patient reliability estimate alongside the calibrated probability.
"""

from .aggregation import (
    Calibrator,
    PredictionResult,
    fit_calibrator,
    predict_patient,
    reliability,
    vote_non_weighted,
    vote_personalized,
    vote_weighted,
)
from .dataset import Dataset, Scaler, Schema, SplitPlan, load_csv, make_split_plan, standardize
from .evaluation import ExperimentReport, balanced_accuracy, roc_auc, run_experiment
from .induction import InductionConfig, induce_decision_set
from .personalization import CorrectnessModel, RuleAssessment, predict_prc, train_correctness_models
from .rules import Condition, DecisionSet, Rule, correctness_labels, evaluate_rule, rule_global_accuracy
from .service import ModelBundle, deserialize_bundle, serialize_bundle

__version__ = "0.1.0"

__all__ = [
    "Calibrator", "Condition", "CorrectnessModel", "Dataset", "DecisionSet",
    "ExperimentReport", "InductionConfig", "ModelBundle", "PredictionResult",
    "Rule", "RuleAssessment", "Scaler", "Schema", "SplitPlan",
    "balanced_accuracy", "correctness_labels", "deserialize_bundle",
    "evaluate_rule", "fit_calibrator", "induce_decision_set", "load_csv",
    "make_split_plan", "predict_patient", "predict_prc", "reliability",
    "roc_auc", "rule_global_accuracy", "run_experiment", "serialize_bundle",
    "standardize", "train_correctness_models", "vote_non_weighted",
    "vote_personalized", "vote_weighted",
]
