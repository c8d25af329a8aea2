"""Metrics and the cross-validated benchmark harness.

Per (repeat, fold): induce rules on the training fold, fit one correctness
model per rule, calibrate on inner out-of-fold scores, then score the test
fold under the three voting schemes and record per-instance reliability.
"""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, replace

import numpy as np

from .aggregation import (
    SCHEMES,
    fit_calibrator,
    reliability,
    score_assessments,
)
from .dataset import Dataset, SplitPlan, make_split_plan, standardize
from .errors import ConfigError, MetricError
from .induction import InductionConfig, induce_decision_set
from .personalization import predict_prc, train_correctness_models


def roc_auc(scores, labels) -> float:
    """Mann-Whitney AUC: probability a random positive outranks a random
    negative, ties counted one half."""
    scores = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels)
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        raise MetricError("AUC needs both classes present")
    order = np.argsort(scores, kind="stable")
    ranks = np.empty(len(scores), dtype=np.float64)
    sorted_scores = scores[order]
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0  # average 1-based rank
        i = j + 1
    rank_sum_pos = float(ranks[np.asarray(y) == 1].sum())
    return (rank_sum_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def balanced_accuracy(predicted, labels) -> float:
    pred = np.asarray(predicted)
    y = np.asarray(labels)
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        raise MetricError("balanced accuracy needs both classes present")
    sens = float(np.sum((pred == 1) & (y == 1))) / n_pos
    spec = float(np.sum((pred == 0) & (y == 0))) / n_neg
    return 0.5 * (sens + spec)


@dataclass(frozen=True)
class ReliabilityBin:
    low: float
    high: float
    rate_mean: float | None  # None when the bin is empty
    ci_low: float | None
    ci_high: float | None
    count: int


def reliability_curve(repeat_ids, reliabilities, corrects,
                      n_bins: int = 10) -> list[ReliabilityBin]:
    """Equal-width bins on [0,1]; per bin the misclassification rate is
    computed per repeat, then averaged with a normal-approximation 95% CI
    across repeats."""
    rel = np.asarray(reliabilities, dtype=np.float64)
    if len(rel) == 0:
        raise MetricError("no records for reliability curve")
    reps = np.asarray(repeat_ids)
    corr = np.asarray(corrects).astype(bool)
    bins = np.minimum((rel * n_bins).astype(int), n_bins - 1)
    out = []
    for b in range(n_bins):
        in_bin = bins == b
        count = int(in_bin.sum())
        if count == 0:
            out.append(ReliabilityBin(b / n_bins, (b + 1) / n_bins,
                                      None, None, None, 0))
            continue
        rates = []
        for r in np.unique(reps):
            sel = in_bin & (reps == r)
            if sel.any():
                rates.append(1.0 - float(corr[sel].mean()))
        rates = np.asarray(rates)
        mean = float(rates.mean())
        if len(rates) > 1:
            half = 1.96 * float(rates.std(ddof=1)) / np.sqrt(len(rates))
        else:
            half = 0.0
        out.append(ReliabilityBin(b / n_bins, (b + 1) / n_bins,
                                  mean, max(mean - half, 0.0),
                                  min(mean + half, 1.0), count))
    return out


@dataclass(frozen=True)
class ExperimentReport:
    dataset_name: str
    per_scheme_auc: dict  # scheme -> {"mean": float, "std": float}
    balanced_accuracy: dict  # {"mean": float, "std": float} (personalized)
    reliability_bins: tuple[ReliabilityBin, ...]
    fold_rows: tuple  # (repeat, fold, scheme, auc)
    failed_folds: tuple  # (repeat, fold, reason)
    config_snapshot: dict
    seed: int

    def to_json_dict(self) -> dict:
        return {
            "dataset": self.dataset_name,
            "per_scheme_auc": self.per_scheme_auc,
            "balanced_accuracy": self.balanced_accuracy,
            "reliability_curve": [
                {
                    "bin_low": b.low, "bin_high": b.high,
                    "rate_mean": b.rate_mean,
                    "ci_low": b.ci_low, "ci_high": b.ci_high,
                    "count": b.count,
                }
                for b in self.reliability_bins
            ],
            "failed_folds": [list(f) for f in self.failed_folds],
            "config_snapshot": self.config_snapshot,
            "seed": self.seed,
        }

    def auc_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["dataset", "scheme", "repeat", "fold", "auc"])
        for rep, fold, scheme, auc in self.fold_rows:
            w.writerow([self.dataset_name, scheme, rep, fold, repr(auc)])
        return buf.getvalue()

    def curve_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["dataset", "bin_low", "bin_high", "rate_mean",
                    "ci_low", "ci_high", "count"])
        for b in self.reliability_bins:
            w.writerow([
                self.dataset_name, b.low, b.high,
                "" if b.rate_mean is None else repr(b.rate_mean),
                "" if b.ci_low is None else repr(b.ci_low),
                "" if b.ci_high is None else repr(b.ci_high),
                b.count,
            ])
        return buf.getvalue()

    def summary_lines(self) -> list[str]:
        lines = [f"dataset: {self.dataset_name}"]
        for scheme in SCHEMES:
            s = self.per_scheme_auc[scheme]
            lines.append(f"  AUC {scheme:>13}: {s['mean']:.3f} +/- {s['std']:.3f}")
        ba = self.balanced_accuracy
        lines.append(f"  BA   personalized: {ba['mean']:.3f} +/- {ba['std']:.3f}")
        if self.failed_folds:
            lines.append(f"  failed folds: {len(self.failed_folds)}")
        return lines


def _fold_seed(seed: int, repeat: int, fold: int) -> int:
    return seed * 1_000_003 + repeat * 1009 + fold


def _out_of_fold_scores(train: Dataset, decision_set, seed: int):
    """Personalized raw scores for the training fold, computed with inner
    5-fold refits of the correctness models so calibration never sees its
    own training scores."""
    try:
        inner = make_split_plan(train, repeats=1, folds=5, seed=seed)
    except ConfigError:
        inner = None
    scores = np.empty(train.n_samples)
    if inner is None:
        scaler, _ = standardize(train)
        models = train_correctness_models(decision_set, train, scaler)
        for i in range(train.n_samples):
            a = predict_prc(models, decision_set, scaler, train.X[i])
            scores[i] = score_assessments(a, "personalized",
                                          decision_set.global_accuracies)
        return scores, train.y
    for _, _, tr_idx, te_idx in inner:
        inner_train = train.subset(tr_idx)
        scaler, _ = standardize(inner_train)
        models = train_correctness_models(decision_set, inner_train, scaler)
        for i in te_idx:
            a = predict_prc(models, decision_set, scaler, train.X[i])
            scores[i] = score_assessments(a, "personalized",
                                          decision_set.global_accuracies)
    return scores, train.y


def run_fold(train: Dataset, test: Dataset, config: InductionConfig):
    """Train the full pipeline on one fold and score the test fold.

    Returns (auc per scheme, balanced accuracy, per-instance records)."""
    decision_set = induce_decision_set(train, config)
    scaler, _ = standardize(train)
    models = train_correctness_models(decision_set, train, scaler)
    oof_scores, oof_labels = _out_of_fold_scores(train, decision_set,
                                                 config.seed + 1)
    calibrator = fit_calibrator(oof_scores, oof_labels)

    raw = {s: np.empty(test.n_samples) for s in SCHEMES}
    rels = np.empty(test.n_samples)
    for i in range(test.n_samples):
        assessments = predict_prc(models, decision_set, scaler, test.X[i])
        for s in SCHEMES:
            raw[s][i] = score_assessments(assessments, s,
                                          decision_set.global_accuracies)
        rels[i] = reliability(assessments)

    aucs = {s: roc_auc(raw[s], test.y) for s in SCHEMES}
    probs = np.array([calibrator.apply(v) for v in raw["personalized"]])
    predicted = (probs >= 0.5).astype(int)
    ba = balanced_accuracy(predicted, test.y)
    correct = predicted == test.y
    return aucs, ba, rels, correct


def run_experiment(dataset: Dataset, plan: SplitPlan, config: InductionConfig,
                   dataset_name: str = "dataset",
                   n_bins: int = 10) -> ExperimentReport:
    fold_rows = []
    failed = []
    ba_values = []
    rec_reps, rec_rels, rec_corr = [], [], []
    per_scheme: dict[str, list[float]] = {s: [] for s in SCHEMES}
    for rep, fold, train_idx, test_idx in plan:
        if np.intersect1d(train_idx, test_idx).size:
            raise ConfigError("train/test overlap in split plan")
        train = dataset.subset(train_idx)
        test = dataset.subset(test_idx)
        fold_config = replace(config, seed=_fold_seed(config.seed, rep, fold))
        try:
            aucs, ba, rels, correct = run_fold(train, test, fold_config)
        except (ConfigError, MetricError) as exc:
            failed.append((rep, fold, str(exc)))
            continue
        for s in SCHEMES:
            per_scheme[s].append(aucs[s])
            fold_rows.append((rep, fold, s, aucs[s]))
        ba_values.append(ba)
        rec_reps.extend([rep] * test.n_samples)
        rec_rels.extend(rels.tolist())
        rec_corr.extend(correct.tolist())

    if not ba_values:
        raise ConfigError("every fold failed; no results to aggregate")

    def stats(values):
        arr = np.asarray(values)
        return {"mean": float(arr.mean()),
                "std": float(arr.std(ddof=1)) if len(arr) > 1 else 0.0}

    return ExperimentReport(
        dataset_name=dataset_name,
        per_scheme_auc={s: stats(per_scheme[s]) for s in SCHEMES},
        balanced_accuracy=stats(ba_values),
        reliability_bins=tuple(reliability_curve(rec_reps, rec_rels, rec_corr,
                                                 n_bins)),
        fold_rows=tuple(fold_rows),
        failed_folds=tuple(failed),
        config_snapshot=asdict(config),
        seed=config.seed,
    )
