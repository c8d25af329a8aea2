"""Data-driven rule induction.

Pipeline: grow a bootstrap ensemble of shallow Gini trees, turn every
root-to-leaf path into a candidate conjunction, orient each conjunction into
a two-way rule by the majority class on each side, then pick a small subset
with an L1-regularized logistic fit over the candidate-satisfaction matrix.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset
from .errors import ConfigError
from .learners import fit_logistic_l1, l1_critical_strength
from .rules import Condition, DecisionSet, Rule, rule_global_accuracy


@dataclass(frozen=True)
class InductionConfig:
    n_trees: int = 200
    max_depth: int = 2
    min_support_frac: float = 0.05
    min_support_abs: int = 10
    k_target: int = 10
    l_max: int = 3
    n_penalties: int = 50
    seed: int = 0

    @classmethod
    def from_json(cls, doc: str | dict) -> "InductionConfig":
        if isinstance(doc, str):
            doc = json.loads(doc)
        known = {f for f in cls.__dataclass_fields__}
        bad = set(doc) - known
        if bad:
            raise ConfigError(f"unknown induction config keys: {sorted(bad)}")
        return cls(**doc)


@dataclass
class TreeNode:
    feature_index: int = -1
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    class_counts: tuple[int, int] | None = None  # leaves only

    @property
    def is_leaf(self) -> bool:
        return self.class_counts is not None


def _best_split(X, y, feature_ids):
    """Greedy Gini split over midpoint thresholds; returns
    (feature, threshold) or None if no impurity reduction exists."""
    n = len(y)
    n_pos = int(y.sum())
    best_gain = 0.0
    best = None
    parent = 1.0 - ((n_pos / n) ** 2 + ((n - n_pos) / n) ** 2)
    for f in feature_ids:
        col = X[:, f]
        order = np.argsort(col, kind="stable")
        cs = col[order]
        ys = y[order]
        cum_pos = np.cumsum(ys)
        # split points between distinct adjacent values
        distinct = np.flatnonzero(cs[1:] > cs[:-1])
        if len(distinct) == 0:
            continue
        nl = distinct + 1
        nr = n - nl
        pl = cum_pos[distinct]
        pr = n_pos - pl
        gini_l = 1.0 - (pl / nl) ** 2 - ((nl - pl) / nl) ** 2
        gini_r = 1.0 - (pr / nr) ** 2 - ((nr - pr) / nr) ** 2
        gains = parent - (nl * gini_l + nr * gini_r) / n
        k = int(np.argmax(gains))
        if gains[k] > best_gain + 1e-15:
            best_gain = float(gains[k])
            thr = 0.5 * (cs[distinct[k]] + cs[distinct[k] + 1])
            best = (int(f), float(thr))
    return best


def grow_tree(dataset: Dataset, max_depth: int, rng: np.random.Generator,
              feature_ids: np.ndarray | None = None,
              bootstrap: bool = True) -> TreeNode:
    """Greedy Gini tree on a bootstrap resample drawn from `rng`."""
    if max_depth < 1:
        raise ConfigError("max_depth must be >= 1")
    if dataset.n_samples == 0:
        raise ConfigError("cannot grow a tree on an empty dataset")
    if bootstrap:
        idx = rng.integers(0, dataset.n_samples, size=dataset.n_samples)
        X, y = dataset.X[idx], dataset.y[idx]
    else:
        X, y = dataset.X, dataset.y
    if feature_ids is None:
        feature_ids = np.arange(dataset.n_features)

    def build(Xs, ys, depth):
        n_pos = int(ys.sum())
        counts = (len(ys) - n_pos, n_pos)
        if depth >= max_depth or n_pos == 0 or n_pos == len(ys):
            return TreeNode(class_counts=counts)
        split = _best_split(Xs, ys, feature_ids)
        if split is None:
            return TreeNode(class_counts=counts)
        f, thr = split
        mask = Xs[:, f] <= thr
        return TreeNode(
            feature_index=f,
            threshold=thr,
            left=build(Xs[mask], ys[mask], depth + 1),
            right=build(Xs[~mask], ys[~mask], depth + 1),
        )

    return build(X, y, 0)


def grow_ensemble(dataset: Dataset, config: InductionConfig) -> list[TreeNode]:
    """Bootstrap ensemble; each tree sees ceil(sqrt(D)) features chosen from
    its own pre-derived RNG substream, so results do not depend on scheduling."""
    n_sub = int(np.ceil(np.sqrt(dataset.n_features)))
    root = np.random.SeedSequence([config.seed, 7])
    streams = root.spawn(config.n_trees)
    trees = []
    for t in range(config.n_trees):
        rng = np.random.default_rng(streams[t])
        feats = rng.choice(dataset.n_features, size=n_sub, replace=False)
        trees.append(grow_tree(dataset, config.max_depth, rng, np.sort(feats)))
    return trees


@dataclass(frozen=True)
class CandidateRule:
    rule: Rule
    support: int
    source: tuple[int, int]  # (tree index, path index)

    @property
    def condition_key(self):
        return tuple((c.feature_index, c.comparator, c.threshold)
                     for c in self.rule.conditions)


def _canonical_conditions(conds: list[Condition]) -> tuple[Condition, ...]:
    """Merge redundant bounds per feature and order deterministically.

    A lone `x <= t` condition is rewritten to `x > t`: the two are complements,
    so after orientation they describe the same two-way rule.
    """
    upper: dict[int, float] = {}  # feature -> min threshold for <=
    lower: dict[int, float] = {}  # feature -> max threshold for >
    eq: dict[int, float] = {}
    for c in conds:
        if c.comparator == "<=":
            upper[c.feature_index] = min(upper.get(c.feature_index, np.inf), c.threshold)
        elif c.comparator == ">":
            lower[c.feature_index] = max(lower.get(c.feature_index, -np.inf), c.threshold)
        else:
            eq[c.feature_index] = c.threshold
    merged = (
        [Condition(f, ">", t) for f, t in lower.items()]
        + [Condition(f, "<=", t) for f, t in upper.items()]
        + [Condition(f, "==", t) for f, t in eq.items()]
    )
    if len(merged) == 1 and merged[0].comparator == "<=":
        c = merged[0]
        merged = [Condition(c.feature_index, ">", c.threshold)]
    return tuple(sorted(merged))


def orient(conditions, dataset: Dataset) -> Rule | None:
    """Assign THEN/ELSE classes by the majority true label on each side of
    the condition. Returns None (reject) on empty sides, ties, or when both
    sides share a majority class."""
    conditions = tuple(conditions)
    if not conditions:
        raise ConfigError("orient requires at least one condition")
    probe = Rule(conditions, 1, 0)
    mask = probe.matches(dataset.X)
    n_in = int(mask.sum())
    if n_in == 0 or n_in == dataset.n_samples:
        return None
    then_class = _majority(dataset.y[mask])
    else_class = _majority(dataset.y[~mask])
    if then_class is None or else_class is None or then_class == else_class:
        return None
    return Rule(conditions, then_class, else_class)


def _majority(labels: np.ndarray) -> int | None:
    pos = int(labels.sum())
    neg = len(labels) - pos
    if pos == neg:
        return None
    return 1 if pos > neg else 0


def _walk_paths(node: TreeNode, prefix: list[Condition]):
    if node.is_leaf:
        yield list(prefix)
        return
    left = Condition(node.feature_index, "<=", node.threshold)
    right = Condition(node.feature_index, ">", node.threshold)
    yield from _walk_paths(node.left, prefix + [left])
    yield from _walk_paths(node.right, prefix + [right])


def extract_candidates(ensemble, dataset: Dataset,
                       config: InductionConfig) -> list[CandidateRule]:
    """Turn every root-to-leaf path into an oriented, deduplicated candidate."""
    if not ensemble:
        raise ConfigError("ensemble must be nonempty")
    min_support = max(config.min_support_abs,
                      int(np.ceil(config.min_support_frac * dataset.n_samples)))
    seen: dict[tuple, CandidateRule] = {}
    for t, tree in enumerate(ensemble):
        for p, path in enumerate(_walk_paths(tree, [])):
            if not path:
                continue  # single-leaf tree
            conds = _canonical_conditions(path)
            if len(conds) > config.l_max:
                continue
            key = tuple((c.feature_index, c.comparator, c.threshold) for c in conds)
            if key in seen:
                continue
            rule = orient(conds, dataset)
            if rule is None:
                continue
            support = int(rule.matches(dataset.X).sum())
            if support < min_support:
                continue
            seen[key] = CandidateRule(rule, support, (t, p))
    return [seen[k] for k in sorted(seen)]


def select_rules(candidates, dataset: Dataset, k_target: int,
                 n_penalties: int = 50) -> DecisionSet:
    """L1 subset selection over the candidate-satisfaction matrix.

    Sweeps penalties from just below the all-zero critical value downward and
    stops at the largest penalty activating at least `k_target` candidates;
    ranks by |coefficient| with deterministic tie-breaks.
    """
    if not candidates:
        raise ConfigError("no candidates to select from")
    if k_target < 1:
        raise ConfigError("k_target must be >= 1")
    Z = np.stack([c.rule.matches(dataset.X).astype(np.float64) for c in candidates],
                 axis=1)
    y = dataset.y.astype(np.float64)
    lam_max = l1_critical_strength(Z, y)
    if lam_max <= 0:
        lam_max = 1e-3
    penalties = np.geomspace(lam_max * 0.999, lam_max * 1e-3, n_penalties)

    flags: list[str] = []
    chosen_weights = None
    warm = (np.zeros(Z.shape[1]), 0.0)
    trace_sizes = []
    for lam in penalties:
        model = fit_logistic_l1(Z, y, float(lam), tol=1e-6, max_iter=500,
                                warm_start=warm)
        warm = (model.weights, model.intercept)
        active = model.active_set
        trace_sizes.append(len(active))
        if len(active) >= k_target:
            chosen_weights = model.weights
            break
    if chosen_weights is None:
        chosen_weights = warm[0]
        if int(np.count_nonzero(chosen_weights)) < k_target:
            flags.append(
                f"only {int(np.count_nonzero(chosen_weights))} candidates ever "
                f"active; requested {k_target}"
            )

    order = sorted(
        np.flatnonzero(chosen_weights != 0.0).tolist(),
        key=lambda j: (
            -abs(chosen_weights[j]),
            -candidates[j].support,
            candidates[j].rule.length,
            candidates[j].condition_key,
        ),
    )
    picked = order[:k_target]
    rules = tuple(candidates[j].rule for j in picked)
    accs = tuple(rule_global_accuracy(r, dataset) for r in rules)
    for i, a in enumerate(accs):
        if a <= 0.5:
            flags.append(f"rule {i} at or below chance on training fold ({a:.3f})")
    return DecisionSet(rules, accs, tuple(flags))


def induce_decision_set(dataset: Dataset, config: InductionConfig) -> DecisionSet:
    """Full recipe: ensemble -> candidates -> L1 subset selection."""
    ensemble = grow_ensemble(dataset, config)
    candidates = extract_candidates(ensemble, dataset, config)
    if not candidates:
        raise ConfigError("rule extraction produced no supported candidates")
    return select_rules(candidates, dataset, config.k_target, config.n_penalties)
