import numpy as np
import pytest

from cdss.dataset import Dataset
from cdss.errors import ConfigError
from cdss.induction import (
    CandidateRule,
    InductionConfig,
    extract_candidates,
    grow_ensemble,
    grow_tree,
    induce_decision_set,
    orient,
    select_rules,
    _canonical_conditions,
    _walk_paths,
)
from cdss.learners import fit_logistic_l1, l1_critical_strength
from cdss.rules import Condition, Rule, rule_global_accuracy

from conftest import random_dataset


def _ds(X, y, names=None):
    X = np.asarray(X, dtype=float)
    names = names or tuple(f"f{i}" for i in range(X.shape[1]))
    return Dataset(X, np.asarray(y), tuple(names))


def test_separable_1d_split():
    X = np.array([[1.0], [2.0], [4.0], [7.0], [8.0]])
    y = np.array([0, 0, 0, 1, 1])
    tree = grow_tree(_ds(X, y), max_depth=1, rng=np.random.default_rng(0),
                     bootstrap=False)
    assert not tree.is_leaf
    assert 4.0 < tree.threshold <= 7.0
    assert tree.left.is_leaf and tree.right.is_leaf


def test_single_class_single_leaf():
    X = np.array([[1.0], [2.0], [3.0]])
    tree = grow_tree(_ds(X, [1, 1, 1]), 3, np.random.default_rng(0),
                     bootstrap=False)
    assert tree.is_leaf
    assert tree.class_counts == (0, 3)


def test_and_depth2_perfect():
    # greedy splits find an AND concept exactly at depth 2
    X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]] * 10)
    y = np.array([0, 0, 0, 1] * 10)
    ds = _ds(X, y)
    tree = grow_tree(ds, 2, np.random.default_rng(0), bootstrap=False)

    def classify(node, x):
        while not node.is_leaf:
            node = node.left if x[node.feature_index] <= node.threshold else node.right
        return int(node.class_counts[1] > node.class_counts[0])

    # greedy depth-2 separates all four quadrants
    assert all(classify(tree, x) == yi for x, yi in zip(X, y))


def test_depth1_tree_dedupes_to_one_candidate():
    rng = np.random.default_rng(5)
    X = np.concatenate([rng.normal(-2, 1, 60), rng.normal(2, 1, 60)]).reshape(-1, 1)
    y = np.array([0] * 60 + [1] * 60)
    ds = _ds(X, y)
    tree = grow_tree(ds, 1, np.random.default_rng(0), bootstrap=False)
    cfg = InductionConfig(min_support_abs=1, min_support_frac=0.0)
    cands = extract_candidates([tree], ds, cfg)
    assert len(cands) == 1  # the two complementary paths are one two-way rule
    assert cands[0].rule.conditions[0].comparator == ">"


def test_path_count_bound():
    rng = np.random.default_rng(6)
    ds = random_dataset(rng, n=200, d=6)
    cfg = InductionConfig(n_trees=50, seed=3, min_support_abs=1,
                          min_support_frac=0.0)
    ensemble = grow_ensemble(ds, cfg)
    paths = sum(len(list(_walk_paths(t, []))) for t in ensemble)
    assert paths <= 50 * 4
    cands = extract_candidates(ensemble, ds, cfg)
    assert len(cands) <= paths


def test_dedup_matches_pairwise_oracle():
    rng = np.random.default_rng(7)
    ds = random_dataset(rng, n=150, d=4)
    cfg = InductionConfig(n_trees=40, seed=1, min_support_abs=1,
                          min_support_frac=0.0)
    cands = extract_candidates(grow_ensemble(ds, cfg), ds, cfg)
    keys = [c.condition_key for c in cands]
    for i in range(len(keys)):
        for j in range(i + 1, len(keys)):
            assert keys[i] != keys[j]


def test_canonical_merges_redundant_bounds():
    conds = [Condition(0, ">", 1.0), Condition(0, ">", 3.0),
             Condition(1, "<=", 5.0), Condition(1, "<=", 2.0)]
    merged = _canonical_conditions(conds)
    assert merged == (Condition(0, ">", 3.0), Condition(1, "<=", 2.0))


def test_orient_forced_majorities():
    X = np.array([[1.0], [1.0], [0.0], [0.0], [0.0]])
    y = np.array([1, 1, 0, 0, 1])
    rule = orient([Condition(0, ">", 0.5)], _ds(X, y))
    assert rule.then_class == 1 and rule.else_class == 0


def test_orient_rejects_same_majority():
    X = np.array([[1.0], [1.0], [0.0], [0.0], [0.0]])
    y = np.array([1, 1, 1, 1, 0])
    assert orient([Condition(0, ">", 0.5)], _ds(X, y)) is None


def test_orient_rejects_tie():
    X = np.array([[1.0], [1.0], [1.0], [1.0], [0.0], [0.0]])
    y = np.array([1, 1, 0, 0, 0, 1])
    assert orient([Condition(0, ">", 0.5)], _ds(X, y)) is None


def test_orient_rejects_empty_side():
    X = np.array([[1.0], [2.0]])
    y = np.array([0, 1])
    assert orient([Condition(0, ">", 0.0)], _ds(X, y)) is None


def test_select_picks_predictive_candidate():
    rng = np.random.default_rng(8)
    n = 200
    X = rng.normal(size=(n, 3))
    y = (X[:, 1] > 0).astype(np.int64)
    ds = _ds(X, y)
    conds = [
        [Condition(1, ">", 0.0)],       # perfect
        [Condition(0, ">", 0.3)],       # noise
        [Condition(2, "<=", 0.1)],      # noise
    ]
    cands = []
    for i, c in enumerate(conds):
        rule = orient(c, ds)
        assert rule is not None
        cands.append(CandidateRule(rule, int(rule.matches(ds.X).sum()), (0, i)))
    chosen = select_rules(cands, ds, k_target=1)
    # exhaustive single-rule accuracy check agrees
    best = max(cands, key=lambda c: rule_global_accuracy(c.rule, ds))
    assert chosen.rules[0] == best.rule
    assert chosen.global_accuracies[0] == 1.0


def test_infinite_penalty_deactivates_all():
    rng = np.random.default_rng(9)
    ds = random_dataset(rng, n=100, d=3)
    Z = rng.integers(0, 2, size=(100, 6)).astype(float)
    lam = l1_critical_strength(Z, ds.y.astype(float))
    m = fit_logistic_l1(Z, ds.y.astype(float), lam * 10)
    assert np.all(m.weights == 0.0)


def test_sweep_active_set_grows_overall():
    rng = np.random.default_rng(10)
    ds = random_dataset(rng, n=250, d=5)
    cfg = InductionConfig(n_trees=30, seed=2, min_support_abs=5,
                          min_support_frac=0.0)
    cands = extract_candidates(grow_ensemble(ds, cfg), ds, cfg)
    Z = np.stack([c.rule.matches(ds.X).astype(float) for c in cands], axis=1)
    y = ds.y.astype(float)
    lam_max = l1_critical_strength(Z, y)
    sizes = []
    warm = (np.zeros(Z.shape[1]), 0.0)
    for lam in np.geomspace(lam_max * 0.999, lam_max * 1e-3, 12):
        m = fit_logistic_l1(Z, y, float(lam), tol=1e-6, max_iter=500, warm_start=warm)
        warm = (m.weights, m.intercept)
        sizes.append(len(m.active_set))
    # sets can churn along the path, but the trend is from empty to dense
    assert sizes[0] <= 1
    assert sizes[-1] >= max(sizes[:3])
    assert sizes[-1] >= 2


def test_induce_respects_limits(breast):
    sub = breast.subset(np.arange(0, 569, 2))
    cfg = InductionConfig(n_trees=60, seed=4)
    dset = induce_decision_set(sub, cfg)
    assert dset.k <= cfg.k_target
    assert all(r.length <= cfg.l_max for r in dset.rules)
    assert all(a > 0.5 for a in dset.global_accuracies) or dset.flags


def test_induce_deterministic(breast):
    sub = breast.subset(np.arange(0, 569, 3))
    cfg = InductionConfig(n_trees=40, seed=11)
    a = induce_decision_set(sub, cfg)
    b = induce_decision_set(sub, cfg)
    assert a.rules == b.rules
    assert a.global_accuracies == b.global_accuracies


def test_config_from_json_rejects_unknown():
    with pytest.raises(ConfigError):
        InductionConfig.from_json('{"bogus": 1}')
    cfg = InductionConfig.from_json('{"n_trees": 10, "seed": 3}')
    assert cfg.n_trees == 10 and cfg.seed == 3


def test_fewer_candidates_than_target_flags():
    X = np.array([[0.0], [0.0], [1.0], [1.0]] * 10, dtype=float)
    y = np.array([0, 0, 1, 1] * 10)
    ds = _ds(X, y)
    rule = orient([Condition(0, ">", 0.5)], ds)
    cands = [CandidateRule(rule, 20, (0, 0))]
    dset = select_rules(cands, ds, k_target=5)
    assert dset.k == 1
    assert any("requested 5" in f for f in dset.flags)
