import numpy as np
import pytest

from cdss.dataset import Dataset
from cdss.datasets import available, load_builtin
from cdss.rules import Condition, Rule


@pytest.fixture(scope="session")
def breast():
    return load_builtin("breast")


def require_dataset(name):
    if not available(name):
        pytest.skip(f"raw file for dataset {name!r} not present in this checkout")
    return load_builtin(name)


@pytest.fixture
def table1_rule():
    # IF age>80 AND nc>1, THEN 1 (death), ELSE 0 (survival); features [age, nc]
    return Rule((Condition(0, ">", 80.0), Condition(1, ">", 1.0)), 1, 0)


@pytest.fixture
def table1_patients():
    # (age, nc, true label) for the four example patients
    X = np.array([[90.0, 3.0], [47.0, 1.0], [82.0, 0.0], [86.0, 2.0]])
    y = np.array([1, 1, 0, 0])
    return Dataset(X, y, ("age", "nc"))


def random_dataset(rng, n=120, d=5):
    X = rng.normal(size=(n, d))
    w = rng.normal(size=d)
    y = (1.0 / (1.0 + np.exp(-(X @ w))) > rng.random(n)).astype(np.int64)
    if y.min() == y.max():  # force both classes
        y[0] = 1 - y[0]
    return Dataset(X, y, tuple(f"f{i}" for i in range(d)))


def brute_force_rule_eval(rule, x):
    """Independent rule evaluator: plain python, no vectorization."""
    for c in rule.conditions:
        v = x[c.feature_index]
        if c.comparator == ">":
            ok = v > c.threshold
        elif c.comparator == "<=":
            ok = v <= c.threshold
        else:
            ok = v == c.threshold
        if not ok:
            return rule.else_class
    return rule.then_class


def pairwise_auc(scores, labels):
    """O(N^2) concordance oracle with half credit for ties."""
    pos = [s for s, l in zip(scores, labels) if l == 1]
    neg = [s for s, l in zip(scores, labels) if l == 0]
    total = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                total += 1.0
            elif p == q:
                total += 0.5
    return total / (len(pos) * len(neg))


def spearman(x, y):
    """Rank correlation with average ranks for ties."""

    def ranks(v):
        v = np.asarray(v, dtype=float)
        order = np.argsort(v, kind="stable")
        r = np.empty(len(v))
        i = 0
        sv = v[order]
        while i < len(v):
            j = i
            while j + 1 < len(v) and sv[j + 1] == sv[i]:
                j += 1
            r[order[i : j + 1]] = 0.5 * (i + j) + 1.0
            i = j + 1
        return r

    rx, ry = ranks(x), ranks(y)
    rx -= rx.mean()
    ry -= ry.mean()
    denom = np.sqrt((rx @ rx) * (ry @ ry))
    if denom == 0:
        return 0.0
    return float(rx @ ry / denom)
