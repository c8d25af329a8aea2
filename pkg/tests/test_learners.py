import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdss.errors import NumericError
from cdss.learners import (
    LinearModel,
    fit_logistic_l1,
    fit_logistic_l2,
    l1_critical_strength,
    logistic_gradient,
    logistic_objective,
    objective_trace,
    predict_proba,
)


def _problem(seed, n=60, d=4):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, d))
    w = rng.normal(size=d)
    p = 1.0 / (1.0 + np.exp(-(X @ w + rng.normal())))
    y = (p > rng.random(n)).astype(np.float64)
    if y.min() == y.max():
        y[0] = 1 - y[0]
    return X, y


def finite_diff_gradient(X, y, w, b, l2, h=1e-5):
    gw = np.empty_like(w)
    for j in range(len(w)):
        wp, wm = w.copy(), w.copy()
        wp[j] += h
        wm[j] -= h
        gw[j] = (logistic_objective(X, y, wp, b, l2=l2)
                 - logistic_objective(X, y, wm, b, l2=l2)) / (2 * h)
    gb = (logistic_objective(X, y, w, b + h, l2=l2)
          - logistic_objective(X, y, w, b - h, l2=l2)) / (2 * h)
    return gw, gb


@pytest.mark.parametrize("seed", range(5))
def test_gradient_matches_finite_differences(seed):
    X, y = _problem(seed)
    rng = np.random.default_rng(seed + 100)
    w = rng.normal(size=X.shape[1])
    b = float(rng.normal())
    gw, gb = logistic_gradient(X, y, w, b, l2=0.3)
    fw, fb = finite_diff_gradient(X, y, w, b, l2=0.3)
    scale = max(np.max(np.abs(fw)), abs(fb), 1e-12)
    assert np.max(np.abs(gw - fw)) / scale < 1e-6
    assert abs(gb - fb) / scale < 1e-6


def test_l2_converged_gradient_near_zero():
    X, y = _problem(7)
    m = fit_logistic_l2(X, y, 0.05)
    assert m.converged
    gw, gb = logistic_gradient(X, y, m.weights, m.intercept, l2=0.05)
    assert max(np.max(np.abs(gw)), abs(gb)) < 1e-7


def test_huge_l2_shrinks_to_base_rate():
    X, y = _problem(11)
    m = fit_logistic_l2(X, y, 1e8)
    assert np.max(np.abs(m.weights)) < 1e-6
    base = y.mean()
    assert m.intercept == pytest.approx(np.log(base / (1 - base)), abs=1e-4)


def test_separable_1d_positive_weight():
    X = np.array([[-2.0], [-1.0], [1.0], [2.0]])
    y = np.array([0.0, 0.0, 1.0, 1.0])
    m = fit_logistic_l2(X, y, 1.0)
    assert m.weights[0] > 0


def test_predict_proba_values():
    m = LinearModel(np.zeros(3), 0.0, "l2", 1.0, True, 1)
    assert predict_proba(m, np.zeros(3)) == 0.5
    m2 = LinearModel(np.array([2.0]), -1.0, "l2", 1.0, True, 1)
    assert predict_proba(m2, np.array([1.0])) == pytest.approx(0.7310585786300049)
    m3 = LinearModel(np.array([40.0]), 0.0, "l2", 1.0, True, 1)
    p = predict_proba(m3, np.array([1.0]))
    assert 1.0 - 1e-15 < p < 1.0


def test_l1_critical_strength_gives_all_zeros():
    X, y = _problem(13)
    lam = l1_critical_strength(X, y)
    m = fit_logistic_l1(X, y, lam * 1.001)
    assert np.all(m.weights == 0.0)
    m2 = fit_logistic_l1(X, y, lam * 0.9)
    assert np.any(m2.weights != 0.0)


def test_l1_zero_strength_matches_l2_zero():
    X, y = _problem(17, n=80, d=3)
    m1 = fit_logistic_l1(X, y, 0.0, tol=1e-10)
    m2 = fit_logistic_l2(X, y, 0.0, tol=1e-10)
    assert np.allclose(m1.weights, m2.weights, atol=1e-5)
    assert m1.intercept == pytest.approx(m2.intercept, abs=1e-5)


def test_l1_exact_zeros():
    X, y = _problem(19, n=50, d=6)
    m = fit_logistic_l1(X, y, 0.08)
    inactive = m.weights[np.setdiff1d(np.arange(6), m.active_set)]
    assert np.all(inactive == 0.0)  # exact, not tiny


def test_l1_beats_grid_oracle():
    rng = np.random.default_rng(23)
    X = rng.normal(size=(8, 2))
    y = np.array([0, 1, 0, 1, 1, 0, 1, 0], dtype=float)
    lam = 0.05
    m = fit_logistic_l1(X, y, lam, tol=1e-10)
    f_opt = logistic_objective(X, y, m.weights, m.intercept, l1=lam)
    grid = np.linspace(-1.5, 1.5, 100)
    for w0 in grid:
        for w1 in grid:
            w = np.array([w0, w1]) + m.weights
            f = logistic_objective(X, y, w, m.intercept, l1=lam)
            assert f_opt <= f + 1e-9


def test_objective_trace_monotone():
    for seed in (29, 31):
        X, y = _problem(seed)
        for l1, l2 in ((0.0, 0.1), (0.05, 0.0)):
            tr = objective_trace(X, y, l1, l2)
            assert np.all(np.diff(tr) <= 1e-12)


def test_permutation_equivariance():
    X, y = _problem(37, n=70, d=5)
    perm = np.array([3, 0, 4, 1, 2])
    m = fit_logistic_l2(X, y, 0.2)
    mp = fit_logistic_l2(X[:, perm], y, 0.2)
    assert np.allclose(mp.weights, m.weights[perm], atol=1e-9)


def test_scaling_covariance_unpenalized():
    X, y = _problem(41, n=90, d=3)
    m = fit_logistic_l2(X, y, 0.0, tol=1e-10)
    X2 = X.copy()
    X2[:, 1] *= 5.0
    m2 = fit_logistic_l2(X2, y, 0.0, tol=1e-10)
    assert m2.weights[1] == pytest.approx(m.weights[1] / 5.0, abs=1e-6)


def test_determinism_bit_identical():
    X, y = _problem(43)
    a = fit_logistic_l2(X, y, 0.1)
    b = fit_logistic_l2(X, y, 0.1)
    assert a.weights.tobytes() == b.weights.tobytes()
    assert a.intercept == b.intercept
    c = fit_logistic_l1(X, y, 0.03)
    d = fit_logistic_l1(X, y, 0.03)
    assert c.weights.tobytes() == d.weights.tobytes()


def test_nonfinite_input_rejected():
    X, y = _problem(47)
    X[0, 0] = np.nan
    with pytest.raises(NumericError):
        fit_logistic_l2(X, y, 0.1)
    with pytest.raises(NumericError):
        fit_logistic_l1(np.ones((3, 1)), np.array([0.0, 1.0, 2.0]), 0.1)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_l1_kkt_conditions_hold(seed):
    X, y = _problem(seed % 1000, n=40, d=3)
    lam = 0.04
    m = fit_logistic_l1(X, y, lam)
    gw, gb = logistic_gradient(X, y, m.weights, m.intercept)
    for j in range(3):
        if m.weights[j] != 0.0:
            assert abs(gw[j] + lam * np.sign(m.weights[j])) < 1e-6
        else:
            assert abs(gw[j]) <= lam + 1e-6
    assert abs(gb) < 1e-6
