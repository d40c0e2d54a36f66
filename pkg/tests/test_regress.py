import numpy as np
import pytest

from causal_debias.errors import (
    ConstantLabelError,
    InsufficientDataError,
    SchemaError,
)
from causal_debias.regress import (
    LogisticClassifier,
    bic,
    ci_test,
    fit_linear,
    fit_logit,
    train_logistic_classifier,
)

from conftest import make_dataset, with_binary_label


def normal_equations_oracle(x, y):
    """Independent closed-form least squares on the raw design."""
    A = np.column_stack([np.ones(len(x)), x])
    return np.linalg.solve(A.T @ A, A.T @ y)


def test_fit_linear_recovers_known_line():
    rng = np.random.default_rng(0)
    x = rng.normal(0, 2, 1000)
    y = 2.0 * x + 3.0 + rng.normal(0, 0.1, 1000)
    ds = with_binary_label({"x": x, "y": y})
    fit = fit_linear(ds, "y", ("x",))
    slope = fit.betas[0] / fit.parent_stds[0]
    intercept = fit.intercept - fit.betas[0] * fit.parent_means[0] / fit.parent_stds[0]
    oracle = normal_equations_oracle(x, y)
    assert slope == pytest.approx(oracle[1], abs=1e-8)
    assert intercept == pytest.approx(oracle[0], abs=1e-8)
    assert abs(slope - 2.0) < 0.05
    assert abs(intercept - 3.0) < 0.05


def test_fit_linear_perfect_fit():
    x = np.linspace(-3, 3, 50)
    ds = with_binary_label({"x": x, "y": x.copy()})
    fit = fit_linear(ds, "y", ("x",))
    assert fit.standardized_betas()[0] == pytest.approx(1.0, abs=1e-9)
    assert fit.residual_std < 1e-9
    assert np.isfinite(bic(fit))


def test_fit_linear_intercept_only():
    rng = np.random.default_rng(1)
    y = rng.normal(5, 1, 100)
    ds = with_binary_label({"y": y})
    fit = fit_linear(ds, "y", ())
    assert fit.betas.size == 0
    assert fit.predict(np.empty((100, 0))) == pytest.approx(np.full(100, y.mean()))


def test_fit_linear_rank_deficient_ridge_fallback():
    rng = np.random.default_rng(2)
    x = rng.normal(0, 1, 60)
    ds = with_binary_label({"x1": x, "x2": 2 * x, "y": x + rng.normal(0, 0.1, 60)})
    fit = fit_linear(ds, "y", ("x1", "x2"))
    assert fit.ridge_fallback
    assert np.isfinite(fit.log_likelihood)


def test_fit_linear_insufficient_data():
    ds = with_binary_label({"x": [1.0, 2.0, 3.0], "y": [1.0, 2.0, 3.1]})
    with pytest.raises(InsufficientDataError):
        fit_linear(ds, "y", ("x",))


def test_fit_linear_rejects_nominal_target_and_bad_parents():
    ds = with_binary_label({"x": [1.0, 2.0, 3.0, 4.0, 5.0]})
    with pytest.raises(SchemaError):
        fit_linear(ds, "_label", ("x",))
    with pytest.raises(SchemaError):
        fit_linear(ds, "x", ("x",))


def test_affine_rescaling_of_raw_parents_leaves_betas():
    rng = np.random.default_rng(3)
    x = rng.normal(10, 3, 500)
    y = 0.7 * x + rng.normal(0, 1, 500)
    ds1 = with_binary_label({"x": x, "y": y})
    ds2 = with_binary_label({"x": 100.0 * x - 5.0, "y": y})
    b1 = fit_linear(ds1, "y", ("x",)).betas
    b2 = fit_linear(ds2, "y", ("x",)).betas
    assert np.abs(b1 - b2).max() < 1e-9


def test_fit_logit_recovers_logistic_slope():
    rng = np.random.default_rng(4)
    n = 5000
    z = rng.normal(0, 1, n)
    p = 1.0 / (1.0 + np.exp(-(1.5 * z - 0.5)))
    lab = (rng.random(n) < p).astype(np.int64)
    ds = make_dataset({"z": z, "t": lab}, label="t", levels={"t": ("neg", "pos")})
    fit = fit_logit(ds, "t", ("z",))
    raw_slope = fit.coef[1, 0] / fit.parent_stds[0]
    assert abs(raw_slope - 1.5) < 0.1
    assert fit.converged


def test_fit_logit_null_model_reproduces_marginals():
    rng = np.random.default_rng(5)
    n = 4000
    z = rng.normal(0, 1, n)
    lab = rng.choice(3, size=n, p=[0.5, 0.3, 0.2]).astype(np.int64)
    ds = make_dataset({"z": z, "t": lab}, label="t", levels={"t": ("a", "b", "c")})
    fit = fit_logit(ds, "t", ("z",))
    assert np.abs(fit.coef[:, 0]).max() < 0.1
    probs = fit.predict_proba(np.zeros((1, 1)) + z.mean())[0]
    freqs = np.bincount(lab, minlength=3) / n
    assert np.abs(probs - freqs).max() < 0.02


def test_fit_logit_probabilities_normalized_three_class():
    rng = np.random.default_rng(6)
    n = 600
    z = rng.normal(0, 1, n)
    lab = (np.digitize(z, [-0.5, 0.6])).astype(np.int64)
    ds = make_dataset({"z": z, "t": lab}, label="t", levels={"t": ("lo", "mid", "hi")})
    fit = fit_logit(ds, "t", ("z",))
    probs = fit.predict_proba(z[:, None])
    assert np.abs(probs.sum(axis=1) - 1.0).max() < 1e-9
    assert np.all(fit.coef[0] == 0.0) and fit.intercepts[0] == 0.0


def test_fit_logit_separation_capped():
    x = np.concatenate([np.full(30, -1.0), np.full(30, 1.0)])
    lab = (x > 0).astype(np.int64)
    ds = make_dataset({"x": x, "t": lab}, label="t", levels={"t": ("n", "y")})
    fit = fit_logit(ds, "t", ("x",))
    assert np.isfinite(fit.log_likelihood)
    assert fit.separation_flag


def test_fit_logit_deterministic():
    rng = np.random.default_rng(7)
    z = rng.normal(0, 1, 300)
    lab = (z + rng.normal(0, 1, 300) > 0).astype(np.int64)
    ds = make_dataset({"z": z, "t": lab}, label="t", levels={"t": ("n", "y")})
    f1 = fit_logit(ds, "t", ("z",))
    f2 = fit_logit(ds, "t", ("z",))
    assert np.array_equal(f1.coef, f2.coef)
    assert f1.log_likelihood == f2.log_likelihood


def test_bic_hand_value():
    class Dummy:
        k, n, log_likelihood = 3, 100, -50.0

    assert bic(Dummy()) == pytest.approx(3 * np.log(100) + 100, abs=1e-9)


def test_bic_drops_when_true_parent_added():
    rng = np.random.default_rng(8)
    x = rng.normal(0, 1, 800)
    y = 1.2 * x + rng.normal(0, 1, 800)
    ds = with_binary_label({"x": x, "y": y})
    without = fit_linear(ds, "y", ())
    with_parent = fit_linear(ds, "y", ("x",))
    assert bic(with_parent) < bic(without)


def test_loglik_monotone_in_parents():
    rng = np.random.default_rng(9)
    n = 200
    cols = {f"x{i}": rng.normal(0, 1, n) for i in range(3)}
    cols["y"] = rng.normal(0, 1, n)
    ds = with_binary_label(cols)
    prev = fit_linear(ds, "y", ()).log_likelihood
    for k in range(1, 4):
        cur = fit_linear(ds, "y", tuple(f"x{i}" for i in range(k))).log_likelihood
        assert cur >= prev - 1e-6
        prev = cur


def test_ci_test_symmetric_exactly():
    rng = np.random.default_rng(10)
    n = 800
    x = rng.normal(0, 1, n)
    z = 0.8 * x + rng.normal(0, 1, n)
    y = 0.8 * z + rng.normal(0, 1, n)
    ds = with_binary_label({"x": x, "y": y, "z": z})
    a = ci_test(ds, "x", "y", given=("z",))
    b = ci_test(ds, "y", "x", given=("z",))
    assert a.p_value == b.p_value


def test_ci_test_perfect_dependence():
    x = np.linspace(0, 1, 300)
    ds = with_binary_label({"x": x, "y": x.copy()})
    res = ci_test(ds, "x", "y")
    assert not res.independent
    assert res.p_value < 1e-6


def test_ci_test_degenerate_column_is_independent_with_warning():
    ds = with_binary_label({"x": np.ones(50), "y": np.arange(50.0)})
    res = ci_test(ds, "x", "y")
    assert res.independent and res.p_value == 1.0
    assert res.warning is not None


def test_ci_test_null_rejection_rate_calibrated():
    """x, y i.i.d. uniform: about 1% of seeded trials reject at 0.01."""
    rejections = 0
    trials = 500
    for seed in range(trials):
        rng = np.random.default_rng(seed)
        ds = with_binary_label(
            {"x": rng.uniform(size=2000), "y": rng.uniform(size=2000)}, rng=rng
        )
        if not ci_test(ds, "x", "y", p_threshold=0.01).independent:
            rejections += 1
    assert rejections / trials <= 0.02


def test_ci_test_chain_conditional_independence():
    hits = 0
    for seed in range(100):
        rng = np.random.default_rng(1000 + seed)
        n = 1000
        x = rng.normal(0, 1, n)
        z = 1.5 * x + rng.normal(0, 1, n)
        y = 1.5 * z + rng.normal(0, 1, n)
        ds = with_binary_label({"x": x, "y": y, "z": z}, rng=rng)
        if ci_test(ds, "x", "y", given=("z",), p_threshold=0.01).independent:
            hits += 1
    assert hits >= 95


def test_ci_test_mixed_types_detects_dependence():
    rng = np.random.default_rng(11)
    n = 1500
    g = (rng.random(n) < 0.4).astype(np.int64)
    y = 1.0 * g + rng.normal(0, 1, n)
    ds = make_dataset(
        {"g": g, "y": y, "lab": (rng.random(n) > 0.5).astype(np.int64)},
        label="lab",
        levels={"g": ("a", "b"), "lab": ("n", "y")},
    )
    assert not ci_test(ds, "g", "y").independent


def test_classifier_separable_and_probability_contract():
    x = np.concatenate([np.full(40, -2.0), np.full(40, 2.0)])
    lab = (x > 0).astype(np.int64)
    ds = make_dataset({"x": x, "t": lab}, label="t", levels={"t": ("n", "y")})
    clf = train_logistic_classifier(ds)
    assert (clf.predict(ds) == lab).mean() == 1.0
    probs = clf.predict_proba(ds)
    assert np.all(probs > 0) and np.all(probs < 1)
    assert np.abs(probs.sum(axis=1) - 1.0).max() < 1e-9


def test_classifier_uninformative_features_hit_majority_rate():
    rng = np.random.default_rng(12)
    n = 3000
    x = rng.normal(0, 1, n)
    lab = (rng.random(n) < 0.6).astype(np.int64)
    ds = make_dataset({"x": x, "t": lab}, label="t", levels={"t": ("n", "y")})
    train = np.arange(0, n, 2)
    test = np.arange(1, n, 2)
    clf = LogisticClassifier().fit(ds, rows=train)
    acc = (clf.predict(ds, rows=test) == lab[test]).mean()
    majority = max(lab[test].mean(), 1 - lab[test].mean())
    assert abs(acc - majority) < 0.03


def test_classifier_constant_label_rejected():
    ds = make_dataset(
        {"x": np.arange(20.0), "t": np.zeros(20, dtype=np.int64)},
        label="t",
        levels={"t": ("n", "y")},
    )
    with pytest.raises(ConstantLabelError):
        train_logistic_classifier(ds)


def test_classifier_excludes_sensitive_column():
    rng = np.random.default_rng(13)
    n = 500
    g = (rng.random(n) < 0.5).astype(np.int64)
    lab = g.copy()
    ds = make_dataset(
        {"g": g, "x": rng.normal(0, 1, n), "t": lab},
        label="t",
        levels={"g": ("a", "b"), "t": ("n", "y")},
    )
    clf = LogisticClassifier().fit(ds, exclude=("g",))
    acc = (clf.predict(ds) == lab).mean()
    assert acc < 0.6  # without g the label is unlearnable
