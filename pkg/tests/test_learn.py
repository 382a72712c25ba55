"""Classifier tests: objective gradients, training, decisions, metrics."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from figsep.errors import (
    DegenerateTrainingSet,
    DomainError,
    ParseError,
    ShapeError,
)
from figsep.learn import (
    LossMatrix,
    classifier_metrics,
    decide,
    load_model,
    logreg_objective,
    predict_label,
    predict_proba,
    save_model,
    train_linear_svm,
    train_logreg,
)


def _blobs(n=60, gap=4.0, seed=0):
    """Two linearly separable 2-D clusters."""
    rng = np.random.default_rng(seed)
    a = rng.normal(loc=(-gap, 0.0), scale=0.5, size=(n // 2, 2))
    b = rng.normal(loc=(gap, 0.0), scale=0.5, size=(n // 2, 2))
    X = np.vstack([a, b])
    y = np.array([0] * (n // 2) + [1] * (n // 2))
    return X, y


class TestLogregObjective:
    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(20, 3))
        y = rng.integers(0, 2, size=20)
        w = rng.normal(size=3) * 0.5
        b = 0.3
        l2 = 1e-2
        _, gw, gb = logreg_objective(w, b, X, y, l2)
        eps = 1e-6
        for i in range(3):
            wp = w.copy()
            wp[i] += eps
            wm = w.copy()
            wm[i] -= eps
            num = (
                logreg_objective(wp, b, X, y, l2)[0]
                - logreg_objective(wm, b, X, y, l2)[0]
            ) / (2 * eps)
            assert num == pytest.approx(gw[i], abs=1e-5)
        num_b = (
            logreg_objective(w, b + eps, X, y, l2)[0]
            - logreg_objective(w, b - eps, X, y, l2)[0]
        ) / (2 * eps)
        assert num_b == pytest.approx(gb, abs=1e-5)

    def test_zero_weights_loss_is_log2(self):
        X = np.zeros((4, 2))
        y = np.array([0, 1, 0, 1])
        loss, _, _ = logreg_objective(np.zeros(2), 0.0, X, y, 0.0)
        assert loss == pytest.approx(np.log(2.0), abs=1e-12)


class TestTrainLogreg:
    def test_separable_data_fits(self):
        X, y = _blobs()
        model = train_logreg(X, y)
        assert model.kind == "logreg"
        assert np.array_equal(predict_label(model, X), y)

    def test_probabilities_in_unit_interval(self):
        X, y = _blobs()
        model = train_logreg(X, y)
        p = predict_proba(model, X)
        assert np.all(p >= 0.0) and np.all(p <= 1.0)

    def test_deterministic(self):
        X, y = _blobs()
        m1 = train_logreg(X, y)
        m2 = train_logreg(X, y)
        assert np.array_equal(m1.weights, m2.weights)
        assert m1.bias == m2.bias

    def test_feature_scaling_invariance(self):
        # Standardization makes training immune to affine feature scaling.
        X, y = _blobs()
        scaled = X * np.array([1000.0, 0.001]) + np.array([5.0, -7.0])
        base = predict_proba(train_logreg(X, y), X)
        other = predict_proba(train_logreg(scaled, y), scaled)
        assert other == pytest.approx(base, abs=1e-9)

    def test_constant_feature_tolerated(self):
        X, y = _blobs()
        X = np.hstack([X, np.full((X.shape[0], 1), 3.0)])
        model = train_logreg(X, y)
        assert np.isfinite(model.weights).all()

    def test_extreme_scores_stay_finite(self):
        X, y = _blobs()
        model = train_logreg(X, y)
        model.weights = model.weights * 1e4
        with np.errstate(over="raise"):
            p = predict_proba(model, X)
        assert np.isfinite(p).all()

    def test_rejects_single_class(self):
        with pytest.raises(DegenerateTrainingSet):
            train_logreg(np.zeros((4, 2)), [1, 1, 1, 1])

    def test_rejects_bad_labels(self):
        with pytest.raises(DomainError):
            train_logreg(np.zeros((3, 2)), [0, 1, 2])

    def test_rejects_length_mismatch(self):
        with pytest.raises(ShapeError):
            train_logreg(np.zeros((3, 2)), [0, 1])


class TestTrainSvm:
    def test_separable_data_fits(self):
        X, y = _blobs()
        model = train_linear_svm(X, y)
        assert model.kind == "svm"
        assert np.array_equal(predict_label(model, X), y)

    def test_duplication_invariance(self):
        X, y = _blobs(n=40)
        m1 = train_linear_svm(X, y, c=2.0, epochs=200)
        m2 = train_linear_svm(np.vstack([X, X]), np.concatenate([y, y]), c=2.0, epochs=200)
        assert m2.weights == pytest.approx(m1.weights, abs=1e-9)
        assert m2.bias == pytest.approx(m1.bias, abs=1e-9)

    def test_rejects_nonpositive_c(self):
        X, y = _blobs(n=10)
        with pytest.raises(DomainError):
            train_linear_svm(X, y, c=0.0)

    def test_probabilities_refused(self):
        X, y = _blobs(n=10)
        model = train_linear_svm(X, y)
        with pytest.raises(DomainError):
            predict_proba(model, X)


class TestDecide:
    def test_symmetric_loss_threshold(self):
        loss = LossMatrix(alpha=1.0)
        assert loss.threshold == pytest.approx(0.5)
        assert decide(0.5, loss) == 1
        assert decide(0.4999, loss) == 0

    def test_asymmetric_loss_threshold(self):
        loss = LossMatrix(alpha=1.86)
        assert loss.threshold == pytest.approx(0.34965034965034963, abs=1e-12)
        assert 0.345 <= loss.threshold <= 0.350

    def test_threshold_boundary_assigns_class_one(self):
        loss = LossMatrix(alpha=3.0)
        assert decide(0.25, loss) == 1

    def test_rejects_bad_probability(self):
        with pytest.raises(DomainError):
            decide(1.5, LossMatrix(alpha=1.0))

    def test_rejects_nonpositive_alpha(self):
        with pytest.raises(DomainError):
            LossMatrix(alpha=0.0)

    @given(
        p=st.floats(0.0, 1.0, allow_nan=False),
        alpha=st.floats(0.01, 100.0, allow_nan=False),
    )
    @settings(max_examples=200)
    def test_matches_expected_loss_argmin(self, p, alpha):
        loss = LossMatrix(alpha=alpha)
        # Expected loss of assigning class 0 is alpha * p; of class 1, 1 - p.
        argmin = 1 if (1.0 - p) <= alpha * p else 0
        assert decide(p, loss) == argmin


class TestMetrics:
    def test_frozen_oracle(self):
        out = classifier_metrics([1, 0, 1, 1], [1, 0, 0, 1])
        assert out["accuracy_pct"] == pytest.approx(75.0)
        assert out["fp_pct"] == pytest.approx(25.0)
        assert out["fn_pct"] == pytest.approx(0.0)

    def test_all_wrong(self):
        out = classifier_metrics([1, 0], [0, 1])
        assert out["accuracy_pct"] == 0.0
        assert out["fp_pct"] == 50.0
        assert out["fn_pct"] == 50.0

    @given(
        labels=st.lists(
            st.tuples(st.integers(0, 1), st.integers(0, 1)), min_size=1, max_size=40
        )
    )
    @settings(max_examples=100)
    def test_parts_sum_to_exactly_100(self, labels):
        pred = [a for a, _ in labels]
        truth = [b for _, b in labels]
        out = classifier_metrics(pred, truth)
        a, f, m = out["accuracy_pct"], out["fp_pct"], out["fn_pct"]
        assert a + f + m == 100.0
        assert f + m + a == 100.0
        assert m + a + f == 100.0
        assert min(a, f, m) >= 0.0
        n = len(labels)
        fn = sum(1 for x, y in labels if x == 0 and y == 1)
        correct = sum(1 for x, y in labels if x == y)
        assert a == pytest.approx(100.0 * correct / n, abs=1e-9)
        assert m == pytest.approx(100.0 * fn / n, abs=1e-9)

    def test_rejects_empty(self):
        with pytest.raises(DomainError):
            classifier_metrics([], [])

    def test_rejects_mismatch(self):
        with pytest.raises(ShapeError):
            classifier_metrics([1], [1, 0])


class TestPersistence:
    def test_round_trip_preserves_predictions(self, tmp_path):
        X, y = _blobs()
        model = train_logreg(X, y, metadata={"task": "demo"})
        path = tmp_path / "model.json"
        save_model(model, path)
        loaded = load_model(path)
        assert loaded.kind == model.kind
        assert loaded.metadata == {"task": "demo"}
        assert predict_proba(loaded, X) == pytest.approx(predict_proba(model, X))

    def test_missing_key_rejected(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text('{"kind": "logreg"}', encoding="utf-8")
        with pytest.raises(ParseError):
            load_model(path)

    def test_invalid_json_rejected(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text("not json", encoding="utf-8")
        with pytest.raises(ParseError):
            load_model(path)
