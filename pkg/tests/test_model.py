import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import hinge_margins

from untrans.errors import DomainError, ParseError, TrainingError
from untrans.model import (
    LinearModel,
    TrainConfig,
    class_weights,
    decision_score,
    dumps,
    hinge_violations,
    load_model,
    loads,
    predict,
    save_model,
    train,
)


def separable(n=200, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        x = rng.uniform(-1, 1, size=2)
        m = x[0] + 2 * x[1] - 0.3
        if abs(m) < 0.2:
            continue
        out.append(({"x0": float(x[0]), "x1": float(x[1])}, "I" if m > 0 else "O"))
    return out


def imbalanced(n=1000, seed=1):
    """Overlapping classes at 9:1 O:I."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        label = "I" if i % 10 == 0 else "O"
        mu = 1.0 if label == "I" else 0.0
        x = rng.normal(mu, 1.0, size=2)
        out.append(({"a": float(x[0]), "b": float(x[1])}, label))
    return out


class TestDecision:
    def test_example(self):
        m = LinearModel({"a": 2.0}, -1.0)
        assert decision_score(m, {"a": 3.0}) == 5.0

    def test_zero_vector(self):
        assert decision_score(LinearModel({"a": 2.0}, -1.0), {}) == -1.0

    def test_unknown_feature(self):
        assert decision_score(LinearModel({"a": 2.0}, -1.0), {"a": 1.0, "zzz": 9.0}) == 1.0

    def test_predict_threshold(self):
        m = LinearModel({"a": 1.0}, 0.0)
        assert predict(m, {"a": 0.5}) == "I"
        assert predict(m, {"a": 0.0}) == "O"
        assert predict(m, {"a": 0.5}, threshold=0.5) == "O"
        assert predict(m, {"a": 1e9}, threshold=math.inf) == "O"

    @settings(max_examples=100, deadline=None)
    @given(st.floats(-10, 10), st.floats(-10, 10), st.floats(-5, 5), st.floats(-5, 5))
    def test_threshold_monotone(self, w, x, t1, t2):
        m = LinearModel({"a": w}, 0.0)
        lo, hi = sorted((t1, t2))
        if predict(m, {"a": x}, hi) == "I":
            assert predict(m, {"a": x}, lo) == "I"

    def test_non_finite_rejected(self):
        with pytest.raises(DomainError):
            LinearModel({"a": math.nan}, 0.0)


class TestClassWeights:
    def test_nine_to_one(self):
        cw = class_weights(["I"] * 10 + ["O"] * 90)
        assert cw == {"I": 5.0, "O": 100 / 180}
        assert cw["I"] / cw["O"] == pytest.approx(9.0, abs=1e-12)

    def test_uniform(self):
        assert class_weights(["I", "O", "O"], "uniform") == {"I": 1.0, "O": 1.0}

    def test_bad_mode(self):
        with pytest.raises(DomainError):
            TrainConfig(class_weight_mode="balanced")


class TestTrain:
    def test_separable(self):
        data = separable()
        m = train(data, TrainConfig(C=100.0, epochs=50))
        assert hinge_violations(m, data) == 0
        X = [v for v, _ in data]
        y = [1 if l == "I" else -1 for _, l in data]
        assert min(hinge_margins(m.weights, m.bias, X, y)) >= 1.0

    def test_deterministic_bytes(self):
        data = separable()
        assert dumps(train(data, TrainConfig(seed=7))) == dumps(train(data, TrainConfig(seed=7)))

    def test_seed_matters(self):
        data = imbalanced(200)
        assert dumps(train(data, TrainConfig(seed=1, C=0.1))) != dumps(train(data, TrainConfig(seed=2, C=0.1)))

    def test_loss_non_increasing(self):
        m = train(imbalanced(300), TrainConfig(C=10.0))
        h = m.loss_history
        assert len(h) == 20
        assert all(b <= a + 1e-6 for a, b in zip(h, h[1:]))

    def test_single_class(self):
        with pytest.raises(TrainingError):
            train([({"a": 1.0}, "O"), ({"a": 2.0}, "O")])

    def test_empty(self):
        with pytest.raises(TrainingError):
            train([])

    def test_scale_covariance(self):
        data = imbalanced(200)
        scaled = [({"a": v["a"] * 1000.0, "b": v["b"]}, l) for v, l in data]
        m1 = train(data)
        m2 = train(scaled)
        assert m2.weights["a"] * 1000.0 == pytest.approx(m1.weights["a"], rel=1e-9)
        for (v1, _), (v2, _) in zip(data, scaled):
            assert decision_score(m1, v1) == pytest.approx(decision_score(m2, v2), rel=1e-9, abs=1e-9)

    def test_weighting_raises_recall(self):
        data = imbalanced(2000)
        tr, te = data[:1000], data[1000:]

        def recall(m):
            pos = [v for v, l in te if l == "I"]
            return sum(predict(m, v) == "I" for v in pos) / len(pos)

        weighted = train(tr, TrainConfig(class_weight_mode="inverse-frequency"))
        uniform = train(tr, TrainConfig(class_weight_mode="uniform"))
        assert recall(weighted) > recall(uniform)


class TestModelFile:
    def test_roundtrip(self, tmp_path):
        m = train(separable(50), TrainConfig(C=0.5, epochs=3, seed=9), registry_version="r1")
        m.feature_config = {"window_size": 4}
        p = tmp_path / "m.txt"
        save_model(m, p)
        again = load_model(p)
        assert again == m
        assert dumps(again) == p.read_text(encoding="utf-8")

    def test_header(self):
        text = dumps(LinearModel({"a": 1.0}, 0.5))
        assert text.splitlines()[0] == "itl-model v1"
        with pytest.raises(ParseError):
            loads("not a model\nbias\t0\n")

    def test_malformed_weight(self):
        with pytest.raises(ParseError) as err:
            loads("itl-model v1\nbias\t0.0\na\tabc\n")
        assert err.value.line == 3

    def test_missing_bias(self):
        with pytest.raises(ParseError):
            loads("itl-model v1\na\t1.0\n")

    @settings(max_examples=50, deadline=None)
    @given(st.dictionaries(st.text(st.characters(blacklist_categories=("Cc", "Cs", "Zl", "Zp")), min_size=1,
                                   max_size=8).filter(lambda s: "\t" not in s and s.strip() == s and s not in
                                                      {"registry", "train", "class_weights", "features", "bias"}),
                           st.floats(-1e6, 1e6), max_size=10),
           st.floats(-100, 100))
    def test_roundtrip_property(self, weights, bias):
        m = LinearModel(weights, bias)
        assert loads(dumps(m)) == m
