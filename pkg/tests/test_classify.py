import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given
from hypothesis import strategies as st

from complaint_anomaly.classify import (
    EvalMetrics,
    SplitSpec,
    confusion,
    evaluate,
    held_out_size,
    run_once,
    run_repeated,
    run_seed,
    split,
    summarize,
    train,
    write_metrics,
)
from complaint_anomaly.exceptions import DegenerateModelError
from complaint_anomaly.featurize import TI, TIV, TfidfFeaturizer
from complaint_anomaly.models import (
    LinearSVMGD,
    LogisticRegressionGD,
    MLPClassifierGD,
    make_model,
)


def separable_toy():
    rng = np.random.default_rng(3)
    pos = rng.uniform(0.5, 2.0, size=(10, 2))
    neg = -rng.uniform(0.5, 2.0, size=(10, 2))
    X = np.vstack([pos, neg])
    y = np.array([1] * 10 + [0] * 10)
    return X, y


@pytest.mark.parametrize("n, r, expected", [(10, 0.4, 4), (50, 0.4, 20), (5, 0.5, 3), (7, 0.4, 3)])
def test_held_out_size(n, r, expected):
    assert held_out_size(n, r) == expected


def test_split_sizes_and_cover():
    train_idx, test_idx = split(10, SplitSpec(0.4, 0, 5), 0)
    assert len(test_idx) == 4 and len(train_idx) == 6
    assert sorted(np.concatenate([train_idx, test_idx]).tolist()) == list(range(10))


def test_split_is_deterministic():
    spec = SplitSpec(0.4, 42, 10)
    a, b = split(50, spec, 3), split(50, spec, 3)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))


def test_runs_differ_in_aggregate():
    spec = SplitSpec(0.4, 7, 101)
    tests = [tuple(split(50, spec, k)[1]) for k in range(101)]
    differing = sum(tests[k] != tests[k + 1] for k in range(100))
    assert differing >= 99


def test_run_seed_depends_on_both_inputs():
    assert run_seed(0, 1) == run_seed(0, 1)
    assert len({run_seed(0, k) for k in range(50)}) == 50
    assert run_seed(0, 1) != run_seed(1, 1)


def test_split_spec_validation():
    with pytest.raises(ValueError):
        SplitSpec(test_fraction=1.0)
    with pytest.raises(ValueError):
        SplitSpec(repetitions=0)
    with pytest.raises(ValueError):
        split(10, SplitSpec(repetitions=2), 2)


@pytest.mark.parametrize("kind", ["LR", "SVM"])
def test_linear_models_separate_toy(kind):
    X, y = separable_toy()
    model = train(kind, X, y, seed=0)
    assert np.mean(model.predict(X) == y) == 1.0


@pytest.mark.parametrize("kind", ["LR", "SVM", "GB", "MLP", "RF"])
def test_single_class_is_degenerate(kind):
    X, _ = separable_toy()
    with pytest.raises(DegenerateModelError):
        train(kind, X, np.ones(20, dtype=int), seed=0)


@pytest.mark.parametrize("cls", [LogisticRegressionGD, LinearSVMGD])
def test_objective_never_increases(cls, sample_dataset):
    X = TfidfFeaturizer(TI).fit_transform(sample_dataset.docs)
    model = cls(learning_rate=5.0).fit(X, sample_dataset.labels)
    h = model.objective_history_
    assert len(h) == model.n_epochs + 1
    assert np.all(h[1:] <= h[:-1] * (1 + 1e-9))


def test_mlp_objective_never_increases():
    X, y = separable_toy()
    model = MLPClassifierGD(hidden_units=8, n_epochs=50, random_state=1).fit(X, y)
    h = model.objective_history_
    assert np.all(h[1:] <= h[:-1] * (1 + 1e-9))


@pytest.mark.parametrize("kind", ["RF", "GB", "MLP"])
def test_seeded_models_are_deterministic(kind, sample_dataset):
    X = TfidfFeaturizer(TI).fit_transform(sample_dataset.docs)
    y = sample_dataset.labels
    a = make_model(kind, random_state=11).fit(X, y).predict(X)
    b = make_model(kind, random_state=11).fit(X, y).predict(X)
    assert np.array_equal(a, b)


def test_models_accept_sparse_and_expose_params():
    X, y = separable_toy()
    model = make_model("LR", alpha=0.01)
    assert model.get_params()["alpha"] == 0.01
    model.fit(sp.csr_matrix(X), y)
    assert model.predict_proba(X).shape == (20, 2)
    with pytest.raises(ValueError):
        make_model("KNN")


def test_perfect_predictions():
    truth = np.array([1, 0] * 5)
    m = confusion(truth, truth)
    assert m.accuracy == 1.0 and m.f1_positive == 1.0 and m.f1_negative == 1.0


def test_all_negative_predictions():
    truth = np.array([1] * 37 + [0] * 63)
    m = confusion(truth, np.zeros(100))
    assert m.accuracy == pytest.approx(0.63)
    assert m.predicted_merit_rate == 0.0
    assert m.merit_recall == 0.0
    assert m.f1_positive == 0.0


def test_metric_definitions():
    m = EvalMetrics(tp=3, fp=1, tn=4, fn=2)
    assert m.total == 10
    assert m.accuracy == 0.7
    assert m.predicted_merit_rate == 0.4
    assert m.merit_recall == 0.6
    assert m.f1_positive == pytest.approx(2 * 3 / (2 * 3 + 1 + 2))
    assert m.f1_negative == pytest.approx(2 * 4 / (2 * 4 + 2 + 1))


def test_evaluate_rejects_empty():
    X, y = separable_toy()
    model = train("LR", X, y)
    with pytest.raises(ValueError):
        evaluate(model, X[:0], y[:0])


@given(st.lists(st.tuples(st.booleans(), st.booleans()), min_size=1, max_size=60))
def test_confusion_properties(pairs):
    truth = np.array([t for t, _ in pairs])
    pred = np.array([p for _, p in pairs])
    m = confusion(truth, pred)
    assert m.tp + m.fp + m.tn + m.fn == len(pairs)
    for rate in (m.accuracy, m.predicted_merit_rate, m.merit_recall, m.f1_positive, m.f1_negative):
        assert 0.0 <= rate <= 1.0
    doubled = confusion(np.tile(truth, 2), np.tile(pred, 2))
    assert doubled.f1_positive == pytest.approx(m.f1_positive)


def test_run_repeated_containment(sample_dataset, vader):
    spec = SplitSpec(0.4, 0, 3)
    results = run_repeated("LR", TIV, sample_dataset, spec, vader)
    assert [r.run for r in results] == [0, 1, 2]
    for r in results:
        assert set(r.meritorious_test_ids) <= set(r.test_ids)
        assert len(r.test_ids) == r.metrics.total == 20
        assert len(r.meritorious_test_ids) == r.metrics.tp + r.metrics.fp


def test_single_run_is_the_composition(sample_dataset):
    spec = SplitSpec(0.4, 5, 1)
    (result,) = run_repeated("SVM", TI, sample_dataset, spec)
    train_idx, test_idx = split(sample_dataset, spec, 0)
    f = TfidfFeaturizer(TI).fit([sample_dataset.docs[i] for i in train_idx])
    model = train(
        "SVM",
        f.transform([sample_dataset.docs[i] for i in train_idx]),
        sample_dataset.labels[train_idx],
        seed=run_seed(5, 0),
    )
    expected = evaluate(
        model, f.transform([sample_dataset.docs[i] for i in test_idx]), sample_dataset.labels[test_idx]
    )
    assert result.metrics == expected


def test_runs_are_order_independent(sample_dataset):
    spec = SplitSpec(0.4, 9, 4)
    forward = run_repeated("RF", TI, sample_dataset, spec)
    backward = [run_once("RF", TI, sample_dataset, spec, k) for k in (3, 2, 1, 0)]
    assert forward == backward[::-1]


def test_metrics_csv(tmp_path, sample_dataset):
    results = run_repeated("LR", TI, sample_dataset, SplitSpec(0.4, 0, 2))
    path = tmp_path / "metrics.csv"
    write_metrics(results, path)
    lines = path.read_text().splitlines()
    assert lines[0] == (
        "run,model,featurization,accuracy,predicted_merit_rate,merit_recall,"
        "f1_pos,f1_neg,n_test,n_predicted_merit"
    )
    assert len(lines) == 3
    assert 0 <= summarize(results)["accuracy"] <= 1
