"""Repeated random train/test evaluation of the merit classifiers."""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateModelError
from .featurize import TfidfFeaturizer, check_tag
from .models import check_kind, make_model

METRICS_HEADER = (
    "run", "model", "featurization", "accuracy", "predicted_merit_rate",
    "merit_recall", "f1_pos", "f1_neg", "n_test", "n_predicted_merit",
)


@dataclass(frozen=True)
class SplitSpec:
    test_fraction: float = 0.4
    master_seed: int = 0
    repetitions: int = 500

    def __post_init__(self):
        if not 0.0 < self.test_fraction < 1.0:
            raise ValueError(f"test_fraction must lie in (0, 1), got {self.test_fraction}")
        if self.repetitions < 1:
            raise ValueError(f"repetitions must be positive, got {self.repetitions}")


@dataclass(frozen=True)
class Dataset:
    """Cleaned narratives with merit labels, aligned by position."""

    ids: tuple
    docs: tuple
    labels: np.ndarray

    def __post_init__(self):
        if not len(self.ids) == len(self.docs) == len(self.labels):
            raise ValueError("ids, docs and labels must have equal length")

    def __len__(self):
        return len(self.ids)

    @classmethod
    def from_cleaned(cls, cleaned, merit_by_id):
        ids = tuple(c.id for c in cleaned)
        labels = np.array([1 if merit_by_id[i] else 0 for i in ids], dtype=int)
        return cls(ids, tuple(cleaned), labels)


@dataclass(frozen=True)
class EvalMetrics:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn

    @property
    def accuracy(self):
        return (self.tp + self.tn) / self.total

    @property
    def predicted_merit_rate(self):
        return (self.tp + self.fp) / self.total

    @property
    def merit_recall(self):
        # no meritorious complaints in the test set: report 0
        positives = self.tp + self.fn
        return self.tp / positives if positives else 0.0

    @property
    def f1_positive(self):
        denom = 2 * self.tp + self.fp + self.fn
        return 2 * self.tp / denom if denom else 0.0

    @property
    def f1_negative(self):
        denom = 2 * self.tn + self.fp + self.fn
        return 2 * self.tn / denom if denom else 0.0


@dataclass(frozen=True)
class RunResult:
    run: int
    model: str
    featurization: str
    metrics: EvalMetrics
    test_ids: tuple
    meritorious_test_ids: tuple


def run_seed(master_seed, run_index):
    """Per-run seed derived from (master seed, run index) alone."""
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(run_index),))
    return int(seq.generate_state(1, dtype=np.uint32)[0])


def held_out_size(n, test_fraction):
    n_test = int(math.floor(test_fraction * n + 0.5))
    return min(max(n_test, 1), n - 1)


def split(dataset, spec, run_index):
    """Random train/test partition of the dataset's positions for one run."""
    n = dataset if isinstance(dataset, int) else len(dataset)
    if n < 2:
        raise ValueError("need at least two items to split")
    if not 0 <= run_index < spec.repetitions:
        raise ValueError(f"run_index {run_index} outside [0, {spec.repetitions})")
    rng = np.random.default_rng(run_seed(spec.master_seed, run_index))
    perm = rng.permutation(n)
    n_test = held_out_size(n, spec.test_fraction)
    return np.sort(perm[n_test:]), np.sort(perm[:n_test])


def train(kind, X, labels, seed=None, **params):
    labels = np.asarray(labels)
    if len(np.unique(labels)) < 2:
        raise DegenerateModelError(
            f"{check_kind(kind)}: training set holds a single class"
        )
    return make_model(kind, random_state=seed, **params).fit(X, labels)


def confusion(truth, predicted):
    truth = np.asarray(truth).astype(bool)
    predicted = np.asarray(predicted).astype(bool)
    return EvalMetrics(
        tp=int(np.sum(truth & predicted)),
        fp=int(np.sum(~truth & predicted)),
        tn=int(np.sum(~truth & ~predicted)),
        fn=int(np.sum(truth & ~predicted)),
    )


def evaluate(model, X_test, labels_test):
    if X_test.shape[0] == 0:
        raise ValueError("empty test set")
    return confusion(labels_test, model.predict(X_test) == 1)


def run_once(kind, featurization, dataset, spec, run_index, lexicon=None, model_params=None):
    kind = check_kind(kind)
    tag = check_tag(featurization)
    train_idx, test_idx = split(dataset, spec, run_index)
    docs = dataset.docs
    featurizer = TfidfFeaturizer(tag, lexicon).fit([docs[i] for i in train_idx])
    X_train = featurizer.transform([docs[i] for i in train_idx])
    X_test = featurizer.transform([docs[i] for i in test_idx])
    y_train = dataset.labels[train_idx]
    try:
        model = train(kind, X_train, y_train, seed=run_seed(spec.master_seed, run_index),
                      **(model_params or {}))
    except DegenerateModelError as exc:
        raise DegenerateModelError(f"run {run_index}: {exc}") from exc
    predicted = model.predict(X_test) == 1
    metrics = confusion(dataset.labels[test_idx], predicted)
    test_ids = tuple(dataset.ids[i] for i in test_idx)
    return RunResult(
        run=run_index,
        model=kind,
        featurization=tag,
        metrics=metrics,
        test_ids=test_ids,
        meritorious_test_ids=tuple(i for i, p in zip(test_ids, predicted) if p),
    )


def run_repeated(kind, featurization, dataset, spec, lexicon=None, model_params=None):
    """Split, train and evaluate ``spec.repetitions`` times.

    Each run depends only on ``(spec.master_seed, run_index)``, so the
    results do not depend on the order in which runs are executed.
    """
    return [
        run_once(kind, featurization, dataset, spec, k, lexicon, model_params)
        for k in range(spec.repetitions)
    ]


def summarize(results):
    """Mean of each reported rate over runs."""
    ms = [r.metrics for r in results]
    return {
        "accuracy": float(np.mean([m.accuracy for m in ms])),
        "predicted_merit_rate": float(np.mean([m.predicted_merit_rate for m in ms])),
        "merit_recall": float(np.mean([m.merit_recall for m in ms])),
        "f1_pos": float(np.mean([m.f1_positive for m in ms])),
        "f1_neg": float(np.mean([m.f1_negative for m in ms])),
    }


def metrics_rows(results):
    for r in results:
        m = r.metrics
        yield (
            r.run, r.model, r.featurization, f"{m.accuracy:.6f}",
            f"{m.predicted_merit_rate:.6f}", f"{m.merit_recall:.6f}",
            f"{m.f1_positive:.6f}", f"{m.f1_negative:.6f}", m.total, m.tp + m.fp,
        )


def write_metrics(results, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(METRICS_HEADER)
        writer.writerows(metrics_rows(results))

