"""Merit classifiers with a scikit-learn compatible surface.

Logistic regression, the linear SVM and the MLP are trained by full-batch
gradient descent with a decaying step. A step that would raise the objective
is halved until it does not, so the recorded objective never increases.
Random forest and gradient boosting are scikit-learn estimators with fixed
hyperparameters.
"""

import numpy as np
import scipy.sparse as sp
from scipy.special import expit
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.ensemble import GradientBoostingClassifier, RandomForestClassifier
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .exceptions import DegenerateModelError

MODEL_KINDS = ("LR", "SVM", "GB", "MLP", "RF")

_MAX_HALVINGS = 40


def check_kind(kind):
    kind = str(kind).upper()
    if kind not in MODEL_KINDS:
        raise ValueError(f"unknown model kind {kind!r}; expected one of {MODEL_KINDS}")
    return kind


def _check_binary(y):
    classes = np.unique(y)
    if len(classes) != 2:
        raise DegenerateModelError(
            f"training labels must contain both classes, got {classes.tolist()}"
        )
    return classes


def _descend(objective, gradient, params, n_epochs, learning_rate, decay):
    """Full-batch descent with step halving; returns params and objective per epoch."""
    current = objective(params)
    history = [current]
    for epoch in range(n_epochs):
        step = learning_rate * decay**epoch
        grads = gradient(params)
        for _ in range(_MAX_HALVINGS):
            candidate = [p - step * g for p, g in zip(params, grads)]
            value = objective(candidate)
            if value <= current:
                params, current = candidate, value
                break
            step *= 0.5
        history.append(current)
    return params, np.array(history)


class _LinearGD(ClassifierMixin, BaseEstimator):
    def __init__(self, alpha=1e-4, n_epochs=300, learning_rate=0.1, decay=0.99):
        self.alpha = alpha
        self.n_epochs = n_epochs
        self.learning_rate = learning_rate
        self.decay = decay

    def _loss_and_margin_grad(self, margins, y_signed):
        raise NotImplementedError

    def fit(self, X, y):
        X, y = check_X_y(X, y, accept_sparse="csr")
        self.classes_ = _check_binary(y)
        y_signed = np.where(y == self.classes_[1], 1.0, -1.0)
        n, d = X.shape
        lam = self.alpha

        def objective(params):
            w, b = params
            loss, _ = self._loss_and_margin_grad(X @ w + b, y_signed)
            return loss + 0.5 * lam * float(w @ w)

        def gradient(params):
            w, b = params
            _, g = self._loss_and_margin_grad(X @ w + b, y_signed)
            return [X.T @ g / n + lam * w, np.array(g.sum() / n)]

        (w, b), history = _descend(
            objective,
            gradient,
            [np.zeros(d), np.array(0.0)],
            self.n_epochs,
            self.learning_rate,
            self.decay,
        )
        self.coef_ = np.asarray(w).ravel()
        self.intercept_ = float(b)
        self.objective_history_ = history
        self.n_features_in_ = d
        return self

    def decision_function(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X, accept_sparse="csr")
        return X @ self.coef_ + self.intercept_

    def predict(self, X):
        return self.classes_[(self.decision_function(X) > 0).astype(int)]


class LogisticRegressionGD(_LinearGD):
    """L2-regularised logistic regression."""

    def _loss_and_margin_grad(self, margins, y_signed):
        z = y_signed * margins
        loss = float(np.mean(np.logaddexp(0.0, -z)))
        return loss, -y_signed * expit(-z)

    def predict_proba(self, X):
        p = expit(self.decision_function(X))
        return np.column_stack([1.0 - p, p])


class LinearSVMGD(_LinearGD):
    """Linear SVM: hinge loss plus L2 penalty, subgradient steps."""

    def _loss_and_margin_grad(self, margins, y_signed):
        slack = 1.0 - y_signed * margins
        active = slack > 0
        return float(np.mean(np.where(active, slack, 0.0))), np.where(active, -y_signed, 0.0)


class MLPClassifierGD(ClassifierMixin, BaseEstimator):
    """One hidden ReLU layer, sigmoid output, cross-entropy loss."""

    def __init__(self, hidden_units=64, n_epochs=200, learning_rate=0.1, decay=0.99,
                 alpha=1e-4, random_state=None):
        self.hidden_units = hidden_units
        self.n_epochs = n_epochs
        self.learning_rate = learning_rate
        self.decay = decay
        self.alpha = alpha
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y, accept_sparse="csr")
        self.classes_ = _check_binary(y)
        t = (y == self.classes_[1]).astype(float)
        n, d = X.shape
        h = self.hidden_units
        rng = np.random.default_rng(self.random_state)
        init = [
            rng.normal(0.0, np.sqrt(2.0 / max(d, 1)), size=(d, h)),
            np.zeros(h),
            rng.normal(0.0, np.sqrt(1.0 / h), size=h),
            np.array(0.0),
        ]
        lam = self.alpha

        def forward(params):
            W1, b1, w2, b2 = params
            pre = X @ W1 + b1
            hidden = np.maximum(pre, 0.0)
            return pre, hidden, hidden @ w2 + b2

        def objective(params):
            _, _, z = forward(params)
            # cross-entropy written via logaddexp for stability
            ce = np.mean(np.logaddexp(0.0, z) - t * z)
            return float(ce + 0.5 * lam * (np.sum(params[0] ** 2) + params[2] @ params[2]))

        def gradient(params):
            W1, _, w2, _ = params
            pre, hidden, z = forward(params)
            dz = (expit(z) - t) / n
            dhidden = np.outer(dz, w2) * (pre > 0)
            gW1 = X.T @ dhidden
            if sp.issparse(gW1):
                gW1 = gW1.toarray()
            return [
                np.asarray(gW1) + lam * W1,
                dhidden.sum(axis=0),
                hidden.T @ dz + lam * w2,
                np.array(dz.sum()),
            ]

        params, history = _descend(
            objective, gradient, init, self.n_epochs, self.learning_rate, self.decay
        )
        self.coefs_ = params
        self.objective_history_ = history
        self.n_features_in_ = d
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "coefs_")
        X = check_array(X, accept_sparse="csr")
        W1, b1, w2, b2 = self.coefs_
        p = expit(np.maximum(X @ W1 + b1, 0.0) @ w2 + b2)
        return np.column_stack([1.0 - p, p])

    def predict(self, X):
        return self.classes_[(self.predict_proba(X)[:, 1] > 0.5).astype(int)]


def make_model(kind, random_state=None, **params):
    """Return an unfitted classifier of the given kind with its default settings."""
    kind = check_kind(kind)
    if kind == "LR":
        return LogisticRegressionGD(**params)
    if kind == "SVM":
        return LinearSVMGD(**params)
    if kind == "MLP":
        return MLPClassifierGD(random_state=random_state, **params)
    if kind == "RF":
        defaults = dict(n_estimators=100, criterion="gini", max_depth=12,
                        max_features="sqrt", bootstrap=True)
        defaults.update(params)
        return RandomForestClassifier(random_state=random_state, **defaults)
    defaults = dict(n_estimators=100, max_depth=2, learning_rate=0.1, loss="log_loss")
    defaults.update(params)
    return GradientBoostingClassifier(random_state=random_state, **defaults)
