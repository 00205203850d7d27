"""Quantifying narratives and fitting the Cobb-Douglas relationship.

For each complaint we take the sentiment score ``s`` (summed absolute
intensity of its negative words), the cleaned word count ``m`` and the
discounted dollar amount ``l``, and assume ``m = beta * s**alpha * l**(1 - alpha)``.
Regressing ``log(m / l)`` on ``log(s / l)`` estimates ``alpha`` and ``beta``.
The same relationship induces an input/output system
``y = m / l = h0(x)`` with ``x = s / (4 m)`` and ``h0(x) = c2 * x**(alpha / (1 - alpha))``.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .corpus import is_word
from .exceptions import DomainError, InsufficientDataError
from .featurize import TI, TIV, check_tag
from .lexicon import INTENSITY_BOUND, negative_subset

QUANTITIES_HEADER = ("id", "s", "m_ti", "m_tiv", "l", "x_ti", "y_ti", "x_tiv", "y_tiv")
DIAGNOSTICS_HEADER = (
    "variant", "id", "log_x", "log_y", "fitted", "residual", "std_residual",
    "sqrt_abs_std_residual", "leverage", "cooks_distance", "qq_theoretical",
)


@dataclass(frozen=True)
class NarrativeQuantities:
    id: str
    s: float
    m_ti: int
    m_tiv: int
    l: float

    def m(self, variant):
        return self.m_ti if check_tag(variant) == TI else self.m_tiv


def _counted(token, count_punctuation):
    return count_punctuation or is_word(token)


def sentiment_score(c, lex, wneg=None, count_punctuation=False):
    """Sum of |intensity| over tokens in the negative word set, with multiplicity."""
    wneg = negative_subset(lex) if wneg is None else wneg
    tokens = c.tokens if hasattr(c, "tokens") else c
    return float(
        sum(abs(lex.intensity(t)) for t in tokens if t in wneg and _counted(t, count_punctuation))
    )


def negative_word_count(c, wneg, count_punctuation=False):
    tokens = c.tokens if hasattr(c, "tokens") else c
    return sum(1 for t in tokens if t in wneg and _counted(t, count_punctuation))


def compute_quantities(cleaned, amounts, lex, count_punctuation=False):
    """Build (s, m_ti, m_tiv, l) for each cleaned narrative.

    ``amounts`` maps narrative id to its adjusted dollar amount.
    """
    wneg = negative_subset(lex)
    out = []
    for c in cleaned:
        m_ti = sum(1 for t in c.tokens if _counted(t, count_punctuation))
        out.append(
            NarrativeQuantities(
                id=c.id,
                s=sentiment_score(c, lex, wneg, count_punctuation),
                m_ti=m_ti,
                m_tiv=negative_word_count(c, wneg, count_punctuation),
                l=float(amounts[c.id]),
            )
        )
    return out


class CobbDouglasRegressor(RegressorMixin, BaseEstimator):
    """Least-squares fit of ``m = beta * s**alpha * l**(1 - alpha)`` in log space.

    ``X`` has two columns, sentiment score and dollar amount; ``y`` is the
    word count. All values must be positive.
    """

    def __init__(self, confidence=0.95):
        self.confidence = confidence

    def fit(self, X, y):
        X = check_array(X, dtype=float)
        y = np.asarray(y, dtype=float)
        if X.shape[1] != 2:
            raise ValueError("X must have two columns: sentiment score and amount")
        if np.any(X <= 0) or np.any(y <= 0):
            raise ValueError("Cobb-Douglas fit needs strictly positive s, l and m")
        n = len(y)
        if n < 3:
            raise InsufficientDataError(f"need at least 3 usable rows, got {n}")
        u = np.log(X[:, 0] / X[:, 1])
        v = np.log(y / X[:, 1])
        u_bar, v_bar = u.mean(), v.mean()
        sxx = float(np.sum((u - u_bar) ** 2))
        if sxx == 0.0:
            raise InsufficientDataError("log(s / l) is constant; slope not identifiable")
        slope = float(np.sum((u - u_bar) * (v - v_bar)) / sxx)
        intercept = float(v_bar - slope * u_bar)
        fitted = intercept + slope * u
        resid = v - fitted
        dof = n - 2
        sigma2 = float(resid @ resid) / dof
        se = math.sqrt(sigma2 / sxx)
        t_crit = stats.t.ppf(0.5 + self.confidence / 2, dof)

        self.alpha_ = slope
        self.intercept_ = intercept
        self.beta_ = math.exp(intercept)
        self.alpha_se_ = se
        self.alpha_ci_ = (float(slope - t_crit * se), float(slope + t_crit * se))
        self.log_x_ = u
        self.log_y_ = v
        self.fitted_ = fitted
        self.residuals_ = resid
        self.sigma_ = math.sqrt(sigma2)
        self.leverage_ = 1.0 / n + (u - u_bar) ** 2 / sxx
        return self

    def predict(self, X):
        check_is_fitted(self, "alpha_")
        X = check_array(X, dtype=float)
        return self.beta_ * X[:, 0] ** self.alpha_ * X[:, 1] ** (1.0 - self.alpha_)


def _normal_scores(values):
    """Theoretical normal quantile for each value's rank (R ``ppoints`` rule)."""
    n = len(values)
    a = 3.0 / 8.0 if n <= 10 else 0.5
    ranks = stats.rankdata(values, method="ordinal")
    return stats.norm.ppf((ranks - a) / (n + 1 - 2 * a))


@dataclass
class CobbDouglasFit:
    variant: str
    alpha_hat: float
    alpha_ci95: tuple
    beta_hat: float
    intercept: float
    ids: list
    log_x: np.ndarray
    log_y: np.ndarray
    fitted: np.ndarray
    residuals: np.ndarray
    leverage: np.ndarray
    standardized_residuals: np.ndarray
    n_excluded: int = 0
    notes: list = field(default_factory=list)

    @property
    def n(self):
        return len(self.residuals)

    @property
    def alpha_above_one(self):
        return self.alpha_hat > 1.0

    @property
    def scale_location(self):
        return np.sqrt(np.abs(self.standardized_residuals))

    @property
    def qq_theoretical(self):
        return _normal_scores(self.standardized_residuals)

    @property
    def cooks_distance(self):
        h = self.leverage
        return self.standardized_residuals**2 / 2.0 * h / (1.0 - h)

    def transfer_function(self):
        return TransferFunction.from_cobb_douglas(self.alpha_hat, self.beta_hat)


def fit_cobb_douglas(quantities, variant=TI):
    """Fit the log-log regression for one variant, skipping rows with zero s or m."""
    variant = check_tag(variant)
    usable = [q for q in quantities if q.s > 0 and q.m(variant) > 0 and q.l > 0]
    n_excluded = len(quantities) - len(usable)
    if len(usable) < 3:
        raise InsufficientDataError(
            f"{variant}: need at least 3 rows with s > 0 and m > 0, got {len(usable)}"
        )
    X = np.array([[q.s, q.l] for q in usable], dtype=float)
    m = np.array([q.m(variant) for q in usable], dtype=float)
    reg = CobbDouglasRegressor().fit(X, m)
    h = reg.leverage_
    with np.errstate(divide="ignore", invalid="ignore"):
        std_resid = reg.residuals_ / (reg.sigma_ * np.sqrt(1.0 - h))
    notes = []
    if reg.alpha_ > 1.0:
        notes.append("alpha > 1: transfer function is not Lipschitz on [0, 1]")
    return CobbDouglasFit(
        variant=variant,
        alpha_hat=reg.alpha_,
        alpha_ci95=reg.alpha_ci_,
        beta_hat=reg.beta_,
        intercept=reg.intercept_,
        ids=[q.id for q in usable],
        log_x=reg.log_x_,
        log_y=reg.log_y_,
        fitted=reg.fitted_,
        residuals=reg.residuals_,
        leverage=h,
        standardized_residuals=std_resid,
        n_excluded=n_excluded,
        notes=notes,
    )


@dataclass(frozen=True)
class IoPair:
    id: str
    x: float
    y: float
    featurization: str = TI


@dataclass
class IoPairs:
    pairs: list
    excluded: int = 0

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)

    def __getitem__(self, i):
        return self.pairs[i]


def io_pair(q, variant):
    m = q.m(variant)
    x = q.s / (INTENSITY_BOUND * m)
    return IoPair(q.id, min(max(x, 0.0), 1.0), m / q.l, variant)


def make_io_pairs(quantities, variant=TI):
    """Inputs ``s / (4 m)`` and outputs ``m / l``; rows with ``m = 0`` are excluded."""
    variant = check_tag(variant)
    pairs = [io_pair(q, variant) for q in quantities if q.m(variant) > 0 and q.l > 0]
    return IoPairs(pairs, len(quantities) - len(pairs))


@dataclass(frozen=True)
class TransferFunction:
    alpha: float
    c2: float

    def __post_init__(self):
        if self.alpha == 1.0:
            raise DomainError("alpha = 1 leaves the exponent alpha / (1 - alpha) undefined")

    @classmethod
    def from_cobb_douglas(cls, alpha, beta):
        if alpha == 1.0:
            raise DomainError("alpha = 1 leaves the exponent alpha / (1 - alpha) undefined")
        c1 = alpha / (1.0 - alpha) * math.log(INTENSITY_BOUND) + math.log(beta) / (1.0 - alpha)
        return cls(alpha, math.exp(c1))

    @property
    def exponent(self):
        return self.alpha / (1.0 - self.alpha)

    @property
    def c1(self):
        return math.log(self.c2)

    @property
    def c3(self):
        return self.c2 * self.exponent

    def __call__(self, x):
        return transfer_eval(self, x)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            return self.c3 * np.power(x, self.exponent - 1.0)


def transfer_eval(tf, x):
    """``c2 * x**(alpha / (1 - alpha))``; ``inf`` at 0 when alpha > 1."""
    x_arr = np.asarray(x, dtype=float)
    if np.any((x_arr < 0) | (x_arr > 1)):
        raise DomainError("transfer function is defined on [0, 1]")
    with np.errstate(divide="ignore", over="ignore"):
        out = tf.c2 * np.power(x_arr, tf.exponent)
    return float(out) if out.ndim == 0 else out


def lipschitz_bound_check(tf, grid_size=1000):
    """Largest |h0'| on the grid k / grid_size, k = 1..grid_size.

    The derivative exponent ``(2 alpha - 1) / (1 - alpha)`` is non-negative
    exactly when ``0.5 <= alpha < 1``; only then is h0' bounded near zero.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    grid = np.arange(1, grid_size + 1) / grid_size
    max_abs = float(np.max(np.abs(tf.derivative(grid))))
    return max_abs, bool(0.5 <= tf.alpha < 1.0)


def _fmt(v):
    return "" if v is None else repr(float(v))


def write_quantities(quantities, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(QUANTITIES_HEADER)
        for q in quantities:
            row = [q.id, _fmt(q.s), q.m_ti, q.m_tiv, _fmt(q.l)]
            for variant in (TI, TIV):
                if q.m(variant) > 0:
                    p = io_pair(q, variant)
                    row += [_fmt(p.x), _fmt(p.y)]
                else:
                    row += ["", ""]
            writer.writerow(row)


def read_quantities(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return [
            NarrativeQuantities(
                id=row["id"], s=float(row["s"]), m_ti=int(row["m_ti"]),
                m_tiv=int(row["m_tiv"]), l=float(row["l"]),
            )
            for row in csv.DictReader(fh)
        ]


def write_diagnostics(fits, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(DIAGNOSTICS_HEADER)
        for fit in fits:
            cols = zip(
                fit.ids, fit.log_x, fit.log_y, fit.fitted, fit.residuals,
                fit.standardized_residuals, fit.scale_location, fit.leverage,
                fit.cooks_distance, fit.qq_theoretical,
            )
            for row in cols:
                writer.writerow([fit.variant, row[0], *(_fmt(v) for v in row[1:])])
