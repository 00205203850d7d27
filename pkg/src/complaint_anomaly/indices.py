"""Concomitant-based indices for systematic anomalies.

Outputs are reordered by their inputs (the concomitants of the input order
statistics) and summarised by

* ``I_n``: share of the total variation made up of upward steps,
* ``S_n``: the total variation itself,
* ``B_{n,p} = S_n / n**(1/p)``.

In an anomaly-free system with increasing transfer function ``I_n = 1`` and
``S_n`` stays bounded; background noise in the inputs pushes ``I_n`` towards
1/2 and makes ``S_n`` grow with ``n``.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .classify import run_repeated
from .exceptions import DegenerateSequenceError, DomainError, InsufficientDataError
from .featurize import check_tag
from .quantify import IoPair, make_io_pairs

INDEX_KINDS = ("I", "S", "B")
DEFAULT_RECIPROCAL_P = (0.6, 0.7, 0.8, 0.9)
INDEX_HEADER = ("run", "model", "featurization", "index_kind", "p", "n", "value")
GROWTH_HEADER = ("model", "featurization", "slope", "slope_lo", "slope_hi", "p_star",
                 "verdicts_per_p")

# slack for comparisons against band edges such as 0.6 + 0.05
_EDGE_EPS = 1e-9


@dataclass(frozen=True)
class ConcomitantSequence:
    y: np.ndarray
    x: np.ndarray
    ids: tuple = ()
    tie_count: int = 0

    def __len__(self):
        return len(self.y)


def order_outputs(x, y, ids=(), jitter=None):
    """Sort outputs by inputs with a stable tie-break on original position.

    ``jitter`` is an optional seed; if given, inputs are perturbed by
    uniform noise of order 1e-12 before sorting to split ties at random.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be one-dimensional and of equal length")
    if len(x) < 2:
        raise InsufficientDataError(f"need at least 2 pairs, got {len(x)}")
    key = x
    if jitter is not None:
        key = x + np.random.default_rng(jitter).uniform(-1e-12, 1e-12, size=len(x))
    order = np.argsort(key, kind="stable")
    xs = x[order]
    ties = int(np.sum(xs[1:] == xs[:-1]))
    ids = tuple(ids[i] for i in order) if len(ids) else ()
    return ConcomitantSequence(y=y[order], x=xs, ids=ids, tie_count=ties)


def concomitants(pairs, jitter=None):
    pairs = list(pairs)
    if len(pairs) < 2:
        raise InsufficientDataError(f"need at least 2 pairs, got {len(pairs)}")
    if isinstance(pairs[0], IoPair):
        return order_outputs([p.x for p in pairs], [p.y for p in pairs],
                             [p.id for p in pairs], jitter=jitter)
    x, y = zip(*pairs)
    return order_outputs(x, y, jitter=jitter)


def _outputs(c):
    y = c.y if isinstance(c, ConcomitantSequence) else np.asarray(c, dtype=float)
    if len(y) < 2:
        raise InsufficientDataError("index needs at least 2 concomitants")
    return y


def s_n(c):
    """Total variation of the concomitant sequence."""
    return float(np.sum(np.abs(np.diff(_outputs(c)))))


def i_index(c):
    diffs = np.diff(_outputs(c))
    total = float(np.sum(np.abs(diffs)))
    if total == 0.0:
        raise DegenerateSequenceError("all concomitants are equal; I-index undefined")
    return float(np.sum(np.where(diffs > 0, diffs, 0.0))) / total


def b_index(c, p):
    if not p > 0:
        raise DomainError(f"p must be positive, got {p}")
    total = s_n(c)
    if math.isinf(p):
        return total
    return total / len(_outputs(c)) ** (1.0 / p)


def i_identity_check(c):
    """Return I_n and its rewriting (1 + (y_last - y_first) / S_n) / 2."""
    y = _outputs(c)
    total = s_n(y)
    if total == 0.0:
        raise DegenerateSequenceError("all concomitants are equal; I-index undefined")
    return i_index(y), 0.5 * (1.0 + (y[-1] - y[0]) / total)


@dataclass(frozen=True)
class IndexPoint:
    run: int
    n: int
    value: float
    index_kind: str
    p: float | None = None
    model: str = ""
    featurization: str = ""


def _index_values(seq, index_kinds, p_values):
    out = []
    for kind in index_kinds:
        if kind == "I":
            out.append(("I", None, i_index(seq)))
        elif kind == "S":
            out.append(("S", None, s_n(seq)))
        else:
            out.extend(("B", p, b_index(seq, p)) for p in p_values)
    return out


@dataclass
class Algorithm1Result:
    points: list
    skipped_runs: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)


def indices_from_runs(run_results, quantities, index_kinds=("I",), p_values=(), jitter=None):
    """Index points for the predicted-meritorious set of each classification run."""
    index_kinds = tuple(k.upper() for k in index_kinds)
    unknown = set(index_kinds) - set(INDEX_KINDS)
    if unknown:
        raise ValueError(f"unknown index kind(s) {sorted(unknown)}")
    by_id = {q.id: q for q in quantities}
    result = Algorithm1Result([])
    for rr in run_results:
        subset = [by_id[i] for i in rr.meritorious_test_ids if i in by_id]
        pairs = make_io_pairs(subset, rr.featurization)
        if len(pairs) < 2:
            result.skipped_runs.append(rr.run)
            continue
        seq = concomitants(pairs, jitter=jitter)
        try:
            values = _index_values(seq, index_kinds, p_values)
        except DegenerateSequenceError:
            result.skipped_runs.append(rr.run)
            continue
        result.points.extend(
            IndexPoint(rr.run, len(seq), v, kind, p, rr.model, rr.featurization)
            for kind, p, v in values
        )
    return result


def run_algorithm1(dataset, kind, featurization, spec, quantities, index_kinds=("I",),
                   p_values=(), lexicon=None, model_params=None):
    """Split, train, predict and index the predicted-meritorious test subset per run.

    Each run contributes one ``(n, value)`` point per requested index; runs
    whose meritorious subset has fewer than two usable pairs are skipped and
    listed in ``skipped_runs``.
    """
    runs = run_repeated(kind, check_tag(featurization), dataset, spec, lexicon, model_params)
    return indices_from_runs(runs, quantities, index_kinds, p_values)


@dataclass(frozen=True)
class GrowthEstimate:
    slope: float
    intercept: float
    slope_ci95: tuple
    p_star: float
    n_points: int
    verdicts: dict = field(default_factory=dict)


def classify_order(slope, reciprocal_p, tau=0.05):
    """Verdict on p-reasonable order for the p with 1/p = ``reciprocal_p``.

    "out" when the growth exponent clears 1/p by at least ``tau``, "in" when it
    falls short by at least ``tau``, "inconclusive" inside the band.
    """
    gap = slope - reciprocal_p
    if gap >= tau - _EDGE_EPS:
        return "out"
    if gap <= -tau + _EDGE_EPS:
        return "in"
    return "inconclusive"


def estimate_growth(points, p_values=(), tau=0.05, min_distinct_n=10):
    """Fit ``log S_n = a + slope * log n`` across runs; ``p* = 1 / slope``."""
    pts = [(p.n, p.value) if isinstance(p, IndexPoint) else tuple(p) for p in points]
    if len({n for n, _ in pts}) < min_distinct_n:
        raise InsufficientDataError(
            f"need points at {min_distinct_n} or more distinct n, got {len({n for n, _ in pts})}"
        )
    n_arr = np.array([n for n, _ in pts], dtype=float)
    s_arr = np.array([s for _, s in pts], dtype=float)
    if np.any(s_arr <= 0) or np.any(n_arr <= 0):
        raise InsufficientDataError("growth fit needs positive n and S_n")
    fit = stats.linregress(np.log(n_arr), np.log(s_arr))
    dof = len(pts) - 2
    half = stats.t.ppf(0.975, dof) * fit.stderr if dof > 0 else math.inf
    slope = float(fit.slope)
    verdicts = {float(p): classify_order(slope, 1.0 / p, tau) for p in p_values}
    return GrowthEstimate(
        slope=slope,
        intercept=float(fit.intercept),
        slope_ci95=(float(slope - half), float(slope + half)),
        p_star=1.0 / slope if slope > 0 else math.inf,
        n_points=len(pts),
        verdicts=verdicts,
    )


@dataclass(frozen=True)
class SyntheticSystemSpec:
    """Input/output system ``y = c2 * (x + delta)**(alpha / (1 - alpha))``.

    ``delta`` is ``None`` (anomaly free), ``("gaussian", sigma)`` or
    ``("uniform", low, high)``; ``inputs`` is ``"uniform"`` or
    ``("beta", a, b)``, both on [0, 1].
    """

    n: int
    alpha: float = 2.0 / 3.0
    c2: float = 1.0
    delta: tuple | None = None
    inputs: object = "uniform"
    seed: int = 0


def _draw_inputs(rng, spec, size):
    if spec.inputs == "uniform":
        return rng.uniform(0.0, 1.0, size)
    name, a, b = spec.inputs
    if name != "beta":
        raise ValueError(f"unknown input distribution {spec.inputs!r}")
    return rng.beta(a, b, size)


def _draw_delta(rng, spec, size):
    if spec.delta is None or spec.delta == "none":
        return np.zeros(size)
    name, *params = spec.delta
    if name == "gaussian":
        return rng.normal(0.0, params[0], size)
    if name == "uniform":
        return rng.uniform(params[0], params[1], size)
    raise ValueError(f"unknown background-risk distribution {spec.delta!r}")


def synthetic_arrays(spec):
    """Inputs and outputs of a synthetic system as arrays.

    Shifted inputs that land at or below zero are clamped to 0 when
    ``alpha < 1``; when ``alpha > 1`` their shifts are redrawn.
    """
    if spec.alpha == 1.0:
        raise DomainError("alpha = 1 leaves the exponent undefined")
    rng = np.random.default_rng(spec.seed)
    x = _draw_inputs(rng, spec, spec.n)
    z = x + _draw_delta(rng, spec, spec.n)
    if spec.alpha > 1.0:
        bad = z <= 0
        for _ in range(1000):
            if not bad.any():
                break
            z[bad] = x[bad] + _draw_delta(rng, spec, int(bad.sum()))
            bad = z <= 0
        else:
            raise DomainError("could not draw positive shifted inputs")
    else:
        z = np.maximum(z, 0.0)
    y = spec.c2 * np.power(z, spec.alpha / (1.0 - spec.alpha))
    return x, y


def generate_synthetic(spec):
    x, y = synthetic_arrays(spec)
    return [IoPair(str(i), float(a), float(b)) for i, (a, b) in enumerate(zip(x, y))]


def prefix_total_variation(x, y, sizes):
    """``S_n`` of the first ``n`` pairs for every ``n`` in ``sizes``."""
    return [(int(n), s_n(order_outputs(x[:n], y[:n]))) for n in sizes]


def write_index_points(points, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(INDEX_HEADER)
        for pt in points:
            writer.writerow([
                pt.run, pt.model, pt.featurization, pt.index_kind,
                "" if pt.p is None else repr(pt.p), pt.n, repr(pt.value),
            ])


def read_index_points(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return [
            IndexPoint(
                run=int(r["run"]), n=int(r["n"]), value=float(r["value"]),
                index_kind=r["index_kind"], p=float(r["p"]) if r["p"] else None,
                model=r["model"], featurization=r["featurization"],
            )
            for r in csv.DictReader(fh)
        ]


def format_verdicts(verdicts):
    return ";".join(f"{1.0 / p:.3g}:{v}" for p, v in sorted(verdicts.items(), reverse=True))
