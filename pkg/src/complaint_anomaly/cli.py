"""Command-line front end: ingest -> clean -> featurize -> train -> indices -> report.

Every stage reads the artifacts of the previous one from the output
directory and writes its own next to them.
"""

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path

import numpy as np

from . import classify, corpus, featurize, indices, ingest, quantify, svg
from .exceptions import ComplaintAnomalyError, ConfigurationError, StageOrderError
from .lexicon import load_lexicon
from .models import MODEL_KINDS

RECORDS = "records.jsonl"
CLEANED = "cleaned.tsv"
QUANTITIES = "quantities.csv"
COBB_DOUGLAS = "cobb_douglas.csv"
DIAGNOSTICS = "diagnostics.csv"
RUNS = "runs.jsonl"
METRICS = "metrics.csv"
INDICES = "indices.csv"
GROWTH = "growth.csv"
TABLE2 = "table2.csv"
REFERENCE = "reference_comparison.csv"

# Published averages over 500 splits: (accuracy, merit, F1) in percent.
PUBLISHED_TABLE2 = {
    ("LR", "TI"): (67.37, 15.41, 78.00), ("LR", "TIV"): (63.96, 8.52, 76.80),
    ("SVM", "TI"): (67.30, 13.24, 78.24), ("SVM", "TIV"): (63.72, 7.29, 76.65),
    ("GB", "TI"): (64.61, 16.43, 76.03), ("GB", "TIV"): (62.75, 11.31, 75.44),
    ("MLP", "TI"): (58.08, 36.04, 71.22), ("MLP", "TIV"): (56.50, 34.96, 66.38),
    ("RF", "TI"): (65.56, 9.80, 77.64), ("RF", "TIV"): (60.67, 18.71, 73.28),
}
# Published alpha estimates with 95% intervals, and reported ranges of 1/p*.
PUBLISHED_ALPHA = {"TI": (0.990, 0.983, 0.997), "TIV": (1.004, 1.001, 1.007)}
PUBLISHED_INV_P_STAR = {"TI": (0.7, 0.8), "TIV": (0.6, 0.7)}

S_AXIS = (0.0, 200.0)
B_AXIS = (0.0, 5.0)


def _sample_corpus():
    return resources.files(__package__).joinpath("data/sample_complaints.csv")


@dataclass(frozen=True)
class RunConfig:
    out: Path = Path("out")
    input: Path | None = None
    cpi: Path | None = None
    lexicon: Path | None = None
    stopwords: Path | None = None
    frequent_words: Path | None = None
    company: str | None = None
    featurization: str = "both"
    model: str = "all"
    test_frac: float = 0.4
    repeats: int = 500
    p: tuple = (1.667, 1.429, 1.25, 1.111)
    seed: int = 0
    count_punctuation: bool = False
    exclaim_intensity: float | None = None
    question_intensity: float | None = None
    real_data: bool = False

    @property
    def featurizations(self):
        if self.featurization == "both":
            return featurize.TAGS
        return (featurize.check_tag(self.featurization),)

    @property
    def models(self):
        if self.model == "all":
            return MODEL_KINDS
        return tuple(m.strip().upper() for m in self.model.split(","))

    @property
    def split_spec(self):
        return classify.SplitSpec(self.test_frac, self.seed, self.repeats)

    def path(self, name):
        return Path(self.out) / name

    def validate(self):
        for name in ("input", "cpi", "lexicon", "stopwords", "frequent_words"):
            value = getattr(self, name)
            if value is not None and not Path(value).is_file():
                raise ConfigurationError(f"--{name.replace('_', '-')}: no such file {value}")
        if any(not p > 0 for p in self.p):
            raise ConfigurationError("all --p values must be positive")
        for m in self.models:
            if m not in MODEL_KINDS:
                raise ConfigurationError(f"unknown model {m!r}")
        return self


def _parse_p(text):
    if isinstance(text, (tuple, list)):
        return tuple(float(v) for v in text)
    values = []
    for item in str(text).split(","):
        item = item.strip().lower()
        values.append(math.inf if item in ("inf", "infinity") else float(item))
    return tuple(values)


def _coerce(name, value):
    kinds = {f.name: f.type for f in fields(RunConfig)}
    if value is None:
        return None
    if name == "p":
        return _parse_p(value)
    kind = kinds[name]
    if kind == "bool" or kind is bool:
        if isinstance(value, bool):
            return value
        return str(value).strip().lower() in ("1", "true", "yes", "on")
    if name in ("test_frac", "exclaim_intensity", "question_intensity"):
        return float(value)
    if name in ("repeats", "seed"):
        return int(value)
    if name in ("out", "input", "cpi", "lexicon", "stopwords", "frequent_words"):
        return Path(value)
    return str(value)


def read_config_file(path):
    """Flat ``key = value`` file; ``#`` starts a comment."""
    values = {}
    known = {f.name for f in fields(RunConfig)}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in known:
            raise ConfigurationError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def build_config(args):
    """Defaults, overridden by the config file, overridden by flags."""
    merged = {}
    if getattr(args, "config", None):
        merged.update(read_config_file(args.config))
    for f in fields(RunConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            merged[f.name] = value
    config = RunConfig(**{k: _coerce(k, v) for k, v in merged.items()})
    return config.validate()


def _require(config, *names):
    for name in names:
        if not config.path(name).is_file():
            raise StageOrderError(f"missing artifact {config.path(name)}; run the earlier stage first")


def _lexicon(config):
    lex = load_lexicon(config.lexicon)
    return lex.with_overrides({"!": config.exclaim_intensity, "?": config.question_intensity})


def _log(msg):
    print(msg, file=sys.stderr)


def cmd_ingest(config):
    source = config.input or _sample_corpus()
    with open(source, newline="", encoding="utf-8") as fh:
        parsed = ingest.parse_complaints(fh)
    cpi = ingest.load_cpi(config.cpi)
    filters = ingest.SelectionFilters(company=config.company)
    records = ingest.select_records(parsed.complaints, cpi, filters)
    Path(config.out).mkdir(parents=True, exist_ok=True)
    ingest.write_records(records, config.path(RECORDS))
    _log(f"ingest: {len(parsed)} narratives read, {parsed.skipped} blank, "
         f"{len(records)} selected ({sum(r.merit for r in records)} meritorious)")
    return 0


def cmd_clean(config):
    _require(config, RECORDS)
    records = ingest.read_records(config.path(RECORDS))
    stop = corpus.load_word_list(config.stopwords) - corpus.NEGATIONS if config.stopwords else None
    frequent = corpus.load_word_list(config.frequent_words) if config.frequent_words else None
    cleaned = corpus.clean_records(records, stop, frequent)
    corpus.write_cleaned(cleaned, config.path(CLEANED))
    _log(f"clean: {len(cleaned)} narratives cleaned")
    return 0


def _write_fits(fits, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["variant", "alpha_hat", "ci_lo", "ci_hi", "beta_hat", "intercept",
                         "n", "n_excluded", "c2", "lipschitz_on_unit_interval", "note"])
        for fit in fits:
            tf = fit.transfer_function() if fit.alpha_hat != 1.0 else None
            writer.writerow([
                fit.variant, repr(fit.alpha_hat), repr(fit.alpha_ci95[0]), repr(fit.alpha_ci95[1]),
                repr(fit.beta_hat), repr(fit.intercept), fit.n, fit.n_excluded,
                repr(tf.c2) if tf else "", quantify.lipschitz_bound_check(tf)[1] if tf else "",
                "; ".join(fit.notes),
            ])


def _read_fits(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def cmd_featurize(config):
    _require(config, RECORDS, CLEANED)
    records = ingest.read_records(config.path(RECORDS))
    cleaned = corpus.read_cleaned(config.path(CLEANED))
    lex = _lexicon(config)
    for tag in config.featurizations:
        fm = featurize.build_matrix(cleaned, lex, tag)
        featurize.write_matrix(fm, config.path(f"features_{tag}.csv"))
    amounts = {r.id: r.adjusted_amount for r in records}
    quantities = quantify.compute_quantities(cleaned, amounts, lex, config.count_punctuation)
    quantify.write_quantities(quantities, config.path(QUANTITIES))
    fits = []
    for tag in config.featurizations:
        try:
            fits.append(quantify.fit_cobb_douglas(quantities, tag))
        except ComplaintAnomalyError as exc:
            _log(f"featurize: Cobb-Douglas fit for {tag} skipped: {exc}")
    _write_fits(fits, config.path(COBB_DOUGLAS))
    quantify.write_diagnostics(fits, config.path(DIAGNOSTICS))
    for fit in fits:
        _log(f"featurize: {fit.variant} alpha={fit.alpha_hat:.4f} "
             f"CI=({fit.alpha_ci95[0]:.4f}, {fit.alpha_ci95[1]:.4f}) n={fit.n}")
    return 0


def _run_to_json(r):
    m = r.metrics
    return json.dumps({
        "model": r.model, "featurization": r.featurization, "run": r.run,
        "tp": m.tp, "fp": m.fp, "tn": m.tn, "fn": m.fn,
        "test_ids": list(r.test_ids), "meritorious_test_ids": list(r.meritorious_test_ids),
    })


def _run_from_json(line):
    d = json.loads(line)
    return classify.RunResult(
        run=d["run"], model=d["model"], featurization=d["featurization"],
        metrics=classify.EvalMetrics(d["tp"], d["fp"], d["tn"], d["fn"]),
        test_ids=tuple(d["test_ids"]), meritorious_test_ids=tuple(d["meritorious_test_ids"]),
    )


def read_runs(path):
    with open(path, encoding="utf-8") as fh:
        return [_run_from_json(line) for line in fh if line.strip()]


def cmd_train(config):
    _require(config, RECORDS, CLEANED)
    records = ingest.read_records(config.path(RECORDS))
    cleaned = corpus.read_cleaned(config.path(CLEANED))
    dataset = classify.Dataset.from_cleaned(cleaned, {r.id: r.merit for r in records})
    lex = _lexicon(config)
    results = []
    for tag in config.featurizations:
        for kind in config.models:
            results.extend(classify.run_repeated(kind, tag, dataset, config.split_spec, lex))
            summary = classify.summarize(results[-config.repeats:])
            _log(f"train: {kind}/{tag} accuracy={summary['accuracy']:.4f}")
    classify.write_metrics(results, config.path(METRICS))
    with open(config.path(RUNS), "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(_run_to_json(r) + "\n" for r in results)
    return 0


def _growth_rows(points, p_values):
    groups = {}
    for pt in points:
        if pt.index_kind == "S":
            groups.setdefault((pt.model, pt.featurization), []).append(pt)
    rows = []
    for (model, tag), pts in sorted(groups.items()):
        try:
            g = indices.estimate_growth(pts, p_values)
        except ComplaintAnomalyError:
            rows.append([model, tag, "", "", "", "", "insufficient"])
            continue
        rows.append([model, tag, repr(g.slope), repr(g.slope_ci95[0]), repr(g.slope_ci95[1]),
                     repr(g.p_star), indices.format_verdicts(g.verdicts)])
    return rows


def cmd_indices(config):
    _require(config, RUNS, QUANTITIES)
    runs = read_runs(config.path(RUNS))
    quantities = quantify.read_quantities(config.path(QUANTITIES))
    points = []
    skipped = 0
    for key in sorted({(r.model, r.featurization) for r in runs}):
        subset = [r for r in runs if (r.model, r.featurization) == key]
        res = indices.indices_from_runs(subset, quantities, ("I", "S", "B"), config.p)
        points.extend(res.points)
        skipped += len(res.skipped_runs)
    indices.write_index_points(points, config.path(INDICES))
    with open(config.path(GROWTH), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(indices.GROWTH_HEADER)
        writer.writerows(_growth_rows(points, config.p))
    _log(f"indices: {len(points)} index values, {skipped} runs skipped (meritorious set < 2)")
    return 0


def _table2(config):
    with open(config.path(METRICS), newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    groups = {}
    for r in rows:
        groups.setdefault((r["model"], r["featurization"]), []).append(r)
    out = []
    for key in sorted(groups, key=lambda k: (MODEL_KINDS.index(k[0]), k[1])):
        rs = groups[key]
        mean = {c: float(np.mean([float(r[c]) for r in rs]))
                for c in ("accuracy", "predicted_merit_rate", "merit_recall", "f1_pos", "f1_neg")}
        published = PUBLISHED_TABLE2.get(key, ("", "", ""))
        out.append([key[0], key[1], len(rs), *(f"{mean[c]:.4f}" for c in mean), *published])
    return out


def _x_axis(ns):
    top = max(ns) if ns else 1
    return (0.0, float(max(10, math.ceil(top * 1.05 / 10) * 10)))


def _index_figures(points, p_values):
    figures = {}
    models = [m for m in MODEL_KINDS if any(p.model == m for p in points)]
    for model in models:
        mine = [p for p in points if p.model == model]
        x_range = _x_axis([p.n for p in mine])

        def series(kind, p=None):
            out = []
            for k, tag in enumerate(featurize.TAGS):
                sel = [q for q in mine if q.index_kind == kind and q.featurization == tag
                       and (p is None or q.p == p)]
                if sel:
                    label = "TF-IDF" if tag == "TI" else "TF-IDF-VADER"
                    out.append(svg.Series([q.n for q in sel], [q.value for q in sel], label,
                                          color=svg.PALETTE[k]))
            return out

        figures[f"i_index_{model}.svg"] = svg.render(
            [svg.Panel(f"I_n, {model}", x_range, (0.0, 1.0), series("I"), "n", "I_n")])
        figures[f"s_n_{model}.svg"] = svg.render(
            [svg.Panel(f"S_n, {model}", x_range, S_AXIS, series("S"), "n", "S_n")])
        figures[f"b_index_{model}.svg"] = svg.render(
            [svg.Panel(f"1/p = {1 / p:.2f}", x_range, B_AXIS, series("B", p), "n", "B_n,p")
             for p in p_values if math.isfinite(p)],
            title=f"B-index, {model}",
        )
    return figures


def _padded(values):
    values = [v for v in values if math.isfinite(v)]
    lo, hi = min(values), max(values)
    pad = (hi - lo) * 0.05 or 1.0
    return (lo - pad, hi + pad)


def _fit_figures(config):
    figures = {}
    with open(config.path(DIAGNOSTICS), newline="", encoding="utf-8") as fh:
        diag = list(csv.DictReader(fh))
    fits = {f["variant"]: f for f in _read_fits(config.path(COBB_DOUGLAS))}
    for tag, fit in fits.items():
        rows = [r for r in diag if r["variant"] == tag]
        if not rows:
            continue
        col = {k: [float(r[k]) for r in rows] for k in rows[0] if k not in ("variant", "id")}
        alpha, intercept = float(fit["alpha_hat"]), float(fit["intercept"])
        xr = _padded(col["log_x"])
        line = svg.Series(list(xr), [intercept + alpha * v for v in xr], "least squares",
                          kind="line", color=svg.PALETTE[1])
        figures[f"cobb_douglas_{tag}.svg"] = svg.render([svg.Panel(
            f"log(m/l) vs log(s/l), {tag}: alpha = {alpha:.3f}", xr,
            _padded(col["log_y"] + [line.y[0], line.y[1]]),
            [svg.Series(col["log_x"], col["log_y"]), line], "log(s/l)", "log(m/l)")])
        sorted_q = sorted(zip(col["qq_theoretical"], col["std_residual"]))
        qx = [a for a, _ in sorted_q]
        figures[f"diagnostics_{tag}.svg"] = svg.render([
            svg.Panel("Residuals vs Fitted", _padded(col["fitted"]), _padded(col["residual"]),
                      [svg.Series(col["fitted"], col["residual"])], "fitted", "residual"),
            svg.Panel("Normal Q-Q", _padded(qx), _padded([b for _, b in sorted_q] + qx),
                      [svg.Series(qx, [b for _, b in sorted_q]),
                       svg.Series([qx[0], qx[-1]], [qx[0], qx[-1]], kind="line",
                                  color=svg.PALETTE[1])],
                      "theoretical quantile", "standardized residual"),
            svg.Panel("Scale-Location", _padded(col["fitted"]),
                      (0.0, _padded(col["sqrt_abs_std_residual"])[1]),
                      [svg.Series(col["fitted"], col["sqrt_abs_std_residual"])],
                      "fitted", "sqrt(|standardized residual|)"),
            svg.Panel("Residuals vs Leverage", (0.0, _padded(col["leverage"])[1]),
                      _padded(col["std_residual"]),
                      [svg.Series(col["leverage"], col["std_residual"])],
                      "leverage", "standardized residual"),
        ], title=f"Diagnostics, {tag}")
    return figures


def _reference_rows(config):
    rows = []
    for f in _read_fits(config.path(COBB_DOUGLAS)):
        ref = PUBLISHED_ALPHA.get(f["variant"])
        if ref:
            rows.append(["alpha", f["variant"], "", f["alpha_hat"], f["ci_lo"], f["ci_hi"], *ref])
    if config.path(GROWTH).is_file():
        with open(config.path(GROWTH), newline="", encoding="utf-8") as fh:
            for g in csv.DictReader(fh):
                lo, hi = PUBLISHED_INV_P_STAR[g["featurization"]]
                rows.append(["1/p_star", g["featurization"], g["model"],
                             repr(1 / float(g["p_star"])) if g["p_star"] else "", "", "",
                             "", lo, hi])
    return rows


def cmd_report(config):
    _require(config, METRICS, INDICES, COBB_DOUGLAS, DIAGNOSTICS)
    points = indices.read_index_points(config.path(INDICES))
    if not points:
        raise ComplaintAnomalyError(f"{config.path(INDICES)} holds no index values; nothing to plot")
    table = _table2(config)
    # render everything before writing anything
    figures = _index_figures(points, config.p)
    figures.update(_fit_figures(config))

    with open(config.path(TABLE2), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["model", "featurization", "runs", "accuracy", "merit_predicted_rate",
                         "merit_recall", "f1_pos", "f1_neg", "published_accuracy_pct",
                         "published_merit_pct", "published_f1_pct"])
        writer.writerows(table)
    for name, text in sorted(figures.items()):
        config.path(name).write_text(text, encoding="utf-8")
    if config.real_data:
        with open(config.path(REFERENCE), "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["quantity", "featurization", "model", "estimate", "ci_lo", "ci_hi",
                             "published", "published_lo", "published_hi"])
            writer.writerows(_reference_rows(config))

    print(f"{'model':<6}{'feat':<5}{'accuracy':>10}{'merit (predicted rate)':>24}"
          f"{'F1+':>8}{'F1-':>8}   published acc/merit/F1")
    for row in table:
        pub = "/".join(f"{v:.2f}" for v in row[8:]) if row[8] != "" else "-"
        print(f"{row[0]:<6}{row[1]:<5}{float(row[3]):>10.4f}{float(row[4]):>24.4f}"
              f"{float(row[6]):>8.4f}{float(row[7]):>8.4f}   {pub}")
    if config.real_data:
        for row in _reference_rows(config):
            print("reference:", ", ".join(str(v) for v in row))
    return 0


def cmd_run(config):
    for step in (cmd_ingest, cmd_clean, cmd_featurize, cmd_train, cmd_indices, cmd_report):
        step(config)
    return 0


COMMANDS = {
    "ingest": cmd_ingest, "clean": cmd_clean, "featurize": cmd_featurize,
    "train": cmd_train, "indices": cmd_indices, "report": cmd_report, "run": cmd_run,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="complaint-anomaly",
        description="Detect systematic non-meritorious complaints in narrative data.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value file; flags take precedence")
    common.add_argument("--out", help="artifact directory (default: out)")
    common.add_argument("--input", help="CFPB-style complaints CSV (default: bundled sample)")
    common.add_argument("--cpi", help="CPI table as year,cpi CSV (default: bundled CPI-U)")
    common.add_argument("--lexicon", help="VADER-format lexicon (default: vaderSentiment's)")
    common.add_argument("--stopwords", help="stop-word list, one per line")
    common.add_argument("--frequent-words", dest="frequent_words",
                        help="corpus-specific frequent words, one per line")
    common.add_argument("--company", help="keep only complaints about this company")
    common.add_argument("--featurization", choices=["tfidf", "tfidf-vader", "both"])
    common.add_argument("--model", help="lr, svm, gb, mlp, rf, a comma list, or all")
    common.add_argument("--test-frac", dest="test_frac", type=float)
    common.add_argument("--repeats", type=int)
    common.add_argument("--p", help="comma list of p values (inf allowed)")
    common.add_argument("--seed", type=int)
    common.add_argument("--count-punctuation", dest="count_punctuation",
                        action="store_const", const=True,
                        help='count "!" and "?" as words in m and s')
    common.add_argument("--exclaim-intensity", dest="exclaim_intensity", type=float)
    common.add_argument("--question-intensity", dest="question_intensity", type=float)
    common.add_argument("--real-data", dest="real_data", action="store_const", const=True,
                        help="report published reference values side by side")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.featurization is not None:
        args.featurization = {"tfidf": "TI", "tfidf-vader": "TIV"}.get(
            args.featurization, args.featurization)
    try:
        config = build_config(args)
        return COMMANDS[args.command](config)
    except (ComplaintAnomalyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
