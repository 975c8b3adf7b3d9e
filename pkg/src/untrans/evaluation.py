"""Word-level ranking metrics, leave-one-talk-out cross-validation with dev
tuning, feature ablation, and paired-bootstrap significance tests."""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, MetricError
from .features import ABLATION_GROUPS, FEATURE_VERSION, FeatureConfig, Resources, gold_examples
from .model import DEFAULT_GRID, TrainConfig, train
from .tagger import baseline_frequency, baseline_select_pos, tag_sentence

SYSTEMS = ("select_pos", "freq", "svm")
SYSTEM_LABELS = {
    "select_pos": "Select noun/# POS tag",
    "freq": "Optimal freq threshold",
    "svm": "SVM (all features)",
}


@dataclass
class ScoredSet:
    """Parallel arrays of scores, 0/1 gold labels and sentence ids."""

    scores: np.ndarray
    gold: np.ndarray
    sentence_ids: list

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=float)
        self.gold = np.asarray(self.gold, dtype=int)
        self.sentence_ids = list(self.sentence_ids)
        if not (len(self.scores) == len(self.gold) == len(self.sentence_ids)):
            raise DomainError("scores, gold and sentence ids must have equal length")

    def __len__(self):
        return len(self.scores)

    @classmethod
    def concat(cls, sets):
        sets = list(sets)
        if not sets:
            return cls([], [], [])
        return cls(np.concatenate([s.scores for s in sets]),
                   np.concatenate([s.gold for s in sets]),
                   [sid for s in sets for sid in s.sentence_ids])


def _curve_arrays(scores, gold):
    n_pos = int(gold.sum())
    if n_pos == 0:
        raise MetricError("precision/recall undefined without positive examples")
    order = np.argsort(-scores, kind="mergesort")
    s = scores[order]
    g = gold[order]
    tp = np.cumsum(g)
    # last position of each group of tied scores
    last = np.r_[np.flatnonzero(s[1:] != s[:-1]), len(s) - 1]
    tp = tp[last]
    predicted = last + 1
    return tp / predicted, tp / n_pos, s[last]


def pr_curve(s: ScoredSet):
    """``(precision, recall, threshold)`` per distinct score, highest first.

    A token is predicted positive at threshold t when its score is >= t.
    """
    precision, recall, thresholds = _curve_arrays(s.scores, s.gold)
    return list(zip(precision.tolist(), recall.tolist(), thresholds.tolist()))


def _ap(scores, gold):
    precision, recall, _ = _curve_arrays(scores, gold)
    return float(np.sum(np.diff(recall, prepend=0.0) * precision))


def average_precision(s: ScoredSet) -> float:
    """Sum over thresholds of (recall increase) x precision."""
    return _ap(s.scores, s.gold)


def best_f1_threshold(s: ScoredSet):
    precision, recall, thresholds = _curve_arrays(s.scores, s.gold)
    f1 = np.where(precision + recall > 0, 2 * precision * recall / np.maximum(precision + recall, 1e-300), 0.0)
    i = int(np.argmax(f1))
    return float(thresholds[i])


def precision_recall_at(s: ScoredSet, threshold):
    pred = s.scores >= threshold
    tp = int(np.sum(pred & (s.gold == 1)))
    n_pred = int(pred.sum())
    n_pos = int(s.gold.sum())
    return (tp / n_pred if n_pred else 0.0, tp / n_pos if n_pos else 0.0)


@dataclass
class BootstrapResult:
    p_value: float
    mean_a: float
    mean_b: float
    a_better: int
    b_better: int
    ties: int
    iterations: int

    def to_dict(self):
        return dict(self.__dict__)


def paired_bootstrap(a: ScoredSet, b: ScoredSet, iterations=1000, seed=42) -> BootstrapResult:
    """Paired bootstrap over sentences for the AP difference of two systems.

    Each resample draws sentences with replacement and scores both systems on
    the same draw. The p-value is the share of resamples where the system with
    the lower mean AP is at least as good as the other, ties counting one
    half. Resamples without positives are discarded.
    """
    if a.sentence_ids != b.sentence_ids or not np.array_equal(a.gold, b.gold):
        raise DomainError("paired bootstrap needs identical sentence/gold structure")
    groups = {}
    for i, sid in enumerate(a.sentence_ids):
        groups.setdefault(sid, []).append(i)
    members = [np.array(ix) for ix in groups.values()]
    rng = np.random.default_rng(seed)
    ap_a = []
    ap_b = []
    for _ in range(iterations):
        pick = rng.integers(0, len(members), size=len(members))
        idx = np.concatenate([members[k] for k in pick]) if len(members) else np.array([], dtype=int)
        gold = a.gold[idx]
        if gold.sum() == 0:
            continue
        ap_a.append(_ap(a.scores[idx], gold))
        ap_b.append(_ap(b.scores[idx], gold))
    ap_a = np.array(ap_a)
    ap_b = np.array(ap_b)
    n = len(ap_a)
    if n == 0:
        raise MetricError("no bootstrap resample contained a positive example")
    a_better = int(np.sum(ap_a > ap_b))
    b_better = int(np.sum(ap_b > ap_a))
    ties = n - a_better - b_better
    mean_a, mean_b = float(ap_a.mean()), float(ap_b.mean())
    lower_wins = a_better if mean_a < mean_b else b_better
    p = (lower_wins + 0.5 * ties) / n
    return BootstrapResult(p, mean_a, mean_b, a_better, b_better, ties, n)


# ---------------------------------------------------------------------------
# word-level scored sets from taggers

NON_CANDIDATE = -math.inf


def predictions_to_set(predictions, gold_tags, sentence_id) -> ScoredSet:
    scores = [NON_CANDIDATE if p.score is None else p.score for p in predictions]
    return ScoredSet(scores, [1 if t == "I" else 0 for t in gold_tags], [sentence_id] * len(scores))


def _gold_sentences(talk, rank):
    for triple in talk.triples:
        tags = triple.gold.get(rank)
        if tags is not None:
            yield (talk.talk_id, triple.source.sentence_index), triple.source, tags


def score_talk(talk, rank, tagger) -> ScoredSet:
    """Run ``tagger(sentence)`` over every gold-tagged sentence of a talk."""
    return ScoredSet.concat(
        predictions_to_set(tagger(sentence), tags, sid)
        for sid, sentence, tags in _gold_sentences(talk, rank)
    )


def _safe_ap(s):
    try:
        return average_precision(s)
    except MetricError:
        return float("nan")


# ---------------------------------------------------------------------------
# cross-validation


@dataclass
class FoldResult:
    test_talk: str
    dev_talk: str
    train_talks: list
    chosen_C: float
    dev_ap: dict
    test_ap: dict
    freq_threshold: float | None
    freq_operating_point: tuple | None
    test_sets: dict = field(repr=False, default_factory=dict)
    model: object = field(repr=False, default=None)

    def to_dict(self):
        return {
            "test_talk": self.test_talk, "dev_talk": self.dev_talk, "train_talks": self.train_talks,
            "chosen_C": self.chosen_C, "dev_ap": {repr(k): v for k, v in self.dev_ap.items()},
            "test_ap": self.test_ap, "freq_threshold": self.freq_threshold,
            "freq_operating_point": self.freq_operating_point,
        }


@dataclass
class EvalReport:
    rank: str
    feature_config: dict
    folds: list
    systems: dict
    bootstrap: dict
    pr_points: dict = field(default_factory=dict)
    label: str = "all"

    def mean_ap(self, system="svm"):
        return self.systems[system]["mean_ap"]

    def to_dict(self):
        return {
            "rank": self.rank, "label": self.label, "feature_config": self.feature_config,
            "folds": [f.to_dict() for f in self.folds], "systems": self.systems,
            "bootstrap": self.bootstrap,
            "pr_points": {k: [list(p) for p in v] for k, v in self.pr_points.items()},
        }

    @classmethod
    def from_dict(cls, d):
        folds = [FoldResult(f["test_talk"], f["dev_talk"], f["train_talks"], f["chosen_C"],
                            {float(k): v for k, v in f["dev_ap"].items()}, f["test_ap"], f["freq_threshold"],
                            tuple(f["freq_operating_point"]) if f["freq_operating_point"] else None)
                 for f in d["folds"]]
        return cls(d["rank"], d["feature_config"], folds, d["systems"], d["bootstrap"],
                   {k: [tuple(p) for p in v] for k, v in d.get("pr_points", {}).items()},
                   d.get("label", "all"))


def _fmt_ap(x):
    return "  n/a" if x is None or (isinstance(x, float) and math.isnan(x)) else f"{100 * x:5.1f}"


def _system_summary(fold_aps, pooled):
    finite = [x for x in fold_aps if not math.isnan(x)]
    return {
        "fold_ap": fold_aps,
        "mean_ap": float(np.mean(finite)) if finite else float("nan"),
        "pooled_ap": _safe_ap(pooled),
    }


def _fold_plan(talk_ids):
    n = len(talk_ids)
    for i in range(n):
        dev = (i + 1) % n
        yield talk_ids[i], talk_ids[dev], [t for j, t in enumerate(talk_ids) if j not in (i, dev)]


def _run_fold(args):
    (talks, test_id, dev_id, train_ids, rank, grid, fconfig, tconfig, resources, examples_by_talk) = args
    by_id = {t.talk_id: t for t in talks}
    train_examples = [e for tid in train_ids for e in examples_by_talk[tid]]
    dev_talk, test_talk = by_id[dev_id], by_id[test_id]

    dev_ap = {}
    best = None
    for C in grid:
        cfg = TrainConfig(C=C, epochs=tconfig.epochs, seed=tconfig.seed,
                          class_weight_mode=tconfig.class_weight_mode)
        model = train(train_examples, cfg, FEATURE_VERSION)
        model.feature_config = fconfig.to_dict()
        ap = _safe_ap(score_talk(dev_talk, rank, lambda s: tag_sentence(model, fconfig, s, resources)))
        dev_ap[C] = ap
        if best is None or (not math.isnan(ap) and (math.isnan(best[0]) or ap > best[0])):
            best = (ap, C, model)
    _, chosen_C, model = best

    table = resources.frequencies
    test_sets = {
        "select_pos": score_talk(test_talk, rank, baseline_select_pos),
        "freq": score_talk(test_talk, rank, lambda s: baseline_frequency(s, table)),
        "svm": score_talk(test_talk, rank, lambda s: tag_sentence(model, fconfig, s, resources)),
    }
    dev_freq = score_talk(dev_talk, rank, lambda s: baseline_frequency(s, table))
    thr = op = None
    if dev_freq.gold.sum() > 0:
        thr = best_f1_threshold(dev_freq)
        op = precision_recall_at(test_sets["freq"], thr)
    return FoldResult(test_id, dev_id, list(train_ids), chosen_C, dev_ap,
                      {k: _safe_ap(v) for k, v in test_sets.items()}, thr, op, test_sets, model)


def cross_validate(talks, rank="B", grid=DEFAULT_GRID, feature_config: FeatureConfig = FeatureConfig(),
                   train_config: TrainConfig = TrainConfig(), resources: Resources | None = None,
                   jobs: int = 1, bootstrap_iterations: int = 1000, label="all") -> EvalReport:
    """Rotate the test talk; the next talk (cyclically) is the dev fold and
    the rest are training data. The grid of C values is tuned on dev AP."""
    talks = list(talks)
    if len(talks) < 3:
        raise DomainError(f"cross-validation needs at least 3 talks, got {len(talks)}")
    if not grid:
        raise DomainError("hyperparameter grid is empty")
    resources = resources or Resources()
    examples_by_talk = {
        t.talk_id: [(v, y) for v, y, _ in gold_examples([t], rank, feature_config, resources)]
        for t in talks
    }
    ids = [t.talk_id for t in talks]
    jobs_args = [(talks, test, dev, train_ids, rank, tuple(grid), feature_config, train_config,
                  resources, examples_by_talk) for test, dev, train_ids in _fold_plan(ids)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            folds = list(pool.map(_run_fold, jobs_args))
    else:
        folds = [_run_fold(a) for a in jobs_args]

    systems = {}
    pooled = {}
    for name in SYSTEMS:
        pooled[name] = ScoredSet.concat(f.test_sets[name] for f in folds)
        systems[name] = _system_summary([f.test_ap[name] for f in folds], pooled[name])
    bootstrap = {}
    for base in ("select_pos", "freq"):
        try:
            bootstrap[f"svm_vs_{base}"] = paired_bootstrap(
                pooled["svm"], pooled[base], bootstrap_iterations, train_config.seed).to_dict()
        except MetricError:
            pass
    pr_points = {}
    for name in SYSTEMS:
        try:
            pr_points[name] = [p for p in pr_curve(pooled[name]) if math.isfinite(p[2])]
        except MetricError:
            pr_points[name] = []
    return EvalReport(rank, feature_config.to_dict(), folds, systems, bootstrap, pr_points, label)


@dataclass
class AblationReport:
    rank: str
    rows: list  # (label, EvalReport)

    def row(self, label):
        return dict(self.rows)[label]

    def to_dict(self):
        return {"rank": self.rank, "rows": [{"label": k, "report": r.to_dict()} for k, r in self.rows]}


def ablation(talks, rank="B", drop=ABLATION_GROUPS, **kwargs) -> AblationReport:
    """All-features cross-validation plus one run per dropped feature group."""
    drop = list(drop)
    base_config = kwargs.pop("feature_config", FeatureConfig())
    for g in drop:
        if g not in ABLATION_GROUPS and g != "history":
            raise DomainError(f"unknown feature group {g!r}")
    full = cross_validate(talks, rank, feature_config=base_config, label="all", **kwargs)
    rows = [("all", full)]
    for g in drop:
        rep = cross_validate(talks, rank, feature_config=base_config.without(g), label=f"-{g}", **kwargs)
        try:
            rep.bootstrap["vs_all"] = paired_bootstrap(
                ScoredSet.concat(f.test_sets["svm"] for f in rep.folds),
                ScoredSet.concat(f.test_sets["svm"] for f in full.folds),
                kwargs.get("bootstrap_iterations", 1000),
                kwargs.get("train_config", TrainConfig()).seed).to_dict()
        except MetricError:
            pass
        rows.append((f"-{g}", rep))
    return AblationReport(rank, rows)


_ROW_LABELS = {
    "all": "SVM (all features)",
    "-elapsed_time": "- elapsed time",
    "-word_timing": "- word timing",
    "-word_freq": "- word freq",
    "-characteristic_syntax": "- characteristic/syntax",
    "-history": "- history",
}


def format_table(reports_by_rank: dict, metric="mean_ap") -> str:
    """Table of AP x100 with one column per rank.

    ``reports_by_rank`` maps rank -> AblationReport or EvalReport.
    """
    ranks = list(reports_by_rank)
    rows = []
    first = {r: (rep.rows[0][1] if isinstance(rep, AblationReport) else rep) for r, rep in reports_by_rank.items()}
    for sys in ("select_pos", "freq"):
        rows.append((SYSTEM_LABELS[sys], [first[r].systems[sys][metric] for r in ranks]))
    labels = []
    for rep in reports_by_rank.values():
        items = rep.rows if isinstance(rep, AblationReport) else [(rep.label, rep)]
        for lab, _ in items:
            if lab not in labels:
                labels.append(lab)
    for lab in labels:
        vals = []
        for r in ranks:
            rep = reports_by_rank[r]
            items = dict(rep.rows) if isinstance(rep, AblationReport) else {rep.label: rep}
            vals.append(items[lab].systems["svm"][metric] if lab in items else None)
        rows.append((_ROW_LABELS.get(lab, lab), vals))
    width = max(len(r[0]) for r in rows) + 2
    out = [f"{'Method':<{width}}" + "".join(f"{r:>7}" for r in ranks)]
    for name, vals in rows:
        out.append(f"{name:<{width}}" + "".join(f"{_fmt_ap(v):>7}" for v in vals))
    return "\n".join(out)


def write_pr_csv(reports_by_rank: dict, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["system", "rank", "threshold", "precision", "recall"])
    for rank, rep in reports_by_rank.items():
        if isinstance(rep, AblationReport):
            rep = rep.rows[0][1]
        for system, points in rep.pr_points.items():
            for p, r, t in points:
                w.writerow([system, rank, repr(t), repr(p), repr(r)])


def report_json(obj) -> str:
    return json.dumps(obj.to_dict(), indent=2, sort_keys=True, allow_nan=True)
