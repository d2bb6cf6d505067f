"""Peak featurization, classifier training/evaluation, and verdicts.

A peak is represented by K x #communities features: the video-side TF-IDF
score of each community's top-K keywords computed over the peak's comments
(absent keywords are exactly 0). Videos with multiple qualifying peaks get
one row per peak; in-the-wild verdicts aggregate per-peak labels by
majority, with ties resolved conservatively to UNRELATED.
"""

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .classifiers import ClassifierConfig, build_estimator
from .language import KeywordSet, TfIdfModel, video_term_scores
from .timeline import CommentTimeline, PeakWindow, detect_peaks

UNRELATED = "UNRELATED"


@dataclass
class FeatureVector:
    video_id: str
    peak: PeakWindow | None
    values: np.ndarray
    feature_names: tuple[str, ...]


@dataclass
class LabeledDataset:
    vectors: list[FeatureVector]
    labels: list[str]

    def matrix(self):
        return np.stack([v.values for v in self.vectors])


@dataclass
class ConfusionMatrix:
    """Square count matrix; rows are predicted labels, columns actual."""

    labels: list[str]
    counts: np.ndarray

    def total(self):
        return int(self.counts.sum())

    def accuracy(self):
        return float(np.trace(self.counts)) / self.total()

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["predicted\\actual"] + self.labels)
            for i, label in enumerate(self.labels):
                writer.writerow([label] + [int(c) for c in self.counts[i]])


@dataclass
class MetricsReport:
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    fold_accuracies: list[float] = field(default_factory=list)

    def write_csv(self, path, row_label="model"):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["model", "accuracy", "precision", "recall", "f1"])
            writer.writerow([row_label, f"{self.accuracy:.6f}",
                             f"{self.macro_precision:.6f}",
                             f"{self.macro_recall:.6f}", f"{self.macro_f1:.6f}"])


def feature_names(keyword_sets: list[KeywordSet]) -> tuple[str, ...]:
    return tuple(f"{ks.community_id}:{kw}" for ks in keyword_sets
                 for kw in ks.keywords)


def featurize_peak(peak: PeakWindow, keyword_sets: list[KeywordSet],
                   model: TfIdfModel) -> FeatureVector:
    """Video-side TF-IDF score of every community keyword over the peak's
    comments; keywords absent from the peak score exactly 0."""
    if not peak.comments:
        raise ValueError("cannot featurize an empty peak")
    text = " ".join(c.text for c in peak.comments)
    scores = video_term_scores(text, model)
    names = feature_names(keyword_sets)
    values = np.array([scores.get(name.split(":", 1)[1], 0.0) for name in names])
    return FeatureVector(video_id=peak.video_id, peak=peak, values=values,
                         feature_names=names)


@dataclass
class ClassifierModel:
    algorithm: str
    labels: list[str]
    estimator: object
    config: ClassifierConfig

    def predict(self, vector: FeatureVector) -> str:
        n_features = self._n_features()
        if n_features is not None and len(vector.values) != n_features:
            raise ValueError(
                f"feature length {len(vector.values)} != trained {n_features}")
        idx = self.estimator.predict(vector.values[None, :])[0]
        return self.labels[idx]

    def predict_many(self, X) -> list[str]:
        return [self.labels[i] for i in self.estimator.predict(X)]

    def _n_features(self):
        est = self.estimator
        if hasattr(est, "W") and est.W is not None:
            return est.W.shape[1]
        if hasattr(est, "X") and est.X is not None:
            return est.X.shape[1]
        return None


def train_classifier(dataset: LabeledDataset, config: ClassifierConfig) -> ClassifierModel:
    labels = sorted(set(dataset.labels))
    if len(labels) < 2:
        raise ValueError("training needs at least 2 classes")
    lengths = {len(v.values) for v in dataset.vectors}
    if len(lengths) != 1:
        raise ValueError("all feature vectors must have the same length")
    label_idx = {lab: i for i, lab in enumerate(labels)}
    y = np.array([label_idx[lab] for lab in dataset.labels])
    estimator = build_estimator(config).fit(dataset.matrix(), y, len(labels))
    return ClassifierModel(algorithm=config.algorithm, labels=labels,
                           estimator=estimator, config=config)


def stratified_folds(labels, n_folds: int, seed: int):
    """Deal each class's (seeded-shuffled) members round-robin into folds."""
    rng = np.random.default_rng(seed)
    by_class = {}
    for i, lab in enumerate(labels):
        by_class.setdefault(lab, []).append(i)
    folds = [[] for _ in range(n_folds)]
    cursor = 0
    for lab in sorted(by_class):
        members = np.array(by_class[lab])
        rng.shuffle(members)
        for m in members:
            folds[cursor % n_folds].append(int(m))
            cursor += 1
    return [sorted(f) for f in folds]


def cross_validate(dataset: LabeledDataset, folds: int,
                   config: ClassifierConfig) -> tuple[MetricsReport, ConfusionMatrix]:
    """Stratified k-fold cross-validation with aggregate confusion counts and
    macro-averaged metrics."""
    n = len(dataset.labels)
    if folds < 2:
        raise ValueError("folds must be >= 2")
    if n < folds:
        raise ValueError("dataset smaller than fold count")
    labels = sorted(set(dataset.labels))
    for lab in labels:
        if dataset.labels.count(lab) < 2:
            raise ValueError(f"class {lab} has fewer than 2 samples; "
                             "stratification cannot keep it in every training fold")
    label_idx = {lab: i for i, lab in enumerate(labels)}
    X = dataset.matrix()
    y = np.array([label_idx[lab] for lab in dataset.labels])

    assignments = stratified_folds(dataset.labels, folds, config.seed)
    counts = np.zeros((len(labels), len(labels)), dtype=int)
    fold_accuracies = []
    for test_idx in assignments:
        test = np.array(test_idx, dtype=int)
        train = np.array([i for i in range(n) if i not in set(test_idx)], dtype=int)
        estimator = build_estimator(config).fit(X[train], y[train], len(labels))
        preds = estimator.predict(X[test])
        for p, a in zip(preds, y[test]):
            counts[p, a] += 1
        fold_accuracies.append(float(np.mean(preds == y[test])) if len(test) else 0.0)

    cm = ConfusionMatrix(labels=labels, counts=counts)
    report = metrics_from_confusion(cm)
    report.fold_accuracies = fold_accuracies
    return report, cm


def metrics_from_confusion(cm: ConfusionMatrix) -> MetricsReport:
    counts = cm.counts.astype(float)
    tp = np.diag(counts)
    pred_totals = counts.sum(axis=1)
    actual_totals = counts.sum(axis=0)
    precision = np.divide(tp, pred_totals, out=np.zeros_like(tp),
                          where=pred_totals > 0)
    recall = np.divide(tp, actual_totals, out=np.zeros_like(tp),
                       where=actual_totals > 0)
    macro_p = float(precision.mean())
    macro_r = float(recall.mean())
    f1 = 2 * macro_p * macro_r / (macro_p + macro_r) if macro_p + macro_r else 0.0
    return MetricsReport(accuracy=cm.accuracy(), macro_precision=macro_p,
                         macro_recall=macro_r, macro_f1=f1)


def sweep_min_comments(dataset_builder, thresholds, folds: int,
                       config: ClassifierConfig):
    """Re-run dataset construction + cross-validation per threshold.

    ``dataset_builder(threshold)`` returns a LabeledDataset (possibly empty).
    Grid points whose dataset is empty or single-class are reported with
    accuracy None rather than raising. Returns (curve rows, best threshold).
    """
    if not thresholds:
        raise ValueError("threshold grid is empty")
    if list(thresholds) != sorted(thresholds):
        raise ValueError("threshold grid must be ascending")
    curve = []
    for threshold in thresholds:
        dataset = dataset_builder(threshold)
        if (not dataset.vectors or len(set(dataset.labels)) < 2
                or len(dataset.vectors) < folds
                or min(dataset.labels.count(l) for l in set(dataset.labels)) < 2):
            curve.append({"threshold": int(threshold), "accuracy": None,
                          "n_samples": len(dataset.vectors)})
            continue
        report, _ = cross_validate(dataset, folds, config)
        curve.append({"threshold": int(threshold), "accuracy": report.accuracy,
                      "n_samples": len(dataset.vectors)})
    defined = [row for row in curve if row["accuracy"] is not None]
    best = max(defined, key=lambda r: r["accuracy"])["threshold"] if defined else None
    return curve, best


def write_curve_csv(curve, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["min_comments", "accuracy", "n_samples"])
        for row in curve:
            acc = "" if row["accuracy"] is None else f"{row['accuracy']:.6f}"
            writer.writerow([row["threshold"], acc, row["n_samples"]])


@dataclass
class VideoVerdict:
    video_id: str
    verdict: str
    peak_labels: list[str]


@dataclass
class WildReport:
    verdicts: list[VideoVerdict]
    discarded: int

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["video_id", "verdict", "peak_labels"])
            for v in self.verdicts:
                writer.writerow([v.video_id, v.verdict, "|".join(v.peak_labels)])

    def write_ndjson(self, path):
        with open(path, "w") as fh:
            for v in self.verdicts:
                fh.write(json.dumps({"video_id": v.video_id, "verdict": v.verdict,
                                     "peak_labels": v.peak_labels},
                                    sort_keys=True) + "\n")


def attribute_in_the_wild(timelines: list[CommentTimeline], model: ClassifierModel,
                          keyword_sets: list[KeywordSet], tfidf: TfIdfModel,
                          min_comments: int) -> WildReport:
    """Detect peaks per video, predict a label per qualifying peak, and emit a
    per-video majority verdict. Videos with no qualifying peak are discarded
    and tallied; per-video label ties resolve to UNRELATED."""
    verdicts = []
    discarded = 0
    for timeline in timelines:
        peaks = [p for p in detect_peaks(timeline, min_comments)
                 if p.comment_count >= min_comments]
        if not peaks:
            discarded += 1
            continue
        peak_labels = [model.predict(featurize_peak(p, keyword_sets, tfidf))
                       for p in peaks]
        tally = {}
        for lab in peak_labels:
            tally[lab] = tally.get(lab, 0) + 1
        top = max(tally.values())
        winners = sorted(lab for lab, n in tally.items() if n == top)
        verdict = winners[0] if len(winners) == 1 else UNRELATED
        verdicts.append(VideoVerdict(video_id=timeline.video_id, verdict=verdict,
                                     peak_labels=peak_labels))
    return WildReport(verdicts=verdicts, discarded=discarded)
