import math

import numpy as np
import pytest

from tuberaid.attribution import (
    UNRELATED,
    ClassifierConfig,
    ConfusionMatrix,
    FeatureVector,
    LabeledDataset,
    attribute_in_the_wild,
    cross_validate,
    feature_names,
    featurize_peak,
    metrics_from_confusion,
    stratified_folds,
    sweep_min_comments,
    train_classifier,
)
from tuberaid.ingest import Comment, CommunityCorpus
from tuberaid.language import top_keywords, train_tfidf, video_term_scores
from tuberaid.timeline import SECONDS_PER_DAY, PeakWindow, bin_daily


@pytest.fixture
def toy_model():
    return train_tfidf([
        CommunityCorpus("a", ["zebra zebra wombat common common"]),
        CommunityCorpus("b", ["wombat ferret common"]),
        CommunityCorpus("c", ["common ferret ferret heron"]),
    ])


@pytest.fixture
def keyword_sets(toy_model):
    return [top_keywords(toy_model, cid, 2) for cid in toy_model.communities]


def peak_from(texts, video_id="VVVVVVVVVVV"):
    comments = tuple(Comment(video_id=video_id, comment_id=f"c{i}",
                             timestamp=100 + i, text=t)
                     for i, t in enumerate(texts))
    return PeakWindow(video_id=video_id, start_day=0, end_day=0,
                      comment_count=len(comments), comments=comments)


class TestFeaturize:
    def test_names_are_community_keyword_pairs(self, keyword_sets):
        names = feature_names(keyword_sets)
        assert len(names) == 6
        assert all(":" in n for n in names)
        assert names[0].startswith("a:")

    def test_values_match_direct_scoring(self, toy_model, keyword_sets):
        texts = ["zebra wombat", "common heron zebra"]
        vec = featurize_peak(peak_from(texts), keyword_sets, toy_model)
        scores = video_term_scores(" ".join(texts), toy_model)
        for name, value in zip(vec.feature_names, vec.values):
            keyword = name.split(":", 1)[1]
            assert value == pytest.approx(scores.get(keyword, 0.0), abs=1e-12)

    def test_absent_keywords_exactly_zero(self, toy_model, keyword_sets):
        vec = featurize_peak(peak_from(["aardvark bison"]), keyword_sets, toy_model)
        assert all(v == 0.0 for v in vec.values)

    def test_empty_peak_rejected(self, toy_model, keyword_sets):
        with pytest.raises(ValueError):
            PeakWindow(video_id="VVVVVVVVVVV", start_day=0, end_day=0,
                       comment_count=0, comments=())

    def test_shared_keyword_scores_in_every_community_slot(self, toy_model, keyword_sets):
        # "ferret" is a top keyword for more than one community; its score
        # appears once per slot that names it
        vec = featurize_peak(peak_from(["ferret ferret"]), keyword_sets, toy_model)
        hits = [v for n, v in zip(vec.feature_names, vec.values)
                if n.endswith(":ferret")]
        assert len(hits) >= 2
        assert len({round(h, 12) for h in hits}) == 1
        assert hits[0] > 0


def synthetic_dataset(n_per_class=12, n_classes=3, seed=0, scale=0.2):
    rng = np.random.default_rng(seed)
    labels_pool = [f"community_{i}" for i in range(n_classes)]
    vectors, labels = [], []
    for ci, lab in enumerate(labels_pool):
        center = np.zeros(6)
        center[ci] = 5.0
        for j in range(n_per_class):
            v = center + rng.normal(scale=scale, size=6)
            vectors.append(FeatureVector(video_id=f"vid{ci}_{j}", peak=None,
                                         values=v, feature_names=tuple("abcdef")))
            labels.append(lab)
    return LabeledDataset(vectors=vectors, labels=labels)


class TestTrainPredict:
    def test_separable_data_classified_perfectly(self):
        ds = synthetic_dataset()
        model = train_classifier(ds, ClassifierConfig(algorithm="knn"))
        preds = [model.predict(v) for v in ds.vectors]
        assert preds == ds.labels

    def test_single_class_rejected(self):
        ds = synthetic_dataset(n_classes=1)
        with pytest.raises(ValueError, match="2 classes"):
            train_classifier(ds, ClassifierConfig())

    def test_dimension_mismatch_rejected(self):
        ds = synthetic_dataset()
        model = train_classifier(ds, ClassifierConfig(algorithm="knn"))
        bad = FeatureVector(video_id="x", peak=None, values=np.zeros(4),
                            feature_names=("a", "b", "c", "d"))
        with pytest.raises(ValueError, match="feature length"):
            model.predict(bad)


class TestStratifiedFolds:
    def test_partition_is_exact(self):
        labels = ["a"] * 10 + ["b"] * 15 + ["c"] * 5
        folds = stratified_folds(labels, 5, seed=0)
        flat = sorted(i for f in folds for i in f)
        assert flat == list(range(30))

    def test_class_balance_within_one(self):
        labels = ["a"] * 20 + ["b"] * 20
        folds = stratified_folds(labels, 4, seed=1)
        for lab in "ab":
            per_fold = [sum(labels[i] == lab for i in f) for f in folds]
            assert max(per_fold) - min(per_fold) <= 1

    def test_seed_changes_assignment(self):
        labels = ["a"] * 30 + ["b"] * 30
        assert stratified_folds(labels, 5, 0) != stratified_folds(labels, 5, 1)

    def test_deterministic_per_seed(self):
        labels = ["a"] * 30 + ["b"] * 30
        assert stratified_folds(labels, 5, 7) == stratified_folds(labels, 5, 7)


class TestCrossValidate:
    def test_confusion_total_equals_samples(self):
        ds = synthetic_dataset()
        _, cm = cross_validate(ds, 4, ClassifierConfig(algorithm="knn"))
        assert cm.total() == len(ds.labels)

    def test_metrics_reconcile_with_confusion(self):
        ds = synthetic_dataset(scale=3.0)  # noisy: nontrivial confusion
        report, cm = cross_validate(ds, 4, ClassifierConfig(algorithm="decision_tree"))
        recomputed = metrics_from_confusion(cm)
        assert report.accuracy == pytest.approx(recomputed.accuracy, abs=1e-12)
        assert report.macro_precision == pytest.approx(recomputed.macro_precision, abs=1e-12)
        assert report.macro_recall == pytest.approx(recomputed.macro_recall, abs=1e-12)
        assert report.macro_f1 == pytest.approx(recomputed.macro_f1, abs=1e-12)

    def test_f1_is_harmonic_mean_of_macro_precision_recall(self):
        ds = synthetic_dataset(scale=3.0, seed=5)
        report, _ = cross_validate(ds, 3, ClassifierConfig(algorithm="knn"))
        p, r = report.macro_precision, report.macro_recall
        assert report.macro_f1 == pytest.approx(2 * p * r / (p + r), abs=1e-12)

    def test_tiny_class_rejected(self):
        ds = synthetic_dataset(n_per_class=6)
        ds.labels[0] = "lonely"
        with pytest.raises(ValueError, match="fewer than 2"):
            cross_validate(ds, 3, ClassifierConfig())

    def test_perfect_confusion_is_diagonal(self):
        ds = synthetic_dataset()
        _, cm = cross_validate(ds, 4, ClassifierConfig(algorithm="knn"))
        assert np.trace(cm.counts) == cm.total()


class TestMetricsFromConfusion:
    def test_hand_computed_two_class(self):
        # predicted rows, actual columns: [[8, 2], [1, 9]]
        cm = ConfusionMatrix(labels=["x", "y"],
                             counts=np.array([[8, 2], [1, 9]]))
        report = metrics_from_confusion(cm)
        assert report.accuracy == pytest.approx(17 / 20)
        p = (8 / 10 + 9 / 10) / 2
        r = (8 / 9 + 9 / 11) / 2
        assert report.macro_precision == pytest.approx(p, abs=1e-12)
        assert report.macro_recall == pytest.approx(r, abs=1e-12)
        assert report.macro_f1 == pytest.approx(2 * p * r / (p + r), abs=1e-12)

    def test_empty_prediction_row_gives_zero_precision(self):
        cm = ConfusionMatrix(labels=["x", "y"],
                             counts=np.array([[0, 0], [5, 5]]))
        report = metrics_from_confusion(cm)
        assert report.macro_precision == pytest.approx(0.25)
        assert not math.isnan(report.macro_precision)


class TestSweep:
    @staticmethod
    def builder(threshold):
        # dataset shrinks with the threshold and collapses past 30
        n = max(0, 12 - threshold // 3)
        if n < 2:
            return LabeledDataset(vectors=[], labels=[])
        return synthetic_dataset(n_per_class=n, n_classes=2, seed=threshold)

    def test_curve_covers_grid_and_flags_degenerate_points(self):
        curve, best = sweep_min_comments(self.builder, [0, 15, 36, 45], 2,
                                         ClassifierConfig(algorithm="knn"))
        assert [row["threshold"] for row in curve] == [0, 15, 36, 45]
        assert curve[0]["accuracy"] == 1.0
        assert curve[-1]["accuracy"] is None
        assert best in (0, 15)

    def test_unsorted_grid_rejected(self):
        with pytest.raises(ValueError, match="ascending"):
            sweep_min_comments(self.builder, [10, 0], 2, ClassifierConfig())

    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            sweep_min_comments(self.builder, [], 2, ClassifierConfig())


def burst_timeline(video_id, slang, n_days=8, burst=40):
    comments = []
    cid = 0
    for day in range(n_days):
        count = burst if day == n_days - 2 else 2
        text = slang if day == n_days - 2 else "common"
        for i in range(count):
            comments.append(Comment(video_id=video_id, comment_id=f"k{cid}",
                                    timestamp=day * SECONDS_PER_DAY + i + 1,
                                    text=text))
            cid += 1
    return bin_daily(comments, video_id=video_id)


class TestAttributeInTheWild:
    @pytest.fixture
    def wild_model(self, toy_model, keyword_sets):
        # classifier trained on peaks generated the same way they are scored
        vectors, labels = [], []
        slang_by_label = {"a": "zebra zebra", "b": "ferret wombat",
                          UNRELATED: "aardvark bison"}
        for lab, slang in slang_by_label.items():
            for j in range(4):
                vec = featurize_peak(peak_from([slang] * (3 + j),
                                               video_id=f"t{lab}{j}" + "A" * 7),
                                     keyword_sets, toy_model)
                vectors.append(vec)
                labels.append(lab)
        ds = LabeledDataset(vectors=vectors, labels=labels)
        return train_classifier(ds, ClassifierConfig(algorithm="knn", knn_k=1))

    def test_verdicts_plus_discards_conserve_videos(self, wild_model, toy_model,
                                                    keyword_sets):
        timelines = [burst_timeline("A" * 11, "zebra zebra"),
                     burst_timeline("B" * 11, "ferret wombat"),
                     burst_timeline("C" * 11, "zebra", burst=3)]  # below threshold
        report = attribute_in_the_wild(timelines, wild_model, keyword_sets,
                                       toy_model, min_comments=10)
        assert len(report.verdicts) + report.discarded == 3
        assert report.discarded == 1

    def test_source_community_recovered(self, wild_model, toy_model, keyword_sets):
        report = attribute_in_the_wild([burst_timeline("A" * 11, "zebra zebra")],
                                       wild_model, keyword_sets, toy_model,
                                       min_comments=10)
        assert report.verdicts[0].verdict == "a"

    def test_discards_monotone_in_threshold(self, wild_model, toy_model, keyword_sets):
        timelines = [burst_timeline(ch * 11, "zebra", burst=b)
                     for ch, b in zip("ABCDE", (10, 20, 30, 40, 50))]
        previous = None
        for threshold in (0, 15, 25, 35, 45, 1000):
            report = attribute_in_the_wild(timelines, wild_model, keyword_sets,
                                           toy_model, min_comments=threshold)
            if previous is not None:
                assert report.discarded >= previous
            previous = report.discarded
        assert previous == 5

    def test_csv_and_ndjson_outputs(self, wild_model, toy_model, keyword_sets,
                                    tmp_path):
        report = attribute_in_the_wild([burst_timeline("A" * 11, "zebra")],
                                       wild_model, keyword_sets, toy_model,
                                       min_comments=10)
        report.write_csv(tmp_path / "verdicts.csv")
        report.write_ndjson(tmp_path / "verdicts.ndjson")
        header = (tmp_path / "verdicts.csv").read_text().splitlines()[0]
        assert header == "video_id,verdict,peak_labels"
        assert (tmp_path / "verdicts.ndjson").read_text().count("\n") == 1
