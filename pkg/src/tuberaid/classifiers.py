"""Seeded, JSON-serializable classifiers for peak attribution.

Four algorithms: CART decision tree (Gini impurity), bagged random forest,
k-nearest-neighbors (Euclidean), and one-vs-rest linear SVM trained by
hinge-loss subgradient descent. Everything is deterministic given (data,
hyperparameters, seed), and models persist as explicit JSON rather than
opaque binary blobs.
"""

import json
import math
from dataclasses import dataclass

import numpy as np


@dataclass
class ClassifierConfig:
    algorithm: str = "random_forest"   # random_forest | decision_tree | knn | linear_svm
    seed: int = 0
    n_trees: int = 100
    max_depth: int | None = None
    min_samples_split: int = 2
    max_features: str | int | None = "sqrt"  # per-split candidates for forests
    knn_k: int = 5
    svm_epochs: int = 200
    svm_lambda: float = 1e-3


def _class_counts(y, n_classes):
    return np.bincount(y, minlength=n_classes)


def _majority(counts):
    # Deterministic tie-break: smallest class index.
    return int(np.argmax(counts))


def _best_split(x_col, y, n_classes):
    """Best Gini split threshold for one feature, or None if unsplittable.

    Returns (weighted_gini, threshold). Vectorized over all candidate cut
    points via prefix class counts.
    """
    order = np.argsort(x_col, kind="stable")
    xs = x_col[order]
    ys = y[order]
    n = len(ys)
    valid = xs[:-1] < xs[1:]
    if not valid.any():
        return None
    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), ys] = 1.0
    left = np.cumsum(onehot, axis=0)[:-1]       # counts left of each cut
    total = left[-1] + onehot[-1]
    right = total - left
    nl = np.arange(1, n)
    nr = n - nl
    gini_l = 1.0 - np.sum((left / nl[:, None]) ** 2, axis=1)
    gini_r = 1.0 - np.sum((right / nr[:, None]) ** 2, axis=1)
    weighted = (nl * gini_l + nr * gini_r) / n
    weighted[~valid] = np.inf
    i = int(np.argmin(weighted))
    return float(weighted[i]), float((xs[i] + xs[i + 1]) / 2.0)


class DecisionTree:
    """CART with Gini impurity. Nodes are plain dicts for easy JSON dumps."""

    def __init__(self, max_depth=None, min_samples_split=2, max_features=None,
                 rng=None):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.max_features = max_features
        self.rng = rng or np.random.default_rng(0)
        self.root = None
        self.n_classes = None

    def _n_candidate_features(self, n_features):
        if self.max_features is None:
            return n_features
        if self.max_features == "sqrt":
            return max(1, int(math.sqrt(n_features)))
        return min(int(self.max_features), n_features)

    def fit(self, X, y, n_classes):
        self.n_classes = n_classes
        self.root = self._build(np.asarray(X, dtype=float),
                                np.asarray(y, dtype=int), depth=0)
        return self

    def _build(self, X, y, depth):
        counts = _class_counts(y, self.n_classes)
        node = {"prediction": _majority(counts), "n": int(len(y))}
        if (len(y) < self.min_samples_split
                or (self.max_depth is not None and depth >= self.max_depth)
                or np.all(y == y[0])):
            return node

        n_features = X.shape[1]
        n_candidates = self._n_candidate_features(n_features)
        if n_candidates < n_features:
            features = np.sort(self.rng.choice(n_features, size=n_candidates,
                                               replace=False))
        else:
            features = np.arange(n_features)

        best = None
        for f in features:
            split = _best_split(X[:, f], y, self.n_classes)
            if split is None:
                continue
            gini, threshold = split
            if best is None or gini < best[0]:
                best = (gini, int(f), threshold)
        if best is None:
            return node

        _, f, threshold = best
        mask = X[:, f] <= threshold
        node["feature"] = f
        node["threshold"] = threshold
        node["left"] = self._build(X[mask], y[mask], depth + 1)
        node["right"] = self._build(X[~mask], y[~mask], depth + 1)
        return node

    def predict_one(self, x):
        node = self.root
        while "feature" in node:
            node = node["left"] if x[node["feature"]] <= node["threshold"] else node["right"]
        return node["prediction"]

    def predict(self, X):
        return np.array([self.predict_one(x) for x in np.asarray(X, dtype=float)])

    def to_dict(self):
        return {"max_depth": self.max_depth, "n_classes": self.n_classes,
                "root": self.root}

    @classmethod
    def from_dict(cls, d):
        tree = cls(max_depth=d["max_depth"])
        tree.n_classes = d["n_classes"]
        tree.root = d["root"]
        return tree


class RandomForest:
    """Bagged CART trees, per-split feature subsampling, majority vote."""

    def __init__(self, n_trees=100, max_depth=None, min_samples_split=2,
                 max_features="sqrt", seed=0):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.max_features = max_features
        self.seed = seed
        self.trees = []
        self.n_classes = None

    def fit(self, X, y, n_classes):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        self.n_classes = n_classes
        rng = np.random.default_rng(self.seed)
        self.trees = []
        for _ in range(self.n_trees):
            idx = rng.integers(0, len(y), size=len(y))  # bootstrap
            tree = DecisionTree(max_depth=self.max_depth,
                                min_samples_split=self.min_samples_split,
                                max_features=self.max_features, rng=rng)
            tree.fit(X[idx], y[idx], n_classes)
            self.trees.append(tree)
        return self

    def predict(self, X):
        X = np.asarray(X, dtype=float)
        votes = np.zeros((len(X), self.n_classes), dtype=int)
        for tree in self.trees:
            preds = tree.predict(X)
            votes[np.arange(len(X)), preds] += 1
        return np.array([_majority(v) for v in votes])

    def to_dict(self):
        return {"n_trees": self.n_trees, "max_depth": self.max_depth,
                "seed": self.seed, "n_classes": self.n_classes,
                "trees": [t.to_dict() for t in self.trees]}

    @classmethod
    def from_dict(cls, d):
        forest = cls(n_trees=d["n_trees"], max_depth=d["max_depth"], seed=d["seed"])
        forest.n_classes = d["n_classes"]
        forest.trees = [DecisionTree.from_dict(t) for t in d["trees"]]
        return forest


class KNearestNeighbors:
    """Euclidean k-NN with majority vote over the k closest training rows."""

    def __init__(self, k=5):
        self.k = k
        self.X = None
        self.y = None
        self.n_classes = None

    def fit(self, X, y, n_classes):
        self.X = np.asarray(X, dtype=float)
        self.y = np.asarray(y, dtype=int)
        self.n_classes = n_classes
        return self

    def predict(self, X):
        X = np.asarray(X, dtype=float)
        k = min(self.k, len(self.y))
        out = []
        for x in X:
            dists = np.linalg.norm(self.X - x, axis=1)
            nearest = np.argsort(dists, kind="stable")[:k]
            out.append(_majority(_class_counts(self.y[nearest], self.n_classes)))
        return np.array(out)

    def to_dict(self):
        return {"k": self.k, "n_classes": self.n_classes,
                "X": self.X.tolist(), "y": self.y.tolist()}

    @classmethod
    def from_dict(cls, d):
        knn = cls(k=d["k"])
        knn.n_classes = d["n_classes"]
        knn.X = np.asarray(d["X"], dtype=float)
        knn.y = np.asarray(d["y"], dtype=int)
        return knn


class LinearSVM:
    """One-vs-rest linear SVM trained with seeded hinge-loss subgradient
    descent (Pegasos-style learning rate 1/(lambda * t))."""

    def __init__(self, epochs=200, lam=1e-3, seed=0):
        self.epochs = epochs
        self.lam = lam
        self.seed = seed
        self.W = None
        self.b = None
        self.n_classes = None

    def fit(self, X, y, n_classes):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        self.n_classes = n_classes
        n, d = X.shape
        self.W = np.zeros((n_classes, d))
        self.b = np.zeros(n_classes)
        rng = np.random.default_rng(self.seed)
        for c in range(n_classes):
            target = np.where(y == c, 1.0, -1.0)
            w = np.zeros(d)
            b = 0.0
            t = 0
            for _ in range(self.epochs):
                for i in rng.permutation(n):
                    t += 1
                    eta = 1.0 / (self.lam * t)
                    margin = target[i] * (X[i] @ w + b)
                    w *= (1.0 - eta * self.lam)
                    if margin < 1.0:
                        w += eta * target[i] * X[i]
                        b += eta * target[i]
            self.W[c] = w
            self.b[c] = b
        return self

    def predict(self, X):
        X = np.asarray(X, dtype=float)
        scores = X @ self.W.T + self.b
        return np.argmax(scores, axis=1)

    def to_dict(self):
        return {"epochs": self.epochs, "lam": self.lam, "seed": self.seed,
                "n_classes": self.n_classes, "W": self.W.tolist(),
                "b": self.b.tolist()}

    @classmethod
    def from_dict(cls, d):
        svm = cls(epochs=d["epochs"], lam=d["lam"], seed=d["seed"])
        svm.n_classes = d["n_classes"]
        svm.W = np.asarray(d["W"], dtype=float)
        svm.b = np.asarray(d["b"], dtype=float)
        return svm


_ALGORITHMS = {
    "random_forest": RandomForest,
    "decision_tree": DecisionTree,
    "knn": KNearestNeighbors,
    "linear_svm": LinearSVM,
}


def build_estimator(config: ClassifierConfig):
    if config.algorithm == "random_forest":
        return RandomForest(n_trees=config.n_trees, max_depth=config.max_depth,
                            min_samples_split=config.min_samples_split,
                            max_features=config.max_features, seed=config.seed)
    if config.algorithm == "decision_tree":
        return DecisionTree(max_depth=config.max_depth,
                            min_samples_split=config.min_samples_split)
    if config.algorithm == "knn":
        return KNearestNeighbors(k=config.knn_k)
    if config.algorithm == "linear_svm":
        return LinearSVM(epochs=config.svm_epochs, lam=config.svm_lambda,
                         seed=config.seed)
    raise ValueError(f"unknown algorithm: {config.algorithm}")


def estimator_to_json(algorithm: str, estimator, labels, path):
    doc = {"format_version": 1, "algorithm": algorithm, "labels": list(labels),
           "model": estimator.to_dict()}
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True)


def estimator_from_json(path):
    with open(path) as fh:
        doc = json.load(fh)
    est = _ALGORITHMS[doc["algorithm"]].from_dict(doc["model"])
    return doc["algorithm"], est, doc["labels"]
