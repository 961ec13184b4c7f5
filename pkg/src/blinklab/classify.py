"""Five classifiers over blink feature vectors, with stratified k-fold CV.

Algorithms: decision_tree, random_forest, knn, logistic_regression and
svm_linear.  The distance/margin-based three z-score their inputs with
statistics captured at training time; the tree models consume raw features.
Scores are class-1 affinities in [0, 1]; the predicted label is 1 only when
the score is strictly above 0.5 (an exact 0.5 tie goes to class 0).

Everything is deterministic given (data, algorithm, hyperparams, seed), and
models serialize to plain dicts so two identical training runs produce
byte-identical files.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import trees
from .errors import (
    DegenerateLabels,
    InsufficientPerClass,
    InvalidConfig,
    InvalidFeature,
    SchemaMismatch,
)
from .features import FEATURE_SETS

ALGORITHMS = (
    "decision_tree",
    "random_forest",
    "knn",
    "logistic_regression",
    "svm_linear",
)

# Defaults are ours; every report echoes the resolved values.
DEFAULT_HYPERPARAMS = {
    "decision_tree": {"max_depth": None, "min_leaf": 1},
    "random_forest": {"n_trees": 100, "max_features": "sqrt", "min_leaf": 1, "max_depth": None},
    "knn": {"k": 5},
    "logistic_regression": {"l2": 1e-4, "grad_tol": 1e-6, "max_iter": 10000},
    "svm_linear": {"l2": 1e-3, "epochs": 50},
}

STANDARDIZED = {"knn", "logistic_regression", "svm_linear"}

MODEL_SCHEMA_VERSION = 1


def resolve_hyperparams(algorithm, overrides=None):
    if algorithm not in ALGORITHMS:
        raise InvalidConfig(f"unknown algorithm {algorithm!r}")
    hp = dict(DEFAULT_HYPERPARAMS[algorithm])
    for key, val in (overrides or {}).items():
        if key not in hp:
            raise InvalidConfig(f"unknown hyperparameter {key!r} for {algorithm}")
        hp[key] = val
    return hp


@dataclass(frozen=True)
class Dataset:
    """Labeled feature matrix; ``feature_set`` names the active columns."""

    X: np.ndarray
    y: np.ndarray
    feature_set: str = "all"
    video_ids: tuple = ()

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.int64)
        if X.ndim != 2 or X.shape[0] != y.shape[0]:
            raise SchemaMismatch(f"X {X.shape} does not match y {y.shape}")
        if self.feature_set not in FEATURE_SETS:
            raise InvalidConfig(f"unknown feature set {self.feature_set!r}")
        if X.shape[1] != len(FEATURE_SETS[self.feature_set]):
            raise SchemaMismatch(
                f"{self.feature_set} expects {len(FEATURE_SETS[self.feature_set])} "
                f"columns, got {X.shape[1]}"
            )
        if y.size and not np.all((y == 0) | (y == 1)):
            raise SchemaMismatch("labels must be 0 or 1")
        bad = np.argwhere(~np.isfinite(X))
        if bad.size:
            raise InvalidFeature(int(bad[0, 0]), int(bad[0, 1]))
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def class_counts(self):
        return {0: int(np.sum(self.y == 0)), 1: int(np.sum(self.y == 1))}


def _standardize_fit(X):
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std = np.where(std == 0.0, 1.0, std)  # constant columns pass through
    return mean, std


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


@dataclass(frozen=True)
class Model:
    algorithm: str
    feature_set: str
    n_features: int
    hyperparams: dict
    seed: int
    standardization: dict | None
    params: dict = field(repr=False)
    schema_version: int = MODEL_SCHEMA_VERSION

    def _apply_standardization(self, X):
        if self.standardization is None:
            return X
        mean = np.asarray(self.standardization["mean"])
        std = np.asarray(self.standardization["std"])
        return (X - mean) / std

    def predict_scores(self, X):
        """Class-1 scores for an (n, n_features) matrix."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise SchemaMismatch(
                f"model expects {self.n_features} columns, got {X.shape[1] if X.ndim == 2 else X.shape}"
            )
        if not np.all(np.isfinite(X)):
            bad = np.argwhere(~np.isfinite(X))
            raise InvalidFeature(int(bad[0, 0]), int(bad[0, 1]))
        if self.algorithm == "decision_tree":
            return trees.Tree.from_dict(self.params["tree"]).predict_scores(X)
        if self.algorithm == "random_forest":
            forest = [trees.Tree.from_dict(d) for d in self.params["trees"]]
            return trees.forest_scores(forest, X)
        Xs = self._apply_standardization(X)
        if self.algorithm == "knn":
            train = np.asarray(self.params["train_x"], dtype=np.float64)
            labels = np.asarray(self.params["train_y"], dtype=np.int64)
            k = int(self.params["k"])
            scores = np.empty(Xs.shape[0])
            for i in range(Xs.shape[0]):
                d2 = np.sum((train - Xs[i]) ** 2, axis=1)
                nearest = np.argsort(d2, kind="stable")[:k]  # distance ties: row order
                scores[i] = float(np.mean(labels[nearest]))
            return scores
        w = np.asarray(self.params["weights"], dtype=np.float64)
        b = float(self.params["bias"])
        return _sigmoid(Xs @ w + b)

    def predict(self, X):
        """(labels, scores); label 1 only when score > 0.5."""
        scores = self.predict_scores(X)
        return (scores > 0.5).astype(np.int64), scores

    def predict_vector(self, v):
        """Classify one FeatureVector using the model's active columns."""
        vals = v.values()
        cols = vals[:10] if self.feature_set == "set1" else vals
        labels, scores = self.predict(np.asarray([cols], dtype=np.float64))
        return int(labels[0]), float(scores[0])

    def to_dict(self):
        return {
            "schema_version": self.schema_version,
            "algorithm": self.algorithm,
            "feature_set": self.feature_set,
            "n_features": self.n_features,
            "hyperparams": self.hyperparams,
            "seed": self.seed,
            "standardization": self.standardization,
            "params": self.params,
        }

    @classmethod
    def from_dict(cls, d):
        if d.get("schema_version") != MODEL_SCHEMA_VERSION:
            raise SchemaMismatch(f"unsupported model schema {d.get('schema_version')!r}")
        return cls(
            algorithm=d["algorithm"],
            feature_set=d["feature_set"],
            n_features=int(d["n_features"]),
            hyperparams=d["hyperparams"],
            seed=int(d["seed"]),
            standardization=d["standardization"],
            params=d["params"],
        )


def _train_logistic(Xs, y, hp):
    """Full-batch gradient descent on L2-regularized log loss.

    The step size is 1/L with L an upper bound on the loss curvature, so the
    iteration is monotone; it stops at the gradient-norm tolerance or the
    iteration cap, whichever comes first.
    """
    n, m = Xs.shape
    lam = float(hp["l2"])
    w = np.zeros(m)
    b = 0.0
    lipschitz = 0.25 * float(np.mean(np.sum(Xs * Xs, axis=1) + 1.0)) + lam
    lr = 1.0 / lipschitz
    for _ in range(int(hp["max_iter"])):
        p = _sigmoid(Xs @ w + b)
        gw = Xs.T @ (p - y) / n + lam * w
        gb = float(np.mean(p - y))
        gnorm = math.sqrt(float(np.dot(gw, gw)) + gb * gb)
        if gnorm <= float(hp["grad_tol"]):
            break
        w -= lr * gw
        b -= lr * gb
    return w, b


def _train_svm(Xs, y, hp, seed):
    """Pegasos-style stochastic subgradient descent on the hinge loss.

    The bias rides along as an augmented constant column (so the standard
    step-size analysis covers it) and the returned weights are the average of
    the second half of the iterates, which irons out the 1/(lambda*t) noise.
    """
    n, m = Xs.shape
    lam = float(hp["l2"])
    epochs = int(hp["epochs"])
    Xa = np.hstack([Xs, np.ones((n, 1))])
    ypm = 2.0 * y - 1.0
    rng = np.random.default_rng(seed)
    w = np.zeros(m + 1)
    w_sum = np.zeros(m + 1)
    n_avg = 0
    half = epochs * n // 2
    t = 0
    for _ in range(epochs):
        for i in rng.permutation(n):
            t += 1
            eta = 1.0 / (lam * t)
            if ypm[i] * float(Xa[i] @ w) < 1.0:
                w = (1.0 - eta * lam) * w + eta * ypm[i] * Xa[i]
            else:
                w = (1.0 - eta * lam) * w
            if t > half:
                w_sum += w
                n_avg += 1
    w = w_sum / n_avg
    return w[:m], float(w[m])


def train(data: Dataset, algorithm, hyperparams=None, seed=0) -> Model:
    """Fit one model; deterministic given (data, algorithm, hyperparams, seed)."""
    hp = resolve_hyperparams(algorithm, hyperparams)
    X, y = data.X, data.y
    if X.shape[0] == 0:
        raise DegenerateLabels("empty dataset")
    if len(np.unique(y)) < 2:
        raise DegenerateLabels("training data has a single class")
    standardization = None
    params = {}
    if algorithm in STANDARDIZED:
        mean, std = _standardize_fit(X)
        standardization = {
            "mean": [float(v) for v in mean],
            "std": [float(v) for v in std],
        }
        Xs = (X - mean) / std
        if algorithm == "knn":
            params = {
                "k": min(int(hp["k"]), X.shape[0]),
                "train_x": [[float(v) for v in row] for row in Xs],
                "train_y": [int(v) for v in y],
            }
        elif algorithm == "logistic_regression":
            w, b = _train_logistic(Xs, y.astype(np.float64), hp)
            params = {"weights": [float(v) for v in w], "bias": float(b)}
        else:
            w, b = _train_svm(Xs, y.astype(np.float64), hp, seed)
            params = {"weights": [float(v) for v in w], "bias": float(b)}
    elif algorithm == "decision_tree":
        tree = trees.build_tree(
            X, y, max_features=None, min_leaf=int(hp["min_leaf"]), max_depth=hp["max_depth"]
        )
        params = {"tree": tree.to_dict()}
    else:
        forest = trees.build_forest(
            X,
            y,
            n_trees=int(hp["n_trees"]),
            max_features=hp["max_features"],
            min_leaf=int(hp["min_leaf"]),
            max_depth=hp["max_depth"],
            seed=seed,
        )
        params = {"trees": [t.to_dict() for t in forest]}
    return Model(
        algorithm=algorithm,
        feature_set=data.feature_set,
        n_features=X.shape[1],
        hyperparams=hp,
        seed=int(seed),
        standardization=standardization,
        params=params,
    )


def metrics(y_true, y_pred, average="binary"):
    """(accuracy, f1).  Binary F1 scores the drowsy class (label 1); macro
    averages the two one-vs-rest F1 values."""
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape or y_true.size == 0:
        raise SchemaMismatch("label sequences must be equal-length and non-empty")
    accuracy = float(np.mean(y_true == y_pred))

    def f1_for(positive):
        tp = int(np.sum((y_pred == positive) & (y_true == positive)))
        fp = int(np.sum((y_pred == positive) & (y_true != positive)))
        fn = int(np.sum((y_pred != positive) & (y_true == positive)))
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        if precision + recall == 0.0:
            return 0.0
        return 2.0 * precision * recall / (precision + recall)

    if average == "binary":
        f1 = f1_for(1)
    elif average == "macro":
        f1 = (f1_for(1) + f1_for(0)) / 2.0
    else:
        raise InvalidConfig(f"unknown F1 average {average!r}")
    return accuracy, f1


@dataclass(frozen=True)
class CVReport:
    algorithm: str
    feature_set: str
    hyperparams: dict
    seed: int
    k: int
    f1_average: str
    fold_of_row: tuple
    per_fold: tuple  # dicts: fold, accuracy, f1, tp, fp, tn, fn
    mean_accuracy: float
    mean_f1: float
    confusion: dict  # summed tp/fp/tn/fn

    def to_dict(self):
        return {
            "schema_version": 1,
            "algorithm": self.algorithm,
            "feature_set": self.feature_set,
            "hyperparams": self.hyperparams,
            "seed": self.seed,
            "folds": self.k,
            "f1_average": self.f1_average,
            "mean_accuracy": self.mean_accuracy,
            "mean_f1": self.mean_f1,
            "confusion": self.confusion,
            "per_fold": list(self.per_fold),
            "fold_of_row": list(self.fold_of_row),
        }


def stratified_folds(y, k, rng):
    """Per-class round-robin fold ids after a seeded shuffle."""
    y = np.asarray(y)
    fold = np.empty(y.shape[0], dtype=np.int64)
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        if idx.size < k:
            raise InsufficientPerClass(
                f"class {int(cls)} has {idx.size} rows, need >= {k}"
            )
        idx = idx.copy()
        rng.shuffle(idx)
        fold[idx] = np.arange(idx.size) % k
    return fold


def grouped_folds(groups, k, rng):
    """Round-robin whole groups (e.g. videos) into folds after a shuffle.

    Prevents same-driver rows from straddling the train/test boundary; class
    balance is then only as good as the group mix.
    """
    uniq = sorted(set(groups))
    if len(uniq) < k:
        raise InsufficientPerClass(f"{len(uniq)} groups cannot fill {k} folds")
    order = np.array(uniq, dtype=object)
    rng.shuffle(order)
    of_group = {g: i % k for i, g in enumerate(order)}
    return np.asarray([of_group[g] for g in groups], dtype=np.int64)


def cross_validate(
    data: Dataset,
    algorithm,
    hyperparams=None,
    k=5,
    seed=0,
    f1_average="binary",
    group_by_video=False,
) -> CVReport:
    """Stratified k-fold CV; every row is tested exactly once."""
    hp = resolve_hyperparams(algorithm, hyperparams)
    rng = np.random.default_rng(seed)
    if group_by_video:
        if not data.video_ids:
            raise InvalidConfig("group_by_video needs per-row video ids")
        fold = grouped_folds(list(data.video_ids), k, rng)
    else:
        fold = stratified_folds(data.y, k, rng)
    fold_seeds = rng.integers(0, 2**31 - 1, size=k)
    per_fold = []
    total = {"tp": 0, "fp": 0, "tn": 0, "fn": 0}
    for f in range(k):
        test_idx = np.flatnonzero(fold == f)
        train_idx = np.flatnonzero(fold != f)
        sub = Dataset(
            data.X[train_idx], data.y[train_idx], feature_set=data.feature_set
        )
        model = train(sub, algorithm, hp, seed=int(fold_seeds[f]))
        y_pred, _ = model.predict(data.X[test_idx])
        y_true = data.y[test_idx]
        accuracy, f1 = metrics(y_true, y_pred, average=f1_average)
        tp = int(np.sum((y_pred == 1) & (y_true == 1)))
        fp = int(np.sum((y_pred == 1) & (y_true == 0)))
        tn = int(np.sum((y_pred == 0) & (y_true == 0)))
        fn = int(np.sum((y_pred == 0) & (y_true == 1)))
        for key, val in zip(("tp", "fp", "tn", "fn"), (tp, fp, tn, fn)):
            total[key] += val
        per_fold.append(
            {"fold": f, "accuracy": accuracy, "f1": f1, "tp": tp, "fp": fp, "tn": tn, "fn": fn}
        )
    return CVReport(
        algorithm=algorithm,
        feature_set=data.feature_set,
        hyperparams=hp,
        seed=int(seed),
        k=int(k),
        f1_average=f1_average,
        fold_of_row=tuple(int(v) for v in fold),
        per_fold=tuple(per_fold),
        mean_accuracy=float(np.mean([p["accuracy"] for p in per_fold])),
        mean_f1=float(np.mean([p["f1"] for p in per_fold])),
        confusion=total,
    )
