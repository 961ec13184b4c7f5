"""From-scratch CART decision tree and bagged random forest (binary labels).

Trees store their nodes in flat parallel arrays so they serialize to JSON
directly.  Split search is exact: every boundary between distinct sorted
values is scored with the Gini criterion via the hot kernel; ties keep the
smallest left-branch and the lowest feature index, which makes training
deterministic for a fixed RNG.
"""

import math

import numpy as np

from . import kernels


class Tree:
    """Flat-array decision tree; feature[i] == -1 marks a leaf."""

    def __init__(self, feature, threshold, left, right, score):
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right
        self.score = score  # class-1 fraction of training rows at the node

    def predict_scores(self, X):
        out = np.empty(X.shape[0], dtype=np.float64)
        for i in range(X.shape[0]):
            node = 0
            while self.feature[node] >= 0:
                if X[i, self.feature[node]] < self.threshold[node]:
                    node = self.left[node]
                else:
                    node = self.right[node]
            out[i] = self.score[node]
        return out

    def to_dict(self):
        return {
            "feature": [int(v) for v in self.feature],
            "threshold": [float(v) for v in self.threshold],
            "left": [int(v) for v in self.left],
            "right": [int(v) for v in self.right],
            "score": [float(v) for v in self.score],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            np.asarray(d["feature"], dtype=np.int64),
            np.asarray(d["threshold"], dtype=np.float64),
            np.asarray(d["left"], dtype=np.int64),
            np.asarray(d["right"], dtype=np.int64),
            np.asarray(d["score"], dtype=np.float64),
        )


def _best_split(X, y, rows, max_features, min_leaf, rng):
    """Best (feature, threshold, left_rows, right_rows) for one node, or None."""
    n_features = X.shape[1]
    if max_features is None or max_features >= n_features:
        candidates = range(n_features)
    else:
        # ascending order so equal-impurity ties resolve to the lowest index
        candidates = np.sort(rng.choice(n_features, size=max_features, replace=False))
    best = None
    best_imp = math.inf
    for f in candidates:
        vals = X[rows, f]
        order = np.argsort(vals, kind="stable")
        size, imp, thr = kernels.split_scan(vals[order], y[rows][order], min_leaf)
        if size >= 0 and imp < best_imp:
            best_imp = imp
            best = (int(f), thr, rows[order[:size]], rows[order[size:]])
    return best


def build_tree(X, y, rows=None, *, max_features=None, min_leaf=1, max_depth=None, rng=None):
    """Grow a tree over X[rows]; iterative so deep trees cannot blow the stack.

    ``rng`` is only consumed when max_features subsets columns; nodes are
    expanded in preorder (left before right) so its draw order is fixed.
    """
    if rows is None:
        rows = np.arange(X.shape[0], dtype=np.int64)
    if rng is None:
        rng = np.random.default_rng(0)
    feature, threshold, left, right, score = [], [], [], [], []

    def new_node(node_rows):
        idx = len(feature)
        ones = int(np.sum(y[node_rows]))
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        score.append(ones / len(node_rows))
        return idx

    root = new_node(rows)
    stack = [(root, rows, 0)]
    while stack:
        idx, node_rows, depth = stack.pop()
        ones = int(np.sum(y[node_rows]))
        if ones == 0 or ones == len(node_rows) or len(node_rows) < 2 * min_leaf:
            continue
        if max_depth is not None and depth >= max_depth:
            continue
        split = _best_split(X, y, node_rows, max_features, min_leaf, rng)
        if split is None:
            continue
        f, thr, rows_l, rows_r = split
        feature[idx] = f
        threshold[idx] = thr
        li = new_node(rows_l)
        ri = new_node(rows_r)
        left[idx] = li
        right[idx] = ri
        # push right first so the left child is expanded first (preorder)
        stack.append((ri, rows_r, depth + 1))
        stack.append((li, rows_l, depth + 1))
    return Tree(
        np.asarray(feature, dtype=np.int64),
        np.asarray(threshold, dtype=np.float64),
        np.asarray(left, dtype=np.int64),
        np.asarray(right, dtype=np.int64),
        np.asarray(score, dtype=np.float64),
    )


def build_forest(X, y, *, n_trees=100, max_features="sqrt", min_leaf=1, max_depth=None, seed=0):
    """Bagged forest: per-tree bootstrap rows + per-split feature subsets."""
    n, n_features = X.shape
    if max_features == "sqrt":
        mf = max(1, int(math.floor(math.sqrt(n_features))))
    elif max_features is None:
        mf = None
    else:
        mf = int(max_features)
    rng = np.random.default_rng(seed)
    trees = []
    for _ in range(n_trees):
        rows = rng.integers(0, n, size=n).astype(np.int64)
        trees.append(
            build_tree(
                X, y, rows, max_features=mf, min_leaf=min_leaf, max_depth=max_depth, rng=rng
            )
        )
    return trees


def forest_scores(trees, X):
    """Fraction of trees voting class 1 (each tree votes its leaf majority)."""
    votes = np.zeros(X.shape[0], dtype=np.float64)
    for t in trees:
        votes += t.predict_scores(X) > 0.5
    return votes / len(trees)
