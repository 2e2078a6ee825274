"""Random forest of CART trees for binary classification.

Gini splits, bootstrap sampling and per-node feature subsampling, with
per-tree seeds derived up front so the fitted model does not depend on the
order in which trees are grown.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels

MODEL_VERSION = 1


@dataclass(frozen=True)
class ForestConfig:
    n_estimators: int = 100
    max_features: int | None = None  # None: ceil(sqrt(n_features))
    min_samples_split: int = 2
    workers: int = 1

    def __post_init__(self):
        if self.n_estimators < 1:
            raise ValueError("n_estimators must be positive")
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be at least 2")
        if self.workers < 1:
            raise ValueError("workers must be positive")


@dataclass
class Tree:
    feature: np.ndarray  # -1 marks a leaf
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray  # (n_nodes, 2) class counts of the bootstrap sample

    @property
    def n_nodes(self) -> int:
        return int(self.feature.shape[0])

    def leaf_votes(self) -> np.ndarray:
        # ties go to class 0
        return (self.counts[:, 1] > self.counts[:, 0]).astype(np.int8)

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by every row of X."""
        node = np.zeros(X.shape[0], dtype=np.intp)
        active = np.flatnonzero(self.feature[node] >= 0)
        while active.size:
            cur = node[active]
            f = self.feature[cur]
            go_left = X[active, f] <= self.threshold[cur]
            node[active] = np.where(go_left, self.left[cur], self.right[cur])
            active = active[self.feature[node[active]] >= 0]
        return node

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.leaf_votes()[self.apply(X)]

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "counts": self.counts.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Tree":
        return cls(
            feature=np.asarray(d["feature"], dtype=np.intp),
            threshold=np.asarray(d["threshold"], dtype=np.float64),
            left=np.asarray(d["left"], dtype=np.intp),
            right=np.asarray(d["right"], dtype=np.intp),
            counts=np.asarray(d["counts"], dtype=np.int64).reshape(-1, 2),
        )


def _gini_mass(counts) -> float:
    """n * Gini impurity for a two-class count pair."""
    n = counts[0] + counts[1]
    if n == 0:
        return 0.0
    return n - (counts[0] * counts[0] + counts[1] * counts[1]) / n


def grow_tree(X, y, samples, seed: int, max_features: int, min_samples_split: int = 2) -> Tree:
    feature, threshold, left, right, counts = _kernels.grow_tree(
        X, y, samples, seed, max_features, min_samples_split
    )
    return Tree(feature, threshold, left, right, counts)


def _tree_importance(tree: Tree, n_features: int) -> np.ndarray:
    imp = np.zeros(n_features)
    for node in range(tree.n_nodes):
        f = tree.feature[node]
        if f < 0:
            continue
        l, r = tree.left[node], tree.right[node]
        imp[f] += _gini_mass(tree.counts[node]) - _gini_mass(tree.counts[l]) - _gini_mass(tree.counts[r])
    total = imp.sum()
    return imp / total if total > 0 else imp


def canonical_order(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Row permutation sorting rows by a content hash (stable)."""
    keys = [
        hashlib.blake2b(X[i].tobytes() + int(y[i]).to_bytes(1, "little"), digest_size=16).digest()
        for i in range(X.shape[0])
    ]
    return np.asarray(sorted(range(len(keys)), key=keys.__getitem__), dtype=np.intp)


@dataclass
class RandomForest:
    trees: list[Tree]
    seed: int
    config: ForestConfig
    n_features: int
    feature_names: tuple[str, ...] = ()
    importances: np.ndarray = field(default_factory=lambda: np.zeros(0))
    oob_accuracy: float | None = None
    train_accuracy: float | None = None

    def predict_proba(self, X) -> np.ndarray:
        """Fraction of trees whose leaf majority is class 1."""
        X = np.ascontiguousarray(np.asarray(X, dtype=np.float64).reshape(-1, self.n_features))
        votes = np.zeros(X.shape[0], dtype=np.int64)
        for tree in self.trees:
            votes += tree.predict(X)
        return votes / len(self.trees)

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(np.int8)

    def to_dict(self) -> dict:
        return {
            "model_version": MODEL_VERSION,
            "seed": self.seed,
            # worker count is a runtime choice and never affects the model
            "config": {k: v for k, v in asdict(self.config).items() if k != "workers"},
            "n_features": self.n_features,
            "feature_names": list(self.feature_names),
            "importances": self.importances.tolist(),
            "oob_accuracy": self.oob_accuracy,
            "train_accuracy": self.train_accuracy,
            "trees": [t.to_dict() for t in self.trees],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "RandomForest":
        if d.get("model_version") != MODEL_VERSION:
            raise ValueError(f"unsupported model_version {d.get('model_version')!r}")
        return cls(
            trees=[Tree.from_dict(t) for t in d["trees"]],
            seed=d["seed"],
            config=ForestConfig(**d["config"]),
            n_features=d["n_features"],
            feature_names=tuple(d.get("feature_names", ())),
            importances=np.asarray(d["importances"], dtype=np.float64),
            oob_accuracy=d.get("oob_accuracy"),
            train_accuracy=d.get("train_accuracy"),
        )


def fit_forest(X, y, seed: int, config: ForestConfig | None = None, feature_names=()) -> RandomForest:
    config = config or ForestConfig()
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] != y.shape[0] or X.shape[0] == 0:
        raise ValueError("X must be a nonempty 2-d array with one label per row")
    if not np.isin(y, (0, 1)).all():
        raise ValueError("labels must be 0 or 1")
    if np.unique(y).size < 2:
        raise ValueError("training set has a single class")

    order = canonical_order(X, y)
    X = np.ascontiguousarray(X[order])
    y = np.ascontiguousarray(y[order])
    n, d = X.shape
    max_features = config.max_features or math.ceil(math.sqrt(d))
    seeds = np.random.SeedSequence(seed).spawn(config.n_estimators)

    def build(k):
        rng = np.random.default_rng(seeds[k])
        boot = np.sort(rng.integers(0, n, n)).astype(np.intp)
        tree_seed = int(seeds[k].generate_state(1, np.uint64)[0])
        tree = grow_tree(X, y, boot, tree_seed, max_features, config.min_samples_split)
        oob = np.ones(n, dtype=bool)
        oob[boot] = False
        return tree, oob

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            built = list(pool.map(build, range(config.n_estimators)))
    else:
        built = [build(k) for k in range(config.n_estimators)]

    trees = [t for t, _ in built]
    oob_votes = np.zeros(n, dtype=np.int64)
    oob_seen = np.zeros(n, dtype=np.int64)
    for tree, oob in built:
        rows = np.flatnonzero(oob)
        if rows.size:
            oob_votes[rows] += tree.predict(X[rows])
            oob_seen[rows] += 1
    has_oob = oob_seen > 0
    oob_accuracy = None
    if has_oob.any():
        oob_pred = (oob_votes[has_oob] / oob_seen[has_oob] >= 0.5).astype(np.int64)
        oob_accuracy = float(np.mean(oob_pred == y[has_oob]))

    per_tree = np.array([_tree_importance(t, d) for t in trees])
    importances = per_tree.mean(axis=0)
    total = importances.sum()
    importances = importances / total if total > 0 else np.full(d, 1.0 / d)

    forest = RandomForest(
        trees=trees,
        seed=seed,
        config=config,
        n_features=d,
        feature_names=tuple(feature_names),
        importances=importances,
        oob_accuracy=oob_accuracy,
    )
    forest.train_accuracy = float(np.mean(forest.predict(X) == y))
    return forest
