"""Random forest classifier over the similarity features.

Built directly on numpy so the trained model is a plain, versioned JSON
object (split features, thresholds, leaf fractions) and training is
bit-reproducible: every tree draws its bootstrap sample and split features
from its own RNG stream derived from (seed, tree index), so serial and
parallel training produce identical forests.  The forest was chosen over
black-box alternatives for its impurity-based feature importances, which is
what an examiner gets shown.
"""

from __future__ import annotations

import itertools
import json
import warnings
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed
from sklearn.base import BaseEstimator
from sklearn.model_selection import StratifiedGroupKFold, StratifiedKFold

from .errors import DegenerateLabelsError, SchemaError, StateError
from .features import FEATURE_COLUMNS

MODEL_SCHEMA_VERSION = 1

#: Configuration picked by cross-validation on the reference corpus; kept as
#: the package default.
DEFAULT_PARAMS = {"n_trees": 1000, "max_depth": None, "min_split": 2, "min_leaf": 1}


@dataclass(frozen=True)
class HyperGrid:
    """Hyperparameter grid searched during cross-validation (full size 144)."""

    n_trees: tuple = (500, 1000, 2000, 5000)
    max_depth: tuple = (10, 30, 50, None)
    min_split: tuple = (2, 5, 10)
    min_leaf: tuple = (1, 2, 4)

    def points(self) -> list[dict]:
        return [
            {"n_trees": t, "max_depth": d, "min_split": s, "min_leaf": l}
            for t, d, s, l in itertools.product(self.n_trees, self.max_depth, self.min_split, self.min_leaf)
        ]

    def __len__(self) -> int:
        return len(self.n_trees) * len(self.max_depth) * len(self.min_split) * len(self.min_leaf)


@dataclass
class _Tree:
    """Flat array representation of one decision tree."""

    feature: list = field(default_factory=list)
    threshold: list = field(default_factory=list)
    left: list = field(default_factory=list)
    right: list = field(default_factory=list)
    value: list = field(default_factory=list)       # mated fraction at the node
    n_samples: list = field(default_factory=list)

    def add_node(self, value: float, n: int) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(value)
        self.n_samples.append(n)
        return len(self.value) - 1

    def predict(self, X: np.ndarray) -> np.ndarray:
        feature = np.asarray(self.feature)
        threshold = np.asarray(self.threshold)
        left = np.asarray(self.left)
        right = np.asarray(self.right)
        value = np.asarray(self.value)
        node = np.zeros(X.shape[0], dtype=np.int64)
        while True:
            internal = feature[node] >= 0
            if not internal.any():
                break
            rows = np.nonzero(internal)[0]
            f = feature[node[rows]]
            goes_left = X[rows, f] <= threshold[node[rows]]
            node[rows[goes_left]] = left[node[rows]][goes_left]
            node[rows[~goes_left]] = right[node[rows]][~goes_left]
        return value[node]

    def to_dict(self) -> dict:
        return {
            "feature": list(self.feature),
            "threshold": [float(t) for t in self.threshold],
            "left": list(self.left),
            "right": list(self.right),
            "value": [float(v) for v in self.value],
            "n_samples": list(self.n_samples),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "_Tree":
        tree = cls()
        tree.feature = [int(v) for v in obj["feature"]]
        tree.threshold = [float(v) for v in obj["threshold"]]
        tree.left = [int(v) for v in obj["left"]]
        tree.right = [int(v) for v in obj["right"]]
        tree.value = [float(v) for v in obj["value"]]
        tree.n_samples = [int(v) for v in obj["n_samples"]]
        return tree


def _gini_from_counts(n_pos: np.ndarray, n: np.ndarray) -> np.ndarray:
    with np.errstate(invalid="ignore", divide="ignore"):
        f = np.where(n > 0, n_pos / n, 0.0)
    return 1.0 - f**2 - (1.0 - f) ** 2


def _best_split(X, y, idx, feats, min_leaf):
    """Best (feature, threshold, weighted child impurity) over candidate features.

    Candidate thresholds are midpoints between adjacent distinct values; a
    split is valid only if both children keep at least ``min_leaf`` rows.
    Returns None when no feature admits a valid split.
    """
    n = idx.size
    ysub = y[idx]
    best = None
    for f in feats:
        xs = X[idx, f]
        order = np.argsort(xs, kind="stable")
        xs_sorted = xs[order]
        ys_sorted = ysub[order]
        cum_pos = np.cumsum(ys_sorted)
        left_n = np.arange(1, n)
        boundary = xs_sorted[1:] > xs_sorted[:-1]
        valid = boundary & (left_n >= min_leaf) & ((n - left_n) >= min_leaf)
        if not valid.any():
            continue
        left_pos = cum_pos[:-1]
        right_pos = cum_pos[-1] - left_pos
        right_n = n - left_n
        weighted = (
            left_n * _gini_from_counts(left_pos, left_n)
            + right_n * _gini_from_counts(right_pos, right_n)
        ) / n
        weighted = np.where(valid, weighted, np.inf)
        pos = int(np.argmin(weighted))
        score = float(weighted[pos])
        if best is None or score < best[2]:
            thr = 0.5 * (xs_sorted[pos] + xs_sorted[pos + 1])
            best = (int(f), float(thr), score)
    return best


def _grow_tree(X, y, seed_seq, max_depth, min_split, min_leaf, max_features, bootstrap):
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    n, p = X.shape
    if bootstrap:
        sample = rng.integers(0, n, size=n)
    else:
        sample = np.arange(n)
    Xs, ys = X[sample], y[sample]
    tree = _Tree()
    importances = np.zeros(p)
    # Preorder construction keeps node ids deterministic.
    stack = [(np.arange(n), 0, -1, "root")]
    while stack:
        idx, depth, parent, side = stack.pop()
        n_node = idx.size
        frac = float(ys[idx].mean())
        node_id = tree.add_node(frac, int(n_node))
        if parent >= 0:
            if side == "left":
                tree.left[parent] = node_id
            else:
                tree.right[parent] = node_id
        gini = 1.0 - frac**2 - (1.0 - frac) ** 2
        depth_ok = max_depth is None or depth < max_depth
        if not depth_ok or n_node < min_split or gini == 0.0:
            continue
        feats = rng.choice(p, size=min(max_features, p), replace=False)
        split = _best_split(Xs, ys, idx, feats, min_leaf)
        if split is None:
            continue
        f, thr, weighted = split
        decrease = gini - weighted
        if decrease <= 0.0:
            continue
        tree.feature[node_id] = f
        tree.threshold[node_id] = thr
        importances[f] += (n_node / n) * decrease
        go_left = Xs[idx, f] <= thr
        # Push right first so the left child is built (and numbered) first.
        stack.append((idx[~go_left], depth + 1, node_id, "right"))
        stack.append((idx[go_left], depth + 1, node_id, "left"))
    total = importances.sum()
    if total > 0:
        importances = importances / total
    return tree, importances, sample


class RandomForestMatcher(BaseEstimator):
    """Random forest emitting the posterior probability that a pair is mated.

    Each tree trains on a bootstrap sample of the rows and considers
    ceil(sqrt(p)) randomly chosen features at every split, scored by Gini
    impurity reduction.  ``predict_proba`` averages the mated fraction of the
    leaves each tree routes a row to.  NaN feature values are imputed with
    the training-column medians, which are stored on the model.
    """

    def __init__(
        self,
        n_trees: int = 1000,
        max_depth: int | None = None,
        min_split: int = 2,
        min_leaf: int = 1,
        bootstrap: bool = True,
        oob_score: bool = False,
        seed: int = 0,
        n_jobs: int = 1,
    ):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_split = min_split
        self.min_leaf = min_leaf
        self.bootstrap = bootstrap
        self.oob_score = oob_score
        self.seed = seed
        self.n_jobs = n_jobs

    def fit(self, X, y, columns=None):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        if X.ndim != 2 or X.shape[0] != y.shape[0]:
            raise SchemaError(f"X shape {X.shape} does not match y shape {y.shape}")
        classes = np.unique(y)
        if classes.size < 2:
            raise DegenerateLabelsError("training data must contain both classes")
        if not np.isin(classes, (0, 1)).all():
            raise SchemaError("labels must be 0 (non-mated) or 1 (mated)")
        self.columns_ = list(columns) if columns is not None else list(FEATURE_COLUMNS[: X.shape[1]])
        if len(self.columns_) != X.shape[1]:
            raise SchemaError(f"{len(self.columns_)} column names for {X.shape[1]} features")

        self.medians_ = self._fit_medians(X)
        Xi = self._impute(X)
        p = X.shape[1]
        self.max_features_ = int(np.ceil(np.sqrt(p)))
        seed_seqs = [np.random.SeedSequence((self.seed, i)) for i in range(self.n_trees)]
        results = Parallel(n_jobs=self.n_jobs)(
            delayed(_grow_tree)(
                Xi, y, ss, self.max_depth, self.min_split, self.min_leaf, self.max_features_, self.bootstrap
            )
            for ss in seed_seqs
        )
        self.trees_ = [r[0] for r in results]
        imp = np.mean([r[1] for r in results], axis=0)
        total = imp.sum()
        self.feature_importances_ = imp / total if total > 0 else imp
        if self.oob_score:
            self.oob_score_ = self._oob_accuracy(Xi, y, [r[2] for r in results])
        return self

    def _fit_medians(self, X) -> np.ndarray:
        medians = np.empty(X.shape[1])
        for j in range(X.shape[1]):
            col = X[:, j]
            finite = col[~np.isnan(col)]
            if finite.size == 0:
                warnings.warn(f"column {self.columns_[j]!r} is entirely missing; median set to 0")
                medians[j] = 0.0
            else:
                medians[j] = float(np.median(finite))
        return medians

    def _impute(self, X) -> np.ndarray:
        if not hasattr(self, "medians_"):
            raise StateError("imputer is untrained; fit the model first")
        mask = np.isnan(X)
        if not mask.any():
            return X
        out = X.copy()
        out[mask] = np.broadcast_to(self.medians_, X.shape)[mask]
        return out

    def _oob_accuracy(self, X, y, samples) -> float:
        n = X.shape[0]
        votes = np.zeros(n)
        counts = np.zeros(n)
        for tree, sample in zip(self.trees_, samples):
            oob = np.ones(n, dtype=bool)
            oob[sample] = False
            if not oob.any():
                continue
            votes[oob] += tree.predict(X[oob])
            counts[oob] += 1
        seen = counts > 0
        pred = (votes[seen] / counts[seen]) >= 0.5
        return float(np.mean(pred == (y[seen] == 1)))

    def _check_fitted(self):
        if not hasattr(self, "trees_"):
            raise StateError("model is not fitted")

    def _validate_columns(self, columns):
        if columns is not None and list(columns) != self.columns_:
            raise SchemaError("feature columns do not match the training schema")

    def predict_proba(self, X, columns=None) -> np.ndarray:
        """Posterior probability of the mated class for each row."""
        self._check_fitted()
        self._validate_columns(columns)
        X = np.asarray(X, dtype=np.float64)
        single = X.ndim == 1
        if single:
            X = X[None, :]
        if X.shape[1] != len(self.columns_):
            raise SchemaError(f"expected {len(self.columns_)} features, got {X.shape[1]}")
        Xi = self._impute(X)
        acc = np.zeros(X.shape[0])
        for tree in self.trees_:
            acc += tree.predict(Xi)
        proba = acc / len(self.trees_)
        return float(proba[0]) if single else proba

    def predict(self, X, threshold: float = 0.5, columns=None) -> np.ndarray:
        proba = self.predict_proba(X, columns=columns)
        return (np.asarray(proba) >= threshold).astype(np.int64)

    def importance_table(self) -> list[tuple[str, float]]:
        """Feature importances paired with column names, descending."""
        self._check_fitted()
        pairs = list(zip(self.columns_, (float(v) for v in self.feature_importances_)))
        return sorted(pairs, key=lambda kv: -kv[1])

    # -- persistence ---------------------------------------------------

    def to_json(self) -> str:
        self._check_fitted()
        payload = {
            "schema_version": MODEL_SCHEMA_VERSION,
            "columns": self.columns_,
            "hyperparams": {
                "n_trees": self.n_trees,
                "max_depth": self.max_depth,
                "min_split": self.min_split,
                "min_leaf": self.min_leaf,
                "bootstrap": self.bootstrap,
                "max_features": self.max_features_,
            },
            "seed": self.seed,
            "medians": [float(v) for v in self.medians_],
            "importances": [float(v) for v in self.feature_importances_],
            "trees": [t.to_dict() for t in self.trees_],
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json())

    @classmethod
    def from_json(cls, text: str) -> "RandomForestMatcher":
        obj = json.loads(text)
        if obj.get("schema_version") != MODEL_SCHEMA_VERSION:
            raise SchemaError(f"unsupported model schema {obj.get('schema_version')!r}")
        hp = obj["hyperparams"]
        model = cls(
            n_trees=hp["n_trees"],
            max_depth=hp["max_depth"],
            min_split=hp["min_split"],
            min_leaf=hp["min_leaf"],
            bootstrap=hp.get("bootstrap", True),
            seed=obj.get("seed", 0),
        )
        model.columns_ = list(obj["columns"])
        model.medians_ = np.asarray(obj["medians"], dtype=np.float64)
        model.feature_importances_ = np.asarray(obj["importances"], dtype=np.float64)
        model.trees_ = [_Tree.from_dict(t) for t in obj["trees"]]
        model.max_features_ = hp.get("max_features", int(np.ceil(np.sqrt(len(model.columns_)))))
        return model

    @classmethod
    def load(cls, path) -> "RandomForestMatcher":
        with open(path) as fh:
            return cls.from_json(fh.read())


def grid_search_cv(
    X,
    y,
    grid: HyperGrid = HyperGrid(),
    folds: int = 5,
    seed: int = 0,
    groups=None,
    n_jobs: int = 1,
):
    """Exhaustive grid search with stratified k-fold cross-validation.

    When ``groups`` is given (one key per row, e.g. a shoe identity), folds
    never split a group, so prints of one shoe cannot leak between training
    and validation.  Returns the best parameter point (ties prefer fewer
    trees, then shallower depth) and the full accuracy table.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    for cls in (0, 1):
        if np.sum(y == cls) < folds:
            raise DegenerateLabelsError(f"need at least {folds} rows of class {cls}")
    if groups is not None:
        splitter = StratifiedGroupKFold(n_splits=folds, shuffle=True, random_state=seed)
        split_iter = list(splitter.split(X, y, groups=np.asarray(groups)))
    else:
        splitter = StratifiedKFold(n_splits=folds, shuffle=True, random_state=seed)
        split_iter = list(splitter.split(X, y))

    table = []
    for params in grid.points():
        accs = []
        for train_idx, val_idx in split_iter:
            model = RandomForestMatcher(seed=seed, n_jobs=n_jobs, **params)
            model.fit(X[train_idx], y[train_idx])
            pred = model.predict(X[val_idx])
            accs.append(float(np.mean(pred == y[val_idx])))
        table.append({**params, "cv_accuracy": float(np.mean(accs))})

    def depth_rank(d):
        return np.inf if d is None else d

    best = max(
        table,
        key=lambda row: (row["cv_accuracy"], -row["n_trees"], -depth_rank(row["max_depth"])),
    )
    best_params = {k: best[k] for k in ("n_trees", "max_depth", "min_split", "min_leaf")}
    return best_params, table
