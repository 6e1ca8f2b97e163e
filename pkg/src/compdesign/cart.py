"""CART regression trees: squared-error splits, constant leaves.

Rows with ``x[feature] < threshold`` go left, the rest go right. Thresholds
are midpoints between consecutive distinct feature values.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .errors import ArityMismatch, DatasetTooSmall, DomainError, InvariantViolation, ParseError

# Scores within this relative margin are treated as tied so that the
# (lowest feature, lowest threshold) rule decides, independent of rounding.
TIE_RTOL = 1e-9
TIE_ATOL = 1e-12


@dataclass(frozen=True)
class Dataset:
    feature_names: tuple[str, ...]
    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if X.ndim != 2 or X.shape[1] != len(self.feature_names):
            if not (X.size == 0 and len(y) == 0):
                raise ArityMismatch(f"rows must have {len(self.feature_names)} features")
            X = X.reshape(0, len(self.feature_names))
        if len(X) != len(y):
            raise ArityMismatch(f"{len(X)} feature rows but {len(y)} targets")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise DomainError("dataset contains non-finite values")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    def __len__(self):
        return len(self.y)


def read_dataset(path) -> Dataset:
    """Read a training CSV: feature columns followed by a ``target`` column."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if len(header) < 2 or header[-1] != "target":
        raise ParseError(f"{path}: header must list features then 'target'")
    values = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(f"{path}:{lineno}: expected {len(header)} cells, got {len(row)}")
        try:
            values.append([float(c) for c in row])
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from exc
    arr = np.array(values, dtype=float).reshape(-1, len(header))
    return Dataset(tuple(header[:-1]), arr[:, :-1], arr[:, -1])


def write_dataset(ds: Dataset, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(ds.feature_names) + ["target"])
        for x, t in zip(ds.X, ds.y):
            w.writerow([repr(float(v)) for v in x] + [repr(float(t))])


@dataclass(frozen=True)
class TreeConfig:
    max_depth: int = 4
    min_samples_leaf: int = 1
    min_samples_split: int = 2

    def __post_init__(self):
        if self.max_depth < 0:
            raise DomainError("max_depth must be >= 0")
        if self.min_samples_leaf < 1 or self.min_samples_split < 1:
            raise DomainError("sample limits must be positive")


@dataclass(frozen=True)
class Leaf:
    value: float
    n: int


@dataclass(frozen=True)
class Internal:
    feature: int
    threshold: float
    left: "TreeNode"
    right: "TreeNode"


TreeNode = Union[Leaf, Internal]


@dataclass(frozen=True)
class RegressionTree:
    root: TreeNode
    feature_names: tuple[str, ...]
    config: TreeConfig = field(default_factory=TreeConfig)

    def depth(self) -> int:
        return _depth(self.root)

    def leaves(self) -> list[Leaf]:
        out: list[Leaf] = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, Leaf):
                out.append(node)
            else:
                stack += [node.right, node.left]
        return out


def _depth(node: TreeNode) -> int:
    if isinstance(node, Leaf):
        return 0
    return 1 + max(_depth(node.left), _depth(node.right))


def _sse(y: np.ndarray) -> float:
    return float(np.sum((y - y.mean()) ** 2)) if len(y) else 0.0


def best_split(X, y, config: TreeConfig = TreeConfig(),
               features: Sequence[int] | None = None) -> tuple[int, float, float] | None:
    """Best (feature, threshold, score) by squared-error reduction, or None.

    The score is the parent SSE minus the children's SSE. Both children must
    keep at least ``config.min_samples_leaf`` rows.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(y)
    if n < max(config.min_samples_split, 2):
        return None
    if features is None:
        features = range(X.shape[1])
    total, total_sq = y.sum(), np.dot(y, y)
    parent = total_sq - total * total / n
    best: tuple[int, float, float] | None = None
    for f in features:
        order = np.argsort(X[:, f], kind="stable")
        xs, ys = X[order, f], y[order]
        csum = np.cumsum(ys)
        csq = np.cumsum(ys * ys)
        for i in range(1, n):  # left = first i rows
            if xs[i] == xs[i - 1]:
                continue
            if i < config.min_samples_leaf or n - i < config.min_samples_leaf:
                continue
            ls, lq = csum[i - 1], csq[i - 1]
            rs, rq = total - ls, total_sq - lq
            child = (lq - ls * ls / i) + (rq - rs * rs / (n - i))
            score = parent - child
            threshold = 0.5 * (xs[i - 1] + xs[i])
            if best is None or score > best[2] + _tie_margin(score, best[2], parent):
                best = (int(f), float(threshold), float(score))
    if best is None or best[2] <= _tie_margin(best[2], 0.0, parent):
        return None
    return best


def _tie_margin(a: float, b: float, scale: float) -> float:
    return TIE_ATOL + TIE_RTOL * max(abs(a), abs(b), abs(scale))


def _leaf(y: np.ndarray) -> Leaf:
    return Leaf(math.fsum(y) / len(y), len(y))


def build_tree(data: Dataset, config: TreeConfig = TreeConfig()) -> RegressionTree:
    if len(data) < max(1, 2 * config.min_samples_leaf) or len(data) == 0:
        raise DatasetTooSmall(f"need at least {max(1, 2 * config.min_samples_leaf)} rows, got {len(data)}")

    def grow(X: np.ndarray, y: np.ndarray, depth: int) -> TreeNode:
        if depth >= config.max_depth:
            return _leaf(y)
        split = best_split(X, y, config)
        if split is None:
            return _leaf(y)
        f, t, _ = split
        mask = X[:, f] < t
        return Internal(f, t, grow(X[mask], y[mask], depth + 1), grow(X[~mask], y[~mask], depth + 1))

    return RegressionTree(grow(data.X, data.y, 0), tuple(data.feature_names), config)


def predict(tree: RegressionTree, x: Sequence[float]) -> float:
    if len(x) != len(tree.feature_names):
        raise ArityMismatch(f"expected {len(tree.feature_names)} features, got {len(x)}")
    node = tree.root
    while isinstance(node, Internal):
        node = node.left if x[node.feature] < node.threshold else node.right
    return node.value


def predict_many(tree: RegressionTree, X) -> np.ndarray:
    return np.array([predict(tree, row) for row in np.asarray(X, dtype=float)])


def render_tree_text(tree: RegressionTree, indent: str = "  ") -> str:
    lines: list[str] = []

    def walk(node: TreeNode, depth: int) -> None:
        pad = indent * depth
        if isinstance(node, Leaf):
            lines.append(f"{pad}predict = {node.value:.5f} (n={node.n})")
            return
        lines.append(f"{pad}{tree.feature_names[node.feature]} < {node.threshold:.3f}")
        walk(node.left, depth + 1)
        walk(node.right, depth + 1)

    walk(tree.root, 0)
    return "\n".join(lines) + "\n"


# --- tree files ------------------------------------------------------------

def _node_to_dict(node: TreeNode) -> dict:
    if isinstance(node, Leaf):
        return {"value": node.value, "n": node.n}
    return {
        "feature": node.feature,
        "threshold": node.threshold,
        "left": _node_to_dict(node.left),
        "right": _node_to_dict(node.right),
    }


def tree_to_dict(tree: RegressionTree) -> dict:
    c = tree.config
    return {
        "feature_names": list(tree.feature_names),
        "config": {"max_depth": c.max_depth, "min_samples_leaf": c.min_samples_leaf,
                   "min_samples_split": c.min_samples_split},
        "root": _node_to_dict(tree.root),
    }


def _node_from_dict(obj, n_features: int) -> TreeNode:
    if not isinstance(obj, dict):
        raise ParseError("tree node must be an object")
    if "value" in obj:
        value, n = obj.get("value"), obj.get("n")
        if not isinstance(n, int) or isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ParseError("leaf needs numeric 'value' and integer 'n'")
        if n < 1 or not math.isfinite(value):
            raise InvariantViolation(f"leaf with n={n}, value={value} cannot be the mean of its samples")
        return Leaf(float(value), n)
    for key in ("feature", "threshold", "left", "right"):
        if key not in obj:
            raise ParseError(f"internal node missing {key!r}")
    feature, threshold = obj["feature"], obj["threshold"]
    if not isinstance(feature, int) or not isinstance(threshold, (int, float)):
        raise ParseError("internal node needs integer 'feature' and numeric 'threshold'")
    if not 0 <= feature < n_features or not math.isfinite(threshold):
        raise InvariantViolation(f"bad split feature={feature}, threshold={threshold}")
    return Internal(feature, float(threshold),
                    _node_from_dict(obj["left"], n_features), _node_from_dict(obj["right"], n_features))


def tree_from_dict(doc) -> RegressionTree:
    try:
        names = tuple(doc["feature_names"])
        config = TreeConfig(**doc.get("config", {}))
        root = doc["root"]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed tree document: {exc}") from exc
    return RegressionTree(_node_from_dict(root, len(names)), names, config)


def save_tree(tree: RegressionTree, path) -> None:
    # json writes floats with repr, which round-trips exactly
    Path(path).write_text(json.dumps(tree_to_dict(tree), indent=2) + "\n", encoding="utf-8")


def load_tree(path) -> RegressionTree:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return tree_from_dict(doc)
