"""Tree-surrogate CoF/wear minimization with the NSGA-II engine."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Union

import numpy as np

from . import moo
from .cart import Dataset, RegressionTree, TreeConfig, build_tree, predict, read_dataset
from .errors import DomainError, ParseError, UnboundFeature

MINIMIZE_BOTH = (moo.Sense.MINIMIZE, moo.Sense.MINIMIZE)


@dataclass(frozen=True)
class TriboRecord:
    load: float
    b4c_wt: float
    sliding_speed: float
    cof: float
    wear: float

    def __post_init__(self):
        if not 0 < self.cof < 2:
            raise DomainError(f"cof {self.cof} outside (0, 2)")
        if self.wear < 0:
            raise DomainError(f"wear {self.wear} is negative")
        if self.load <= 0:
            raise DomainError(f"load {self.load} must be positive")


@dataclass(frozen=True)
class DesignVariable:
    name: str
    low: float
    high: float

    def __post_init__(self):
        if not (np.isfinite(self.low) and np.isfinite(self.high)) or not self.low < self.high:
            raise DomainError(f"variable {self.name!r} needs finite bounds with low < high")


# a surrogate feature is fed either by a design variable (by name) or a constant
Binding = Mapping[str, Union[str, float]]


@dataclass(frozen=True)
class TriboDesign:
    variables: tuple[DesignVariable, ...]
    cof_binding: Binding
    wear_binding: Binding

    def __post_init__(self):
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise DomainError(f"duplicate design variable names {names}")
        for binding in (self.cof_binding, self.wear_binding):
            for feature, source in binding.items():
                if isinstance(source, str) and source not in names:
                    raise UnboundFeature(f"feature {feature!r} bound to unknown variable {source!r}")

    @property
    def bounds(self) -> np.ndarray:
        return np.array([[v.low, v.high] for v in self.variables])

    def contains(self, point) -> bool:
        b = self.bounds
        point = np.asarray(point, dtype=float)
        return point.shape == (len(self.variables),) and bool(np.all((point >= b[:, 0]) & (point <= b[:, 1])))


@dataclass(frozen=True)
class Surrogates:
    cof: RegressionTree
    wear: RegressionTree


def train_surrogates(cof_data: Dataset, wear_data: Dataset, config: TreeConfig = TreeConfig()) -> Surrogates:
    return Surrogates(build_tree(cof_data, config), build_tree(wear_data, config))


def _route(tree: RegressionTree, binding: Binding, values: Mapping[str, float]) -> list[float]:
    x = []
    for feature in tree.feature_names:
        if feature not in binding:
            raise UnboundFeature(f"surrogate feature {feature!r} has no binding")
        source = binding[feature]
        x.append(values[source] if isinstance(source, str) else float(source))
    return x


def tribo_objectives(point, surrogates: Surrogates, design: TriboDesign) -> tuple[float, float]:
    """(cof, wear) predicted at a design point; both are minimized."""
    if not design.contains(point):
        raise DomainError(f"design point {tuple(point)} outside the design box")
    values = {v.name: float(p) for v, p in zip(design.variables, point)}
    cof = predict(surrogates.cof, _route(surrogates.cof, design.cof_binding, values))
    wear = predict(surrogates.wear, _route(surrogates.wear, design.wear_binding, values))
    return cof, wear


def one_per_objective_vector(archive: moo.ParetoArchive) -> moo.ParetoArchive:
    """Keep the first member (lexicographic genes) for each distinct objective vector."""
    seen = set()
    members = []
    for m in archive.members:
        key = tuple(m.objectives.tolist())
        if key not in seen:
            seen.add(key)
            members.append(m)
    return moo.ParetoArchive(members)


def optimize_tribo(design: TriboDesign, surrogates: Surrogates,
                   config: moo.NsgaConfig = moo.NsgaConfig()) -> moo.ParetoArchive:
    def problem(genes):
        return tribo_objectives(genes, surrogates, design)

    archive = moo.nsga2_run(problem, design.bounds, MINIMIZE_BOTH, config)
    return one_per_objective_vector(archive)


def grid_pareto(design: TriboDesign, surrogates: Surrogates, step: float = 0.01) -> moo.ParetoArchive:
    """Grid oracle for :func:`optimize_tribo`, reduced the same way."""
    def problem(genes):
        return tribo_objectives(genes, surrogates, design)

    archive = moo.brute_force_pareto(problem, design.bounds, MINIMIZE_BOTH, step)
    return one_per_objective_vector(archive)


def raw_pareto(data_cof: Dataset, data_wear: Dataset) -> list[tuple[tuple[float, ...], float, float]]:
    """Non-dominated (cof, wear) rows of two raw tables measured at the same conditions.

    Rows are matched on identical feature vectors; the result lists
    ``(features, cof, wear)`` in the CoF table's row order.
    """
    if data_cof.feature_names != data_wear.feature_names:
        raise DomainError("raw tables must share feature columns")
    wear_by_x = {tuple(x): t for x, t in zip(data_wear.X.tolist(), data_wear.y.tolist())}
    rows = [(tuple(x), c, wear_by_x[tuple(x)]) for x, c in zip(data_cof.X.tolist(), data_cof.y.tolist())
            if tuple(x) in wear_by_x]
    if not rows:
        return []
    mask = moo.nondominated_mask([(c, w) for _, c, w in rows], MINIMIZE_BOTH)
    return [r for r, keep in zip(rows, mask) if keep]


@dataclass(frozen=True)
class TriboConfig:
    design: TriboDesign
    cof_data: Path
    wear_data: Path
    tree: TreeConfig = field(default_factory=TreeConfig)
    nsga: dict = field(default_factory=dict)


def load_tribo_config(path) -> TriboConfig:
    """Parse a tribo JSON config; data paths resolve relative to the file."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    try:
        variables = tuple(DesignVariable(v["name"], float(v["low"]), float(v["high"])) for v in doc["variables"])
        cof, wear = doc["cof"], doc["wear"]
        design = TriboDesign(variables, dict(cof["features"]), dict(wear["features"]))
        tree = TreeConfig(**doc.get("tree", {}))
        return TriboConfig(design, path.parent / cof["data"], path.parent / wear["data"], tree,
                           dict(doc.get("nsga", {})))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"{path}: malformed tribo config: {exc}") from exc


def surrogates_from_config(cfg: TriboConfig) -> Surrogates:
    return train_surrogates(read_dataset(cfg.cof_data), read_dataset(cfg.wear_data), cfg.tree)
