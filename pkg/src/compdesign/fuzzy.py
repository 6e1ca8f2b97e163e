"""Mamdani fuzzy inference with triangular membership functions.

Pipeline: fuzzify each crisp input, fire rules with min-AND, clip each
consequent term by its strongest activation, aggregate per output with max,
then defuzzify by the exact centroid of the piecewise-linear aggregate.
"""

from __future__ import annotations

import itertools
import json
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import CoverageGap, NoRuleFired, ParseError, UnknownLabel, ZeroArea

DEFAULT_LABELS = ("low", "medium", "high")


class ClampWarning(UserWarning):
    """A crisp input fell outside its variable's universe and was clamped."""


@dataclass(frozen=True)
class TriangularMF:
    left: float
    peak: float
    right: float

    def __post_init__(self):
        if not self.left <= self.peak <= self.right:
            raise ParseError(f"triangle needs left <= peak <= right, got {self.as_tuple()}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.left, self.peak, self.right)

    def __call__(self, x: float) -> float:
        a, b, c = self.left, self.peak, self.right
        if x < a or x > c:
            return 0.0
        if x == b:
            return 1.0
        if x < b:
            return (x - a) / (b - a)
        return (c - x) / (c - b)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Vectorized membership; same semantics as calling the instance."""
        x = np.asarray(x, dtype=float)
        a, b, c = self.left, self.peak, self.right
        up = (x - a) / (b - a) if b > a else np.ones_like(x)
        down = (c - x) / (c - b) if c > b else np.ones_like(x)
        mu = np.where(x <= b, up, down)
        mu = np.where((x < a) | (x > c), 0.0, mu)
        return np.where(x == b, 1.0, mu)


@dataclass(frozen=True)
class LinguisticVariable:
    name: str
    universe: tuple[float, float]
    terms: tuple[tuple[str, TriangularMF], ...]
    unit: str = ""

    def __post_init__(self):
        lo, hi = self.universe
        if not lo < hi:
            raise ParseError(f"{self.name}: universe must have low < high")
        labels = [label for label, _ in self.terms]
        if len(set(labels)) != len(labels):
            raise ParseError(f"{self.name}: duplicate term labels {labels}")
        if not labels:
            raise ParseError(f"{self.name}: no terms")
        for label, mf in self.terms:
            if mf.left < lo or mf.right > hi:
                raise ParseError(f"{self.name}.{label}: membership function leaves the universe")

    @property
    def labels(self) -> list[str]:
        return [label for label, _ in self.terms]

    def term(self, label: str) -> TriangularMF:
        for name, mf in self.terms:
            if name == label:
                return mf
        raise UnknownLabel(f"variable {self.name!r} has no term {label!r}")


def default_terms(universe: tuple[float, float]) -> tuple[tuple[str, TriangularMF], ...]:
    """Low/medium/high triangles overlapping by half and spanning the universe."""
    lo, hi = universe
    mid = 0.5 * (lo + hi)
    return (
        ("low", TriangularMF(lo, lo, mid)),
        ("medium", TriangularMF(lo, mid, hi)),
        ("high", TriangularMF(mid, hi, hi)),
    )


def make_variable(name: str, universe: tuple[float, float], unit: str = "") -> LinguisticVariable:
    return LinguisticVariable(name, (float(universe[0]), float(universe[1])), default_terms(universe), unit)


@dataclass(frozen=True)
class FuzzyRule:
    antecedents: tuple[tuple[str, str], ...]
    consequents: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class RuleBase:
    inputs: tuple[LinguisticVariable, ...]
    outputs: tuple[LinguisticVariable, ...]
    rules: tuple[FuzzyRule, ...]

    def __post_init__(self):
        inputs = {v.name: v for v in self.inputs}
        outputs = {v.name: v for v in self.outputs}
        for i, rule in enumerate(self.rules):
            if not rule.antecedents or not rule.consequents:
                raise ParseError(f"rule {i} needs at least one antecedent and one consequent")
            for table, pairs in ((inputs, rule.antecedents), (outputs, rule.consequents)):
                for var, label in pairs:
                    if var not in table:
                        raise UnknownLabel(f"rule {i} references unknown variable {var!r}")
                    table[var].term(label)
        check_coverage(self)

    def variable(self, name: str) -> LinguisticVariable:
        for v in self.inputs + self.outputs:
            if v.name == name:
                return v
        raise UnknownLabel(f"no variable named {name!r}")


def check_coverage(rb: RuleBase) -> None:
    """Every combination of input terms must fire a rule for every output."""
    for combo in itertools.product(*(v.labels for v in rb.inputs)):
        assignment = {v.name: label for v, label in zip(rb.inputs, combo)}
        covered: set[str] = set()
        for rule in rb.rules:
            if all(assignment[var] == label for var, label in rule.antecedents):
                covered.update(var for var, _ in rule.consequents)
        missing = [v.name for v in rb.outputs if v.name not in covered]
        if missing:
            desc = ", ".join(f"{k}={v}" for k, v in assignment.items())
            raise CoverageGap(f"no rule fires for ({desc}) on output(s) {', '.join(missing)}")


def fuzzify(v: LinguisticVariable, x: float) -> list[tuple[str, float]]:
    """Membership degree of ``x`` in every term of ``v``.

    Inputs outside the universe are clamped to it and a :class:`ClampWarning`
    is issued.
    """
    lo, hi = v.universe
    if x < lo or x > hi:
        warnings.warn(f"{v.name} = {x:g} outside [{lo:g}, {hi:g}], clamped", ClampWarning, stacklevel=2)
        x = min(max(x, lo), hi)
    return [(label, mf(x)) for label, mf in v.terms]


# A piecewise-linear membership function is a pair (xs, ys) of breakpoints,
# xs non-decreasing, linear between consecutive breakpoints.

def clipped_triangle(mf: TriangularMF, level: float) -> tuple[np.ndarray, np.ndarray]:
    a, b, c = mf.as_tuple()
    x_up = a + level * (b - a)
    x_down = c - level * (c - b)
    ys = [0.0 if b > a else level, level, level, 0.0 if c > b else level]
    return np.array([a, x_up, x_down, c]), np.array(ys)


def _segments(shape):
    xs, ys = shape
    for i in range(len(xs) - 1):
        if xs[i + 1] > xs[i]:
            yield xs[i], ys[i], xs[i + 1], ys[i + 1]


def _interp(shape, x: np.ndarray) -> np.ndarray:
    xs, ys = shape
    out = np.zeros_like(x)
    for x0, y0, x1, y1 in _segments(shape):
        inside = (x >= x0) & (x <= x1)
        out = np.where(inside, np.maximum(out, y0 + (y1 - y0) * (x - x0) / (x1 - x0)), out)
    return out


def aggregate_max(shapes: Sequence[tuple[np.ndarray, np.ndarray]],
                  universe: tuple[float, float]) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise maximum of piecewise-linear shapes as one piecewise-linear function.

    Breakpoints are every shape vertex plus every crossing of two segments,
    so the maximum is linear between consecutive breakpoints.
    """
    lo, hi = universe
    points = {lo, hi}
    for xs, _ in shapes:
        points.update(float(x) for x in xs)
    segs = [s for shape in shapes for s in _segments(shape)]
    for (a0, a1, a2, a3), (b0, b1, b2, b3) in itertools.combinations(segs, 2):
        left, right = max(a0, b0), min(a2, b2)
        if left >= right:
            continue
        sa = (a3 - a1) / (a2 - a0)
        sb = (b3 - b1) / (b2 - b0)
        if sa == sb:
            continue
        # a1 + sa (x - a0) = b1 + sb (x - b0)
        x = (b1 - a1 + sa * a0 - sb * b0) / (sa - sb)
        if left < x < right:
            points.add(float(x))
    xs = np.array(sorted(p for p in points if lo <= p <= hi))
    ys = np.zeros_like(xs)
    for shape in shapes:
        ys = np.maximum(ys, _interp(shape, xs))
    # vertical edges (shoulders) appear as a repeated x with both heights
    out_x, out_y = [], []
    for x, y in zip(xs, ys):
        left_val = max((_limit(shape, x, -1) for shape in shapes), default=0.0)
        right_val = max((_limit(shape, x, +1) for shape in shapes), default=0.0)
        if left_val != right_val:
            out_x += [x, x]
            out_y += [left_val, right_val]
        else:
            out_x.append(x)
            out_y.append(y)
    return np.array(out_x), np.array(out_y)


def _limit(shape, x: float, side: int) -> float:
    """One-sided limit of a shape at x (side -1 from the left, +1 from the right)."""
    best = 0.0
    for x0, y0, x1, y1 in _segments(shape):
        if side < 0 and x0 < x <= x1:
            best = max(best, y0 + (y1 - y0) * (x - x0) / (x1 - x0))
        if side > 0 and x0 <= x < x1:
            best = max(best, y0 + (y1 - y0) * (x - x0) / (x1 - x0))
    return best


def defuzzify_centroid(xs, ys) -> float:
    """Exact centroid of a piecewise-linear membership function.

    Integrals are taken segment by segment in closed form, so there is no
    sampling error.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    dx = np.diff(xs)
    y0, y1 = ys[:-1], ys[1:]
    x0, x1 = xs[:-1], xs[1:]
    area = np.sum(dx * (y0 + y1) / 2.0)
    if not area > 0:
        raise ZeroArea("aggregate membership has zero area")
    moment = np.sum(dx * (x0 * (2.0 * y0 + y1) + x1 * (y0 + 2.0 * y1)) / 6.0)
    return float(moment / area)


def activations(rb: RuleBase, inputs: Mapping[str, float]) -> list[float]:
    """Firing strength of each rule (min over its antecedents)."""
    degrees = {v.name: dict(fuzzify(v, float(inputs[v.name]))) for v in rb.inputs}
    return [min(degrees[var][label] for var, label in rule.antecedents) for rule in rb.rules]


def infer(rb: RuleBase, inputs: Mapping[str, float] | Sequence[float]) -> dict[str, float]:
    """Crisp outputs for one set of crisp inputs.

    ``inputs`` is a mapping by variable name or a sequence in the rule base's
    input order.
    """
    if not isinstance(inputs, Mapping):
        inputs = dict(zip((v.name for v in rb.inputs), inputs))
    strengths = activations(rb, inputs)
    result = {}
    for out in rb.outputs:
        level: dict[str, float] = {}
        for rule, w in zip(rb.rules, strengths):
            for var, label in rule.consequents:
                if var == out.name and w > level.get(label, 0.0):
                    level[label] = w
        if not level:
            raise NoRuleFired(f"no rule fired for output {out.name!r} at {dict(inputs)}")
        shapes = [clipped_triangle(out.term(label), w) for label, w in level.items()]
        xs, ys = aggregate_max(shapes, out.universe)
        result[out.name] = defuzzify_centroid(xs, ys)
    return result


def generate_crisp_dataset(rb: RuleBase, grid: Iterable[Sequence[float]]) -> list[tuple[tuple[float, ...], dict[str, float]]]:
    """Run :func:`infer` over each input tuple, keeping input order."""
    return [(tuple(float(x) for x in row), infer(rb, row)) for row in grid]


# --- rule base files -------------------------------------------------------

def _parse_variable(obj) -> LinguisticVariable:
    try:
        name = obj["name"]
        universe = tuple(float(u) for u in obj["universe"])
        if len(universe) != 2:
            raise ParseError(f"{name}: universe needs two bounds")
        raw_terms = obj.get("terms")
        if raw_terms is None:
            terms = default_terms(universe)
        else:
            terms = tuple((t["label"], TriangularMF(*(float(p) for p in t["mf"]))) for t in raw_terms)
        return LinguisticVariable(name, universe, terms, obj.get("unit", ""))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed variable entry: {exc}") from exc


def rulebase_from_dict(doc: dict) -> RuleBase:
    try:
        variables = doc["variables"]
        inputs = tuple(_parse_variable(v) for v in variables if v.get("role", "input") == "input")
        outputs = tuple(_parse_variable(v) for v in variables if v.get("role") == "output")
        rules = tuple(
            FuzzyRule(tuple(r["if"].items()), tuple(r["then"].items())) for r in doc["rules"]
        )
    except (KeyError, TypeError, AttributeError) as exc:
        raise ParseError(f"malformed rule base: {exc}") from exc
    if not inputs or not outputs:
        raise ParseError("rule base needs at least one input and one output variable")
    return RuleBase(inputs, outputs, rules)


def rulebase_to_dict(rb: RuleBase) -> dict:
    def var(v: LinguisticVariable, role: str) -> dict:
        return {
            "name": v.name,
            "role": role,
            "unit": v.unit,
            "universe": list(v.universe),
            "terms": [{"label": label, "mf": list(mf.as_tuple())} for label, mf in v.terms],
        }

    return {
        "variables": [var(v, "input") for v in rb.inputs] + [var(v, "output") for v in rb.outputs],
        "rules": [{"if": dict(r.antecedents), "then": dict(r.consequents)} for r in rb.rules],
    }


def load_rulebase(path) -> RuleBase:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return rulebase_from_dict(doc)


def save_rulebase(rb: RuleBase, path) -> None:
    """Write a rule base as JSON, one variable and one rule per line."""
    doc = rulebase_to_dict(rb)
    lines = ["{", '  "variables": [']
    lines.append(",\n".join("    " + json.dumps(v) for v in doc["variables"]))
    lines += ["  ],", '  "rules": [']
    lines.append(",\n".join("    " + json.dumps(r) for r in doc["rules"]))
    lines += ["  ]", "}"]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
