"""Seed-deterministic NSGA-II with brute-force Pareto and hypervolume oracles.

All stochastic draws come from one ``numpy.random.Generator`` backed by
PCG64 and seeded from :class:`NsgaConfig`. Per offspring pair the draw order
is: two binary tournaments (two integer draws each), the crossover gate and
per-gene SBX draws, then polynomial mutation of child 1 and child 2 (gate
draw, and spread draw when the gate opens, per gene). Pairs are produced in
population order.
"""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import BadReference, DimensionMismatch, DomainError, EmptyPopulation, GridTooLarge

GENE_DEDUP_TOL = 1e-9
MAX_GRID_POINTS = 10**7


class Sense(enum.Enum):
    MAXIMIZE = "max"
    MINIMIZE = "min"


def _signs(sense: Sequence[Sense], n_obj: int) -> np.ndarray:
    if len(sense) != n_obj:
        raise DimensionMismatch(f"{len(sense)} senses for {n_obj} objectives")
    return np.array([-1.0 if s is Sense.MAXIMIZE else 1.0 for s in sense])


def _as_minimization(objectives, sense: Sequence[Sense]) -> np.ndarray:
    f = np.atleast_2d(np.asarray(objectives, dtype=float))
    return f * _signs(sense, f.shape[1])


@dataclass
class Individual:
    genes: np.ndarray
    objectives: np.ndarray
    rank: int = -1
    crowding: float = 0.0


@dataclass(frozen=True)
class NsgaConfig:
    population_size: int = 100
    generations: int = 100
    crossover_probability: float = 0.9
    mutation_probability_per_gene: float | None = None  # None -> 1 / n_vars
    sbx_eta: float = 15.0
    mutation_eta: float = 20.0
    seed: int = 0

    def __post_init__(self):
        if self.population_size <= 0 or self.population_size % 2:
            raise DomainError("population_size must be a positive even integer")
        if self.generations <= 0:
            raise DomainError("generations must be positive")
        if not 0.0 <= self.crossover_probability <= 1.0:
            raise DomainError("crossover_probability must lie in [0, 1]")
        pm = self.mutation_probability_per_gene
        if pm is not None and not 0.0 <= pm <= 1.0:
            raise DomainError("mutation_probability_per_gene must lie in [0, 1]")
        if self.sbx_eta <= 0 or self.mutation_eta <= 0:
            raise DomainError("distribution indices must be positive")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")


@dataclass
class ParetoArchive:
    """Rank-0 members, deduplicated on genes and sorted lexicographically by genes."""

    members: list[Individual] = field(default_factory=list)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @property
    def genes(self) -> np.ndarray:
        if not self.members:
            return np.empty((0, 0))
        return np.array([m.genes for m in self.members])

    @property
    def objectives(self) -> np.ndarray:
        if not self.members:
            return np.empty((0, 0))
        return np.array([m.objectives for m in self.members])

    def to_csv(self, extra_columns: dict[str, Sequence[float]] | None = None) -> str:
        """Serialize as CSV with 6 decimals; header gene_0..gene_k,obj_0..obj_m."""
        buf = io.StringIO()
        if not self.members:
            buf.write("\n")
            return buf.getvalue()
        n_genes = len(self.members[0].genes)
        n_obj = len(self.members[0].objectives)
        header = [f"gene_{i}" for i in range(n_genes)] + [f"obj_{i}" for i in range(n_obj)]
        extra_columns = extra_columns or {}
        header += list(extra_columns)
        buf.write(",".join(header) + "\n")
        for row, m in enumerate(self.members):
            values = list(m.genes) + list(m.objectives) + [col[row] for col in extra_columns.values()]
            buf.write(",".join(_fmt6(v) for v in values) + "\n")
        return buf.getvalue()


def _fmt6(v: float) -> str:
    s = f"{v:.6f}"
    return "0.000000" if s == "-0.000000" else s


def dominates(a, b, sense: Sequence[Sense]) -> bool:
    """True iff ``a`` is no worse than ``b`` everywhere and strictly better somewhere."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise DimensionMismatch(f"cannot compare shapes {a.shape} and {b.shape}")
    s = _signs(sense, a.size)
    a, b = a * s, b * s
    return bool(np.all(a <= b) and np.any(a < b))


def _domination_matrix(f: np.ndarray) -> np.ndarray:
    """dom[i, j] is True when row i dominates row j (minimization)."""
    le = np.all(f[:, None, :] <= f[None, :, :], axis=2)
    lt = np.any(f[:, None, :] < f[None, :, :], axis=2)
    return le & lt


def fast_nondominated_sort(objectives, sense: Sequence[Sense]) -> list[list[int]]:
    """Partition row indices into fronts F0, F1, ...; indices ascending within a front."""
    objectives = [ind.objectives for ind in objectives] if _is_individuals(objectives) else objectives
    f = np.asarray(objectives, dtype=float)
    if f.size == 0:
        raise EmptyPopulation("cannot sort an empty population")
    f = _as_minimization(f, sense)
    dom = _domination_matrix(f)
    dominated_count = dom.sum(axis=0)
    fronts: list[list[int]] = []
    current = np.flatnonzero(dominated_count == 0)
    while current.size:
        fronts.append(current.tolist())
        dominated_count = dominated_count - dom[current].sum(axis=0)
        dominated_count[current] = -1
        current = np.flatnonzero(dominated_count == 0)
    return fronts


def _is_individuals(seq) -> bool:
    return isinstance(seq, (list, tuple)) and len(seq) > 0 and isinstance(seq[0], Individual)


def crowding_distance(objectives, sense: Sequence[Sense] | None = None) -> np.ndarray:
    """Crowding distance of each member of one front.

    Boundary members of each objective get +inf. An objective whose values
    are all equal contributes nothing, boundaries included. Sense does not
    change the distances; it is accepted for signature symmetry.
    """
    objectives = [ind.objectives for ind in objectives] if _is_individuals(objectives) else objectives
    f = np.atleast_2d(np.asarray(objectives, dtype=float))
    n, m = f.shape
    if n <= 2:
        return np.full(n, np.inf)
    dist = np.zeros(n)
    for k in range(m):
        order = np.argsort(f[:, k], kind="stable")
        values = f[order, k]
        span = values[-1] - values[0]
        if span <= 0:
            continue
        dist[order[0]] = np.inf
        dist[order[-1]] = np.inf
        dist[order[1:-1]] += (values[2:] - values[:-2]) / span
    return dist


def _better(i: int, j: int, rank: np.ndarray, crowd: np.ndarray) -> int:
    if rank[i] != rank[j]:
        return i if rank[i] < rank[j] else j
    if crowd[i] != crowd[j]:
        return i if crowd[i] > crowd[j] else j
    return i


def tournament_select(rank, crowding, rng: np.random.Generator) -> int:
    """Binary tournament; lower rank wins, then larger crowding, then the first draw."""
    rank = np.asarray(rank)
    crowding = np.asarray(crowding, dtype=float)
    i = int(rng.integers(len(rank)))
    j = int(rng.integers(len(rank)))
    return _better(i, j, rank, crowding)


def sbx_crossover(p1, p2, bounds, eta: float, rng: np.random.Generator,
                  probability: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Simulated binary crossover with children clamped to ``bounds``.

    One gate draw decides whether the pair recombines at all; when it does,
    one spread draw is made per gene. Identical genes are copied unchanged.
    """
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    bounds = np.asarray(bounds, dtype=float)
    if rng.random() > probability:
        return p1.copy(), p2.copy()
    u = rng.random(p1.size)
    beta = np.where(
        u <= 0.5,
        (2.0 * u) ** (1.0 / (eta + 1.0)),
        (1.0 / (2.0 * (1.0 - u))) ** (1.0 / (eta + 1.0)),
    )
    c1, c2 = sbx_children(p1, p2, beta)
    same = np.abs(p1 - p2) < 1e-14
    c1[same] = p1[same]
    c2[same] = p2[same]
    return np.clip(c1, bounds[:, 0], bounds[:, 1]), np.clip(c2, bounds[:, 0], bounds[:, 1])


def sbx_children(p1: np.ndarray, p2: np.ndarray, beta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unclamped SBX children for spread factors ``beta``."""
    c1 = 0.5 * ((1.0 + beta) * p1 + (1.0 - beta) * p2)
    c2 = 0.5 * ((1.0 - beta) * p1 + (1.0 + beta) * p2)
    return c1, c2


def polynomial_mutation(genes, bounds, eta: float, per_gene_prob: float,
                        rng: np.random.Generator) -> np.ndarray:
    genes = np.array(genes, dtype=float)
    bounds = np.asarray(bounds, dtype=float)
    lo, hi = bounds[:, 0], bounds[:, 1]
    for k in range(genes.size):
        if rng.random() >= per_gene_prob:
            continue
        u = rng.random()
        if u < 0.5:
            delta = (2.0 * u) ** (1.0 / (eta + 1.0)) - 1.0
        else:
            delta = 1.0 - (2.0 * (1.0 - u)) ** (1.0 / (eta + 1.0))
        genes[k] = min(max(genes[k] + delta * (hi[k] - lo[k]), lo[k]), hi[k])
    return genes


def _evaluate(problem: Callable, genes: np.ndarray) -> np.ndarray:
    return np.array([np.asarray(problem(g), dtype=float) for g in genes])


def _rank_and_crowd(f: np.ndarray, sense) -> tuple[list[list[int]], np.ndarray, np.ndarray]:
    fronts = fast_nondominated_sort(f, sense)
    rank = np.empty(len(f), dtype=int)
    crowd = np.empty(len(f))
    for r, front in enumerate(fronts):
        rank[front] = r
        crowd[front] = crowding_distance(f[front])
    return fronts, rank, crowd


def _environmental_selection(fronts, crowd, size: int) -> np.ndarray:
    chosen: list[int] = []
    for front in fronts:
        if len(chosen) + len(front) <= size:
            chosen.extend(front)
            if len(chosen) == size:
                break
            continue
        # cut front: crowding descending, ties by population index
        ordered = sorted(front, key=lambda i: (-crowd[i], i))
        chosen.extend(ordered[: size - len(chosen)])
        break
    return np.array(chosen, dtype=int)


def archive_from(genes: np.ndarray, objectives: np.ndarray, sense) -> ParetoArchive:
    """Non-dominated subset of a population, deduplicated on genes."""
    if len(genes) == 0:
        return ParetoArchive()
    f = _as_minimization(objectives, sense)
    dom = _domination_matrix(f)
    keep = np.flatnonzero(~dom.any(axis=0))
    return _dedup_sorted(genes[keep], objectives[keep])


def _dedup_sorted(genes: np.ndarray, objectives: np.ndarray) -> ParetoArchive:
    # after the lexicographic sort, duplicates sit next to each other
    order = np.lexsort(genes.T[::-1])
    members: list[Individual] = []
    for i in order:
        g = genes[i]
        if members and np.all(np.abs(members[-1].genes - g) <= GENE_DEDUP_TOL):
            continue
        members.append(Individual(g.copy(), objectives[i].copy(), rank=0, crowding=0.0))
    if members:
        crowd = crowding_distance(np.array([m.objectives for m in members]))
        for m, c in zip(members, crowd):
            m.crowding = float(c)
    return ParetoArchive(members)


def nsga2_run(problem: Callable[[np.ndarray], Sequence[float]], bounds, sense: Sequence[Sense],
              config: NsgaConfig = NsgaConfig(),
              callback: Callable[[int, np.ndarray, np.ndarray, np.ndarray], None] | None = None,
              ) -> ParetoArchive:
    """Run NSGA-II and return the final rank-0 set.

    ``callback(generation, genes, objectives, rank)`` is invoked after the
    initial population (generation 0) and after every environmental
    selection.
    """
    bounds = np.asarray(bounds, dtype=float)
    if bounds.ndim != 2 or bounds.shape[1] != 2 or not np.all(np.isfinite(bounds)):
        raise DomainError("bounds must be a finite (n_vars, 2) array")
    if np.any(bounds[:, 0] > bounds[:, 1]):
        raise DomainError("each lower bound must not exceed its upper bound")
    n_vars = bounds.shape[0]
    n = config.population_size
    pm = config.mutation_probability_per_gene
    if pm is None:
        pm = 1.0 / n_vars
    rng = np.random.Generator(np.random.PCG64(config.seed))

    lo, hi = bounds[:, 0], bounds[:, 1]
    genes = lo + rng.random((n, n_vars)) * (hi - lo)
    objs = _evaluate(problem, genes)
    _, rank, crowd = _rank_and_crowd(objs, sense)
    if callback:
        callback(0, genes, objs, rank)

    for gen in range(1, config.generations + 1):
        children = np.empty_like(genes)
        for k in range(0, n, 2):
            a = tournament_select(rank, crowd, rng)
            b = tournament_select(rank, crowd, rng)
            c1, c2 = sbx_crossover(genes[a], genes[b], bounds, config.sbx_eta, rng,
                                   config.crossover_probability)
            children[k] = polynomial_mutation(c1, bounds, config.mutation_eta, pm, rng)
            children[k + 1] = polynomial_mutation(c2, bounds, config.mutation_eta, pm, rng)
        child_objs = _evaluate(problem, children)

        merged_genes = np.vstack([genes, children])
        merged_objs = np.vstack([objs, child_objs])
        fronts, m_rank, m_crowd = _rank_and_crowd(merged_objs, sense)
        keep = _environmental_selection(fronts, m_crowd, n)
        genes, objs = merged_genes[keep], merged_objs[keep]
        rank, crowd = m_rank[keep], m_crowd[keep]
        if callback:
            callback(gen, genes, objs, rank)

    front0 = rank == 0
    return archive_from(genes[front0], objs[front0], sense)


def _grid_axis(low: float, high: float, step: float) -> np.ndarray:
    if step <= 0:
        raise DomainError("grid step must be positive")
    count = int(math.floor((high - low) / step + 1e-9)) + 1
    axis = low + step * np.arange(count)
    return np.minimum(axis, high)


def grid_points(bounds, steps) -> np.ndarray:
    bounds = np.asarray(bounds, dtype=float)
    steps = np.broadcast_to(np.asarray(steps, dtype=float), (bounds.shape[0],))
    axes = [_grid_axis(lo, hi, s) for (lo, hi), s in zip(bounds, steps)]
    total = math.prod(len(a) for a in axes)
    if total > MAX_GRID_POINTS:
        raise GridTooLarge(f"grid has {total} points, limit {MAX_GRID_POINTS}")
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([m.ravel() for m in mesh])


def nondominated_mask(objectives, sense: Sequence[Sense], chunk: int = 512) -> np.ndarray:
    """Exact pairwise non-dominance over all rows, evaluated in row blocks.

    Rows with identical objective vectors never dominate one another, so the
    comparison is run over the distinct vectors only.
    """
    f = _as_minimization(objectives, sense)
    uniq, inverse = np.unique(f, axis=0, return_inverse=True)
    keep = np.ones(len(uniq), dtype=bool)
    for start in range(0, len(uniq), chunk):
        block = uniq[start:start + chunk]
        le = np.ones((len(uniq), len(block)), dtype=bool)
        lt = np.zeros_like(le)
        for k in range(uniq.shape[1]):
            col, bcol = uniq[:, k, None], block[None, :, k]
            le &= col <= bcol
            lt |= col < bcol
        keep[start:start + chunk] = ~np.any(le & lt, axis=0)
    return keep[inverse.ravel()]


def brute_force_pareto(problem: Callable, bounds, sense: Sequence[Sense], grid_step) -> ParetoArchive:
    """Evaluate a full grid and return its exact non-dominated subset."""
    points = grid_points(bounds, grid_step)
    objs = _evaluate(problem, points)
    mask = nondominated_mask(objs, sense)
    return _dedup_sorted(points[mask], objs[mask])


def hypervolume_2d(archive, reference, sense: Sequence[Sense]) -> float:
    """Area dominated by the archive and bounded by ``reference``."""
    if isinstance(archive, ParetoArchive):
        points = archive.objectives
    else:
        points = np.asarray(archive, dtype=float)
    if points.size == 0:
        return 0.0
    points = np.atleast_2d(points)
    if points.shape[1] != 2:
        raise DimensionMismatch("hypervolume_2d needs exactly two objectives")
    f = _as_minimization(points, sense)
    ref = _as_minimization(np.asarray(reference, dtype=float)[None, :], sense)[0]
    if np.any(f > ref):
        raise BadReference(f"reference {tuple(reference)} is not dominated by every member")
    f = f[np.lexsort((f[:, 1], f[:, 0]))]
    area = 0.0
    best_y = ref[1]
    for x, y in f:
        if y < best_y:
            area += (ref[0] - x) * (best_y - y)
            best_y = y
    return float(area)


def knee_point(archive: ParetoArchive, sense: Sequence[Sense]) -> Individual:
    """Member maximizing the minimum min-max-normalized objective (higher is better)."""
    if not archive.members:
        raise EmptyPopulation("archive is empty")
    f = -_as_minimization(archive.objectives, sense)
    span = f.max(axis=0) - f.min(axis=0)
    norm = np.where(span > 0, (f - f.min(axis=0)) / np.where(span > 0, span, 1.0), 1.0)
    return archive.members[int(np.argmax(norm.min(axis=1)))]
