"""Rule-of-mixtures property models for Al2219 reinforced with B4C and graphite.

Weight percent is used directly as the mixing fraction, and all percent
fields are stored on the 0-100 scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, NegativeFraction, SumViolation

SUM_TOL = 1e-9


@dataclass(frozen=True)
class Composition:
    al_wt: float
    b4c_wt: float
    gr_wt: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.al_wt, self.b4c_wt, self.gr_wt)


def validate_composition(al: float, b4c: float, gr: float) -> Composition:
    """Build a :class:`Composition`, checking sign and the 100 wt% total."""
    for name, value in (("al", al), ("b4c", b4c), ("gr", gr)):
        if not np.isfinite(value):
            raise DomainError(f"{name} must be finite, got {value}")
        if value < 0:
            raise NegativeFraction(f"{name} = {value} is negative")
    total = al + b4c + gr
    if abs(total - 100.0) > SUM_TOL:
        raise SumViolation(f"al + b4c + gr = {total:g}, expected 100")
    return Composition(float(al), float(b4c), float(gr))


@dataclass(frozen=True)
class Interval:
    low: float
    high: float

    def __post_init__(self):
        if not (np.isfinite(self.low) and np.isfinite(self.high)):
            raise DomainError(f"interval bounds must be finite: [{self.low}, {self.high}]")
        if self.low > self.high:
            raise DomainError(f"interval lower bound {self.low} exceeds upper {self.high}")

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.low - tol <= x <= self.high + tol


@dataclass(frozen=True)
class CompositionBounds:
    al: Interval = field(default_factory=lambda: Interval(75.0, 100.0))
    b4c: Interval = field(default_factory=lambda: Interval(0.0, 15.0))
    gr: Interval = field(default_factory=lambda: Interval(0.0, 10.0))

    def gene_bounds(self) -> np.ndarray:
        """Bounds of the (b4c, gr) genome as a (2, 2) array of [low, high] rows.

        Al is derived as 100 - b4c - gr, so the box must keep it inside
        ``self.al`` everywhere; otherwise a DomainError is raised.
        """
        al_min = 100.0 - self.b4c.high - self.gr.high
        al_max = 100.0 - self.b4c.low - self.gr.low
        if not (self.al.contains(al_min, 1e-9) and self.al.contains(al_max, 1e-9)):
            raise DomainError(
                f"b4c/gr bounds give al in [{al_min:g}, {al_max:g}], "
                f"outside al bounds [{self.al.low:g}, {self.al.high:g}]"
            )
        return np.array([[self.b4c.low, self.b4c.high], [self.gr.low, self.gr.high]])


@dataclass(frozen=True)
class PhaseConstants:
    """Per-phase moduli (GPa) and tensile strengths (MPa).

    ``sigma_m`` defaults to 0 because the reported optimum (86.73 MPa at
    15 wt% B4C, 4.07 wt% Gr) carries no matrix strength term.
    """

    e_m: float = 80.0
    e_b: float = 470.0
    e_g: float = 15.0
    sigma_m: float = 0.0
    sigma_b: float = 569.0
    sigma_g: float = 34.0

    def __post_init__(self):
        for name in ("e_m", "e_b", "e_g"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be > 0")
        for name in ("sigma_m", "sigma_b", "sigma_g"):
            if not getattr(self, name) >= 0:
                raise DomainError(f"{name} must be >= 0")


@dataclass(frozen=True)
class MaterialProperties:
    elastic_modulus: float  # GPa
    uts: float  # MPa

    def as_tuple(self) -> tuple[float, float]:
        return (self.elastic_modulus, self.uts)


def mixture_elastic_modulus(c: Composition, k: PhaseConstants = PhaseConstants()) -> float:
    return (c.al_wt * k.e_m + c.b4c_wt * k.e_b + c.gr_wt * k.e_g) / 100.0


def mixture_uts(c: Composition, k: PhaseConstants = PhaseConstants()) -> float:
    return (c.al_wt * k.sigma_m + c.b4c_wt * k.sigma_b + c.gr_wt * k.sigma_g) / 100.0


def evaluate_objectives(c: Composition, k: PhaseConstants = PhaseConstants()) -> MaterialProperties:
    """Objective vector (E, sigma), both to be maximized."""
    return MaterialProperties(mixture_elastic_modulus(c, k), mixture_uts(c, k))


def composition_from_genes(genes) -> Composition:
    """Map a (b4c, gr) genome to a composition with Al as the balance."""
    b4c, gr = float(genes[0]), float(genes[1])
    return Composition(100.0 - b4c - gr, b4c, gr)


def composition_problem(k: PhaseConstants = PhaseConstants()) -> Callable[[np.ndarray], tuple[float, float]]:
    """Objective function over the (b4c, gr) genome for the NSGA-II engine."""

    def objectives(genes: np.ndarray) -> tuple[float, float]:
        return evaluate_objectives(composition_from_genes(genes), k).as_tuple()

    return objectives
