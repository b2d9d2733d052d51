"""
Distance profiles of radial model domains and radial profile functions
"""
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import gamma

from hardygap.core.exceptions import ParameterError
from hardygap.models.params import DomainKind, DomainSpec, IntervalMode, Location

ScalarFn = Callable[[np.ndarray], np.ndarray]


def sphere_area(dim: int) -> float:
    """|S^(N-1)| = 2 pi^(N/2) / Gamma(N/2)"""
    return 2.0 * math.pi ** (dim / 2.0) / gamma(dim / 2.0)


@dataclass(frozen=True)
class Branch:
    """One smooth piece of the distance function: r = anchor + orientation * delta"""
    name: str
    anchor: float
    orientation: int
    depth: float  # largest delta on this branch, inf for the exterior

    def radius(self, delta):
        return self.anchor + self.orientation * np.asarray(delta, dtype=float)

    def distance(self, r):
        return self.orientation * (np.asarray(r, dtype=float) - self.anchor)


class DistanceProfile:
    """delta_Omega as a function of the radius for one DomainSpec"""

    def __init__(self, spec: DomainSpec, dim: int = 2):
        self.spec = spec
        self.dim = dim
        self.branches = self._branches(spec)

    @staticmethod
    def _branches(spec: DomainSpec) -> List[Branch]:
        if spec.kind == DomainKind.INTERVAL:
            if spec.interval_mode == IntervalMode.HALF_LINE:
                return [Branch("lower", 0.0, 1, spec.outer)]
            half = spec.outer / 2.0
            return [Branch("lower", 0.0, 1, half), Branch("upper", spec.outer, -1, half)]
        if spec.kind == DomainKind.BALL:
            return [Branch("outer", spec.outer, -1, spec.outer)]
        if spec.kind == DomainKind.ANNULUS:
            half = (spec.outer - spec.inner) / 2.0
            return [Branch("inner", spec.inner, 1, half), Branch("outer", spec.outer, -1, half)]
        return [Branch("inner", spec.inner, 1, math.inf)]

    @property
    def kink_radii(self) -> List[float]:
        if len(self.branches) == 2:
            return [self.branches[0].radius(self.branches[0].depth).item()]
        return []

    @property
    def domain(self) -> Tuple[float, float]:
        """Open radius interval of the domain"""
        spec = self.spec
        if spec.kind == DomainKind.INTERVAL:
            return 0.0, spec.outer
        if spec.kind == DomainKind.BALL:
            return 0.0, spec.outer
        if spec.kind == DomainKind.ANNULUS:
            return spec.inner, spec.outer
        return spec.inner, math.inf

    def delta(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        values = [b.distance(r) for b in self.branches]
        return np.minimum.reduce(values) if len(values) > 1 else values[0]

    def ddelta(self, r) -> np.ndarray:
        """delta'(r), +-1 away from kinks"""
        r = np.asarray(r, dtype=float)
        if len(self.branches) == 1:
            return np.full_like(r, float(self.branches[0].orientation))
        kink = self.kink_radii[0]
        return np.where(r < kink, float(self.branches[0].orientation), float(self.branches[1].orientation))

    def branch_at(self, r: float) -> Branch:
        if len(self.branches) == 1:
            return self.branches[0]
        return self.branches[0] if r < self.kink_radii[0] else self.branches[1]

    def is_kink(self, r: float, rel_tol: float = 1e-14) -> bool:
        return any(abs(r - k) <= rel_tol * max(1.0, abs(k)) for k in self.kink_radii)

    def weight(self, r) -> np.ndarray:
        """Radial measure density r^(N-1), or 1 on the interval"""
        r = np.asarray(r, dtype=float)
        if not self.spec.uses_radial_weight:
            return np.ones_like(r)
        return r ** (self.dim - 1)

    def log_weight_derivative(self, r) -> np.ndarray:
        """w'/w"""
        r = np.asarray(r, dtype=float)
        if not self.spec.uses_radial_weight:
            return np.zeros_like(r)
        return (self.dim - 1) / r

    def measure_factor(self) -> float:
        """Angular factor turning radial integrals into volume integrals"""
        return sphere_area(self.dim) if self.spec.uses_radial_weight else 1.0

    def singular_location(self) -> Location:
        return Location.INFINITY if self.spec.is_exterior else Location.BOUNDARY


class RadialFn:
    """Radial profile r -> (f, f', f'') on an open radius interval

    Analytic profiles carry exact derivatives; sampled profiles are
    represented by a cubic spline and marked non-analytic, so operators fall
    back to finite differences on their values.
    """

    def __init__(self, value: ScalarFn, domain: Tuple[float, float],
                 derivative: Optional[ScalarFn] = None,
                 second_derivative: Optional[ScalarFn] = None):
        self._value = value
        self._derivative = derivative
        self._second = second_derivative
        self.domain = domain

    @property
    def analytic(self) -> bool:
        return self._derivative is not None and self._second is not None

    def __call__(self, r):
        return self._value(np.asarray(r, dtype=float))

    def derivative(self, r):
        if self._derivative is None:
            raise ParameterError("profile has no analytic derivative")
        return self._derivative(np.asarray(r, dtype=float))

    def second_derivative(self, r):
        if self._second is None:
            raise ParameterError("profile has no analytic second derivative")
        return self._second(np.asarray(r, dtype=float))

    def evaluate(self, r) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self(r), self.derivative(r), self.second_derivative(r)

    @classmethod
    def constant(cls, value: float, domain: Tuple[float, float]) -> "RadialFn":
        return cls(lambda r: np.full_like(r, value), domain,
                   lambda r: np.zeros_like(r), lambda r: np.zeros_like(r))

    @classmethod
    def power(cls, exponent: float, domain: Tuple[float, float], scale: float = 1.0) -> "RadialFn":
        """scale * r^exponent"""
        e = exponent
        return cls(lambda r: scale * r ** e, domain,
                   lambda r: scale * e * r ** (e - 1.0),
                   lambda r: scale * e * (e - 1.0) * r ** (e - 2.0))

    @classmethod
    def distance_power(cls, profile: DistanceProfile, exponent: float,
                       domain: Optional[Tuple[float, float]] = None) -> "RadialFn":
        """delta(r)^exponent on one smooth branch"""
        return cls.distance_combination(profile, [(1.0, exponent)], domain)

    @classmethod
    def distance_combination(cls, profile: DistanceProfile, terms: Sequence[Tuple[float, float]],
                             domain: Optional[Tuple[float, float]] = None) -> "RadialFn":
        """sum_k a_k delta(r)^(e_k); delta'' = 0 away from kinks"""
        terms = [(float(a), float(e)) for a, e in terms]

        def value(r):
            d = profile.delta(r)
            return sum(a * d ** e for a, e in terms)

        def first(r):
            d = profile.delta(r)
            return profile.ddelta(r) * sum(a * e * d ** (e - 1.0) for a, e in terms)

        def second(r):
            d = profile.delta(r)
            return sum(a * e * (e - 1.0) * d ** (e - 2.0) for a, e in terms)

        return cls(value, domain or profile.domain, first, second)

    @classmethod
    def radius_combination(cls, terms: Sequence[Tuple[float, float]], domain: Tuple[float, float]) -> "RadialFn":
        """sum_k a_k r^(e_k)"""
        terms = [(float(a), float(e)) for a, e in terms]
        return cls(lambda r: sum(a * r ** e for a, e in terms), domain,
                   lambda r: sum(a * e * r ** (e - 1.0) for a, e in terms),
                   lambda r: sum(a * e * (e - 1.0) * r ** (e - 2.0) for a, e in terms))

    @classmethod
    def from_samples(cls, radii: np.ndarray, values: np.ndarray) -> "RadialFn":
        """Grid-sampled profile; derivatives come from finite differences"""
        spline = CubicSpline(np.asarray(radii, dtype=float), np.asarray(values, dtype=float))
        return cls(spline, (float(radii[0]), float(radii[-1])))

    @classmethod
    def from_callable(cls, value: ScalarFn, domain: Tuple[float, float]) -> "RadialFn":
        return cls(value, domain)
